#ifndef CZQ_ERROR_HPP
#define CZQ_ERROR_HPP

#include <stdexcept>
#include <string>

namespace czq {

enum class Errc {
  domain,
  convergence,
  pole,
  singular_form,
  inadmissible,
  branch,
  unsupported_power,
  stencil,
  geometry,
  budget,
  solver,
  proximity,
  config,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::domain: return "domain";
    case Errc::convergence: return "convergence";
    case Errc::pole: return "pole";
    case Errc::singular_form: return "singular_form";
    case Errc::inadmissible: return "inadmissible";
    case Errc::branch: return "branch";
    case Errc::unsupported_power: return "unsupported_power";
    case Errc::stencil: return "stencil";
    case Errc::geometry: return "geometry";
    case Errc::budget: return "budget";
    case Errc::solver: return "solver";
    case Errc::proximity: return "proximity";
    case Errc::config: return "config";
  }
  return "unknown";
}

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + " error: " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace czq

#endif
