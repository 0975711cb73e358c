#ifndef CZQ_CLI_RESULTS_HPP
#define CZQ_CLI_RESULTS_HPP

// Result rows and their CSV form: one JSON comment line, then a header and the rows.

#include <cmath>
#include <complex>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "czq/cli/config.hpp"

namespace czq::cli {

using Params = std::vector<std::pair<std::string, std::string>>;

enum class Check { none, pass, fail };

struct ResultRow {
  std::string id;
  Params params;
  cplx value = 0.0;
  cplx reference = 0.0;
  double runtime = 0.0;
  Check check = Check::none;

  double abs_error() const { return std::abs(value - reference); }
  double rel_error() const {
    const double r = std::abs(reference);
    return r == 0.0 ? abs_error() : abs_error() / r;
  }
};

inline std::string format_params(const Params& p) {
  std::string out;
  for (std::size_t k = 0; k < p.size(); ++k) out += (k ? ";" : "") + p[k].first + "=" + p[k].second;
  return out;
}

class ResultTable {
 public:
  ResultTable(std::string experiment, const Config& config, bool deterministic)
      : experiment_(std::move(experiment)), deterministic_(deterministic) {
    header_["experiment"] = experiment_;
    header_["config_hash"] = config.hash();
    header_["config"] = config.result_keys();
  }

  void add(ResultRow row) {
    if (deterministic_) row.runtime = 0.0;
    rows_.push_back(std::move(row));
  }
  const std::vector<ResultRow>& rows() const { return rows_; }
  const std::string& experiment() const { return experiment_; }
  nlohmann::json& header() { return header_; }

  bool passed() const {
    for (const auto& r : rows_)
      if (r.check == Check::fail) return false;
    return true;
  }

  void write(std::ostream& os) const {
    os << "# " << header_.dump() << "\n";
    os << "experiment,id,params,value_re,value_im,ref_re,ref_im,abs_err,rel_err,runtime_s,check\n";
    for (const auto& r : rows_) {
      static const char* check[] = {"", "pass", "fail"};
      os << experiment_ << ',' << r.id << ",\"" << format_params(r.params) << "\"," << format_double(r.value.real())
         << ',' << format_double(r.value.imag()) << ',' << format_double(r.reference.real()) << ','
         << format_double(r.reference.imag()) << ',' << format_double(r.abs_error()) << ','
         << format_double(r.rel_error()) << ',' << format_double(r.runtime) << ','
         << check[static_cast<int>(r.check)] << '\n';
    }
  }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error(Errc::config, "cannot write output file '" + path + "'");
    write(out);
  }

 private:
  std::string experiment_;
  bool deterministic_;
  nlohmann::json header_;
  std::vector<ResultRow> rows_;
};

}  // namespace czq::cli

#endif
