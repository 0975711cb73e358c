// czq: zeta self-tests, convergence studies, the half-space solve and the Wigner oracle.
// Exit codes: 0 pass, 1 check failure or runtime error, 2 usage or config error.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "czq/cli/config.hpp"
#include "czq/cli/experiments.hpp"

namespace {

using namespace czq;
using namespace czq::cli;

constexpr int kPass = 0, kCheckFailure = 1, kUsage = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string side_path(const std::string& output, const std::string& suffix) {
  std::filesystem::path p(output);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + "." + suffix + ".csv")).string();
}

void write_outcome(const Outcome& out, const std::string& path) {
  if (path == "-") {
    out.table.write(std::cout);
    return;
  }
  out.table.write(path);
  for (const auto& [suffix, table] : out.side_tables) table.write(side_path(path, suffix));
}

void report_failures(const ResultTable& t) {
  for (const auto& r : t.rows())
    if (r.check == Check::fail)
      std::cerr << "check failed: " << t.experiment() << " " << r.id << " [" << format_params(r.params)
                << "] abs_err=" << format_double(r.abs_error()) << " rel_err=" << format_double(r.rel_error()) << "\n";
}

template <class Read, class Run>
int run_experiment(const std::string& path, const std::string& output, bool deterministic, bool check, Read read,
                   Run run) {
  Config config;
  decltype(read(config)) typed;
  try {
    config = Config::load(path);
    if (deterministic) config.set("deterministic", "true");
    if (check) config.set("check.enabled", "true");
    if (!output.empty()) config.set("output.path", output);
    typed = read(config);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const Outcome out = run(typed, config);
  write_outcome(out, typed.common.output);
  report_failures(out.table);
  return out.table.passed() ? kPass : kCheckFailure;
}

std::array<cplx, 3> parse_form(const std::string& text) {
  const auto parts = czq::cli::detail::split_list(text, ",");
  if (parts.size() != 3) throw Error(Errc::config, "--form expects E,F,G");
  return {parse_complex(parts[0], "--form E"), parse_complex(parts[1], "--form F"),
          parse_complex(parts[2], "--form G")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeta-corrected quadrature on complexified surfaces"};
  app.require_subcommand(1);

  std::string config_path, output;
  bool deterministic = false, check = false;
  auto add_experiment = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "INI-style config file with dotted keys")->required();
    sub->add_option("--output", output, "CSV output path ('-' for standard output); overrides output.path");
    sub->add_flag("--deterministic", deterministic, "single thread and zero runtime column");
    sub->add_flag("--check", check, "fail on slope or error bands (always on for zeta-selftest)");
    return sub;
  };
  CLI::App* selftest = add_experiment("zeta-selftest", "Epstein zeta identities and the Wigner oracle");
  CLI::App* converge = add_experiment("converge", "Layer-potential convergence at one target");
  CLI::App* solve = add_experiment("solve", "Half-space Dirichlet solve on a complexified surface");

  CLI::App* wigner = app.add_subcommand("wigner", "Compare W_A^(N)(s) with Z_A(s)");
  std::string form_text, s_text;
  int n = 32;
  wigner->add_option("--form", form_text, "E,F,G (complex entries such as 1+0.5i)")->required();
  wigner->add_option("--s", s_text, "re,im or a complex number")->required();
  wigner->add_option("--N", n, "box half-width")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*selftest)
      return run_experiment(config_path, output, deterministic, check, read_zeta_selftest, run_zeta_selftest);
    if (*converge)
      return run_experiment(config_path, output, deterministic, check, read_convergence, run_convergence);
    if (*solve) return run_experiment(config_path, output, deterministic, check, read_solve, run_halfspace_solve);

    Config config;
    cplx s;
    ComplexQuadraticForm form;
    try {
      const auto e = parse_form(form_text);
      const auto parts = czq::cli::detail::split_list(s_text, ",");
      s = parts.size() == 2 ? cplx(parse_double(parts[0], "--s"), parse_double(parts[1], "--s"))
                            : parse_complex(s_text, "--s");
      if (!(s.real() > 0.0 && s.real() < 1.0)) throw Error(Errc::config, "--s needs 0 < Re(s) < 1");
      form = validate_admissible(e[0], e[1], e[2]);
      config.set("form", form_text);
      config.set("s", s_text);
      config.set("N", std::to_string(n));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    write_outcome(run_wigner(form, s, n, config), "-");
    return kPass;
  } catch (const ConfigError& e) {
    std::cerr << "czq: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "czq: " << e.what() << "\n";
    return kCheckFailure;
  }
}
