// Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion, with indented
// detail lines, and exits nonzero when any selected criterion fails.
// Usage: acceptance [criterion...]

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "czq/cli/experiments.hpp"
#include "czq/epstein.hpp"
#include "czq/quadrature.hpp"
#include "oracles.hpp"
#include "test_forms.hpp"

namespace {

using czq::cplx;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("info " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1. Z_I(s) = 4 zeta(s) beta(s).
Verdict identity() {
  Verdict v;
  const auto t0 = Clock::now();
  const auto unit = czq::validate_admissible(1.0, 0.0, 1.0);
  for (double s : {0.25, 0.5, 2.0, 3.0}) {
    const cplx z = czq::epstein_zeta(unit, s).value;
    const double ref = 4.0 * oracle::riemann_zeta(s) * oracle::dirichlet_beta(s);
    v.require(rel(z, ref) <= 1e-10, fmt("s=%g rel err %.2e <= 1e-10", s, rel(z, ref)));
  }
  const double t = elapsed(t0);
  v.require(t < 1.0, fmt("runtime %.3f s < 1 s", t));
  return v;
}

// 2. Lambda_A(s) = det(A)^{-1/2} Lambda_{A^-1}(1 - s).
Verdict functional_equation() {
  Verdict v;
  const auto t0 = Clock::now();
  std::vector<czq::ComplexQuadraticForm> forms{testforms::bump(), testforms::cylinder()};
  for (const auto& a : testforms::random_forms(18, 2024)) forms.push_back(a);
  double worst = 0.0;
  for (const auto& a : forms) {
    const auto inv = a.inverse_entries();
    const auto b = czq::validate_admissible(inv[0], inv[1], inv[2]);
    for (cplx s : {cplx(0.3, 0.2), cplx(0.5), cplx(0.75, -0.4), cplx(2.5, 1.0)}) {
      const cplx lhs = czq::completed_zeta(a, s).value;
      const cplx rhs = czq::completed_zeta(b, 1.0 - s).value / a.sqrt_det();
      worst = std::max(worst, rel(lhs, rhs));
    }
  }
  v.require(worst <= 1e-10, fmt("20 forms x 4 s, worst rel err %.2e <= 1e-10", worst));
  const double t = elapsed(t0);
  v.require(t < 10.0, fmt("runtime %.3f s < 10 s", t));
  return v;
}

// 3. Z_A(0) = -1 and (s - 1) Z_A(s) -> pi / sqrt(det A).
Verdict special_values() {
  Verdict v;
  double worst0 = 0.0, worst_res = 0.0;
  for (const auto& a : testforms::random_forms(5, 77)) {
    worst0 = std::max(worst0, std::abs(czq::epstein_zeta(a, 0.0).value + 1.0));
    // Symmetric differences in delta, then one Richardson step.
    auto sym = [&](double d) {
      return 0.5 * d * (czq::epstein_zeta(a, 1.0 + d).value - czq::epstein_zeta(a, 1.0 - d).value);
    };
    const cplx res = (4.0 * sym(5e-4) - sym(1e-3)) / 3.0;
    worst_res = std::max(worst_res, rel(res, std::numbers::pi / a.sqrt_det()));
  }
  v.require(worst0 <= 1e-12, fmt("|Z_A(0) + 1| worst %.2e <= 1e-12", worst0));
  v.require(worst_res <= 1e-8, fmt("residue worst rel err %.2e <= 1e-8", worst_res));
  return v;
}

// 4. Wigner limit W_A^(N)(s) against Z_A(s).
Verdict wigner() {
  Verdict v;
  const auto t0 = Clock::now();
  const std::pair<const char*, czq::ComplexQuadraticForm> forms[] = {{"bump", testforms::bump()},
                                                                     {"cylinder", testforms::cylinder()}};
  for (const auto& [name, a] : forms) {
    for (double s : {0.3, 0.5, 0.7}) {
      const cplx z = czq::epstein_zeta(a, s).value;
      double prev = INFINITY;
      bool decreasing = true;
      std::string trail;
      double last = 0.0, corrected = 0.0;
      for (int n : {8, 16, 32, 64}) {
        const cplx w = czq::wigner_limit_oracle(a, s, n);
        last = std::abs(w - z);
        decreasing = decreasing && last < prev;
        prev = last;
        trail += fmt(" %.2e", last);
        corrected = std::abs(w - czq::wigner_boundary_estimate(a, s, n) - z);
      }
      v.require(decreasing && last <= 1e-3,
                fmt("%s s=%.1f |W-Z| over N=8..64:%s (decreasing=%d, bound 1e-3)", name, s, trail.c_str(), decreasing));
      v.note(fmt("%s s=%.1f boundary-corrected |W-Z| at N=64: %.2e", name, s, corrected));
    }
  }
  const double t = elapsed(t0);
  v.require(t < 60.0, fmt("runtime %.3f s < 60 s", t));
  return v;
}

// 5. Extending the truncation radius by 2 changes Z_A(s) by less than eps.
Verdict truncation() {
  Verdict v;
  std::vector<czq::ComplexQuadraticForm> forms{testforms::bump(), testforms::cylinder()};
  for (const auto& a : testforms::random_forms(4, 5)) forms.push_back(a);
  for (double eps : {1e-6, 1e-10}) {
    double worst = 0.0, shrunk = 0.0;
    for (const auto& a : forms)
      for (cplx s : {cplx(0.3), cplx(0.5, 0.5), cplx(0.9, -1.0), cplx(2.0)}) {
        const auto base = czq::epstein_zeta(a, s, czq::ZetaOptions{eps, czq::truncation_radius(a, s, eps)});
        const auto wide = czq::epstein_zeta(a, s, czq::ZetaOptions{eps, base.truncation_radius + 2.0});
        worst = std::max(worst, std::abs(wide.value - base.value));
        const auto narrow = czq::epstein_zeta(a, s, czq::ZetaOptions{eps, base.truncation_radius - 4.0});
        shrunk = std::max(shrunk, std::abs(narrow.value - base.value));
      }
    v.require(worst < eps, fmt("eps=%g: largest change %.2e", eps, worst));
    v.note(fmt("eps=%g: radius - 4 changes Z by up to %.2e, so the radius is live", eps, shrunk));
  }
  return v;
}

// 6. Punctured and order-3 corrected rules on e^{-|v|^2}/|v|.
Verdict rule_order() {
  Verdict v;
  const auto t0 = Clock::now();
  const auto unit = czq::validate_admissible(1.0, 0.0, 1.0);
  const double exact = std::pow(std::numbers::pi, 1.5);
  const std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  std::vector<double> e0, e3;
  for (double h : hs) {
    const auto g = czq::GridFunction::sample(czq::GridSpec::square(h, 7.0),
                                             [](double a, double b) { return cplx(std::exp(-a * a - b * b)); });
    e0.push_back(std::abs(czq::punctured_trapezoid(g, unit, 0.5) - exact));
    e3.push_back(std::abs(czq::corrected_trapezoid(g, unit, 0.5, 3).value - exact));
  }
  const double p0 = czq::cli::fitted_slope(hs, e0), p3 = czq::cli::fitted_slope(hs, e3);
  v.require(p0 >= 0.7 && p0 <= 1.3, fmt("uncorrected slope %.3f in [0.7, 1.3]", p0));
  v.require(p3 >= 2.7 && p3 <= 3.3, fmt("order-3 slope %.3f in [2.7, 3.3]", p3));
  const double t = elapsed(t0);
  v.require(t < 30.0, fmt("runtime %.3f s < 30 s", t));
  return v;
}

czq::cli::Outcome run_convergence(const std::string& text) {
  const auto config = czq::cli::Config::from_string(text);
  return czq::cli::run_convergence(czq::cli::read_convergence(config), config);
}

void slopes_into(Verdict& v, const czq::cli::Outcome& out, bool counted) {
  for (const auto& r : out.table.rows()) {
    if (r.id != "slope") continue;
    const std::string what = fmt("%s slope %.3f (nominal %g)", czq::cli::format_params(r.params).c_str(),
                                 r.value.real(), r.reference.real());
    if (counted)
      v.require(r.check == czq::cli::Check::pass, what);
    else
      v.note(what);
  }
}

// 7. Layer potentials at the study targets with the standard densities.
Verdict layer_convergence() {
  Verdict v;
  const auto t0 = Clock::now();
  const std::string common = "check.enabled = true\nkernel.k = 2\nkernel.kinds = single, double\nkernel.orders = 3, 5, 7\n";
  slopes_into(v, run_convergence(common + "geometry.name = bump\ndensity = standard\n"), true);
  const std::string cyl = common + "geometry.name = cylinder\nkernel.check_branch = false\n";
  slopes_into(v, run_convergence(cyl + "density = standard\n"), true);
  // Same target with the density made periodic in v1.
  slopes_into(v, run_convergence(cyl + "density = periodic\n"), false);
  const double t = elapsed(t0);
  v.require(t < 600.0, fmt("runtime %.1f s < 600 s", t));
  return v;
}

// 8. Desk-scale half-space solve.
Verdict halfspace() {
  Verdict v;
  const auto t0 = Clock::now();
  const auto config = czq::cli::Config::from_string("check.enabled = true\n");
  const auto out = czq::cli::run_halfspace_solve(czq::cli::read_solve(config), config);
  for (const auto& r : out.table.rows()) {
    const std::string p = czq::cli::format_params(r.params);
    if (r.id == "max_rel_error")
      v.require(r.check == czq::cli::Check::pass, fmt("%s max rel err %.3e <= 5e-2", p.c_str(), r.value.real()));
    else if (r.id == "improvement")
      v.require(r.check == czq::cli::Check::pass, fmt("%s error ratio %.2f >= 4", p.c_str(), r.value.real()));
    else if (r.id == "density_decay_monotone")
      v.note(fmt("%s density shell maxima monotone: %s", p.c_str(), r.value.real() == 1.0 ? "yes" : "no"));
    else if (r.id == "iterations" || r.id == "residual")
      v.note(fmt("%s %s %.3g", p.c_str(), r.id.c_str(), r.value.real()));
  }
  const double t = elapsed(t0);
  v.require(t < 900.0, fmt("runtime %.1f s < 900 s", t));
  return v;
}

// 9. Deterministic runs give identical CSV.
Verdict determinism() {
  Verdict v;
  auto csv = [](const czq::cli::Outcome& out) {
    std::ostringstream os;
    out.table.write(os);
    for (const auto& [suffix, t] : out.side_tables) t.write(os);
    return os.str();
  };
  const std::string conv =
      "deterministic = true\ngeometry.name = bump\ngrid.h = 0.625, 0.3125, 0.15625\nkernel.orders = 3, 5\n";
  const std::string solve =
      "deterministic = true\ngrid.half_width = 6\ngrid.h = 0.75, 0.5\ntargets.range = 2\ntargets.heights = 4\ngeometry.onset = 3\n";
  const std::string zeta = "deterministic = true\nzeta.random_forms = 3\n";
  std::string a[2], b[2], c[2];
  for (int k = 0; k < 2; ++k) {
    const auto cc = czq::cli::Config::from_string(conv);
    a[k] = csv(czq::cli::run_convergence(czq::cli::read_convergence(cc), cc));
    const auto cs = czq::cli::Config::from_string(solve);
    b[k] = csv(czq::cli::run_halfspace_solve(czq::cli::read_solve(cs), cs));
    const auto cz = czq::cli::Config::from_string(zeta);
    c[k] = csv(czq::cli::run_zeta_selftest(czq::cli::read_zeta_selftest(cz), cz));
  }
  v.require(a[0] == a[1], fmt("converge CSV identical (%zu bytes)", a[0].size()));
  v.require(b[0] == b[1], fmt("solve CSV identical (%zu bytes)", b[0].size()));
  v.require(c[0] == c[1], fmt("zeta-selftest CSV identical (%zu bytes)", c[0].size()));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"Epstein zeta identity Z_I = 4 zeta beta", identity},
      {"functional-equation symmetry", functional_equation},
      {"special value Z_A(0) = -1 and residue at s = 1", special_values},
      {"Wigner-limit oracle agreement", wigner},
      {"truncation bound", truncation},
      {"corrected rule order on e^{-|v|^2}/|v|", rule_order},
      {"layer-potential convergence at the study targets", layer_convergence},
      {"desk-scale half-space solve", halfspace},
      {"determinism", determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);

  bool all = true;
  for (int id : selected) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    const auto& [name, fn] = criteria[id - 1];
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.details.push_back(std::string("FAIL exception: ") + e.what());
    }
    std::printf("%s criterion %d: %s\n", v.pass ? "PASS" : "FAIL", id, name);
    for (const auto& d : v.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
