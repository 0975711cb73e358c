#ifndef CZQ_CLI_EXPERIMENTS_HPP
#define CZQ_CLI_EXPERIMENTS_HPP

// Experiment drivers behind the czq command line. Each experiment first turns the
// flat config into a typed description (config errors surface there), then runs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>

#include "czq/cli/config.hpp"
#include "czq/cli/results.hpp"
#include "czq/epstein.hpp"
#include "czq/helmholtz.hpp"
#include "czq/parallel.hpp"
#include "czq/surfaces.hpp"

namespace czq::cli {

struct CommonConfig {
  std::string output = "-";  // "-" is standard output
  bool deterministic = false;
  bool check = false;
  int threads = 0;
};

struct Outcome {
  ResultTable table;
  std::vector<std::pair<std::string, ResultTable>> side_tables;  // file suffix, table
};

namespace detail {

inline CommonConfig read_common(const Config& c, const std::string& experiment) {
  const std::string kind = c.get("experiment", experiment);
  if (kind != experiment)
    throw Error(Errc::config, "config is for experiment '" + kind + "', not '" + experiment + "'");
  CommonConfig out;
  out.output = c.get("output.path", std::string("-"));
  out.deterministic = c.get("deterministic", false);
  out.check = c.get("check.enabled", false);
  out.threads = out.deterministic ? 1 : default_thread_count();
  return out;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string fmt(double x) { return format_double(x); }
inline std::string fmt(cplx z) { return "(" + format_double(z.real()) + "," + format_double(z.imag()) + ")"; }

inline Check check_if(bool enabled, bool ok) { return enabled ? (ok ? Check::pass : Check::fail) : Check::none; }

}  // namespace detail

// Independent references for the Z_I = 4 zeta beta identity.
namespace reference {

inline double riemann_zeta(double s) { return boost::math::zeta(s); }

// Dirichlet beta from its alternating series, accelerated as in Cohen, Rodriguez Villegas and Zagier.
inline double dirichlet_beta(double s, int n = 40) {
  long double d = std::pow(3.0L + std::sqrt(8.0L), n);
  d = 0.5L * (d + 1.0L / d);
  long double b = -1.0L, c = -d, acc = 0.0L;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    acc += c * std::pow(2.0L * k + 1.0L, -(long double)s);
    b = (static_cast<long double>(k + n) * (k - n) * b) / ((k + 0.5L) * (k + 1.0L));
  }
  return static_cast<double>(acc / d);
}

}  // namespace reference

// ---------------------------------------------------------------- geometry

struct GeometryConfig {
  std::string name;
  MollifierParams mollifier;
};

inline MollifierParams default_mollifier(const std::string& name) {
  if (name == "bump") return {0.75, 10.0, 1.0};
  if (name == "cylinder") return {0.75, 10.0, 3.0};
  if (name == "rough_halfspace") return {0.75, 10.0, 0.5};
  if (name == "flat_plane") return {0.75, 10.0, 0.0};
  throw Error(Errc::config, "unknown geometry '" + name + "' (bump, cylinder, rough_halfspace, flat_plane)");
}

inline GeometryConfig read_geometry(const Config& c, const std::string& fallback) {
  GeometryConfig g;
  g.name = c.get("geometry.name", fallback);
  g.mollifier = default_mollifier(g.name);
  g.mollifier.slope = c.get("geometry.slope", g.mollifier.slope);
  g.mollifier.onset = c.get("geometry.onset", g.mollifier.onset);
  g.mollifier.strength = c.get("geometry.strength", g.mollifier.strength);
  if (!(g.mollifier.slope > 0.0)) throw Error(Errc::config, "geometry.slope must be positive");
  return g;
}

inline std::shared_ptr<SurfaceChart> make_chart(const GeometryConfig& g) {
  if (g.name == "bump") return gaussian_bump(g.mollifier);
  if (g.name == "cylinder") return slanted_cylinder(g.mollifier);
  if (g.name == "rough_halfspace") return rough_halfspace(g.mollifier);
  return flat_plane(g.mollifier);
}

// ---------------------------------------------------------------- zeta self-test

struct NamedForm {
  std::string name;
  ComplexQuadraticForm form;
};

struct ZetaSelftestConfig {
  CommonConfig common;
  double eps = kDefaultZetaEps;
  std::vector<double> identity_s{0.25, 0.5, 2.0, 3.0};
  std::vector<cplx> symmetry_s{cplx(0.3, 0.2), 0.5, cplx(0.75, -0.4), cplx(2.5, 1.0)};
  std::vector<NamedForm> forms;
  double scale = 2.5;
  double residue_delta = 1e-3;
  std::vector<double> wigner_s{0.3, 0.5, 0.7};
  std::vector<int> wigner_n{8, 16, 32, 64};
  std::vector<std::string> wigner_forms{"bump_target", "cylinder_target"};
  double tol = 1e-10, residue_tol = 1e-8, special_tol = 1e-12, wigner_tol = 1e-5;
};

inline std::vector<NamedForm> target_forms() {
  return {{"bump_target", validate_admissible(cplx(1.0, 6e-3), 1.39e-5, cplx(0.9638, 0.3805))},
          {"cylinder_target", validate_admissible(6.25, cplx(-0.2765, -0.0461), cplx(1.4582, 0.5006))}};
}

// Admissible forms with real part near the identity and moderate imaginary parts.
inline std::vector<NamedForm> random_forms(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<NamedForm> out;
  while (static_cast<int>(out.size()) < count) {
    const cplx e(1.0 + u(rng), u(rng)), f(0.5 * u(rng), 0.5 * u(rng)), g(1.0 + u(rng), u(rng));
    try {
      out.push_back({"random" + std::to_string(out.size()), validate_admissible(e, f, g)});
    } catch (const Error&) {
    }
  }
  return out;
}

inline ZetaSelftestConfig read_zeta_selftest(const Config& c) {
  ZetaSelftestConfig z;
  z.common = detail::read_common(c, "zeta-selftest");
  z.eps = c.get("zeta.eps", z.eps);
  if (!(z.eps > 0.0)) throw Error(Errc::config, "zeta.eps must be positive");
  z.identity_s = c.get_list("zeta.identity_s", z.identity_s);
  if (c.has("zeta.symmetry_s")) z.symmetry_s = c.get_complex_list("zeta.symmetry_s");
  for (const cplx& s : z.symmetry_s)
    if (s == 0.0 || s == 1.0) throw Error(Errc::config, "zeta.symmetry_s must avoid the poles 0 and 1");
  for (double s : z.identity_s)
    if (!(s > 0.0) || s == 1.0) throw Error(Errc::config, "zeta.identity_s needs s > 0, s != 1");
  const bool with_targets = c.get("zeta.target_forms", true);
  if (with_targets)
    for (auto& f : target_forms()) z.forms.push_back(f);
  if (!with_targets) z.wigner_forms.clear();
  const int nrand = c.get("zeta.random_forms", 5);
  for (auto& f : random_forms(nrand, static_cast<unsigned>(c.get("zeta.seed", 1)))) z.forms.push_back(f);
  for (const auto& key : c.keys_with_prefix("zeta.form")) {
    const auto e = c.get_complex_list(key);
    if (e.size() != 3) throw Error(Errc::config, key + ": expected three entries E, F, G");
    try {
      z.forms.push_back({key.substr(10), validate_admissible(e[0], e[1], e[2])});
    } catch (const Error& err) {
      throw Error(Errc::config, key + ": " + err.what());
    }
  }
  z.scale = c.get("zeta.scale", z.scale);
  z.residue_delta = c.get("zeta.residue_delta", z.residue_delta);
  z.wigner_s = c.get_list("wigner.s", z.wigner_s);
  for (double s : z.wigner_s)
    if (!(s > 0.0 && s < 1.0)) throw Error(Errc::config, "wigner.s must lie in (0, 1)");
  std::vector<int> ns;
  for (double n : c.get_list("wigner.N", {8, 16, 32, 64})) {
    if (n < 1 || n != std::floor(n)) throw Error(Errc::config, "wigner.N must be positive integers");
    ns.push_back(static_cast<int>(n));
  }
  if (!std::is_sorted(ns.begin(), ns.end()) || std::adjacent_find(ns.begin(), ns.end()) != ns.end())
    throw Error(Errc::config, "wigner.N must be strictly increasing");
  z.wigner_n = ns;
  if (c.has("wigner.forms")) z.wigner_forms = detail::split_list(c.get("wigner.forms", std::string()));
  for (const auto& n : z.wigner_forms)
    if (std::none_of(z.forms.begin(), z.forms.end(), [&](const NamedForm& f) { return f.name == n; }))
      throw Error(Errc::config, "wigner.forms names unknown form '" + n + "'");
  // Tolerances loosen with the truncation tolerance.
  const double floor = 10.0 * z.eps;
  z.tol = c.get("check.tol", std::max(z.tol, floor));
  z.residue_tol = c.get("check.residue_tol", std::max(z.residue_tol, floor));
  z.special_tol = c.get("check.special_tol", std::max(z.special_tol, floor));
  z.wigner_tol = c.get("check.wigner_tol", std::max(z.wigner_tol, floor));
  c.require_all_used();
  return z;
}

inline Outcome run_zeta_selftest(const ZetaSelftestConfig& z, const Config& config) {
  using clock = std::chrono::steady_clock;
  Outcome out{ResultTable("zeta-selftest", config, z.common.deterministic), {}};
  auto& t = out.table;
  auto rel_ok = [](const ResultRow& r, double tol) { return r.rel_error() <= tol; };
  const ComplexQuadraticForm unit = validate_admissible(1.0, 0.0, 1.0);

  for (double s : z.identity_s) {
    const auto t0 = clock::now();
    ResultRow r{"identity", {{"form", "identity"}, {"s", detail::fmt(s)}}};
    r.value = epstein_zeta(unit, s, z.eps).value;
    r.reference = 4.0 * reference::riemann_zeta(s) * reference::dirichlet_beta(s);
    r.runtime = detail::seconds_since(t0);
    r.check = detail::check_if(true, rel_ok(r, z.tol));
    t.add(r);
  }

  for (const auto& f : z.forms) {
    const auto inv = f.form.inverse_entries();
    const ComplexQuadraticForm ainv = validate_admissible(inv[0], inv[1], inv[2]);
    for (const cplx& s : z.symmetry_s) {
      const auto t0 = clock::now();
      ResultRow r{"symmetry", {{"form", f.name}, {"s", detail::fmt(s)}}};
      const ZetaOptions opt{z.eps, std::nullopt};
      // Lambda_A(s) = pi^{-s} Gamma(s) Z_A(s), with the Z path covering relaxed forms.
      auto lambda = [&](const ComplexQuadraticForm& a, cplx x) {
        return std::exp(-x * std::log(std::numbers::pi)) * gamma(x) * epstein_zeta(a, x, opt).value;
      };
      r.value = lambda(f.form, s);
      r.reference = lambda(ainv, 1.0 - s) / f.form.sqrt_det();
      r.runtime = detail::seconds_since(t0);
      r.check = detail::check_if(true, rel_ok(r, z.tol));
      t.add(r);
    }
    {
      const auto t0 = clock::now();
      const cplx s(0.4, 0.3);
      ResultRow r{"scaling", {{"form", f.name}, {"s", detail::fmt(s)}, {"c", detail::fmt(z.scale)}}};
      r.value = epstein_zeta(scaled(f.form, z.scale), s, z.eps).value;
      r.reference = std::exp(-s * std::log(z.scale)) * epstein_zeta(f.form, s, z.eps).value;
      r.runtime = detail::seconds_since(t0);
      r.check = detail::check_if(true, rel_ok(r, z.tol));
      t.add(r);
    }
    {
      const auto t0 = clock::now();
      // Symmetric differences cancel the constant term; one Richardson step removes delta^2.
      auto sym = [&](double d) {
        return 0.5 * d * (epstein_zeta(f.form, 1.0 + d, z.eps).value - epstein_zeta(f.form, 1.0 - d, z.eps).value);
      };
      const double d = z.residue_delta;
      ResultRow r{"residue", {{"form", f.name}, {"delta", detail::fmt(d)}}};
      r.value = (4.0 * sym(0.5 * d) - sym(d)) / 3.0;
      r.reference = std::numbers::pi / f.form.sqrt_det();
      r.runtime = detail::seconds_since(t0);
      r.check = detail::check_if(true, rel_ok(r, z.residue_tol));
      t.add(r);
    }
    {
      const auto t0 = clock::now();
      ResultRow r{"special_value", {{"form", f.name}, {"s", "0"}}};
      r.value = epstein_zeta(f.form, 0.0, z.eps).value;
      r.reference = -1.0;
      r.runtime = detail::seconds_since(t0);
      r.check = detail::check_if(true, r.abs_error() <= z.special_tol);
      t.add(r);
    }
  }

  // The raw box difference converges like N^{-2s}; its boundary term accounts for that.
  for (const auto& name : z.wigner_forms) {
    const auto& f = *std::find_if(z.forms.begin(), z.forms.end(), [&](const NamedForm& x) { return x.name == name; });
    for (double s : z.wigner_s) {
      const cplx zeta = epstein_zeta(f.form, s, z.eps).value;
      double prev = std::numeric_limits<double>::infinity();
      bool decreasing = true;
      for (std::size_t i = 0; i < z.wigner_n.size(); ++i) {
        const int n = z.wigner_n[i];
        const bool last = i + 1 == z.wigner_n.size();
        const auto t0 = clock::now();
        const cplx w = wigner_limit_oracle(f.form, s, n);
        const double raw_time = detail::seconds_since(t0);
        ResultRow raw{"wigner", {{"form", f.name}, {"s", detail::fmt(s)}, {"N", std::to_string(n)}}, w, zeta, raw_time};
        decreasing = decreasing && raw.abs_error() < prev;
        prev = raw.abs_error();
        if (last) raw.check = detail::check_if(true, decreasing);
        t.add(raw);
        const auto t1 = clock::now();
        ResultRow corr{"wigner_corrected", raw.params, w - wigner_boundary_estimate(f.form, s, n), zeta};
        corr.runtime = raw_time + detail::seconds_since(t1);
        if (last) corr.check = detail::check_if(true, corr.abs_error() <= z.wigner_tol);
        t.add(corr);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- convergence study

using Density = std::function<cplx(double, double)>;

inline Density make_density(const std::string& name, const std::string& geometry) {
  using std::cos, std::exp, std::sin;
  const double pi = std::numbers::pi;
  if (name == "zero") return [](double, double) { return cplx(0.0); };
  if (name == "standard" && geometry == "bump")
    return [pi](double a, double b) {
      return cplx(sin(0.6 * a + 2.0) - 3.0 * cos(0.7 * b - pi), exp(sin(a + 1.0) - cos(0.2 * b)));
    };
  if (name == "standard" && geometry == "cylinder")
    return [pi](double a, double b) { return cplx(sin(3.0 * a + 2.0) - 3.0 * cos(0.7 * b - pi), 0.3 * a * cos(2.0 * b)); };
  // The cylinder density with v1 replaced by sin(v1), smooth across the seam.
  if (name == "periodic")
    return [pi](double a, double b) {
      return cplx(sin(3.0 * a + 2.0) - 3.0 * cos(0.7 * b - pi), 0.3 * sin(a) * cos(2.0 * b));
    };
  throw Error(Errc::config, "unknown density '" + name + "' for geometry '" + geometry + "' (standard, periodic, zero)");
}

struct ConvergenceConfig {
  CommonConfig common;
  GeometryConfig geometry;
  std::string density = "standard";
  double t1 = 0.0, t2 = 0.0;
  double half_width = 30.0;
  std::vector<GridSpec> grids;  // coarse to fine
  std::vector<KernelKind> kinds{KernelKind::single, KernelKind::dbl};
  std::vector<int> orders{3, 5, 7};
  double k = 2.0;
  double eps = kDefaultZetaEps;
  bool check_branch = true;
  int fit_levels = 4;
  std::map<int, double> bands{{3, 0.4}, {5, 0.5}, {7, 0.6}};
};

inline ConvergenceConfig read_convergence(const Config& c) {
  ConvergenceConfig v;
  v.common = detail::read_common(c, "converge");
  v.geometry = read_geometry(c, "bump");
  const bool cyl = v.geometry.name == "cylinder";
  v.density = c.get("density", std::string("standard"));
  make_density(v.density, v.geometry.name);
  v.t1 = c.get("target.v1", v.geometry.name == "bump" ? -7.5 : cyl ? 1.2 * std::numbers::pi : 0.0);
  v.t2 = c.get("target.v2", v.geometry.name == "bump" ? -9.375 : cyl ? -8.6372 : 0.0);
  v.half_width = c.get("grid.half_width", v.half_width);
  if (std::abs(v.t2) >= v.half_width || (!cyl && std::abs(v.t1) >= v.half_width))
    throw Error(Errc::config, "target lies outside the grid");
  std::vector<double> hs;
  if (cyl) {
    if (c.has("grid.h")) throw Error(Errc::config, "cylinder grids are set by grid.periodic_counts");
    const double aspect = c.get("grid.aspect", 1.0);
    for (double n : c.get_list("grid.periodic_counts", {120, 160, 240, 320, 480, 640})) {
      if (n < 1 || n != std::floor(n)) throw Error(Errc::config, "grid.periodic_counts must be positive integers");
      const int n1 = static_cast<int>(n);
      const double h2 = aspect * 2.0 * std::numbers::pi / n1;
      v.grids.push_back(GridSpec::cylinder(n1, h2, -static_cast<int>(std::floor((v.half_width + v.t2) / h2)),
                                           static_cast<int>(std::floor((v.half_width - v.t2) / h2)), 0.0, v.t2));
      const double i1 = v.t1 / v.grids.back().h1;
      if (std::abs(i1 - std::round(i1)) > 1e-9)
        throw Error(Errc::config, "target.v1 is not a node of the cylinder grid with " + std::to_string(n1) + " points");
      hs.push_back(h2);
    }
  } else {
    hs = c.get_list("grid.h", {0.625, 0.3125, 0.15625, 0.078125, 0.0390625});
    for (double h : hs) {
      if (!(h > 0.0)) throw Error(Errc::config, "grid.h entries must be positive");
      const int lo1 = static_cast<int>(std::floor((v.half_width + v.t1) / h));
      const int hi1 = static_cast<int>(std::floor((v.half_width - v.t1) / h));
      const int lo2 = static_cast<int>(std::floor((v.half_width + v.t2) / h));
      const int hi2 = static_cast<int>(std::floor((v.half_width - v.t2) / h));
      v.grids.push_back(GridSpec::plane(h, IndexBox{-lo1, hi1, -lo2, hi2}, v.t1, v.t2));
    }
  }
  if (hs.size() < 2) throw Error(Errc::config, "a convergence study needs at least two grids");
  for (std::size_t i = 1; i < hs.size(); ++i)
    if (!(hs[i] < hs[i - 1])) throw Error(Errc::config, "grid spacings must be strictly decreasing");
  if (c.has("kernel.kinds")) {
    v.kinds.clear();
    for (const auto& s : detail::split_list(c.get("kernel.kinds", std::string()))) {
      const KernelKind kk = parse_kernel_kind(s);
      if (kk == KernelKind::combined) throw Error(Errc::config, "convergence studies use single or double layers");
      v.kinds.push_back(kk);
    }
  }
  v.orders.clear();
  for (double o : c.get_list("kernel.orders", {3, 5, 7})) {
    if (o != 3 && o != 5 && o != 7) throw Error(Errc::config, "kernel.orders entries must be 3, 5 or 7");
    v.orders.push_back(static_cast<int>(o));
  }
  v.k = c.get("kernel.k", v.k);
  if (!(v.k > 0.0)) throw Error(Errc::config, "kernel.k must be positive");
  v.eps = c.get("zeta.eps", v.eps);
  v.check_branch = c.get("kernel.check_branch", v.check_branch);
  v.fit_levels = c.get("fit.levels", v.fit_levels);
  if (v.fit_levels < 2) throw Error(Errc::config, "fit.levels must be at least 2");
  for (auto& [order, band] : v.bands) band = c.get("check.band" + std::to_string(order), band);
  c.require_all_used();
  return v;
}

// Least-squares slope of log e against log h.
inline double fitted_slope(const std::vector<double>& h, const std::vector<double>& e) {
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline Outcome run_convergence(const ConvergenceConfig& v, const Config& config) {
  using clock = std::chrono::steady_clock;
  Outcome out{ResultTable("converge", config, v.common.deterministic), {}};
  const auto chart = make_chart(v.geometry);
  const Density sigma_fn = make_density(v.density, v.geometry.name);
  const std::size_t levels = v.grids.size();

  struct Series {
    KernelKind kind;
    int order;
    std::vector<cplx> values;
    std::vector<double> times;
  };
  std::vector<Series> series;
  for (KernelKind kind : v.kinds)
    for (int order : v.orders) series.push_back({kind, order, {}, {}});

  std::vector<double> hs;
  for (const GridSpec& g : v.grids) {
    const auto t0 = clock::now();
    const SurfaceSamples samples = sample_surface(*chart, g);
    std::vector<cplx> sigma(g.size());
    for (int j = 0; j < g.size(); ++j) {
      const auto p = g.node(j);
      sigma[j] = sigma_fn(p[0], p[1]);
    }
    const int i1 = g.kind == DomainKind::cylinder ? static_cast<int>(std::lround(v.t1 / g.h1)) : 0;
    const int node = g.linear(i1, 0);
    const double setup = detail::seconds_since(t0);
    hs.push_back(g.h());
    for (auto& s : series) {
      const auto t1 = clock::now();
      OperatorOptions opt;
      opt.order = s.order;
      opt.eps = v.eps;
      opt.threads = v.common.threads;
      opt.check_branch = v.check_branch;
      s.values.push_back(layer_potential_at(*chart, samples, sigma, KernelSpec{s.kind, v.k}, node, opt));
      s.times.push_back(setup / series.size() + detail::seconds_since(t1));
    }
  }

  for (const auto& s : series) {
    // Richardson reference from the two finest levels at the nominal order.
    const double q = hs[levels - 2] / hs[levels - 1];
    const cplx ref = s.values[levels - 1] + (s.values[levels - 1] - s.values[levels - 2]) / (std::pow(q, s.order) - 1.0);
    const Params base{{"geometry", v.geometry.name}, {"density", v.density}, {"kernel", to_string(s.kind)},
                      {"order", std::to_string(s.order)}, {"k", detail::fmt(v.k)}};
    std::vector<double> errs;
    for (std::size_t l = 0; l < levels; ++l) {
      Params p = base;
      p.emplace_back("level", std::to_string(l));
      p.emplace_back("h", detail::fmt(hs[l]));
      p.emplace_back("n", std::to_string(v.grids[l].size()));
      ResultRow r{"layer_value", p, s.values[l], ref, s.times[l]};
      errs.push_back(r.abs_error());
      out.table.add(r);
    }
    const std::size_t m = std::min<std::size_t>(v.fit_levels, levels);
    const std::vector<double> hf(hs.end() - m, hs.end()), ef(errs.end() - m, errs.end());
    const bool all_zero = std::all_of(errs.begin(), errs.end(), [](double e) { return e == 0.0; });
    const bool any_zero = std::any_of(ef.begin(), ef.end(), [](double e) { return e == 0.0; });
    const double slope = any_zero ? std::nan("") : fitted_slope(hf, ef);
    Params p = base;
    p.emplace_back("fit_levels", std::to_string(m));
    ResultRow r{"slope", p, slope, double(s.order)};
    const double band = v.bands.at(s.order);
    r.check = detail::check_if(v.common.check, all_zero || std::abs(slope - s.order) <= band);
    out.table.add(r);
  }
  return out;
}

// ---------------------------------------------------------------- half-space solve

struct SolveConfig {
  CommonConfig common;
  GeometryConfig geometry;
  double k = 2.0;
  int order = 5;
  double half_width = 12.0;
  std::vector<double> hs{0.375, 0.1875};
  std::string solver = "auto";
  SolveOptions solve;
  int dense_budget = 10000;
  double eps = kDefaultZetaEps;
  RealPoint source{1.0, 1.0, -2.0};
  std::vector<RealPoint> targets;
  double max_error = 5e-2;
  double min_ratio = 4.0;
  double decay_band = 1.0;
  bool write_density = true;
};

inline SolveConfig read_solve(const Config& c) {
  SolveConfig v;
  v.common = detail::read_common(c, "solve");
  v.geometry = read_geometry(c, "rough_halfspace");
  if (!c.has("geometry.onset")) v.geometry.mollifier.onset = 6.0;
  if (!c.has("geometry.strength")) v.geometry.mollifier.strength = 1.0;
  if (v.geometry.name == "cylinder") throw Error(Errc::config, "the half-space solve needs a plane chart");
  v.k = c.get("kernel.k", v.k);
  if (!(v.k > 0.0)) throw Error(Errc::config, "kernel.k must be positive");
  v.order = c.get("kernel.order", v.order);
  if (v.order != 3 && v.order != 5 && v.order != 7) throw Error(Errc::config, "kernel.order must be 3, 5 or 7");
  v.half_width = c.get("grid.half_width", v.half_width);
  v.hs = c.get_list("grid.h", v.hs);
  for (std::size_t i = 0; i < v.hs.size(); ++i) {
    if (!(v.hs[i] > 0.0)) throw Error(Errc::config, "grid.h entries must be positive");
    if (i > 0 && !(v.hs[i] < v.hs[i - 1])) throw Error(Errc::config, "grid spacings must be strictly decreasing");
  }
  v.solver = c.get("solver.kind", v.solver);
  if (v.solver != "auto") parse_solver_kind(v.solver);
  v.solve.tol = c.get("solver.tol", v.solve.tol);
  v.solve.restart = c.get("solver.restart", v.solve.restart);
  v.solve.max_iterations = c.get("solver.max_iterations", v.solve.max_iterations);
  v.dense_budget = c.get("solver.dense_budget", v.dense_budget);
  v.eps = c.get("zeta.eps", v.eps);
  const auto src = c.get_list("source", {1.0, 1.0, -2.0});
  if (src.size() != 3) throw Error(Errc::config, "source needs three coordinates");
  v.source = {src[0], src[1], src[2]};
  const double range = c.get("targets.range", 5.0), step = c.get("targets.step", 1.0);
  if (!(step > 0.0) || !(range >= 0.0)) throw Error(Errc::config, "targets.range and targets.step must be positive");
  if (range >= v.geometry.mollifier.onset)
    throw Error(Errc::config, "targets.range must stay inside the trusted window |v| < geometry.onset");
  const int m = static_cast<int>(std::floor(range / step + 1e-9));
  for (double x3 : c.get_list("targets.heights", {2.5, 4.0}))
    for (int b = -m; b <= m; ++b)
      for (int a = -m; a <= m; ++a) v.targets.push_back({a * step, b * step, x3});
  v.max_error = c.get("check.max_error", v.max_error);
  v.min_ratio = c.get("check.min_ratio", v.min_ratio);
  v.decay_band = c.get("output.decay_band", v.decay_band);
  v.write_density = c.get("output.density", v.write_density);
  c.require_all_used();
  return v;
}

inline Outcome run_halfspace_solve(const SolveConfig& v, const Config& config) {
  using clock = std::chrono::steady_clock;
  Outcome out{ResultTable("solve", config, v.common.deterministic), {}};
  std::shared_ptr<const SurfaceChart> chart = make_chart(v.geometry);
  const std::vector<cplx> exact = exact_field(v.source, v.k, v.targets);
  std::vector<double> level_errors;

  for (std::size_t l = 0; l < v.hs.size(); ++l) {
    const auto t0 = clock::now();
    const double h = v.hs[l];
    const GridSpec grid = GridSpec::square(h, v.half_width);
    OperatorOptions opt;
    opt.order = v.order;
    opt.eps = v.eps;
    opt.threads = v.common.threads;
    opt.dense_budget = v.dense_budget;
    const DiscretizedLayerOperator op(chart, grid, KernelSpec{KernelKind::combined, v.k}, opt);
    const SolverKind kind = v.solver == "auto" ? (grid.size() <= v.dense_budget ? SolverKind::dense_lu
                                                                                : SolverKind::iterative)
                                               : parse_solver_kind(v.solver);
    const std::vector<cplx> f = point_source_data(v.source, v.k, op.samples());
    const SolveReport rep = solve_dirichlet(op, f, kind, v.solve);
    const std::vector<cplx> u = evaluate_solution_offsurface(op.samples(), rep.density, v.k, v.targets, opt.threads);
    const double elapsed = detail::seconds_since(t0);

    const Params base{{"geometry", v.geometry.name}, {"k", detail::fmt(v.k)},      {"order", std::to_string(v.order)},
                      {"h", detail::fmt(h)},         {"n", std::to_string(grid.size())},
                      {"solver", kind == SolverKind::dense_lu ? "dense_lu" : "iterative"}};
    ResultTable slice("solve.slice", config, v.common.deterministic);
    double max_rel = 0.0;
    for (std::size_t t = 0; t < v.targets.size(); ++t) {
      ResultRow r{"field",
                  {{"x1", detail::fmt(v.targets[t][0])}, {"x2", detail::fmt(v.targets[t][1])},
                   {"x3", detail::fmt(v.targets[t][2])}, {"h", detail::fmt(h)}},
                  u[t],
                  exact[t]};
      max_rel = std::max(max_rel, r.rel_error());
      slice.add(r);
    }
    level_errors.push_back(max_rel);

    ResultRow err{"max_rel_error", base, max_rel, 0.0, elapsed};
    err.check = detail::check_if(v.common.check, max_rel <= v.max_error);
    out.table.add(err);
    Params it = base;
    it.emplace_back("residual", detail::fmt(rep.residual));
    out.table.add(ResultRow{"iterations", it, double(rep.iterations), 0.0});
    out.table.add(ResultRow{"residual", base, rep.residual, 0.0});

    // Largest |sigma| in square shells beyond the onset: should fall off monotonically.
    const double onset = v.geometry.mollifier.onset;
    std::map<int, double> shells;
    for (int j = 0; j < grid.size(); ++j) {
      const auto p = grid.node(j);
      const double r = std::max(std::abs(p[0]), std::abs(p[1]));
      if (r < onset) continue;
      const int b = static_cast<int>(std::floor((r - onset) / v.decay_band));
      shells[b] = std::max(shells[b], std::abs(rep.density[j]));
    }
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (const auto& [b, mx] : shells) {
      Params p = base;
      p.emplace_back("shell_from", detail::fmt(onset + b * v.decay_band));
      out.table.add(ResultRow{"density_shell_max", p, mx, 0.0});
      monotone = monotone && mx <= prev;
      prev = mx;
    }
    ResultRow decay{"density_decay_monotone", base, monotone ? 1.0 : 0.0, 1.0};
    decay.check = detail::check_if(v.common.check, monotone);
    out.table.add(decay);

    if (l > 0) {
      Params p = base;
      p.emplace_back("h_coarse", detail::fmt(v.hs[l - 1]));
      ResultRow ratio{"improvement", p, level_errors[l - 1] / max_rel, v.min_ratio};
      ratio.check = detail::check_if(v.common.check, level_errors[l - 1] / max_rel >= v.min_ratio);
      out.table.add(ratio);
    }

    const std::string tag = "h" + std::to_string(l);
    out.side_tables.emplace_back("slice." + tag, std::move(slice));
    if (v.write_density) {
      ResultTable dens("solve.density", config, v.common.deterministic);
      for (int j = 0; j < grid.size(); ++j) {
        const auto p = grid.node(j);
        dens.add(ResultRow{"density", {{"v1", detail::fmt(p[0])}, {"v2", detail::fmt(p[1])}}, rep.density[j], 0.0});
      }
      out.side_tables.emplace_back("density." + tag, std::move(dens));
    }
  }
  return out;
}

// ---------------------------------------------------------------- Wigner oracle

inline Outcome run_wigner(const ComplexQuadraticForm& a, cplx s, int n, const Config& config) {
  using clock = std::chrono::steady_clock;
  Outcome out{ResultTable("wigner", config, false), {}};
  const Params p{{"E", detail::fmt(a.E())}, {"F", detail::fmt(a.F())}, {"G", detail::fmt(a.G())},
                 {"s", detail::fmt(s)},     {"N", std::to_string(n)}};
  const cplx zeta = epstein_zeta(a, s).value;
  const auto t0 = clock::now();
  const cplx w = wigner_limit_oracle(a, s, n);
  const double tw = detail::seconds_since(t0);
  out.table.add(ResultRow{"wigner", p, w, zeta, tw});
  out.table.add(ResultRow{"wigner_corrected", p, w - wigner_boundary_estimate(a, s, n), zeta, tw});
  return out;
}

}  // namespace czq::cli

#endif
