#ifndef CZQ_HELMHOLTZ_SOLVER_HPP
#define CZQ_HELMHOLTZ_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "czq/helmholtz/operator.hpp"

namespace czq {

enum class SolverKind { dense_lu, iterative };

inline SolverKind parse_solver_kind(const std::string& s) {
  if (s == "dense_lu" || s == "dense") return SolverKind::dense_lu;
  if (s == "iterative" || s == "gmres") return SolverKind::iterative;
  throw Error(Errc::config, "unknown solver '" + s + "'");
}

struct SolveOptions {
  double tol = 1e-10;
  int restart = 100;
  int max_iterations = 2000;
};

struct SolveReport {
  std::vector<cplx> density;
  int iterations = 0;
  std::vector<double> residual_history;  // relative residual after each Krylov step
  double residual = 0.0;                 // ||A sigma - f||_inf / ||f||_inf, recomputed
};

inline double max_norm(std::span<const cplx> v) {
  double m = 0.0;
  for (const cplx& x : v) m = std::max(m, std::abs(x));
  return m;
}

// Restarted GMRES with modified Gram-Schmidt and Givens rotations, zero initial guess.
inline SolveReport gmres(const std::function<std::vector<cplx>(std::span<const cplx>)>& apply,
                         std::span<const cplx> rhs, const SolveOptions& opt = {}) {
  const int n = static_cast<int>(rhs.size());
  const int m = std::max(1, std::min(opt.restart, n));
  SolveReport rep;
  Eigen::VectorXcd b = Eigen::Map<const Eigen::VectorXcd>(rhs.data(), n);
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    rep.density.assign(n, 0.0);
    return rep;
  }
  auto op = [&](const Eigen::VectorXcd& v) {
    const std::vector<cplx> r = apply(std::span<const cplx>(v.data(), n));
    return Eigen::VectorXcd(Eigen::Map<const Eigen::VectorXcd>(r.data(), n));
  };
  Eigen::VectorXcd r = b;
  double rel = 1.0;
  while (rep.iterations < opt.max_iterations) {
    const double beta = r.norm();
    Eigen::MatrixXcd v(n, m + 1);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);
    std::vector<cplx> cs(m), sn(m);
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(m + 1);
    g(0) = beta;
    v.col(0) = r / beta;
    int j = 0;
    for (; j < m && rep.iterations < opt.max_iterations; ++j) {
      Eigen::VectorXcd w = op(v.col(j));
      for (int i = 0; i <= j; ++i) {
        h(i, j) = v.col(i).dot(w);
        w -= h(i, j) * v.col(i);
      }
      h(j + 1, j) = w.norm();
      if (std::abs(h(j + 1, j)) > 0.0) v.col(j + 1) = w / h(j + 1, j);
      for (int i = 0; i < j; ++i) {
        const cplx t = std::conj(cs[i]) * h(i, j) + std::conj(sn[i]) * h(i + 1, j);
        h(i + 1, j) = -sn[i] * h(i, j) + cs[i] * h(i + 1, j);
        h(i, j) = t;
      }
      const double den = std::hypot(std::abs(h(j, j)), std::abs(h(j + 1, j)));
      cs[j] = den == 0.0 ? 1.0 : h(j, j) / den;
      sn[j] = den == 0.0 ? 0.0 : h(j + 1, j) / den;
      h(j, j) = den;
      h(j + 1, j) = 0.0;
      g(j + 1) = -sn[j] * g(j);
      g(j) = std::conj(cs[j]) * g(j);
      ++rep.iterations;
      rel = std::abs(g(j + 1)) / bnorm;
      rep.residual_history.push_back(rel);
      if (rel <= opt.tol) {
        ++j;
        break;
      }
    }
    const Eigen::VectorXcd y =
        h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    x += v.leftCols(j) * y;
    r = b - op(x);
    rel = r.norm() / bnorm;
    if (rel <= opt.tol) break;
  }
  rep.density.assign(x.data(), x.data() + n);
  if (rel > opt.tol) {
    std::string hist;
    const std::size_t from = rep.residual_history.size() > 8 ? rep.residual_history.size() - 8 : 0;
    for (std::size_t i = from; i < rep.residual_history.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.2e", rep.residual_history[i]);
      hist += buf;
    }
    throw Error(Errc::solver, "GMRES stalled after " + std::to_string(rep.iterations) +
                                  " iterations; last residuals:" + hist);
  }
  return rep;
}

inline SolveReport solve_dirichlet(const DiscretizedLayerOperator& op, std::span<const cplx> f, SolverKind kind,
                                   const SolveOptions& opt = {}) {
  const int n = op.size();
  if (static_cast<int>(f.size()) != n) throw Error(Errc::domain, "data size does not match the grid");
  SolveReport rep;
  if (kind == SolverKind::dense_lu) {
    const Eigen::MatrixXcd a = op.dense();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    const Eigen::VectorXcd x = lu.solve(Eigen::Map<const Eigen::VectorXcd>(f.data(), n));
    rep.density.assign(x.data(), x.data() + n);
    const Eigen::VectorXcd res = a * x - Eigen::Map<const Eigen::VectorXcd>(f.data(), n);
    rep.residual_history.push_back(res.norm() / Eigen::Map<const Eigen::VectorXcd>(f.data(), n).norm());
  } else {
    rep = gmres([&](std::span<const cplx> v) { return op.apply(v); }, f, opt);
  }
  const std::vector<cplx> af = op.apply(rep.density);
  double num = 0.0;
  for (int i = 0; i < n; ++i) num = std::max(num, std::abs(af[i] - f[i]));
  const double fn = max_norm(f);
  rep.residual = fn == 0.0 ? num : num / fn;
  return rep;
}

using RealPoint = std::array<double, 3>;

// Free-space field of a unit point source, on the surface nodes (complex distance).
inline std::vector<cplx> point_source_data(const RealPoint& source, cplx k, const SurfaceSamples& samples) {
  const ComplexPoint s{source[0], source[1], source[2]};
  std::vector<cplx> f(samples.size());
  for (int j = 0; j < samples.size(); ++j) {
    const cplx r = complex_distance(samples.x(j), s);
    f[j] = std::exp(cplx(0.0, 1.0) * k * r) / (4.0 * std::numbers::pi * r);
  }
  return f;
}

inline std::vector<cplx> point_source_data(const RealPoint& source, cplx k, const SurfaceChart& chart,
                                           const GridSpec& grid) {
  return point_source_data(source, k, sample_surface(chart, grid));
}

inline std::vector<cplx> exact_field(const RealPoint& source, cplx k, std::span<const RealPoint> targets) {
  std::vector<cplx> out;
  out.reserve(targets.size());
  for (const auto& t : targets) {
    const double r = std::hypot(t[0] - source[0], t[1] - source[1], t[2] - source[2]);
    if (r == 0.0) throw Error(Errc::domain, "target coincides with the source");
    out.push_back(std::exp(cplx(0.0, 1.0) * k * r) / (4.0 * std::numbers::pi * r));
  }
  return out;
}

// Plain trapezoidal sum of u = D[sigma] - ik S[sigma] at real targets off the surface.
inline std::vector<cplx> evaluate_solution_offsurface(const SurfaceSamples& samples, std::span<const cplx> sigma,
                                                      cplx k, std::span<const RealPoint> targets, int threads = 0) {
  const int n = samples.size();
  if (static_cast<int>(sigma.size()) != n) throw Error(Errc::domain, "density size does not match the grid");
  const double hmax = std::max(samples.grid.h1, samples.grid.h2);
  for (const auto& t : targets) {
    double dmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      dmin = std::min(dmin, std::hypot(t[0] - samples.xr[0][j], t[1] - samples.xr[1][j], t[2] - samples.xr[2][j]));
    if (dmin < 2.0 * hmax) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "target (%g, %g, %g) is %.3g from the surface, closer than 2h = %.3g", t[0], t[1],
                    t[2], dmin, 2.0 * hmax);
      throw Error(Errc::proximity, buf);
    }
  }
  std::vector<double> sr(n), si(n);
  for (int j = 0; j < n; ++j) {
    sr[j] = sigma[j].real();
    si[j] = sigma[j].imag();
  }
  const auto rk = detail::row_kernel(samples, {KernelKind::combined, k});
  std::vector<cplx> out(targets.size());
  parallel_chunks(static_cast<int>(targets.size()), threads, [&](int lo, int hi) {
    std::vector<double> re(n), im(n);
    for (int t = lo; t < hi; ++t) {
      const ComplexPoint x{targets[t][0], targets[t][1], targets[t][2]};
      rk.fill(x, 0, n, re.data(), im.data());
      out[t] = detail::row_dot(re.data(), im.data(), sr.data(), si.data(), n);
    }
  });
  return out;
}

inline std::vector<cplx> evaluate_solution_offsurface(const SurfaceChart& chart, const GridSpec& grid,
                                                      std::span<const cplx> sigma, cplx k,
                                                      std::span<const RealPoint> targets, int threads = 0) {
  return evaluate_solution_offsurface(sample_surface(chart, grid), sigma, k, targets, threads);
}

}  // namespace czq

#endif
