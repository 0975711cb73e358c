#ifndef CZQ_QUADRATURE_HPP
#define CZQ_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "czq/epstein.hpp"
#include "czq/error.hpp"
#include "czq/quadratic_form.hpp"
#include "czq/summation.hpp"

namespace czq {

enum class DomainKind { plane, cylinder };

struct IndexBox {
  int lo1 = 0, hi1 = 0, lo2 = 0, hi2 = 0;  // inclusive
};

using Offset = std::array<int, 2>;

// Equispaced parameter grid. Node (i1, i2) sits at origin + (i1 h1, i2 h2); on the
// cylinder axis 1 is periodic with periodic_count nodes per 2 pi.
struct GridSpec {
  DomainKind kind = DomainKind::plane;
  double h1 = 1.0, h2 = 1.0;
  double origin1 = 0.0, origin2 = 0.0;
  IndexBox box;
  int periodic_count = 0;

  static GridSpec plane(double h, IndexBox box, double o1 = 0.0, double o2 = 0.0) {
    return plane(h, h, box, o1, o2);
  }
  static GridSpec plane(double h1, double h2, IndexBox box, double o1 = 0.0, double o2 = 0.0) {
    if (!(h1 > 0.0) || !(h2 > 0.0)) throw Error(Errc::domain, "grid spacing must be positive");
    if (box.hi1 < box.lo1 || box.hi2 < box.lo2) throw Error(Errc::domain, "empty index box");
    return GridSpec{DomainKind::plane, h1, h2, o1, o2, box, 0};
  }
  // Plane grid with spacing h covering [-half_width, half_width]^2 centred on the origin.
  static GridSpec square(double h, double half_width) {
    const int n = static_cast<int>(std::floor(half_width / h + 1e-9));
    return plane(h, IndexBox{-n, n, -n, n});
  }
  static GridSpec cylinder(int periodic_count, double h2, int lo2, int hi2, double o1 = 0.0, double o2 = 0.0) {
    if (periodic_count < 1) throw Error(Errc::domain, "cylinder needs periodic_count >= 1");
    if (!(h2 > 0.0) || hi2 < lo2) throw Error(Errc::domain, "invalid cylinder axis");
    return GridSpec{DomainKind::cylinder, 2.0 * std::numbers::pi / periodic_count, h2, o1, o2,
                    IndexBox{0, periodic_count - 1, lo2, hi2}, periodic_count};
  }

  int n1() const { return box.hi1 - box.lo1 + 1; }
  int n2() const { return box.hi2 - box.lo2 + 1; }
  int size() const { return n1() * n2(); }
  double h() const { return std::sqrt(h1 * h2); }

  int wrap1(int i1) const {
    if (kind != DomainKind::cylinder) return i1;
    const int n = periodic_count;
    return box.lo1 + (((i1 - box.lo1) % n) + n) % n;
  }
  bool contains(int i1, int i2) const {
    if (i2 < box.lo2 || i2 > box.hi2) return false;
    return kind == DomainKind::cylinder || (i1 >= box.lo1 && i1 <= box.hi1);
  }
  // Row-major, axis 1 fastest.
  int linear(int i1, int i2) const { return (i2 - box.lo2) * n1() + (wrap1(i1) - box.lo1); }
  Offset index_of(int linear_index) const {
    return {box.lo1 + linear_index % n1(), box.lo2 + linear_index / n1()};
  }
  std::array<double, 2> node(int i1, int i2) const { return {origin1 + i1 * h1, origin2 + i2 * h2}; }
  std::array<double, 2> node(int linear_index) const {
    const Offset ix = index_of(linear_index);
    return node(ix[0], ix[1]);
  }
  // Representative of target -> source on the lattice; periodic axis mapped to [-n/2, n/2).
  Offset offset(Offset from, Offset to) const {
    Offset d{to[0] - from[0], to[1] - from[1]};
    if (kind == DomainKind::cylinder) {
      const int n = periodic_count;
      d[0] = ((d[0] % n) + n) % n;
      if (2 * d[0] >= n) d[0] -= n;
    }
    return d;
  }
  bool on_boundary(int linear_index) const {
    const Offset ix = index_of(linear_index);
    const bool edge2 = ix[1] == box.lo2 || ix[1] == box.hi2;
    if (kind == DomainKind::cylinder) return edge2;
    return edge2 || ix[0] == box.lo1 || ix[0] == box.hi1;
  }
};

struct GridFunction {
  GridSpec grid;
  std::vector<cplx> values;

  cplx operator()(int i1, int i2) const { return values[grid.linear(i1, i2)]; }

  template <class F>
  static GridFunction sample(const GridSpec& grid, F&& f) {
    GridFunction g{grid, std::vector<cplx>(grid.size())};
    for (int k = 0; k < grid.size(); ++k) {
      const auto v = grid.node(k);
      g.values[k] = f(v[0], v[1]);
    }
    return g;
  }
};

struct CorrectionStencil {
  int order = 3;
  cplx s = 0.0;
  std::vector<Offset> offsets;
  std::vector<cplx> weights;
  ComplexQuadraticForm form;
};

struct RuleResult {
  cplx value;
  double boundary_max = 0.0;  // max |g| on the outer ring of the index box
};

namespace detail {

// Form on the unit index lattice for spacings (h1, h2): A' = D A D / h^2.
inline ComplexQuadraticForm lattice_form(const ComplexQuadraticForm& a, const GridSpec& g) {
  const double hh = g.h1 * g.h2;
  if (g.h1 == g.h2) return a;
  return validate_admissible(a.E() * g.h1 * g.h1 / hh, a.F() * g.h1 * g.h2 / hh, a.G() * g.h2 * g.h2 / hh);
}

inline double boundary_max(const GridFunction& g) {
  double m = 0.0;
  for (int k = 0; k < g.grid.size(); ++k)
    if (g.grid.on_boundary(k)) m = std::max(m, std::abs(g.values[k]));
  return m;
}

inline std::vector<Offset> even_monomials(int max_degree) {
  std::vector<Offset> out;
  for (int d = 0; d <= max_degree; d += 2)
    for (int p = d; p >= 0; --p) out.push_back({p, d - p});
  return out;
}

inline std::vector<Offset> square_offsets(int radius) {
  std::vector<Offset> out;
  for (int j2 = -radius; j2 <= radius; ++j2)
    for (int j1 = -radius; j1 <= radius; ++j1) out.push_back({j1, j2});
  return out;
}

struct Pseudoinverse {
  Eigen::MatrixXd pinv;
  double condition = 0.0;
};

// Minimum-norm solver for the moment system sum_k w_k k^beta = m_beta.
inline Pseudoinverse moment_pseudoinverse(const std::vector<Offset>& monomials, const std::vector<Offset>& offsets) {
  Eigen::MatrixXd v(monomials.size(), offsets.size());
  for (std::size_t r = 0; r < monomials.size(); ++r)
    for (std::size_t c = 0; c < offsets.size(); ++c)
      v(r, c) = std::pow(double(offsets[c][0]), monomials[r][0]) * std::pow(double(offsets[c][1]), monomials[r][1]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  Eigen::VectorXd inv = sv.cwiseInverse();
  return {svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose(), cond};
}

inline const Pseudoinverse& cached_pseudoinverse(int key, const std::vector<Offset>& monomials,
                                                 const std::vector<Offset>& offsets) {
  static std::mutex mu;
  static std::map<int, Pseudoinverse> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, moment_pseudoinverse(monomials, offsets)).first;
  return it->second;
}

inline constexpr double kMaxStencilCondition = 1e12;

}  // namespace detail

// Moments sum' j^beta Q_A(j)^{-s}, analytically continued, for every beta in the list.
inline std::vector<cplx> lattice_moments(const ComplexQuadraticForm& a, cplx s, const std::vector<Offset>& betas,
                                         double eps = kDefaultZetaEps) {
  std::map<int, Jet3> jets;  // keyed by |beta| / 2
  std::vector<cplx> out;
  out.reserve(betas.size());
  for (const Offset& b : betas) {
    const int deg = b[0] + b[1];
    if (deg % 2) {
      out.push_back(0.0);
      continue;
    }
    const int n = deg / 2;
    auto it = jets.find(n);
    if (it == jets.end()) it = jets.emplace(n, zeta_jet(a, s - double(n), n, eps)).first;
    out.push_back(lattice_moment(it->second, s - double(n), b[0], b[1]));
  }
  return out;
}

inline CorrectionStencil fit_correction_stencil(const ComplexQuadraticForm& a, double s, int order,
                                                double eps = kDefaultZetaEps) {
  if (order != 5 && order != 7) throw Error(Errc::domain, "fitted stencils exist for orders 5 and 7");
  if (!(s < 1.0)) throw Error(Errc::unsupported_power, "corrected rule needs s < 1");
  const auto monomials = detail::even_monomials(order - 3);
  const auto offsets = detail::square_offsets(order == 5 ? 1 : 2);
  const auto& p = detail::cached_pseudoinverse(order, monomials, offsets);
  if (p.condition > detail::kMaxStencilCondition)
    throw Error(Errc::stencil, "moment system condition " + std::to_string(p.condition));
  const auto m = lattice_moments(a, s, monomials, eps);
  Eigen::VectorXcd rhs(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) rhs(i) = m[i];
  const Eigen::VectorXcd w = p.pinv.cast<cplx>() * rhs;
  CorrectionStencil st{order, s, offsets, std::vector<cplx>(w.data(), w.data() + w.size()), a};
  return st;
}

inline CorrectionStencil diagonal_stencil(const ComplexQuadraticForm& a, double s, double eps = kDefaultZetaEps) {
  return CorrectionStencil{3, s, {Offset{0, 0}}, {epstein_zeta(a, s, eps).value}, a};
}

// Sum' g(j) Q_A(j - target)^{-s} h^{2-2s} over the index box, node `target` omitted.
inline cplx punctured_trapezoid(const GridFunction& g, const ComplexQuadraticForm& a, cplx s,
                                Offset target = {0, 0}) {
  const GridSpec& grid = g.grid;
  const ComplexQuadraticForm al = detail::lattice_form(a, grid);
  std::vector<cplx> terms;
  terms.reserve(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    const Offset ix = grid.index_of(k);
    const Offset d = grid.offset(target, ix);
    if (d[0] == 0 && d[1] == 0) continue;
    if (g.values[k] == 0.0) {
      terms.push_back(0.0);
      continue;
    }
    terms.push_back(g.values[k] * std::exp(-s * std::log(al(d[0], d[1]))));
  }
  const cplx scale = std::exp((2.0 - 2.0 * s) * std::log(grid.h()));
  return pairwise_sum(std::span<const cplx>(terms)) * scale;
}

// Applies a unit-lattice stencil at `target`; offsets leaving the index box are dropped.
inline cplx apply_stencil(const GridFunction& g, const CorrectionStencil& st, Offset target) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < st.offsets.size(); ++i) {
    const int i1 = target[0] + st.offsets[i][0], i2 = target[1] + st.offsets[i][1];
    if (!g.grid.contains(i1, i2)) continue;
    acc += st.weights[i] * g(i1, i2);
  }
  return acc;
}

// I = T_h - h^{2-2s} sum_k w_k g(target + k); order 3 uses w_0 = Z_A(s).
inline RuleResult corrected_trapezoid(const GridFunction& g, const ComplexQuadraticForm& a, double s, int order,
                                      Offset target = {0, 0}, double eps = kDefaultZetaEps) {
  if (!(s < 1.0)) throw Error(Errc::unsupported_power, "corrected Q-form rule needs s < 1");
  if (order != 3 && order != 5 && order != 7) throw Error(Errc::domain, "order must be 3, 5 or 7");
  const ComplexQuadraticForm al = detail::lattice_form(a, g.grid);
  const CorrectionStencil st = order == 3 ? diagonal_stencil(al, s, eps) : fit_correction_stencil(al, s, order, eps);
  const cplx t = punctured_trapezoid(g, a, s, target);
  const double scale = std::pow(g.grid.h(), 2.0 - 2.0 * s);
  return {t - scale * apply_stencil(g, st, target), detail::boundary_max(g)};
}

}  // namespace czq

#endif
