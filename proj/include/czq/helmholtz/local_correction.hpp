#ifndef CZQ_HELMHOLTZ_LOCAL_CORRECTION_HPP
#define CZQ_HELMHOLTZ_LOCAL_CORRECTION_HPP

// Diagonal corrections for the Helmholtz single and double layer on a chart.
//
// In index coordinates w (u = H w) the kernel near the target expands into
// pieces c * f(w) * R(w)^mu with R = Q + delta, Q the quadratic part of the
// squared distance and delta = O(|w|^3). Each term c f delta^m w^beta Q^{mu-m}
// has lattice-sum-minus-integral -coef * Z_gamma(m - mu), so the correction for
// density monomial w^beta is the moment M_beta below. The weights reproduce
// M_beta on a small stencil.

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "czq/epstein.hpp"
#include "czq/error.hpp"
#include "czq/jet.hpp"
#include "czq/quadrature.hpp"
#include "czq/surfaces.hpp"

namespace czq {

struct LocalCorrection {
  std::vector<Offset> offsets;
  std::vector<cplx> single_weights;  // S[sigma](x_l) += sum_k single_weights[k] sigma(l + k)
  std::vector<cplx> double_weights;  // same for D
};

struct CorrectionRequest {
  int order = 3;
  bool single = true;
  bool dbl = true;
  double eps = kDefaultZetaEps;
};

namespace detail {

inline std::vector<Offset> monomials_up_to(int degree) {
  std::vector<Offset> out;
  for (int d = 0; d <= degree; ++d)
    for (int p = d; p >= 0; --p) out.push_back({p, d - p});
  return out;
}

inline std::vector<Offset> diamond_offsets(int radius) {
  std::vector<Offset> out;
  for (int j2 = -radius; j2 <= radius; ++j2)
    for (int j1 = -radius; j1 <= radius; ++j1)
      if (std::abs(j1) + std::abs(j2) <= radius) out.push_back({j1, j2});
  return out;
}

struct SurfaceStencilBasis {
  std::vector<Offset> monomials;
  std::vector<Offset> offsets;
  Eigen::MatrixXd pinv;
};

inline const SurfaceStencilBasis& surface_stencil_basis(int order) {
  static std::mutex mu;
  static std::map<int, SurfaceStencilBasis> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  SurfaceStencilBasis b;
  b.monomials = monomials_up_to(order - 2);
  b.offsets = diamond_offsets((order - 3) / 2 + (order > 3 ? 1 : 0));
  if (order == 3) b.offsets = {Offset{0, 0}};
  const Pseudoinverse p = moment_pseudoinverse(b.monomials, b.offsets);
  // Order 3 fits only beta = 0 on the single node; the other rows vanish identically.
  if (order > 3 && p.condition > kMaxStencilCondition)
    throw Error(Errc::stencil, "surface moment system condition " + std::to_string(p.condition));
  b.pinv = p.pinv;
  return cache.emplace(order, std::move(b)).first->second;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

inline cplx binomial(double mu, int m) {
  double c = 1.0;
  for (int k = 0; k < m; ++k) c *= (mu - k) / (k + 1);
  return c;
}

// One kernel piece c * f(w) * R^mu.
struct KernelPiece {
  int layer;  // 0 single, 1 double
  cplx coef;
  double mu;
  const Jet2* f;
  int f_min_degree;
};

}  // namespace detail

inline LocalCorrection local_correction(const SurfaceChart& chart, const GridSpec& grid, int node, cplx k,
                                        const CorrectionRequest& req = {}) {
  const int p = req.order;
  if (p != 3 && p != 5 && p != 7) throw Error(Errc::domain, "correction order must be 3, 5 or 7");
  const auto v = grid.node(node);
  const double h1 = grid.h1, h2 = grid.h2;

  // Largest monomial degree that any kept term reaches; bounds every jet below.
  const int max_gamma = 3 * (p - 3) + 2;
  const int dx = max_gamma + 2;
  JetPoint x = chart.taylor(v[0], v[1], dx);
  const auto& tx = x[0].table();
  for (auto& xi : x)
    for (int i = 0; i < xi.size(); ++i) {
      const auto& e = tx.exponents(i);
      xi[i] *= std::pow(h1, e[0]) * std::pow(h2, e[1]);
    }

  // Squared distance and its quadratic part.
  std::array<Jet2, 3> d;
  for (int i = 0; i < 3; ++i) {
    d[i] = x[i].truncated(max_gamma);
    d[i][0] = 0.0;
  }
  const Jet2 r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
  const cplx qe = r2.coefficient({2, 0}), qf = 0.5 * r2.coefficient({1, 1}), qg = r2.coefficient({0, 2});
  ComplexQuadraticForm form;
  try {
    form = validate_admissible(qe, qf, qg);
  } catch (const Error& e) {
    throw Error(Errc::geometry, "local form at " + detail::at(v[0], v[1]) + ": " + e.what());
  }
  Jet2 delta = r2 - r2.homogeneous_part(2);

  // Tangents, unnormalized normal, Jacobian and double-layer numerator -d . z.
  std::array<Jet2, 3> t1, t2;
  for (int i = 0; i < 3; ++i) {
    t1[i] = x[i].derivative(0).truncated(max_gamma);
    t2[i] = x[i].derivative(1).truncated(max_gamma);
  }
  const std::array<Jet2, 3> z{t1[1] * t2[2] - t1[2] * t2[1], t1[2] * t2[0] - t1[0] * t2[2],
                              t1[0] * t2[1] - t1[1] * t2[0]};
  const Jet2 jac = sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
  Jet2 numer = -(d[0] * z[0] + d[1] * z[1] + d[2] * z[2]);
  numer[0] = 0.0;

  const double inv4pi = 0.25 / std::numbers::pi;
  const cplx ik = cplx(0.0, 1.0) * k;
  std::vector<detail::KernelPiece> pieces;
  // e^{ikr}/(4 pi r) = sum (ik)^n/n! r^{n-1}/(4 pi); (1 - ikr) e^{ikr} = sum (1-n)/n! (ikr)^n.
  for (int n = 0; n <= p - 3; n += 2) {
    if (req.single) pieces.push_back({0, std::pow(ik, n) / detail::factorial(n) * inv4pi, 0.5 * (n - 1), &jac, 0});
    if (req.dbl)
      pieces.push_back({1, std::pow(ik, n) * (1.0 - n) / detail::factorial(n) * inv4pi, 0.5 * (n - 3), &numer, 2});
  }

  // Collect (piece, m) products f delta^m truncated at their largest useful degree.
  struct Term {
    int layer;
    cplx coef;  // includes binom(mu, m)
    double tau;
    int max_deg;
    Jet2 poly;
  };
  std::vector<Term> terms;
  const int bmax = p - 2;
  for (const auto& pc : pieces) {
    Jet2 dm(max_gamma, 1.0);
    for (int m = 0;; ++m) {
      // Kept terms have |gamma| + 2(mu - m) <= p - 4.
      const int max_deg = static_cast<int>(std::lround(p - 4 - 2.0 * pc.mu + 2.0 * m));
      if (pc.f_min_degree + 3 * m > max_deg) break;
      Jet2 prod = (*pc.f).truncated(max_deg) * dm.truncated(max_deg);
      terms.push_back({pc.layer, pc.coef * detail::binomial(pc.mu, m), m - pc.mu, max_deg, std::move(prod)});
      dm = dm * delta;
    }
  }

  // Zeta jets per base exponent sigma = tau - |gamma|/2.
  std::map<double, int> need;
  for (const auto& t : terms)
    for (int g = 0; g <= t.max_deg; g += 2) {
      const double sb = t.tau - 0.5 * g;
      need[sb] = std::max(need[sb], g / 2);
    }
  std::map<double, Jet3> jets;
  for (const auto& [sb, deg] : need) jets.emplace(sb, zeta_jet(form, sb, deg, req.eps));

  const detail::SurfaceStencilBasis& basis = detail::surface_stencil_basis(p);
  Eigen::MatrixXcd moments = Eigen::MatrixXcd::Zero(basis.monomials.size(), 2);
  for (std::size_t bi = 0; bi < basis.monomials.size(); ++bi) {
    const Offset beta = basis.monomials[bi];
    const int bdeg = beta[0] + beta[1];
    if (bdeg > bmax) continue;
    for (const auto& t : terms) {
      const auto& tab = t.poly.table();
      for (int i = 0; i < tab.size(); ++i) {
        const auto& e = tab.exponents(i);
        const int g1 = e[0] + beta[0], g2 = e[1] + beta[1];
        const int gd = g1 + g2;
        if (gd > t.max_deg || gd % 2) continue;
        const cplx c = t.poly[i];
        if (c == 0.0) continue;
        const double sb = t.tau - 0.5 * gd;
        moments(bi, t.layer) -= t.coef * c * lattice_moment(jets.at(sb), sb, g1, g2);
      }
    }
  }
  // The smooth e^{ikr}/(4 pi) piece of the single layer misses only the node itself.
  if (req.single) moments(0, 0) += ik * inv4pi * jac.value();

  const Eigen::MatrixXcd w = basis.pinv.cast<cplx>() * moments;
  LocalCorrection out;
  out.offsets = basis.offsets;
  if (req.single) out.single_weights.assign(w.col(0).data(), w.col(0).data() + w.rows());
  if (req.dbl) out.double_weights.assign(w.col(1).data(), w.col(1).data() + w.rows());
  return out;
}

}  // namespace czq

#endif
