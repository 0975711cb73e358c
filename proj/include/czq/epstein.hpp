#ifndef CZQ_EPSTEIN_HPP
#define CZQ_EPSTEIN_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "czq/error.hpp"
#include "czq/jet.hpp"
#include "czq/quadratic_form.hpp"
#include "czq/special.hpp"
#include "czq/summation.hpp"

namespace czq {

inline constexpr double kDefaultZetaEps = 1e-12;

struct ZetaValue {
  cplx value;
  cplx s;
  double truncation_radius = 0.0;
  double est_abs_error = 0.0;
};

struct ZetaOptions {
  double eps = kDefaultZetaEps;
  std::optional<double> radius;  // overrides the automatic truncation radius
};

using Jet3 = CJet<3>;

namespace detail {

inline cplx pi_pow(cplx s) { return std::exp(s * std::log(std::numbers::pi)); }

inline double radius_for_rate(double rate, double eps) {
  const double arg = std::log(4.0 * std::numbers::pi / (eps * rate));
  return std::sqrt(std::max(arg, 0.0) / rate) + 1.0;
}

// Tolerance handed to the lattice sums so that the final value meets eps after
// multiplication by pi^s / Gamma(s).
inline double inner_eps(cplx s, double eps) {
  return eps / std::max(1.0, std::abs(pi_pow(s) * rgamma(s)));
}

inline void require_direct(const ComplexQuadraticForm& a) {
  if (!a.directly_admissible())
    throw Error(Errc::inadmissible, "Re(A) and Re(A^-1) must both be positive definite: " + a.describe());
}

// Q_A(j) = Q_{xi A}(j) / xi must hold on principal logarithms before Z_A = xi^s Z_{xi A} is used.
inline void check_rotation_branch(const ComplexQuadraticForm& a, const ComplexQuadraticForm& b, cplx xi) {
  static constexpr int probes[][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {1, 2}, {2, -1},
                                      {1, -2}, {3, 1}, {1, 3}, {3, -1}, {1, -3}, {5, 2}, {2, 5}};
  const cplx log_xi = std::log(xi);
  for (const auto& p : probes) {
    const cplx lhs = std::log(a(p[0], p[1]));
    const cplx rhs = std::log(b(p[0], p[1])) - log_xi;
    if (std::abs(lhs - rhs) > 1e-9 * (1.0 + std::abs(lhs)))
      throw Error(Errc::branch, "rotated-diagonal identity crosses the logarithm cut for " + a.describe());
  }
}

inline ComplexQuadraticForm rotated(const ComplexQuadraticForm& a) {
  const cplx xi = a.rotation();
  ComplexQuadraticForm b = validate_admissible(xi * a.E(), xi * a.F(), xi * a.G());
  if (!b.directly_admissible())
    throw Error(Errc::inadmissible, "rotated form is not admissible: " + b.describe());
  check_rotation_branch(a, b, xi);
  return b;
}

// Enumerates one representative of each pair +-j with 0 < |j| <= rho.
template <class F>
void for_half_lattice(double rho, F&& f) {
  const int r = static_cast<int>(std::floor(rho));
  const double rho2 = rho * rho;
  for (int j1 = 0; j1 <= r; ++j1)
    for (int j2 = -r; j2 <= r; ++j2) {
      if (j1 == 0 && j2 <= 0) continue;
      if (double(j1) * j1 + double(j2) * j2 > rho2) continue;
      f(j1, j2);
    }
}

// sqrt|det A|, snapped to 1 when already close so unimodular forms are not rescaled.
inline double unimodular_scale(const ComplexQuadraticForm& a) {
  const double c = std::sqrt(std::abs(a.det()));
  return std::abs(c - 1.0) < 1e-12 ? 1.0 : c;
}

struct CrandallSums {
  cplx direct;   // sum' G_s(pi Q_A(j))
  cplx dual;     // sum' G_{1-s}(pi Q_{A^-1}(j))
  double err = 0.0;
  double rho = 0.0;
};

inline CrandallSums crandall_sums(const ComplexQuadraticForm& a, cplx s, double rho) {
  CrandallSums out{0.0, 0.0, 0.0, rho};
  const double pi = std::numbers::pi;
  for_half_lattice(rho, [&](int j1, int j2) {
    const SpecialFnResult g1 = incomplete_gamma_ratio(s, pi * a(j1, j2));
    const SpecialFnResult g2 = incomplete_gamma_ratio(1.0 - s, pi * a.eval_inverse(j1, j2));
    out.direct += g1.value;
    out.dual += g2.value;
    out.err += g1.est_abs_error + g2.est_abs_error;
  });
  out.direct *= 2.0;
  out.dual *= 2.0;
  out.err *= 2.0;
  return out;
}

}  // namespace detail

// Radius rho such that the discarded lattice terms of both Crandall sums are below eps.
// Decay rates are the smallest eigenvalues of Re(A) and Re(A^-1).
inline double truncation_radius(const ComplexQuadraticForm& a, cplx s, double eps, int derivative_order = 0) {
  if (!(eps > 0.0)) throw Error(Errc::domain, "truncation_radius needs eps > 0");
  detail::require_direct(a);
  const double lam = a.min_eig_re();
  const double lam_inv = a.min_eig_re_inverse();
  const double e = detail::inner_eps(s, eps);
  double rho = std::max(detail::radius_for_rate(lam, e), detail::radius_for_rate(lam_inv, e));
  // The incomplete-gamma tail bound needs pi Re Q to dominate |s|.
  const double sn = std::abs(s) + derivative_order, sd = std::abs(1.0 - s) + derivative_order;
  const double bulk = std::max({a.norm(), sn / lam, a.norm_inverse(), sd / lam_inv});
  rho = std::max(rho, std::sqrt(bulk / std::numbers::pi));
  return rho;
}

// Lambda_A(s) = pi^{-s} Gamma(s) Z_A(s), finite at the trivial zeros of Z.
inline ZetaValue completed_zeta(const ComplexQuadraticForm& a, cplx s, const ZetaOptions& opt = {}) {
  if (s == 1.0 || s == 0.0) throw Error(Errc::pole, "completed zeta has poles at s = 0 and s = 1");
  detail::require_direct(a);
  if (const double c = detail::unimodular_scale(a); c != 1.0 && !opt.radius) {
    ZetaValue z = completed_zeta(scaled(a, 1.0 / c), s, opt);
    const cplx f = std::exp(-s * std::log(c));
    return {z.value * f, s, z.truncation_radius, z.est_abs_error * std::abs(f)};
  }
  const double rho = opt.radius ? *opt.radius : truncation_radius(a, s, opt.eps);
  const detail::CrandallSums cs = detail::crandall_sums(a, s, rho);
  const cplx isd = 1.0 / a.sqrt_det();
  const cplx value = cs.direct + isd * (cs.dual + 1.0 / (s - 1.0)) - 1.0 / s;
  return {value, s, rho, cs.err * (1.0 + std::abs(isd)) + opt.eps};
}

inline ZetaValue epstein_zeta(const ComplexQuadraticForm& a, cplx s, const ZetaOptions& opt) {
  if (s == 1.0) throw Error(Errc::pole, "Epstein zeta has a pole at s = 1");
  if (!a.directly_admissible()) {
    if (!a.has(kDiagonalRelaxed)) throw Error(Errc::inadmissible, "form is not admissible: " + a.describe());
    const ComplexQuadraticForm b = detail::rotated(a);
    ZetaValue z = epstein_zeta(b, s, opt);
    const cplx xs = std::exp(s * std::log(a.rotation()));
    z.value *= xs;
    z.est_abs_error *= std::abs(xs);
    return z;
  }
  // Z_{cB}(s) = c^{-s} Z_B(s): evaluate on the unimodular form so that scaling is exact.
  if (const double c = detail::unimodular_scale(a); c != 1.0 && !opt.radius) {
    ZetaValue z = epstein_zeta(scaled(a, 1.0 / c), s, opt);
    const cplx f = std::exp(-s * std::log(c));
    return {z.value * f, s, z.truncation_radius, z.est_abs_error * std::abs(f)};
  }
  const double rho = opt.radius ? *opt.radius : truncation_radius(a, s, opt.eps);
  const detail::CrandallSums cs = detail::crandall_sums(a, s, rho);
  const cplx isd = 1.0 / a.sqrt_det();
  const cplx ps = detail::pi_pow(s);
  const cplx pre = ps * rgamma(s);
  // -pi^s/Gamma(s+1) carries the -1/s pole term, which gives Z_A(0) = -1 exactly.
  const cplx value = pre * (cs.direct + isd * (cs.dual + 1.0 / (s - 1.0))) - ps * rgamma(s + 1.0);
  const double err = std::abs(pre) * cs.err * (1.0 + std::abs(isd)) + opt.eps;
  return {value, s, rho, err};
}

inline ZetaValue epstein_zeta(const ComplexQuadraticForm& a, cplx s, double eps = kDefaultZetaEps) {
  return epstein_zeta(a, s, ZetaOptions{eps, std::nullopt});
}

// Taylor coefficients of Z_{A + dA}(s) in (dE, dF, dG) up to total degree `degree`.
inline Jet3 zeta_jet(const ComplexQuadraticForm& a, cplx s, int degree, double eps = kDefaultZetaEps) {
  if (s == 1.0) throw Error(Errc::pole, "Epstein zeta has a pole at s = 1");
  if (!a.directly_admissible()) {
    if (!a.has(kDiagonalRelaxed)) throw Error(Errc::inadmissible, "form is not admissible: " + a.describe());
    const ComplexQuadraticForm b = detail::rotated(a);
    Jet3 j = zeta_jet(b, s, degree, eps);
    const cplx xi = a.rotation();
    const cplx xs = std::exp(s * std::log(xi));
    for (int i = 0; i < j.size(); ++i) j[i] *= xs * std::pow(xi, j.table().total_degree(i));
    return j;
  }
  if (const double c = detail::unimodular_scale(a); c != 1.0) {
    Jet3 j = zeta_jet(scaled(a, 1.0 / c), s, degree, eps);
    const cplx f = std::exp(-s * std::log(c));
    for (int i = 0; i < j.size(); ++i) j[i] *= f * std::pow(c, -j.table().total_degree(i));
    return j;
  }
  const int d = degree;
  const double pi = std::numbers::pi;
  // Polynomial weights j^{2n} grow with the order; tighten eps to compensate.
  double rho = truncation_radius(a, s, eps, d);
  if (d > 0) rho = truncation_radius(a, s, eps / (1.0 + std::pow(rho * rho, d)), d);

  const Jet3 e0 = Jet3::variable(d, 0, a.E());
  const Jet3 f0 = Jet3::variable(d, 1, a.F());
  const Jet3 g0 = Jet3::variable(d, 2, a.G());
  const Jet3 det = e0 * g0 - f0 * f0;
  const Jet3 inv_det = reciprocal(det);
  // Principal det^{-1/2}, the same branch as sqrt_det().
  const Jet3 isd = compose(det, detail::pow_series(a.det(), cplx(-0.5), d));

  const auto& table = det.table();
  std::vector<double> inv_fact(d + 1, 1.0);
  for (int n = 1; n <= d; ++n) inv_fact[n] = inv_fact[n - 1] / n;

  Jet3 direct(d), dual(d);
  std::vector<cplx> g1(d + 1), g2(d + 1);
  std::vector<cplx> pa(d + 1), pb(d + 1), pc(d + 1);
  detail::for_half_lattice(rho, [&](int j1, int j2) {
    const double x = double(j1) * j1, y = 2.0 * j1 * j2, z = double(j2) * j2;
    const cplx q = a(j1, j2);
    cplx mpi_n = 1.0;
    for (int n = 0; n <= d; ++n) {
      g1[n] = mpi_n * incomplete_gamma_ratio(s + double(n), pi * q).value;
      mpi_n *= -pi;
    }
    pa[0] = pb[0] = pc[0] = 1.0;
    for (int n = 1; n <= d; ++n) {
      pa[n] = pa[n - 1] * x;
      pb[n] = pb[n - 1] * y;
      pc[n] = pc[n - 1] * z;
    }
    for (int i = 0; i < table.size(); ++i) {
      const auto& ex = table.exponents(i);
      direct[i] += g1[table.total_degree(i)] * pa[ex[0]] * pb[ex[1]] * pc[ex[2]] * inv_fact[ex[0]] *
                   inv_fact[ex[1]] * inv_fact[ex[2]];
    }
    // Dual form Q_{A^-1}(j) as a jet in the parameters.
    Jet3 lin(d, z * a.E() - y * a.F() + x * a.G());
    if (d >= 1) {
      lin[table.index({1, 0, 0})] = z;
      lin[table.index({0, 1, 0})] = -y;
      lin[table.index({0, 0, 1})] = x;
    }
    const Jet3 qd = lin * inv_det;
    mpi_n = 1.0;
    for (int n = 0; n <= d; ++n) {
      g2[n] = mpi_n * incomplete_gamma_ratio(1.0 - s + double(n), pi * qd.value()).value * inv_fact[n];
      mpi_n *= -pi;
    }
    dual += compose(qd, g2);
  });
  direct *= 2.0;
  dual *= 2.0;
  dual += 1.0 / (s - 1.0);
  const cplx ps = detail::pi_pow(s);
  Jet3 out = (direct + isd * dual) * (ps * rgamma(s));
  out -= ps * rgamma(s + 1.0);
  return out;
}

struct ZetaGradient {
  cplx value;
  cplx dE, dF, dG;
};

inline ZetaGradient zeta_parameter_gradient(const ComplexQuadraticForm& a, cplx s, double eps = kDefaultZetaEps) {
  const Jet3 j = zeta_jet(a, s, 1, eps);
  const auto& t = j.table();
  return {j.value(), j[t.index({1, 0, 0})], j[t.index({0, 1, 0})], j[t.index({0, 0, 1})]};
}

// Generalized lattice moment sum' j1^g1 j2^g2 Q_A(j)^{-(s_base + (g1+g2)/2)}, continued
// analytically, read off the Taylor jet of Z_A at s_base.
inline cplx lattice_moment(const Jet3& jet, cplx s_base, int g1, int g2) {
  if (g1 < 0 || g2 < 0) throw Error(Errc::domain, "negative moment exponent");
  if ((g1 + g2) % 2 != 0) return 0.0;
  const int b = g1 % 2;
  const int a = (g1 - b) / 2, c = (g2 - b) / 2;
  const int n = a + b + c;
  if (n > jet.degree()) throw Error(Errc::domain, "zeta jet degree too small for the requested moment");
  cplx rising = 1.0;
  for (int k = 0; k < n; ++k) rising *= s_base + double(k);
  if (rising == 0.0) throw Error(Errc::domain, "moment not recoverable at this base exponent");
  double fact = 1.0;
  for (int k = 2; k <= a; ++k) fact *= k;
  for (int k = 2; k <= c; ++k) fact *= k;
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return fact * jet.coefficient({a, b, c}) / (sign * rising * double(1 << b));
}

// W^(N) = sum over the box |j|_inf <= N (origin omitted) minus the integral over [-N-1/2, N+1/2]^2.
inline cplx wigner_limit_oracle(const ComplexQuadraticForm& a, cplx s, int N) {
  if (!(s.real() > 0.0 && s.real() < 1.0)) throw Error(Errc::domain, "Wigner limit needs 0 < Re(s) < 1");
  if (N < 1) throw Error(Errc::domain, "Wigner limit needs N >= 1");
  std::vector<cplx> terms;
  terms.reserve(std::size_t(2 * N + 1) * (2 * N + 1));
  for (int j1 = -N; j1 <= N; ++j1)
    for (int j2 = -N; j2 <= N; ++j2)
      if (j1 != 0 || j2 != 0) terms.push_back(std::exp(-s * std::log(a(j1, j2))));
  const cplx box_sum = pairwise_sum(std::span<const cplx>(terms));

  // Polar form of the box integral: Q(r e_t)^{-s} = r^{-2s} Q(e_t)^{-s}, radial part exact.
  const double half = N + 0.5;
  const cplx p = 2.0 - 2.0 * s;
  auto integrand = [&](double t) -> cplx {
    const double c = std::cos(t), sn = std::sin(t);
    const double r = half / std::max(std::abs(c), std::abs(sn));
    return std::exp(-s * std::log(a(c, sn)) + p * std::log(r)) / p;
  };
  cplx integral = 0.0;
  const double quarter = 0.25 * std::numbers::pi;
  for (int k = 0; k < 8; ++k) {
    integral += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, k * quarter,
                                                                              (k + 1) * quarter, 8, 1e-14);
  }
  return box_sum - integral;
}

// Leading Euler-Maclaurin term of W^(N) - Z_A(s): -(1/24) times the boundary integral of the
// outward normal derivative of Q^{-s} over the box edge |v|_inf = N + 1/2.
inline cplx wigner_boundary_estimate(const ComplexQuadraticForm& a, cplx s, int N) {
  const double h = N + 0.5;
  auto dn = [&](double x, double y, double nx, double ny) -> cplx {
    const cplx gx = 2.0 * (a.E() * x + a.F() * y), gy = 2.0 * (a.F() * x + a.G() * y);
    return -s * std::exp((-s - 1.0) * std::log(a(x, y))) * (gx * nx + gy * ny);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  cplx total = 0.0;
  total += GK::integrate([&](double t) { return dn(h, t, 1.0, 0.0); }, -h, h, 8, 1e-13);
  total += GK::integrate([&](double t) { return dn(-h, t, -1.0, 0.0); }, -h, h, 8, 1e-13);
  total += GK::integrate([&](double t) { return dn(t, h, 0.0, 1.0); }, -h, h, 8, 1e-13);
  total += GK::integrate([&](double t) { return dn(t, -h, 0.0, -1.0); }, -h, h, 8, 1e-13);
  return -total / 24.0;
}

}  // namespace czq

#endif
