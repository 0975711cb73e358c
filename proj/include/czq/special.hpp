#ifndef CZQ_SPECIAL_HPP
#define CZQ_SPECIAL_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "czq/error.hpp"

namespace czq {

using cplx = std::complex<double>;

struct SpecialFnResult {
  cplx value;
  double est_abs_error = 0.0;
};

namespace detail {

// Lanczos approximation, g = 7, n = 9.
inline constexpr double kLanczosG = 7.0;
inline constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real();
}

inline double distance_to_nonpositive_integers(cplx s) {
  double n = std::round(s.real());
  if (n > 0.0) n = 0.0;
  return std::abs(s - n);
}

inline cplx log_gamma_lanczos(cplx z) {
  z -= 1.0;
  cplx x = kLanczos[0];
  for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
  const cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// Asymptotic series with Bernoulli terms through B_14, used for |z| >= 10 where the
// Lanczos form loses accuracy away from the real axis.
inline cplx log_gamma_stirling(cplx z) {
  static constexpr double b2k[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
  cplx s = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi);
  const cplx iz2 = 1.0 / (z * z);
  cplx zp = 1.0 / z;
  for (int k = 1; k <= 7; ++k) {
    s += b2k[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * zp;
    zp *= iz2;
  }
  return s;
}

inline cplx log_gamma_right(cplx z) {
  return std::abs(z) >= 10.0 ? log_gamma_stirling(z) : log_gamma_lanczos(z);
}

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr double kLentzTiny = 1e-300;
inline constexpr int kMaxIterations = 10000;

// Power series for the lower function: gamma(s,z) = z^s e^{-z} * sum.
inline cplx lower_series_sum(cplx s, cplx z, int& iterations) {
  cplx term = 1.0 / s;
  cplx sum = term;
  for (iterations = 1; iterations <= kMaxIterations; ++iterations) {
    term *= z / (s + double(iterations));
    sum += term;
    if (std::abs(term) <= kEps * std::abs(sum)) return sum;
  }
  throw Error(Errc::convergence, "incomplete gamma series did not converge after " +
                                     std::to_string(kMaxIterations) + " iterations");
}

// Legendre continued fraction by modified Lentz: Gamma(s,z) = z^s e^{-z} * cf.
inline cplx legendre_fraction(cplx s, cplx z, int& iterations, double& last_delta) {
  cplx b = z + 1.0 - s;
  cplx c = 1.0 / kLentzTiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (iterations = 1; iterations <= kMaxIterations; ++iterations) {
    const cplx an = -double(iterations) * (double(iterations) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kLentzTiny) d = kLentzTiny;
    c = b + an / c;
    if (std::abs(c) < kLentzTiny) c = kLentzTiny;
    d = 1.0 / d;
    const cplx del = d * c;
    h *= del;
    last_delta = std::abs(del - 1.0);
    if (last_delta < 4.0 * kEps) return h;
  }
  throw Error(Errc::convergence, "incomplete gamma continued fraction did not converge after " +
                                     std::to_string(kMaxIterations) + " iterations");
}

inline bool use_series(cplx s, cplx z) {
  return std::abs(z) < s.real() + 1.0 && distance_to_nonpositive_integers(s) > 0.25;
}

inline void check_incomplete_args(cplx z) {
  if (!(z.real() > 0.0) || !std::isfinite(z.imag()))
    throw Error(Errc::domain, "incomplete gamma needs Re(z) > 0");
}

}  // namespace detail

// Principal log-gamma; the imaginary part is continuous along rays from +infinity.
inline cplx log_gamma(cplx z) {
  if (detail::is_nonpositive_integer(z))
    throw Error(Errc::domain, "log_gamma pole at z = " + std::to_string(z.real()));
  if (z.real() >= 0.5) return detail::log_gamma_right(z);
  const int n = static_cast<int>(std::ceil(0.5 - z.real()));
  cplx shift = 0.0;
  for (int k = 0; k < n; ++k) shift += std::log(z + double(k));
  return detail::log_gamma_right(z + double(n)) - shift;
}

inline cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

// 1/Gamma(z), exactly zero at the poles of Gamma.
inline cplx rgamma(cplx z) {
  if (detail::is_nonpositive_integer(z)) return 0.0;
  return std::exp(-log_gamma(z));
}

inline SpecialFnResult upper_incomplete_gamma(cplx s, cplx z) {
  detail::check_incomplete_args(z);
  const cplx prefactor = std::exp(s * std::log(z) - z);
  if (detail::use_series(s, z)) {
    int it = 0;
    const cplx lower = prefactor * detail::lower_series_sum(s, z, it);
    const cplx full = gamma(s);
    const cplx value = full - lower;
    const double err = detail::kEps * (8.0 * std::abs(full) + (4.0 + it) * std::abs(lower));
    return {value, err};
  }
  int it = 0;
  double delta = 0.0;
  const cplx value = prefactor * detail::legendre_fraction(s, z, it, delta);
  return {value, std::abs(value) * (detail::kEps * (4.0 + std::sqrt(double(it))) + delta)};
}

// Gamma(s,z) z^{-s} = int_1^inf t^{s-1} e^{-z t} dt, without forming z^s twice.
inline SpecialFnResult incomplete_gamma_ratio(cplx s, cplx z) {
  detail::check_incomplete_args(z);
  if (detail::use_series(s, z)) {
    int it = 0;
    const cplx ez = std::exp(-z);
    const cplx lower = ez * detail::lower_series_sum(s, z, it);
    const cplx full = std::exp(log_gamma(s) - s * std::log(z));
    const cplx value = full - lower;
    const double err = detail::kEps * (8.0 * std::abs(full) + (4.0 + it) * std::abs(lower));
    return {value, err};
  }
  int it = 0;
  double delta = 0.0;
  const cplx value = std::exp(-z) * detail::legendre_fraction(s, z, it, delta);
  return {value, std::abs(value) * (detail::kEps * (4.0 + std::sqrt(double(it))) + delta)};
}

struct ErfcFamily {
  double erfc;
  double phi;
};

// phi(x) = (x erfc(x) - exp(-x^2)/sqrt(pi)) / 2
inline ErfcFamily erfc_family(double x) {
  const double e = std::erfc(x);
  return {e, 0.5 * (x * e - std::exp(-x * x) / std::sqrt(std::numbers::pi))};
}

inline double phi(double x) { return erfc_family(x).phi; }

// Taylor coefficients phi^{(n)}(x)/n!, n = 0..order.
inline std::vector<double> phi_taylor(double x, int order) {
  std::vector<double> c(order + 1, 0.0);
  const ErfcFamily f = erfc_family(x);
  c[0] = f.phi;
  if (order >= 1) c[1] = 0.5 * f.erfc;
  if (order < 2) return c;
  // phi^{(n)} = -(-1)^n H_{n-2}(x) e^{-x^2}/sqrt(pi) for n >= 2 (physicists' Hermite).
  const double g = std::exp(-x * x) / std::sqrt(std::numbers::pi);
  double hm1 = 0.0, h = 1.0, fact = 2.0;
  for (int n = 2; n <= order; ++n) {
    const int m = n - 2;
    if (m >= 1) {
      const double next = 2.0 * x * h - 2.0 * (m - 1) * hm1;
      hm1 = h;
      h = next;
    }
    const double sign = (n % 2 == 0) ? -1.0 : 1.0;
    c[n] = sign * h * g / fact;
    fact *= double(n + 1);
  }
  return c;
}

}  // namespace czq

#endif
