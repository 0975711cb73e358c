#ifndef CZQ_QUADRATIC_FORM_HPP
#define CZQ_QUADRATIC_FORM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "czq/error.hpp"
#include "czq/special.hpp"

namespace czq {

enum Admissibility : unsigned {
  kNone = 0,
  kRePd = 1u << 0,
  kReInvPd = 1u << 1,
  kDiagonalRelaxed = 1u << 2,
};

namespace detail {

inline double min_eig_sym(double a, double b, double c) {
  const double m = 0.5 * (a + c);
  const double r = std::hypot(0.5 * (a - c), b);
  return m - r;
}

inline bool real_part_pd(cplx e, cplx f, cplx g) {
  return e.real() > 0.0 && e.real() * g.real() - f.real() * f.real() > 0.0;
}

// Largest singular value of [[e,f],[f,g]].
inline double spectral_norm(cplx e, cplx f, cplx g) {
  const double fro2 = std::norm(e) + 2.0 * std::norm(f) + std::norm(g);
  const double det = std::abs(e * g - f * f);
  const double disc = std::max(0.0, fro2 * fro2 - 4.0 * det * det);
  return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
}

inline std::string describe(cplx e, cplx f, cplx g) {
  std::ostringstream os;
  os.precision(17);
  os << "E=" << e << " F=" << f << " G=" << g;
  return os.str();
}

}  // namespace detail

// A = [[E, F], [F, G]], complex symmetric, Q_A(v) = E v1^2 + 2F v1 v2 + G v2^2.
class ComplexQuadraticForm {
 public:
  ComplexQuadraticForm() : ComplexQuadraticForm(1.0, 0.0, 1.0, kRePd | kReInvPd, 1.0) {}

  cplx E() const { return e_; }
  cplx F() const { return f_; }
  cplx G() const { return g_; }
  cplx det() const { return det_; }
  // Principal root; equals the root continued from Re(A) whenever Re(A) is positive definite.
  cplx sqrt_det() const { return std::sqrt(det_); }
  std::array<cplx, 3> inverse_entries() const { return {g_ / det_, -f_ / det_, e_ / det_}; }

  unsigned flags() const { return flags_; }
  bool has(Admissibility a) const { return (flags_ & a) != 0; }
  bool directly_admissible() const { return has(kRePd) && has(kReInvPd); }
  // Unit rotation used by the diagonal-relaxed path (1 when directly admissible).
  cplx rotation() const { return xi_; }

  cplx operator()(double v1, double v2) const { return e_ * v1 * v1 + 2.0 * f_ * v1 * v2 + g_ * v2 * v2; }
  cplx eval_inverse(double v1, double v2) const {
    return (g_ * v1 * v1 - 2.0 * f_ * v1 * v2 + e_ * v2 * v2) / det_;
  }

  double min_eig_re() const { return detail::min_eig_sym(e_.real(), f_.real(), g_.real()); }
  double min_eig_re_inverse() const {
    const auto inv = inverse_entries();
    return detail::min_eig_sym(inv[0].real(), inv[1].real(), inv[2].real());
  }
  double norm() const { return detail::spectral_norm(e_, f_, g_); }
  double norm_inverse() const {
    const auto inv = inverse_entries();
    return detail::spectral_norm(inv[0], inv[1], inv[2]);
  }

  std::string describe() const { return detail::describe(e_, f_, g_); }

  friend ComplexQuadraticForm validate_admissible(cplx E, cplx F, cplx G);
  friend ComplexQuadraticForm scaled(const ComplexQuadraticForm& a, cplx c);

 private:
  ComplexQuadraticForm(cplx e, cplx f, cplx g, unsigned flags, cplx xi)
      : e_(e), f_(f), g_(g), det_(e * g - f * f), flags_(flags), xi_(xi) {}

  cplx e_, f_, g_, det_;
  unsigned flags_;
  cplx xi_;
};

inline cplx evaluate_form(const ComplexQuadraticForm& a, double v1, double v2) { return a(v1, v2); }

namespace detail {

// Maximizes min(Re(xi E), Re(xi G)) over |xi| = 1. The optimum is either the
// unconstrained maximizer of one branch or a crossing point of the two.
inline cplx relaxed_rotation(cplx e, cplx g) {
  auto score = [&](double th) {
    const cplx xi = std::polar(1.0, th);
    return std::min((xi * e).real(), (xi * g).real());
  };
  const double pi = std::numbers::pi;
  const double cand[4] = {-std::arg(e), -std::arg(g), -std::arg(e - g) + 0.5 * pi,
                          -std::arg(e - g) - 0.5 * pi};
  double best = cand[0], best_score = score(cand[0]);
  for (double th : cand) {
    if (score(th) > best_score) {
      best_score = score(th);
      best = th;
    }
  }
  return std::polar(1.0, best);
}

}  // namespace detail

inline ComplexQuadraticForm validate_admissible(cplx E, cplx F, cplx G) {
  for (cplx x : {E, F, G})
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw Error(Errc::domain, "non-finite form entry: " + detail::describe(E, F, G));
  const cplx det = E * G - F * F;
  const double scale = std::max({std::norm(E), std::norm(F), std::norm(G)});
  if (std::abs(det) <= 1e-14 * scale || det == 0.0)
    throw Error(Errc::singular_form, "det A = 0 for " + detail::describe(E, F, G));
  unsigned flags = kNone;
  if (detail::real_part_pd(E, F, G)) flags |= kRePd;
  if (detail::real_part_pd(G / det, -F / det, E / det)) flags |= kReInvPd;
  cplx xi = 1.0;
  if (!(flags & kRePd) || !(flags & kReInvPd)) {
    if (F != 0.0 || E == 0.0 || G == 0.0 || std::abs(E / std::abs(E) + G / std::abs(G)) < 1e-14) {
      std::string failed = !(flags & kRePd) ? "Re(A) is not positive definite"
                                            : "Re(A^-1) is not positive definite";
      if (F == 0.0) failed += " and E/|E| + G/|G| = 0";
      else failed += " and F != 0 (diagonal relaxation unavailable)";
      throw Error(Errc::inadmissible, failed + " for " + detail::describe(E, F, G));
    }
    xi = detail::relaxed_rotation(E, G);
    const cplx re = xi * E, rg = xi * G;
    if (!(re.real() > 0.0 && rg.real() > 0.0))
      throw Error(Errc::inadmissible,
                  "no rotation makes Re(xi A) positive definite for " + detail::describe(E, F, G));
    flags |= kDiagonalRelaxed;
  }
  return ComplexQuadraticForm(E, F, G, flags, xi);
}

// c * A, revalidated.
inline ComplexQuadraticForm scaled(const ComplexQuadraticForm& a, cplx c) {
  return validate_admissible(c * a.E(), c * a.F(), c * a.G());
}

}  // namespace czq

#endif
