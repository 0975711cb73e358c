#ifndef CZQ_SURFACES_HPP
#define CZQ_SURFACES_HPP

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>

#include "czq/error.hpp"
#include "czq/jet.hpp"
#include "czq/quadratic_form.hpp"
#include "czq/quadrature.hpp"
#include "czq/special.hpp"

namespace czq {

using ComplexPoint = std::array<cplx, 3>;
using Jet2 = CJet<2>;
using JetPoint = std::array<Jet2, 3>;

// psi(v) = strength * (phi(slope (v + onset)) - phi(-slope (v - onset)))
struct MollifierParams {
  double slope = 0.75;
  double onset = 10.0;
  double strength = 1.0;
};

struct MollifierValue {
  double psi, dpsi, ddpsi;
};

inline MollifierValue mollifier(double v, const MollifierParams& p) {
  const double a = p.slope;
  const double x1 = a * (v + p.onset), x2 = -a * (v - p.onset);
  const ErfcFamily f1 = erfc_family(x1), f2 = erfc_family(x2);
  const double isp = 1.0 / std::sqrt(std::numbers::pi);
  const double psi = f1.phi - f2.phi;
  const double dpsi = 0.5 * a * (f1.erfc + f2.erfc);
  const double ddpsi = a * a * isp * (std::exp(-x2 * x2) - std::exp(-x1 * x1));
  return {p.strength * psi, p.strength * dpsi, p.strength * ddpsi};
}

inline double mollifier_psi(double v, const MollifierParams& p) { return mollifier(v, p).psi; }

template <int N>
CJet<N> mollifier_psi(const CJet<N>& v, const MollifierParams& p) {
  return p.strength * (phi(p.slope * (v + p.onset)) - phi(-p.slope * (v - p.onset)));
}

inline cplx dot(const ComplexPoint& a, const ComplexPoint& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline ComplexPoint cross(const ComplexPoint& a, const ComplexPoint& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Principal root of the bilinear squared distance; a negative real square maps to
// the upper imaginary axis, a vanishing one is rejected.
inline cplx complex_distance(const ComplexPoint& x, const ComplexPoint& y) {
  const ComplexPoint d{x[0] - y[0], x[1] - y[1], x[2] - y[2]};
  const cplx r2 = dot(d, d);
  if (r2 == 0.0) throw Error(Errc::branch, "squared distance vanishes at the branch point");
  return std::sqrt(cplx(r2.real(), r2.imag() == 0.0 ? 0.0 : r2.imag()));
}

struct ChartDerivatives {
  ComplexPoint x, d1, d2, d11, d12, d22;
};

class SurfaceChart {
 public:
  virtual ~SurfaceChart() = default;
  virtual ChartDerivatives eval(double v1, double v2) const = 0;
  // Taylor polynomials of X(v + u) in u up to the given total degree.
  virtual JetPoint taylor(double v1, double v2, int degree) const = 0;
  virtual DomainKind domain_kind() const { return DomainKind::plane; }
  virtual std::string name() const = 0;
  virtual MollifierParams mollifier_params() const { return {}; }
};

// Chart given by one generic formula evaluated on jets; derivatives come from the jet coefficients.
template <class Formula>
class FormulaChart : public SurfaceChart {
 public:
  FormulaChart(Formula f, std::string name, DomainKind kind = DomainKind::plane)
      : f_(std::move(f)), name_(std::move(name)), kind_(kind) {}

  JetPoint taylor(double v1, double v2, int degree) const override {
    return f_(Jet2::variable(degree, 0, v1), Jet2::variable(degree, 1, v2));
  }
  ChartDerivatives eval(double v1, double v2) const override {
    const JetPoint t = taylor(v1, v2, 2);
    ChartDerivatives d;
    for (int i = 0; i < 3; ++i) {
      d.x[i] = t[i].value();
      d.d1[i] = t[i].coefficient({1, 0});
      d.d2[i] = t[i].coefficient({0, 1});
      d.d11[i] = 2.0 * t[i].coefficient({2, 0});
      d.d12[i] = t[i].coefficient({1, 1});
      d.d22[i] = 2.0 * t[i].coefficient({0, 2});
    }
    return d;
  }
  DomainKind domain_kind() const override { return kind_; }
  std::string name() const override { return name_; }

 private:
  Formula f_;
  std::string name_;
  DomainKind kind_;
};

template <class Formula>
std::shared_ptr<SurfaceChart> make_formula_chart(Formula f, std::string name, DomainKind kind = DomainKind::plane) {
  return std::make_shared<FormulaChart<Formula>>(std::move(f), std::move(name), kind);
}

namespace detail {

struct Complexified {
  cplx z, dz, ddz;  // v + i psi(v) and its derivatives
};

inline Complexified complexify(double v, const MollifierParams& p) {
  const MollifierValue m = mollifier(v, p);
  return {cplx(v, m.psi), cplx(1.0, m.dpsi), cplx(0.0, m.ddpsi)};
}

inline Jet2 complexify(const Jet2& v, const MollifierParams& p) { return v + cplx(0.0, 1.0) * mollifier_psi(v, p); }

}  // namespace detail

// x3 = -6 exp(-0.05 (x1^2 + x2^2)) at x_i = v_i + i psi(v_i).
class GaussianBump : public SurfaceChart {
 public:
  explicit GaussianBump(MollifierParams p = {}, double depth = 6.0, double decay = 0.05)
      : p_(p), depth_(depth), decay_(decay) {}

  ChartDerivatives eval(double v1, double v2) const override {
    const auto a = detail::complexify(v1, p_), b = detail::complexify(v2, p_);
    const cplx f = -depth_ * std::exp(-decay_ * (a.z * a.z + b.z * b.z));
    const cplx g1 = -2.0 * decay_ * a.z * a.dz, g2 = -2.0 * decay_ * b.z * b.dz;
    const cplx g11 = -2.0 * decay_ * (a.dz * a.dz + a.z * a.ddz);
    const cplx g22 = -2.0 * decay_ * (b.dz * b.dz + b.z * b.ddz);
    ChartDerivatives d;
    d.x = {a.z, b.z, f};
    d.d1 = {a.dz, 0.0, f * g1};
    d.d2 = {0.0, b.dz, f * g2};
    d.d11 = {a.ddz, 0.0, f * (g1 * g1 + g11)};
    d.d12 = {0.0, 0.0, f * g1 * g2};
    d.d22 = {0.0, b.ddz, f * (g2 * g2 + g22)};
    return d;
  }
  JetPoint taylor(double v1, double v2, int degree) const override {
    const Jet2 z1 = detail::complexify(Jet2::variable(degree, 0, v1), p_);
    const Jet2 z2 = detail::complexify(Jet2::variable(degree, 1, v2), p_);
    return {z1, z2, cplx(-depth_) * exp(cplx(-decay_) * (z1 * z1 + z2 * z2))};
  }
  std::string name() const override { return "gaussian_bump"; }
  MollifierParams mollifier_params() const override { return p_; }

 private:
  MollifierParams p_;
  double depth_, decay_;
};

// (R cos v1, R sin v1, 0) + axis * (v2 + i psi(v2)); periodic in v1.
class SlantedCylinder : public SurfaceChart {
 public:
  explicit SlantedCylinder(MollifierParams p = {0.75, 10.0, 3.0}, double radius = 2.5,
                           std::array<double, 3> axis = {0.5, 0.5, 1.0})
      : p_(p), r_(radius), axis_(axis) {}

  ChartDerivatives eval(double v1, double v2) const override {
    const auto z = detail::complexify(v2, p_);
    const double c = std::cos(v1), s = std::sin(v1);
    ChartDerivatives d;
    d.x = {r_ * c + axis_[0] * z.z, r_ * s + axis_[1] * z.z, axis_[2] * z.z};
    d.d1 = {-r_ * s, r_ * c, 0.0};
    d.d2 = {axis_[0] * z.dz, axis_[1] * z.dz, axis_[2] * z.dz};
    d.d11 = {-r_ * c, -r_ * s, 0.0};
    d.d12 = {0.0, 0.0, 0.0};
    d.d22 = {axis_[0] * z.ddz, axis_[1] * z.ddz, axis_[2] * z.ddz};
    return d;
  }
  JetPoint taylor(double v1, double v2, int degree) const override {
    const Jet2 t = Jet2::variable(degree, 0, v1);
    const Jet2 z = detail::complexify(Jet2::variable(degree, 1, v2), p_);
    return {cplx(r_) * cos(t) + cplx(axis_[0]) * z, cplx(r_) * sin(t) + cplx(axis_[1]) * z, cplx(axis_[2]) * z};
  }
  DomainKind domain_kind() const override { return DomainKind::cylinder; }
  std::string name() const override { return "slanted_cylinder"; }
  MollifierParams mollifier_params() const override { return p_; }

 private:
  MollifierParams p_;
  double r_;
  std::array<double, 3> axis_;
};

// Real part (v1, v2, h(v)) with h = e^{-|v|^2/8} (cos(1.9 v1 + 0.95 v2) + sin(v1 + 1.55 v2)),
// imaginary part (psi(v1), psi(v2), 0); the strength carries the 1/2 of the original setup.
// amplitude = 0 gives a flat plane.
class RoughHalfspace : public SurfaceChart {
 public:
  explicit RoughHalfspace(MollifierParams p = {0.75, 10.0, 0.5}, double amplitude = 1.0)
      : p_(p), amp_(amplitude) {}

  ChartDerivatives eval(double v1, double v2) const override {
    const auto a = detail::complexify(v1, p_), b = detail::complexify(v2, p_);
    const double g = amp_ * std::exp(-(v1 * v1 + v2 * v2) / 8.0);
    const double g1 = -0.25 * v1 * g, g2 = -0.25 * v2 * g;
    const double g11 = (v1 * v1 / 16.0 - 0.25) * g, g22 = (v2 * v2 / 16.0 - 0.25) * g, g12 = v1 * v2 / 16.0 * g;
    const double t1 = 1.9 * v1 + 0.95 * v2, t2 = v1 + 1.55 * v2;
    const double c = std::cos(t1) + std::sin(t2);
    const double c1 = -1.9 * std::sin(t1) + std::cos(t2), c2 = -0.95 * std::sin(t1) + 1.55 * std::cos(t2);
    const double c11 = -1.9 * 1.9 * std::cos(t1) - std::sin(t2);
    const double c12 = -1.9 * 0.95 * std::cos(t1) - 1.55 * std::sin(t2);
    const double c22 = -0.95 * 0.95 * std::cos(t1) - 1.55 * 1.55 * std::sin(t2);
    ChartDerivatives d;
    d.x = {a.z, b.z, g * c};
    d.d1 = {a.dz, 0.0, g1 * c + g * c1};
    d.d2 = {0.0, b.dz, g2 * c + g * c2};
    d.d11 = {a.ddz, 0.0, g11 * c + 2.0 * g1 * c1 + g * c11};
    d.d12 = {0.0, 0.0, g12 * c + g1 * c2 + g2 * c1 + g * c12};
    d.d22 = {0.0, b.ddz, g22 * c + 2.0 * g2 * c2 + g * c22};
    return d;
  }
  JetPoint taylor(double v1, double v2, int degree) const override {
    const Jet2 x = Jet2::variable(degree, 0, v1), y = Jet2::variable(degree, 1, v2);
    const Jet2 h = cplx(amp_) * exp(cplx(-1.0 / 8.0) * (x * x + y * y)) *
                   (cos(cplx(1.9) * x + cplx(0.95) * y) + sin(x + cplx(1.55) * y));
    return {detail::complexify(x, p_), detail::complexify(y, p_), h};
  }
  std::string name() const override { return amp_ == 0.0 ? "flat_plane" : "rough_halfspace"; }
  MollifierParams mollifier_params() const override { return p_; }

 private:
  MollifierParams p_;
  double amp_;
};

inline std::shared_ptr<SurfaceChart> gaussian_bump(MollifierParams p = {}) {
  return std::make_shared<GaussianBump>(p);
}
inline std::shared_ptr<SurfaceChart> slanted_cylinder(MollifierParams p = {0.75, 10.0, 3.0}) {
  return std::make_shared<SlantedCylinder>(p);
}
inline std::shared_ptr<SurfaceChart> rough_halfspace(MollifierParams p = {0.75, 10.0, 0.5}) {
  return std::make_shared<RoughHalfspace>(p);
}
inline std::shared_ptr<SurfaceChart> flat_plane(MollifierParams p = {0.75, 10.0, 0.0}) {
  return std::make_shared<RoughHalfspace>(p, 0.0);
}

namespace detail {
inline std::string at(double v1, double v2) {
  std::ostringstream os;
  os.precision(10);
  os << "v = (" << v1 << ", " << v2 << ")";
  return os.str();
}
}  // namespace detail

inline ComplexQuadraticForm first_fundamental_form(const ChartDerivatives& d, double v1, double v2) {
  try {
    return validate_admissible(dot(d.d1, d.d1), dot(d.d1, d.d2), dot(d.d2, d.d2));
  } catch (const Error& e) {
    throw Error(Errc::geometry, "first fundamental form at " + detail::at(v1, v2) + ": " + e.what());
  }
}

inline ComplexQuadraticForm first_fundamental_form(const SurfaceChart& chart, double v1, double v2) {
  return first_fundamental_form(chart.eval(v1, v2), v1, v2);
}

// Unnormalized normal d1 X x d2 X.
inline ComplexPoint surface_normal(const ChartDerivatives& d) { return cross(d.d1, d.d2); }

inline cplx jacobian(const ChartDerivatives& d, double v1, double v2) {
  const ComplexPoint z = surface_normal(d);
  const cplx j2 = dot(z, z);
  if (j2.imag() == 0.0 && j2.real() <= 0.0)
    throw Error(Errc::geometry, "Jacobian on the branch cut at " + detail::at(v1, v2));
  const cplx e = dot(d.d1, d.d1), f = dot(d.d1, d.d2), g = dot(d.d2, d.d2);
  const cplx lagrange = e * g - f * f;
  if (std::abs(j2 - lagrange) > 1e-10 * std::abs(lagrange))
    throw Error(Errc::geometry, "Lagrange identity violated at " + detail::at(v1, v2));
  return std::sqrt(j2);
}

inline cplx jacobian(const SurfaceChart& chart, double v1, double v2) {
  return jacobian(chart.eval(v1, v2), v1, v2);
}

}  // namespace czq

#endif
