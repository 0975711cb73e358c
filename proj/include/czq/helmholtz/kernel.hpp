#ifndef CZQ_HELMHOLTZ_KERNEL_HPP
#define CZQ_HELMHOLTZ_KERNEL_HPP

// Plain Helmholtz kernel entries on sampled complexified surfaces. Node data is
// kept as split real/imaginary arrays so the inner loops vectorize.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "czq/error.hpp"
#include "czq/quadrature.hpp"
#include "czq/surfaces.hpp"

namespace czq {

enum class KernelKind { single, dbl, combined };

// combined = D + coupling * S with coupling = -ik.
struct KernelSpec {
  KernelKind kind = KernelKind::combined;
  cplx k = 1.0;

  cplx coupling() const { return -cplx(0.0, 1.0) * k; }
  cplx double_coef() const { return kind == KernelKind::single ? 0.0 : 1.0; }
  cplx single_coef() const {
    switch (kind) {
      case KernelKind::single: return 1.0;
      case KernelKind::dbl: return 0.0;
      default: return coupling();
    }
  }
  double identity_coef() const { return kind == KernelKind::combined ? 0.5 : 0.0; }
  void validate() const {
    if (k == 0.0) throw Error(Errc::domain, "wavenumber must be nonzero");
    if (k.imag() < 0.0) throw Error(Errc::domain, "wavenumber must have Im k >= 0");
  }
};

inline const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::single: return "single";
    case KernelKind::dbl: return "double";
    default: return "combined";
  }
}

inline KernelKind parse_kernel_kind(const std::string& s) {
  if (s == "single") return KernelKind::single;
  if (s == "double") return KernelKind::dbl;
  if (s == "combined") return KernelKind::combined;
  throw Error(Errc::config, "unknown kernel kind '" + s + "'");
}

// Node positions, unnormalized normals z = X_1 x X_2 and Jacobians sqrt(z.z).
struct SurfaceSamples {
  GridSpec grid;
  std::array<std::vector<double>, 3> xr, xi, zr, zi;
  std::vector<double> jr, ji;

  int size() const { return static_cast<int>(jr.size()); }
  ComplexPoint x(int j) const { return {cplx(xr[0][j], xi[0][j]), cplx(xr[1][j], xi[1][j]), cplx(xr[2][j], xi[2][j])}; }
  ComplexPoint z(int j) const { return {cplx(zr[0][j], zi[0][j]), cplx(zr[1][j], zi[1][j]), cplx(zr[2][j], zi[2][j])}; }
  cplx jacobian(int j) const { return {jr[j], ji[j]}; }
};

inline SurfaceSamples sample_surface(const SurfaceChart& chart, const GridSpec& grid) {
  SurfaceSamples s;
  s.grid = grid;
  const int n = grid.size();
  for (int c = 0; c < 3; ++c) {
    s.xr[c].resize(n);
    s.xi[c].resize(n);
    s.zr[c].resize(n);
    s.zi[c].resize(n);
  }
  s.jr.resize(n);
  s.ji.resize(n);
  for (int j = 0; j < n; ++j) {
    const auto v = grid.node(j);
    const ChartDerivatives d = chart.eval(v[0], v[1]);
    const ComplexPoint z = cross(d.d1, d.d2);
    const cplx jac = jacobian(d, v[0], v[1]);
    for (int c = 0; c < 3; ++c) {
      s.xr[c][j] = d.x[c].real();
      s.xi[c][j] = d.x[c].imag();
      s.zr[c][j] = z[c].real();
      s.zi[c][j] = z[c].imag();
    }
    s.jr[j] = jac.real();
    s.ji[j] = jac.imag();
  }
  return s;
}

namespace fastmath {

// exp for x in [-700, 700]; relative error about 2e-16.
inline double exp(double x) {
  constexpr double log2e = 1.4426950408889634, ln2hi = 6.93145751953125e-1, ln2lo = 1.42860682030941723212e-6;
  x = x < -700.0 ? -700.0 : x;
  x = x > 700.0 ? 700.0 : x;
  const double n = std::nearbyint(x * log2e);
  const double r = (x - n * ln2hi) - n * ln2lo;
  double p = 1.0 / 6227020800.0;
  p = p * r + 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  const std::uint64_t bits = static_cast<std::uint64_t>(static_cast<std::int64_t>(n) + 1023) << 52;
  double scale;
  std::memcpy(&scale, &bits, sizeof scale);
  return p * scale;
}

// sin and cos with Cody-Waite reduction; absolute error about 1e-16 for |x| < 1e6.
inline void sincos(double x, double& s, double& c) {
  constexpr double two_over_pi = 0.63661977236758134308;
  constexpr double p1 = 1.5707963267341256e+00, p2 = 6.0771005065061922e-11, p3 = 2.0222662487959506e-21;
  const double q = std::nearbyint(x * two_over_pi);
  const double r = ((x - q * p1) - q * p2) - q * p3;
  const double z = r * r;
  const double sp =
      r + r * z *
              (-1.66666666666666324348e-01 +
               z * (8.33333333332248946124e-03 +
                    z * (-1.98412698298579493134e-04 +
                         z * (2.75573137070700676789e-06 + z * (-2.50507602534068634195e-08 + z * 1.58969099521155010221e-10)))));
  const double cp =
      1.0 - 0.5 * z +
      z * z *
          (4.16666666666666019037e-02 +
           z * (-1.38888888888741095749e-03 +
                z * (2.48015872894767294178e-05 +
                     z * (-2.75573143513906633035e-07 + z * (2.08757232129817482790e-09 + z * -1.13596475577881948265e-11)))));
  const int m = static_cast<int>(static_cast<std::int64_t>(q) & 3);
  s = (m == 0) ? sp : (m == 1) ? cp : (m == 2) ? -sp : -cp;
  c = (m == 0) ? cp : (m == 1) ? -sp : (m == 2) ? -cp : sp;
}

}  // namespace fastmath

namespace detail {

// Kernel entries K(x_l, y_j) * h1 h2 for j in [lo, hi), j != l, where
// K = G [a_D (d.z_j)(1 - ikr)/R + a_S J_j], G = e^{ikr}/(4 pi r), d = x_l - y_j.
// Entries land in re[j], im[j]; returns the smallest Im r seen.
struct RowKernel {
  const SurfaceSamples* s;
  double kr, ki;
  double adr, adi, asr, asi;
  double area;

  double fill(const ComplexPoint& x, int lo, int hi, double* __restrict re, double* __restrict im) const {
    const auto& S = *s;
    const double x0r = x[0].real(), x1r = x[1].real(), x2r = x[2].real();
    const double x0i = x[0].imag(), x1i = x[1].imag(), x2i = x[2].imag();
    const double* Xr0 = S.xr[0].data(); const double* Xr1 = S.xr[1].data(); const double* Xr2 = S.xr[2].data();
    const double* Xi0 = S.xi[0].data(); const double* Xi1 = S.xi[1].data(); const double* Xi2 = S.xi[2].data();
    const double* Zr0 = S.zr[0].data(); const double* Zr1 = S.zr[1].data(); const double* Zr2 = S.zr[2].data();
    const double* Zi0 = S.zi[0].data(); const double* Zi1 = S.zi[1].data(); const double* Zi2 = S.zi[2].data();
    const double* Jr = S.jr.data(); const double* Ji = S.ji.data();
    const double c4 = area * 0.25 / std::numbers::pi;
    double min_im = std::numeric_limits<double>::infinity();
#pragma omp simd reduction(min : min_im)
    for (int j = lo; j < hi; ++j) {
      const double d0r = x0r - Xr0[j], d1r = x1r - Xr1[j], d2r = x2r - Xr2[j];
      const double d0i = x0i - Xi0[j], d1i = x1i - Xi1[j], d2i = x2i - Xi2[j];
      const double Rr = d0r * d0r - d0i * d0i + d1r * d1r - d1i * d1i + d2r * d2r - d2i * d2i;
      const double Ri = 2.0 * (d0r * d0i + d1r * d1i + d2r * d2i);
      const double m = std::sqrt(Rr * Rr + Ri * Ri);
      // Principal square root without cancellation in either half-plane.
      const double big = std::sqrt(0.5 * (m + std::abs(Rr)));
      const double small = 0.5 * std::abs(Ri) / big;
      const double rr = Rr >= 0.0 ? big : small;
      const double ri = std::copysign(Rr >= 0.0 ? small : big, Ri);
      min_im = std::min(min_im, ri);
      // e^{ikr} with k = kr + i ki
      const double ph = kr * rr - ki * ri;
      const double mag = fastmath::exp(-(kr * ri + ki * rr));
      double sn, cs;
      fastmath::sincos(ph, sn, cs);
      const double er = mag * cs, ei = mag * sn;
      // 1/r
      const double inv_m = 1.0 / m;
      const double qr = rr * inv_m, qi = -ri * inv_m;
      // G = c4 e^{ikr}/r
      const double gr = c4 * (er * qr - ei * qi), gi = c4 * (er * qi + ei * qr);
      // double-layer factor (d.z)(1 - ikr)/R, 1/R = (1/r)^2
      const double nr = d0r * Zr0[j] - d0i * Zi0[j] + d1r * Zr1[j] - d1i * Zi1[j] + d2r * Zr2[j] - d2i * Zi2[j];
      const double ni = d0r * Zi0[j] + d0i * Zr0[j] + d1r * Zi1[j] + d1i * Zr1[j] + d2r * Zi2[j] + d2i * Zr2[j];
      const double ikr_r = -(kr * ri + ki * rr), ikr_i = kr * rr - ki * ri;
      const double ur = 1.0 - ikr_r, ui = -ikr_i;
      const double iRr = qr * qr - qi * qi, iRi = 2.0 * qr * qi;
      const double t1r = nr * ur - ni * ui, t1i = nr * ui + ni * ur;
      const double dr = t1r * iRr - t1i * iRi, di = t1r * iRi + t1i * iRr;
      const double fr = adr * dr - adi * di + asr * Jr[j] - asi * Ji[j];
      const double fi = adr * di + adi * dr + asr * Ji[j] + asi * Jr[j];
      re[j] = gr * fr - gi * fi;
      im[j] = gr * fi + gi * fr;
    }
    return min_im;
  }

  // Full row with a zero at the self node.
  double fill_row(int l, double* re, double* im) const {
    const ComplexPoint x = s->x(l);
    const double a = fill(x, 0, l, re, im);
    const double b = fill(x, l + 1, s->size(), re, im);
    re[l] = im[l] = 0.0;
    return std::min(a, b);
  }
};

inline RowKernel row_kernel(const SurfaceSamples& s, const KernelSpec& ks) {
  const cplx ad = ks.double_coef(), as = ks.single_coef();
  return {&s, ks.k.real(), ks.k.imag(), ad.real(), ad.imag(), as.real(), as.imag(), s.grid.h1 * s.grid.h2};
}

}  // namespace detail

}  // namespace czq

#endif
