#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "czq/surfaces.hpp"

using czq::cplx;

namespace {

std::vector<std::shared_ptr<czq::SurfaceChart>> builtin_charts() {
  return {czq::gaussian_bump(), czq::slanted_cylinder(), czq::rough_halfspace()};
}

double max_diff(const czq::ComplexPoint& a, const czq::ComplexPoint& b) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(Mollifier, InteriorAndLinearRegime) {
  const czq::MollifierParams p;
  EXPECT_LT(std::abs(czq::mollifier_psi(0.0, p)), 1e-9);
  EXPECT_NEAR(czq::mollifier_psi(20.0, p), 7.5, 1e-9);
  EXPECT_NEAR(czq::mollifier_psi(-20.0, p), -7.5, 1e-9);
  for (double v : {0.3, 4.0, 9.5, 10.0, 12.7, 25.0}) EXPECT_EQ(czq::mollifier_psi(-v, p), -czq::mollifier_psi(v, p));
}

TEST(Mollifier, DerivativesMatchDifferences) {
  const czq::MollifierParams p{0.75, 10.0, 0.5};
  const double step = 1e-4;
  for (double v = -15.0; v <= 15.0; v += 0.37) {
    const auto m = czq::mollifier(v, p);
    const auto lo = czq::mollifier(v - step, p), hi = czq::mollifier(v + step, p);
    EXPECT_NEAR(m.dpsi, (hi.psi - lo.psi) / (2 * step), 1e-7);
    EXPECT_NEAR(m.ddpsi, (hi.dpsi - lo.dpsi) / (2 * step), 1e-7);
  }
}

TEST(ComplexDistance, PrincipalRoot) {
  EXPECT_NEAR(std::abs(czq::complex_distance({1.0, 2.0, 2.0}, {0.0, 0.0, 0.0}) - 3.0), 0.0, 1e-15);
  const cplx i(0.0, 1.0);
  EXPECT_EQ(czq::complex_distance({i, 0.0, 0.0}, {0.0, 0.0, 0.0}), i);
  EXPECT_THROW(czq::complex_distance({1.0, i, 0.0}, {0.0, 0.0, 0.0}), czq::Error);
}

TEST(ComplexDistance, BumpSkirtDecays) {
  const auto bump = czq::gaussian_bump();
  const cplx r = czq::complex_distance(bump->eval(0.0, 0.0).x, bump->eval(15.0, 0.0).x);
  EXPECT_GT(r.imag(), 0.0);
}

TEST(Charts, TargetFundamentalForms) {
  const auto a = czq::first_fundamental_form(*czq::gaussian_bump(), -7.5, -9.375);
  EXPECT_NEAR(a.E().real(), 1.0, 1e-4);
  EXPECT_NEAR(a.E().imag(), 6e-3, 5e-5);
  EXPECT_NEAR(a.F().real(), 1.39e-5, 5e-7);
  EXPECT_NEAR(a.G().real(), 0.9638, 5e-5);
  EXPECT_NEAR(a.G().imag(), 0.3805, 5e-5);
  const auto c = czq::first_fundamental_form(*czq::slanted_cylinder(), 1.2 * std::numbers::pi, -8.6372);
  EXPECT_NEAR(c.E().real(), 6.25, 1e-12);
  EXPECT_NEAR(c.E().imag(), 0.0, 1e-12);
  EXPECT_NEAR(c.F().real(), -0.2765, 5e-5);
  EXPECT_NEAR(c.F().imag(), -0.0461, 5e-5);
  EXPECT_NEAR(c.G().real(), 1.4582, 5e-5);
  EXPECT_NEAR(c.G().imag(), 0.5006, 5e-5);
}

TEST(Charts, BuiltinFormulaValues) {
  EXPECT_LT(std::abs(czq::gaussian_bump()->eval(0.0, 0.0).x[2] + 6.0), 1e-9);
  for (double v1 : {0.0, 1.0, 2.5}) {
    const auto x = czq::slanted_cylinder()->eval(v1, 0.0).x;
    EXPECT_LT(max_diff(x, {2.5 * std::cos(v1), 2.5 * std::sin(v1), 0.0}), 1e-8);
  }
  EXPECT_LT(max_diff(czq::rough_halfspace()->eval(0.0, 0.0).x, {0.0, 0.0, 1.0}), 1e-9);
}

TEST(Charts, DerivativesMatchCentralDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-25.0, 25.0), ang(0.0, 2 * std::numbers::pi);
  const double step = 1e-4;
  for (const auto& ch : builtin_charts()) {
    const bool cyl = ch->domain_kind() == czq::DomainKind::cylinder;
    for (int k = 0; k < 100; ++k) {
      const double v1 = cyl ? ang(rng) : u(rng), v2 = u(rng);
      const auto d = ch->eval(v1, v2);
      const auto p1 = ch->eval(v1 + step, v2), m1 = ch->eval(v1 - step, v2);
      const auto p2 = ch->eval(v1, v2 + step), m2 = ch->eval(v1, v2 - step);
      czq::ComplexPoint f1, f2, f11, f22, f12;
      for (int i = 0; i < 3; ++i) {
        f1[i] = (p1.x[i] - m1.x[i]) / (2 * step);
        f2[i] = (p2.x[i] - m2.x[i]) / (2 * step);
        f11[i] = (p1.d1[i] - m1.d1[i]) / (2 * step);
        f22[i] = (p2.d2[i] - m2.d2[i]) / (2 * step);
        f12[i] = (p2.d1[i] - m2.d1[i]) / (2 * step);
      }
      EXPECT_LT(max_diff(d.d1, f1), 1e-6) << ch->name();
      EXPECT_LT(max_diff(d.d2, f2), 1e-6) << ch->name();
      EXPECT_LT(max_diff(d.d11, f11), 1e-6) << ch->name();
      EXPECT_LT(max_diff(d.d22, f22), 1e-6) << ch->name();
      EXPECT_LT(max_diff(d.d12, f12), 1e-6) << ch->name();
    }
  }
}

TEST(Charts, TaylorJetsMatchEval) {
  for (const auto& ch : builtin_charts())
    for (auto [v1, v2] : {std::pair{0.3, -0.7}, {-7.5, -9.375}, {11.0, 13.0}}) {
      const auto d = ch->eval(v1, v2);
      const auto j = ch->taylor(v1, v2, 3);
      for (int i = 0; i < 3; ++i) {
        EXPECT_LT(std::abs(j[i].value() - d.x[i]), 1e-13);
        EXPECT_LT(std::abs(j[i].coefficient({1, 0}) - d.d1[i]), 1e-13);
        EXPECT_LT(std::abs(j[i].coefficient({0, 1}) - d.d2[i]), 1e-13);
        EXPECT_LT(std::abs(2.0 * j[i].coefficient({2, 0}) - d.d11[i]), 1e-13);
        EXPECT_LT(std::abs(j[i].coefficient({1, 1}) - d.d12[i]), 1e-13);
        EXPECT_LT(std::abs(2.0 * j[i].coefficient({0, 2}) - d.d22[i]), 1e-13);
      }
    }
}

TEST(Charts, RealLimit) {
  const czq::MollifierParams off{0.75, 10.0, 0.0};
  for (const auto& ch : {czq::gaussian_bump(off), czq::slanted_cylinder(off), czq::rough_halfspace(off)})
    for (auto [v1, v2] : {std::pair{0.4, 0.1}, {-14.0, 22.0}, {3.0, -18.0}}) {
      const auto d = ch->eval(v1, v2);
      for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(d.x[i].imag(), 0.0);
        EXPECT_EQ(d.d1[i].imag(), 0.0);
        EXPECT_EQ(d.d2[i].imag(), 0.0);
      }
      const auto a = czq::first_fundamental_form(*ch, v1, v2);
      EXPECT_EQ(a.E().imag(), 0.0);
      EXPECT_GT(a.E().real(), 0.0);
      EXPECT_GT((a.E() * a.G() - a.F() * a.F()).real(), 0.0);
    }
}

TEST(Charts, FlatPlaneBasics) {
  const auto p = czq::flat_plane();
  const auto a = czq::first_fundamental_form(*p, 1.5, -2.0);
  EXPECT_EQ(a.E(), cplx(1.0));
  EXPECT_EQ(a.F(), cplx(0.0));
  EXPECT_EQ(a.G(), cplx(1.0));
  EXPECT_EQ(czq::jacobian(*p, 1.5, -2.0), cplx(1.0));
}

TEST(Charts, RealCylinderJacobian) {
  // |d1 x d2| with d1 = R(-sin, cos, 0), d2 = axis: R sqrt(|a|^2 - (a . t)^2).
  const czq::SlantedCylinder c({0.75, 10.0, 0.0});
  for (double v1 : {0.0, 0.9, 2.0, 4.4}) {
    const double t1 = -std::sin(v1), t2 = std::cos(v1);
    const double at = 0.5 * t1 + 0.5 * t2;
    const double expected = 2.5 * std::sqrt(1.5 - at * at);
    EXPECT_NEAR(czq::jacobian(c, v1, 3.0).real(), expected, 1e-13);
  }
}

TEST(Charts, LagrangeIdentity) {
  for (const auto& ch : builtin_charts())
    for (double v = -20.0; v <= 20.0; v += 1.3) {
      const double v1 = ch->domain_kind() == czq::DomainKind::cylinder ? std::fmod(v + 20.0, 6.28) : v;
      const auto d = ch->eval(v1, 0.7 * v);
      const cplx j = czq::jacobian(d, v1, 0.7 * v);
      const cplx e = czq::dot(d.d1, d.d1), f = czq::dot(d.d1, d.d2), g = czq::dot(d.d2, d.d2);
      EXPECT_LT(std::abs(j * j - (e * g - f * f)), 1e-12 * std::abs(j * j));
    }
}

TEST(Charts, FormsAdmissibleOnStudyGrids) {
  const auto bump = czq::gaussian_bump();
  const auto cyl = czq::slanted_cylinder();
  const auto rough = czq::rough_halfspace();
  for (double v1 = -30.0; v1 <= 30.0; v1 += 0.25)
    for (double v2 = -30.0; v2 <= 30.0; v2 += 0.25) ASSERT_NO_THROW(czq::first_fundamental_form(*bump, v1, v2));
  // Strength 3 turns Re G negative beyond |v2| ~ 9.67 while F != 0.
  for (int i = 0; i < 64; ++i)
    for (double v2 = -9.5; v2 <= 9.5; v2 += 0.25)
      ASSERT_NO_THROW(czq::first_fundamental_form(*cyl, i * 2 * std::numbers::pi / 64, v2));
  EXPECT_THROW(czq::first_fundamental_form(*cyl, 0.3, -14.0), czq::Error);
  for (double v1 = -20.0; v1 <= 20.0; v1 += 0.125)
    for (double v2 = -20.0; v2 <= 20.0; v2 += 0.125) ASSERT_NO_THROW(czq::first_fundamental_form(*rough, v1, v2));
}

TEST(Charts, GeometryErrorNamesThePoint) {
  // Strong complexification makes the form inadmissible somewhere along the skirt.
  const auto wild = czq::gaussian_bump({3.0, 1.0, 40.0});
  bool raised = false;
  for (double v = 0.0; v <= 30.0 && !raised; v += 0.5) {
    try {
      czq::first_fundamental_form(*wild, v, v);
    } catch (const czq::Error& e) {
      raised = true;
      EXPECT_EQ(e.code(), czq::Errc::geometry);
      EXPECT_NE(std::string(e.what()).find("v = ("), std::string::npos);
    }
  }
  EXPECT_TRUE(raised);
}
