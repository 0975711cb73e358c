#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "czq/quadrature.hpp"
#include "test_forms.hpp"

using czq::cplx;
using czq::GridFunction;
using czq::GridSpec;

namespace {

const auto kIdentity = czq::validate_admissible(1.0, 0.0, 1.0);
const double kExact = std::pow(std::numbers::pi, 1.5);  // int e^{-|v|^2}/|v| dv

GridFunction gaussian(double h) {
  return GridFunction::sample(GridSpec::square(h, 7.0), [](double a, double b) { return cplx(std::exp(-a * a - b * b)); });
}

double slope(const std::vector<double>& hs, const std::vector<double>& errs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double x = std::log(hs[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> gaussian_errors(int order) {
  std::vector<double> errs;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const auto g = gaussian(h);
    const cplx v = order == 0 ? czq::punctured_trapezoid(g, kIdentity, 0.5)
                              : czq::corrected_trapezoid(g, kIdentity, 0.5, order).value;
    errs.push_back(std::abs(v - kExact));
  }
  return errs;
}

}  // namespace

TEST(Quadrature, PuncturedRuleIsFirstOrder) {
  const auto e = gaussian_errors(0);
  EXPECT_NEAR(e[1], 0.39, 0.01);
  const double p = slope({0.2, 0.1, 0.05, 0.025}, e);
  EXPECT_GT(p, 0.7);
  EXPECT_LT(p, 1.3);
}

TEST(Quadrature, CorrectedRuleOrders) {
  const std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  const double p3 = slope(hs, gaussian_errors(3));
  EXPECT_GT(p3, 2.7);
  EXPECT_LT(p3, 3.3);
  const double p5 = slope(hs, gaussian_errors(5));
  EXPECT_GT(p5, 4.5);
  EXPECT_LT(p5, 5.5);
  const auto e7 = gaussian_errors(7);
  const double p7 = slope(hs, e7);
  EXPECT_GT(p7, 6.4);
  EXPECT_LT(p7, 7.6);
  EXPECT_LT(e7.back(), 1e-9);
}

TEST(Quadrature, OrderFiveStencilHasSquareSymmetry) {
  const auto st = czq::fit_correction_stencil(kIdentity, 0.5, 5);
  auto weight = [&](int a, int b) {
    for (std::size_t i = 0; i < st.offsets.size(); ++i)
      if (st.offsets[i][0] == a && st.offsets[i][1] == b) return st.weights[i];
    ADD_FAILURE() << "missing offset";
    return cplx(0.0);
  };
  const cplx edge = weight(1, 0), corner = weight(1, 1);
  for (auto [a, b] : {std::pair{-1, 0}, {0, 1}, {0, -1}}) EXPECT_LT(std::abs(weight(a, b) - edge), 1e-13);
  for (auto [a, b] : {std::pair{-1, 1}, {1, -1}, {-1, -1}}) EXPECT_LT(std::abs(weight(a, b) - corner), 1e-13);
}

TEST(Quadrature, StencilsAreCentrallySymmetric) {
  for (int order : {5, 7})
    for (const auto& a : {testforms::bump(), testforms::cylinder()}) {
      const auto st = czq::fit_correction_stencil(a, 0.5, order);
      for (std::size_t i = 0; i < st.offsets.size(); ++i)
        for (std::size_t j = 0; j < st.offsets.size(); ++j)
          if (st.offsets[i][0] == -st.offsets[j][0] && st.offsets[i][1] == -st.offsets[j][1]) {
            EXPECT_LT(std::abs(st.weights[i] - st.weights[j]), 1e-12 * std::abs(st.weights[i]) + 1e-14);
          }
    }
}

TEST(Quadrature, OddMonomialsGetNoCorrection) {
  const auto st = czq::fit_correction_stencil(testforms::cylinder(), 0.3, 7);
  for (auto [p, q] : {std::pair{1, 0}, {0, 1}, {2, 1}, {1, 2}, {3, 0}}) {
    cplx acc = 0.0;
    for (std::size_t i = 0; i < st.offsets.size(); ++i)
      acc += st.weights[i] * std::pow(double(st.offsets[i][0]), p) * std::pow(double(st.offsets[i][1]), q);
    EXPECT_LT(std::abs(acc), 1e-12);
  }
}

TEST(Quadrature, RuleIsLinear) {
  const auto grid = GridSpec::square(0.1, 6.0);
  const auto g1 = GridFunction::sample(grid, [](double a, double b) { return cplx(std::exp(-a * a - b * b)); });
  const auto g2 = GridFunction::sample(grid, [](double a, double b) { return cplx(a, b) * std::exp(-0.5 * (a * a + b * b)); });
  const cplx alpha(0.7, -1.3);
  GridFunction mix = g1;
  for (std::size_t i = 0; i < mix.values.size(); ++i) mix.values[i] = alpha * g1.values[i] + g2.values[i];
  const auto a = testforms::bump();
  for (int order : {3, 5, 7}) {
    const cplx lhs = czq::corrected_trapezoid(mix, a, 0.5, order).value;
    const cplx rhs = alpha * czq::corrected_trapezoid(g1, a, 0.5, order).value +
                     czq::corrected_trapezoid(g2, a, 0.5, order).value;
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
  }
}

TEST(Quadrature, OrderThreeIsOneDiagonalTerm) {
  const auto g = gaussian(0.1);
  const auto a = testforms::cylinder();
  const cplx punct = czq::punctured_trapezoid(g, a, 0.5);
  const cplx corr = czq::corrected_trapezoid(g, a, 0.5, 3).value;
  const auto al = czq::detail::lattice_form(a, g.grid);
  const double scale = std::pow(g.grid.h(), 2.0 - 2.0 * 0.5);
  const cplx term = scale * (czq::epstein_zeta(al, 0.5).value * g(0, 0));
  EXPECT_EQ(corr, punct - term);
}

TEST(Quadrature, ZeroSamplesGiveZero) {
  const auto grid = GridSpec::square(0.25, 3.0);
  const GridFunction zero{grid, std::vector<cplx>(grid.size(), 0.0)};
  EXPECT_EQ(czq::punctured_trapezoid(zero, kIdentity, 0.5), cplx(0.0));
  for (int order : {3, 5, 7}) EXPECT_EQ(czq::corrected_trapezoid(zero, testforms::bump(), 0.5, order).value, cplx(0.0));
}

TEST(Quadrature, RejectsHypersingularPowers) {
  const auto g = gaussian(0.2);
  try {
    czq::corrected_trapezoid(g, kIdentity, 1.0, 3);
    FAIL();
  } catch (const czq::Error& e) {
    EXPECT_EQ(e.code(), czq::Errc::unsupported_power);
  }
  EXPECT_THROW(czq::fit_correction_stencil(kIdentity, 1.5, 5), czq::Error);
}

TEST(Quadrature, CylinderMatchesUnrolledPlane) {
  // Density supported near v1 = pi, far from the seam.
  const int n1 = 64;
  const double h = 2.0 * std::numbers::pi / n1;
  auto f = [](double a, double b) {
    const double x = a - std::numbers::pi;
    return cplx(std::exp(-4.0 * (x * x + b * b)), 0.3 * b);
  };
  const auto cyl = GridSpec::cylinder(n1, h, -40, 40);
  const auto pl = GridSpec::plane(h, h, {0, n1 - 1, -40, 40});
  const auto gc = GridFunction::sample(cyl, f), gp = GridFunction::sample(pl, f);
  const auto a = testforms::cylinder();
  for (int order : {3, 5}) {
    const cplx vc = czq::corrected_trapezoid(gc, a, 0.5, order, {n1 / 2, 0}).value;
    const cplx vp = czq::corrected_trapezoid(gp, a, 0.5, order, {n1 / 2, 0}).value;
    EXPECT_LT(std::abs(vc - vp), 1e-12 * std::abs(vp)) << order;
  }
}

TEST(Quadrature, CylinderFormSelfConvergence) {
  const auto a = testforms::cylinder();
  auto f = [](double x, double y) { return cplx(std::exp(-(x * x + 2.0 * y * y)) * (1.0 + 0.5 * x)); };
  std::vector<cplx> v;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const auto g = GridFunction::sample(GridSpec::square(h, 6.0), f);
    v.push_back(czq::corrected_trapezoid(g, a, 0.5, 3).value);
  }
  const double r1 = std::abs(v[0] - v[1]) / std::abs(v[1] - v[2]);
  const double r2 = std::abs(v[1] - v[2]) / std::abs(v[2] - v[3]);
  EXPECT_NEAR(std::log2(r1), 3.0, 0.3);
  EXPECT_NEAR(std::log2(r2), 3.0, 0.3);
}

TEST(Quadrature, ReportsBoundaryMagnitude) {
  const auto g = GridFunction::sample(GridSpec::square(0.5, 2.0), [](double, double) { return cplx(1.0); });
  EXPECT_EQ(czq::corrected_trapezoid(g, kIdentity, 0.5, 3).boundary_max, 1.0);
}
