#include "finsler/jet.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

namespace finsler {
namespace {

struct Derivs {
  double f, d1, d2, d3;
};

// f(u) at one variable seeded through an affine map u = 0.5 + 0.7 t, so the
// chain rule is exercised too.
Derivs through_affine(const std::function<Jet3(const Jet3&)>& f, double t) {
  const Jet3 x = Jet3::variable(1, 3, 0, t);
  const Jet3 j = f(0.5 + 0.7 * x);
  return {j.value(), j.grad(0), j.hess(0, 0), j.third(0, 0, 0)};
}

void expect_derivs(const Derivs& got, double u, double f0, double f1, double f2, double f3) {
  const double a = 0.7;
  EXPECT_NEAR(got.f, f0, 1e-14 * std::max(1.0, std::abs(f0))) << "u = " << u;
  EXPECT_NEAR(got.d1, a * f1, 1e-13 * std::max(1.0, std::abs(f1)));
  EXPECT_NEAR(got.d2, a * a * f2, 1e-13 * std::max(1.0, std::abs(f2)));
  EXPECT_NEAR(got.d3, a * a * a * f3, 1e-12 * std::max(1.0, std::abs(f3)));
}

TEST(Jet3, ElementaryFunctionsMatchKnownDerivatives) {
  const double t = 0.3;
  const double u = 0.5 + 0.7 * t;
  expect_derivs(through_affine([](const Jet3& v) { return exp(v); }, t), u, std::exp(u), std::exp(u),
                std::exp(u), std::exp(u));
  expect_derivs(through_affine([](const Jet3& v) { return log(v); }, t), u, std::log(u), 1 / u,
                -1 / (u * u), 2 / (u * u * u));
  expect_derivs(through_affine([](const Jet3& v) { return sqrt(v); }, t), u, std::sqrt(u),
                0.5 / std::sqrt(u), -0.25 * std::pow(u, -1.5), 0.375 * std::pow(u, -2.5));
  expect_derivs(through_affine([](const Jet3& v) { return sin(v); }, t), u, std::sin(u), std::cos(u),
                -std::sin(u), -std::cos(u));
  expect_derivs(through_affine([](const Jet3& v) { return cos(v); }, t), u, std::cos(u), -std::sin(u),
                -std::cos(u), std::sin(u));
  const double w = 1 + u * u;
  expect_derivs(through_affine([](const Jet3& v) { return atan(v); }, t), u, std::atan(u), 1 / w,
                -2 * u / (w * w), (6 * u * u - 2) / (w * w * w));
  expect_derivs(through_affine([](const Jet3& v) { return 1.0 / v; }, t), u, 1 / u, -1 / (u * u),
                2 / (u * u * u), -6 / (u * u * u * u));
}

TEST(Jet3, PolynomialInThreeVariables) {
  // f = y0^2 y1 + 3 y2^3 - y0 y1 y2
  const double y[3] = {0.4, -1.3, 2.1};
  const auto v = Jet3::variables(y, 3);
  const Jet3 f = v[0] * v[0] * v[1] + 3.0 * v[2] * v[2] * v[2] - v[0] * v[1] * v[2];
  EXPECT_NEAR(f.value(), y[0] * y[0] * y[1] + 3 * std::pow(y[2], 3) - y[0] * y[1] * y[2], 1e-13);
  EXPECT_NEAR(f.grad(0), 2 * y[0] * y[1] - y[1] * y[2], 1e-13);
  EXPECT_NEAR(f.grad(1), y[0] * y[0] - y[0] * y[2], 1e-13);
  EXPECT_NEAR(f.grad(2), 9 * y[2] * y[2] - y[0] * y[1], 1e-13);
  EXPECT_NEAR(f.hess(0, 0), 2 * y[1], 1e-13);
  EXPECT_NEAR(f.hess(0, 1), 2 * y[0] - y[2], 1e-13);
  EXPECT_NEAR(f.hess(2, 2), 18 * y[2], 1e-13);
  EXPECT_NEAR(f.hess(1, 2), -y[0], 1e-13);
  EXPECT_DOUBLE_EQ(f.third(0, 0, 1), 2.0);
  EXPECT_DOUBLE_EQ(f.third(1, 0, 0), 2.0);
  EXPECT_DOUBLE_EQ(f.third(2, 2, 2), 18.0);
  EXPECT_DOUBLE_EQ(f.third(0, 1, 2), -1.0);
  EXPECT_DOUBLE_EQ(f.third(2, 0, 1), -1.0);
  EXPECT_DOUBLE_EQ(f.third(1, 1, 1), 0.0);
}

TEST(Jet3, HessianAndThirdAreExactlySymmetric) {
  const double y[3] = {0.7, 0.2, -0.5};
  const auto v = Jet3::variables(y, 3);
  const Jet3 f = atan2(v[1] + v[2] * v[0], exp(v[0]) + v[1] * v[1]) * sqrt(1.0 + v[2] * v[2]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      EXPECT_EQ(f.hess(i, j), f.hess(j, i));
      for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(f.third(i, j, k), f.third(j, i, k));
        EXPECT_EQ(f.third(i, j, k), f.third(k, j, i));
        EXPECT_EQ(f.third(i, j, k), f.third(i, k, j));
      }
    }
}

TEST(Jet3, Atan2IsSmoothAcrossTheNegativeYAxis) {
  // Left half-plane, above and below the cut: gradient of the polar angle is
  // (-y, x)/(x^2 + y^2) everywhere off the cut.
  for (double yy : {0.3, -0.3}) {
    const double p[2] = {-0.8, yy};
    const auto v = Jet3::variables(p, 2);
    const Jet3 a = atan2(v[1], v[0]);
    const double r2 = p[0] * p[0] + p[1] * p[1];
    EXPECT_NEAR(a.value(), std::atan2(yy, -0.8), 1e-15);
    EXPECT_NEAR(a.grad(0), -yy / r2, 1e-14);
    EXPECT_NEAR(a.grad(1), -0.8 / r2, 1e-14);
    // Harmonic: the Laplacian vanishes.
    EXPECT_NEAR(a.hess(0, 0) + a.hess(1, 1), 0.0, 1e-13);
  }
}

TEST(Jet3, NormMatchesClosedFormDerivatives) {
  const double p[2] = {1.2, -0.5};
  const auto v = Jet3::variables(p, 3);
  const Jet3 r = sqrt(v[0] * v[0] + v[1] * v[1]);
  const double R = std::hypot(p[0], p[1]);
  EXPECT_NEAR(r.grad(0), p[0] / R, 1e-15);
  EXPECT_NEAR(r.hess(0, 0), p[1] * p[1] / (R * R * R), 1e-15);
  EXPECT_NEAR(r.hess(0, 1), -p[0] * p[1] / (R * R * R), 1e-15);
  // d3 r / dx^3 = -3 x y^2 / r^5
  EXPECT_NEAR(r.third(0, 0, 0), -3 * p[0] * p[1] * p[1] / std::pow(R, 5), 1e-14);
}

TEST(Jet3, ConstantsMixWithVariables) {
  Jet3 acc = 0.0;
  const double y[2] = {2.0, 3.0};
  const auto v = Jet3::variables(y, 2);
  acc += v[0] * 4.0;
  acc -= v[1];
  EXPECT_EQ(acc.dim(), 2);
  EXPECT_DOUBLE_EQ(acc.value(), 5.0);
  EXPECT_DOUBLE_EQ(acc.grad(0), 4.0);
  EXPECT_DOUBLE_EQ(acc.grad(1), -1.0);
  EXPECT_DOUBLE_EQ(acc.hess(0, 1), 0.0);
}

TEST(Jet3, OrderLimitsStoredDerivatives) {
  const double y[1] = {0.5};
  const Jet3 f = exp(Jet3::variables(y, 1)[0]);
  EXPECT_EQ(f.order(), 1);
  EXPECT_DOUBLE_EQ(f.grad(0), std::exp(0.5));
  EXPECT_EQ(f.hess(0, 0), 0.0);
  EXPECT_EQ(f.third(0, 0, 0), 0.0);
}

}  // namespace
}  // namespace finsler
