#include "finsler/compare.hpp"
#include "finsler/errors.hpp"
#include "finsler/geodesics.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace finsler {
namespace {

using test::vec;

TEST(Geodesics, StraightLinesInEuclideanSpace) {
  const BackgroundSpace space = make_euclidean_space(3, vec({0.2, 0.4, -0.6}));
  const SprayFunction spray = geodesic_spray_function(space, Charge::from_g(0.9));
  const Vector x0 = vec({0.1, -0.2, 0.3});
  const Vector y0 = vec({0.5, 0.3, 0.8});
  const GeodesicTrace tr = integrate_geodesic(spray, x0, y0, 2.0, 0.05, finsleroid_monitor(space, Charge::from_g(0.9)));
  ASSERT_FALSE(tr.truncated);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_LT((tr.points[i] - (x0 + tr.times[i] * y0)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((tr.velocities[i] - y0).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_LT(tr.max_K_drift, 1e-12);
  EXPECT_DOUBLE_EQ(tr.times.back(), 2.0);
}

TEST(Geodesics, ScalingTheVelocityReparametrizes) {
  const BackgroundSpace space = make_exponential_warped_space(3, 0.5);
  const SprayFunction spray = geodesic_spray_function(space, Charge::from_g(0.7));
  const Vector x0 = vec({0.0, 0.1, -0.1});
  const Vector y0 = vec({0.4, 0.6, -0.3});
  const GeodesicTrace slow = integrate_geodesic(spray, x0, y0, 1.0, 1e-3);
  const GeodesicTrace fast = integrate_geodesic(spray, x0, Vector(2.0 * y0), 0.5, 5e-4);
  EXPECT_LT((slow.points.back() - fast.points.back()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((2.0 * slow.velocities.back() - fast.velocities.back()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Geodesics, FinsleroidLengthIsConservedOnWarpedBackground) {
  const BackgroundSpace space = make_exponential_warped_space(3, 0.5);
  const Charge ch = Charge::from_g(1.0);
  const GeodesicTrace tr = integrate_geodesic(geodesic_spray_function(space, ch), vec({0.0, 0.0, 0.0}),
                                              vec({0.6, -0.5, 0.4}), 1.0, 1e-3, finsleroid_monitor(space, ch));
  ASSERT_FALSE(tr.truncated) << tr.truncation_reason;
  EXPECT_EQ(tr.K_values.size(), tr.size());
  EXPECT_LT(tr.max_K_drift, 1e-6);
}

TEST(Geodesics, RungeKuttaIsFourthOrder) {
  const BackgroundSpace space = test::twist_space();
  const SprayFunction spray = geodesic_spray_function(space, Charge::from_g(0.6));
  const Vector x0 = vec({0.1, -0.2, 0.2});
  const Vector y0 = vec({0.8, 0.5, -0.6});
  const Vector ref = integrate_geodesic(spray, x0, y0, 1.0, 1e-3).points.back();
  double prev = 0.0;
  for (double h : {0.1, 0.05}) {
    const double err = (integrate_geodesic(spray, x0, y0, 1.0, h).points.back() - ref).norm();
    if (prev > 0.0) {
      const double ratio = prev / err;
      EXPECT_GT(ratio, 16.0 * 0.7);
      EXPECT_LT(ratio, 16.0 * 1.3);
    }
    prev = err;
  }
}

TEST(Geodesics, ZeroChargeFollowsRiemannianGeodesics) {
  const BackgroundSpace space = make_normal_space(3, 0.4, 0.3);
  const Vector x0 = vec({0.1, 0.0, -0.1});
  const Vector y0 = vec({0.3, 0.7, 0.2});
  const GeodesicTrace a = integrate_geodesic(geodesic_spray_function(space, Charge::from_g(0.0)), x0, y0, 1.0, 0.01);
  const GeodesicTrace b = integrate_geodesic(riemann_spray_function(space), x0, y0, 1.0, 0.01);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_LT((a.points[i] - b.points[i]).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Geodesics, CollinearityTruncatesTheTrace) {
  const SprayFunction spray = [](const Vector& x, const Vector& y) -> Vector {
    if (x(0) > 0.5) throw NearCollinearError("test spray: y is near-collinear with b");
    return Vector::Zero(y.size());
  };
  const GeodesicTrace tr = integrate_geodesic(spray, vec({0.0, 0.0}), vec({1.0, 0.0}), 2.0, 0.1);
  EXPECT_TRUE(tr.truncated);
  EXPECT_NE(tr.truncation_reason.find("collinear"), std::string::npos);
  EXPECT_LT(tr.times.back(), 0.55);
  EXPECT_EQ(tr.points.size(), tr.times.size());
  for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_GT(tr.times[i], tr.times[i - 1]);
}

TEST(Geodesics, RejectsBadArgumentsAndNonFiniteStates) {
  const SprayFunction zero = [](const Vector&, const Vector& y) -> Vector { return Vector::Zero(y.size()); };
  const Vector x = vec({0.0, 0.0});
  const Vector y = vec({1.0, 0.0});
  EXPECT_THROW(integrate_geodesic(zero, x, y, 1.0, 0.0), DomainError);
  EXPECT_THROW(integrate_geodesic(zero, x, y, 1.0, -0.1), DomainError);
  EXPECT_THROW(integrate_geodesic(zero, x, y, -1.0, 0.1), DomainError);
  EXPECT_THROW(integrate_geodesic(zero, x, vec({1.0}), 1.0, 0.1), DomainError);
  EXPECT_THROW(integrate_geodesic(zero, x, vec({0.0, 0.0}), 1.0, 0.1), DomainError);
  const SprayFunction nan = [](const Vector&, const Vector& v) -> Vector {
    return Vector::Constant(v.size(), std::numeric_limits<double>::quiet_NaN());
  };
  EXPECT_THROW(integrate_geodesic(nan, x, y, 1.0, 0.1), IntegrationError);
}

TEST(Geodesics, SingularInitialVelocityIsRejected) {
  const BackgroundSpace space = make_exponential_warped_space(3, 0.5);
  const Charge ch = Charge::from_g(0.5);
  // b = dt, so y0 along the t-axis is collinear with b.
  EXPECT_THROW(integrate_geodesic(geodesic_spray_function(space, ch), vec({0.0, 0.0, 0.0}), vec({1.0, 0.0, 0.0}),
                                  1.0, 0.1, finsleroid_monitor(space, ch)),
               DomainError);
}

TEST(Geodesics, CsvHasOneRowPerSample) {
  const SprayFunction zero = [](const Vector&, const Vector& y) -> Vector { return Vector::Zero(y.size()); };
  const GeodesicTrace tr = integrate_geodesic(zero, vec({0.0, 1.0}), vec({1.0, 0.5}), 0.25, 0.1);
  std::ostringstream os;
  write_trace_csv(os, tr);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,x1,x2,y1,y2,K");
  int rows = 0;
  std::string last;
  while (std::getline(is, line)) {
    ++rows;
    last = line;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(tr.times.back(), 0.25);
  EXPECT_EQ(last.back(), ',');  // empty K column without a monitor
  EXPECT_EQ(last.rfind("0.25,", 0), 0u);
}

}  // namespace
}  // namespace finsler
