#include "finsler/background.hpp"
#include "finsler/background_json.hpp"
#include "finsler/compare.hpp"
#include "finsler/errors.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

namespace finsler {
namespace {

using test::vec;

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::vector<BackgroundSpace> all_fixtures() {
  return {make_euclidean_space(3), make_exponential_warped_space(3, 0.5),
          make_exponential_warped_space(4, 2.0), make_normal_space(3, 0.4, 0.3),
          test::twist_space(), test::twist_space(4, -0.4)};
}

TEST(Warped, UnitSigmaIsEuclideanProduct) {
  const BackgroundSpace space =
      make_warped_space(3, [](double) { return 1.0; }, [](double) { return 0.0; });
  const Vector x = vec({0.4, -0.3, 0.2});
  const Connection c = connection_at(space, x);
  EXPECT_LT(c.nabla_b.cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(c.christoffel.max_abs(), 1e-15);
  EXPECT_NEAR(fit_landsberg_condition(site_at(space, x), c).k, 0.0, 1e-15);
}

TEST(Warped, ExponentialSigmaSatisfiesTheConditionWithConstantK) {
  for (double kappa : {0.5, 2.0}) {
    const BackgroundSpace space = make_exponential_warped_space(3, kappa);
    for (const auto& p : test::sample_points(space, 17, 10)) {
      const Site site = site_at(space, p.x);
      // Oracle: Christoffels from finite differences of a_ij, b_i.
      const Connection c = connection_at(space, p.x, DiffConfig::central_fd(),
                                         ConnectionSource::kFiniteDifference);
      const Matrix target = -kappa * (site.a - site.b_dn * site.b_dn.transpose());
      EXPECT_LT((c.nabla_b - target).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_NEAR(fit_landsberg_condition(site, c).k, -kappa, 1e-10);
      EXPECT_NEAR(warped_k([kappa](double t) { return std::exp(-kappa * t); },
                           [kappa](double t) { return -kappa * std::exp(-kappa * t); }, p.x),
                  -kappa, 1e-15);
    }
  }
}

TEST(Warped, CoshSigmaHasPointDependentK) {
  const double lambda = 0.8;
  auto sigma = [lambda](double t) { return std::cosh(lambda * t); };
  auto dsigma = [lambda](double t) { return lambda * std::sinh(lambda * t); };
  const BackgroundSpace space = make_warped_space(2, sigma, dsigma);
  const Vector x = vec({0.35, 0.1});
  const Site site = site_at(space, x);
  const ConditionFit fit = fit_landsberg_condition(site, connection_at(space, x));
  EXPECT_NEAR(fit.k, lambda * std::tanh(lambda * 0.35), 1e-13);
  EXPECT_LT(fit.residual, 1e-13);
}

TEST(Warped, RejectsNonPositiveSigma) {
  const BackgroundSpace space =
      make_warped_space(3, [](double t) { return t; }, [](double) { return 1.0; });
  EXPECT_THROW(site_at(space, vec({-0.5, 0.0, 0.0})), DomainError);
}

TEST(Connection, AnalyticAndFiniteDifferenceAgree) {
  for (const BackgroundSpace& space : all_fixtures()) {
    for (const auto& p : test::sample_points(space, 23, 5)) {
      const Connection a = connection_at(space, p.x);
      const Connection f = connection_at(space, p.x, DiffConfig::central_fd(), ConnectionSource::kFiniteDifference);
      EXPECT_LT((a.christoffel - f.christoffel).max_abs(), 1e-8) << space.label();
      EXPECT_LT((a.nabla_b - f.nabla_b).cwiseAbs().maxCoeff(), 1e-8) << space.label();
    }
  }
}

TEST(Connection, EuclideanIsZero) {
  const Connection c = connection_at(make_euclidean_space(4), vec({0.1, 0.2, 0.3, 0.4}));
  EXPECT_EQ(c.christoffel.max_abs(), 0.0);
  EXPECT_EQ(c.nabla_b.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(c.f_form.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Connection, InvariantsOnEveryFixture) {
  for (const BackgroundSpace& space : all_fixtures()) {
    const int n = space.dim();
    for (const auto& p : test::sample_points(space, 29, 5)) {
      const Site site = site_at(space, p.x);
      const Connection c = connection_at(space, p.x);
      EXPECT_NEAR(std::sqrt(site.b_dn.dot(site.a_inv * site.b_dn)), 1.0, 1e-12);
      // b^j nabla_i b_j = 0
      EXPECT_LT(max_abs_of(Vector(c.nabla_b * site.b_up)), 1e-10) << space.label();
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) EXPECT_EQ(c.christoffel(k, i, j), c.christoffel(k, j, i));
      // f_mn = nabla_m b_n - nabla_n b_m = d_m b_n - d_n b_m
      const Matrix db = space.oneform_dx(p.x);  // (n, m) = d_m b_n
      const Matrix curl = db.transpose() - db;
      EXPECT_LT((c.f_form - curl).cwiseAbs().maxCoeff(), 1e-13);
      EXPECT_LT((c.f_form - (c.nabla_b - c.nabla_b.transpose())).cwiseAbs().maxCoeff(), 1e-13);
      EXPECT_LT((c.f_form + c.f_form.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(Connection, TwistFixtureHasNonSymmetricNablaB) {
  const BackgroundSpace space = test::twist_space();
  const Vector x = vec({0.3, -0.2, 0.5});
  const Connection c = connection_at(space, x);
  EXPECT_GT(c.f_form.cwiseAbs().maxCoeff(), 0.1);
  EXPECT_GT(fit_landsberg_condition(site_at(space, x), c).residual, 0.1);
}

TEST(Frame, AlongBHasZeroQ) {
  const BackgroundSpace space = make_normal_space(3, 0.4, 0.3);
  const Site site = site_at(space, vec({0.1, 0.2, 0.3}));
  const Frame f = frame_at(site, site.b_up);
  EXPECT_NEAR(f.b, 1.0, 1e-14);
  EXPECT_NEAR(f.q, 0.0, 1e-7);
  EXPECT_LT(max_abs_of(f.v_up), 1e-14);
  EXPECT_FALSE(f.regular());
  EXPECT_THROW(f.eta_mixed(), NearCollinearError);
  EXPECT_THROW(frame_at(site, Vector::Zero(3)), DomainError);
  EXPECT_THROW(frame_at(site, Vector::Zero(2)), DomainError);
}

TEST(Frame, AlgebraicInvariants) {
  for (const BackgroundSpace& space : all_fixtures()) {
    const int n = space.dim();
    for (const auto& p : test::sample_points(space, 31, 10)) {
      const Frame f = frame_at(space, p.x, p.y);
      const double S2 = f.S * f.S;
      EXPECT_NEAR(S2, f.b * f.b + f.q * f.q, 1e-12 * S2);
      EXPECT_LT(max_abs_of(Vector(f.r() * f.site.b_up)), 1e-13);
      EXPECT_NEAR(f.v_dn.dot(f.site.b_up), 0.0, 1e-12 * f.S);
      EXPECT_NEAR(f.u.dot(f.v_up), f.q * f.q, 1e-12 * S2);
      EXPECT_NEAR(f.v_dn.dot(f.y), f.q * f.q, 1e-12 * S2);
      const Matrix& em = f.eta_mixed();
      EXPECT_LT(max_abs_of(Vector(f.site.b_dn.transpose() * em)), 1e-12);
      EXPECT_LT(max_abs_of(Vector(f.u.transpose() * em)), 1e-12 * f.S);
      EXPECT_LT(max_abs_of(Vector(em * f.v_up)), 1e-12 * f.S);
      EXPECT_LT((em * em - em).cwiseAbs().maxCoeff(), 1e-12);

      // Oracle: eigen-decomposition. A projector of rank N - 2 has N - 2
      // eigenvalues 1 and two eigenvalues 0.
      Eigen::EigenSolver<Matrix> es(em);
      int ones = 0, zeros = 0;
      for (int i = 0; i < n; ++i) {
        const auto ev = es.eigenvalues()(i);
        EXPECT_LT(std::abs(ev.imag()), 1e-10);
        if (std::abs(ev.real() - 1.0) < 1e-9) ++ones;
        if (std::abs(ev.real()) < 1e-9) ++zeros;
      }
      EXPECT_EQ(ones, n - 2);
      EXPECT_EQ(zeros, 2);
      // eta_ij = a_ik eta^k_j
      EXPECT_LT((f.site.a * em - f.eta_dn()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Frame, DerivativesInYMatchOneFormAndProjector) {
  const BackgroundSpace space = make_normal_space(3, 0.4, 0.3);
  for (const auto& p : test::sample_points(space, 37, 10)) {
    const Frame f = frame_at(space, p.x, p.y);
    const Site& st = f.site;
    const auto bf = make_scalar_field([&st](const Vector&, auto y) { return contract(st.b_dn, y); });
    const auto qf = make_scalar_field([&st](const Vector&, auto y) {
      using T = std::remove_cv_t<typename decltype(y)::value_type>;
      return oneform_and_q<T>(st, y).q;
    });
    const auto vf = make_vector_field([&st](const Vector&, auto y) {
      using T = std::remove_cv_t<typename decltype(y)::value_type>;
      const T b = contract<T>(st.b_dn, y);
      std::vector<T> v(y.begin(), y.end());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b * st.b_up(static_cast<Eigen::Index>(i));
      return v;
    });
    EXPECT_LT(relative_difference(derive_y(bf, p.x, as_span(p.y), 1).gradient(), st.b_dn), 1e-8);
    EXPECT_LT(relative_difference(derive_y(qf, p.x, as_span(p.y), 1).gradient(), Vector(f.v_dn / f.q)),
              1e-8);
    const auto dv = derive_y(vf, p.x, as_span(p.y), 1);
    Matrix m(3, 3);
    for (int i = 0; i < 3; ++i) m.row(i) = dv[static_cast<std::size_t>(i)].gradient().transpose();
    EXPECT_LT(relative_difference(m, st.r_mixed), 1e-8);
  }
}

TEST(Site, ValidatesMetricAndOneForm) {
  const BackgroundSpace not_unit(
      2, "bad-b", [](const Vector&) { return Matrix(Matrix::Identity(2, 2)); },
      [](const Vector&) { return vec({1.0, 0.1}); });
  EXPECT_THROW(site_at(not_unit, vec({0.0, 0.0})), DomainError);
  const BackgroundSpace indefinite(
      2, "bad-a",
      [](const Vector&) {
        Matrix a(2, 2);
        a << 1.0, 0.0, 0.0, -1.0;
        return a;
      },
      [](const Vector&) { return vec({1.0, 0.0}); });
  EXPECT_THROW(site_at(indefinite, vec({0.0, 0.0})), NotPositiveDefiniteError);
  EXPECT_THROW(site_at(make_euclidean_space(2), vec({0.0, NAN})), DomainError);
}

TEST(BackgroundJson, BuildsEveryKind) {
  using nlohmann::json;
  const BackgroundSpace e = background_from_json(
      json::parse(R"({"kind": "euclidean", "dim": 3, "direction": [0, 0, 2], "twist": 0})"));
  EXPECT_EQ(e.dim(), 3);
  EXPECT_LT((site_at(e, vec({0.1, 0.2, 0.3})).b_dn - vec({0, 0, 1})).cwiseAbs().maxCoeff(), 1e-15);

  const BackgroundSpace w = background_from_json(
      json::parse(R"({"kind": "warped", "dim": 3, "sigma": {"form": "exp", "kappa": 0.5}})"));
  const Vector x = vec({0.2, 0.1, -0.1});
  EXPECT_LT((w.metric(x) - make_exponential_warped_space(3, 0.5).metric(x)).cwiseAbs().maxCoeff(), 1e-15);

  const BackgroundSpace c = background_from_json(
      json::parse(R"({"kind": "warped", "dim": 2, "sigma": {"form": "cosh", "lambda": 0.8}})"));
  EXPECT_NEAR(c.metric(vec({0.5, 0.0}))(1, 1), std::pow(std::cosh(0.4), 2), 1e-14);

  const BackgroundSpace nrm =
      background_from_json(json::parse(R"({"kind": "normal", "dim": 3, "alpha": 0.4, "beta": 0.3})"));
  EXPECT_TRUE(nrm.has_analytic_dx());

  const BackgroundSpace tab = background_from_json(json::parse(R"({
      "kind": "tabulated",
      "a0": [[2, 0.1], [0.1, 1]],
      "a_slopes": [[[0.1, 0], [0, 0.2]]],
      "b0": [1, 0.5],
      "b_slopes": [[0.2, -0.1]]})"));
  EXPECT_EQ(tab.dim(), 2);
  EXPECT_FALSE(tab.has_analytic_dx());
  const Site s = site_at(tab, vec({0.3, -0.2}));
  EXPECT_NEAR(s.b_dn.dot(s.a_inv * s.b_dn), 1.0, 1e-12);
}

TEST(BackgroundJson, RejectsMalformedDocuments) {
  using nlohmann::json;
  EXPECT_THROW(background_from_json(json::parse(R"({"kind": "hyperbolic", "dim": 3})")), ConfigError);
  EXPECT_THROW(background_from_json(json::parse(R"({"kind": "warped", "dim": 3})")), ConfigError);
  EXPECT_THROW(background_from_json(json::parse(R"({"kind": "euclidean", "dim": "three"})")), ConfigError);
  EXPECT_THROW(background_from_json(json::parse(R"({"kind": "euclidean", "dim": 1})")), ConfigError);
  EXPECT_THROW(background_from_json(json::parse(R"([1, 2])")), ConfigError);
}

}  // namespace
}  // namespace finsler
