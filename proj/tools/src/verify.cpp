#include "finsler_app/verify.hpp"

#include "finsler/compare.hpp"
#include "finsler/errors.hpp"
#include "finsler/sampling.hpp"
#include "finsler/spray.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

namespace finsler::app {

namespace {

struct Sample {
  Frame frame;
  Connection conn;
  double c = 0.0;  // Landsberg scalar used for the cascade at this sample
};

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

template <typename Item, typename F>
IdentityRecord check(const std::string& name, const std::string& group, double tol,
                     const std::vector<Item>& items, F&& residual_of) {
  IdentityRecord r{name, group, 0, 0, 0.0, tol, true, ""};
  for (const Item& item : items) {
    try {
      const double res = residual_of(item);
      r.max_residual = std::isnan(res) ? INFINITY : std::max(r.max_residual, res);
    } catch (const std::exception& e) {
      r.passed = false;
      ++r.errors;
      if (r.note.empty()) r.note = e.what();
    }
    ++r.samples;
  }
  r.passed = r.passed && r.max_residual <= tol;
  return r;
}

// Contraction w_i T^i_{...} for every trailing index tuple, as a residual
// relative to sum_i |w_i T^i_{...}| (at least `floor`).
double contraction_residual(const Vector& w, const Array4& T, double floor) {
  const int n = T.dim();
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int m = 0; m < n; ++m)
      for (int p = 0; p < n; ++p) {
        double sum = 0.0, scale = 0.0;
        for (int i = 0; i < n; ++i) {
          sum += w(i) * T(i, k, m, p);
          scale += std::abs(w(i) * T(i, k, m, p));
        }
        worst = std::max(worst, relative_residual(sum, scale, floor));
      }
  return worst;
}

double symmetry_residual(const Array4& T, bool include_first, double floor) {
  const int n = T.dim();
  const double scale = std::max({T.max_abs(), floor, 1e-12});
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m)
        for (int p = 0; p < n; ++p) {
          const double v = T(i, k, m, p);
          worst = std::max({worst, std::abs(v - T(i, m, k, p)), std::abs(v - T(i, k, p, m)),
                            std::abs(v - T(i, p, m, k))});
          if (include_first) worst = std::max(worst, std::abs(v - T(k, i, m, p)));
        }
  return worst / scale;
}

// Phi(w) of the w-generating function, for T = double or Jet3.
template <typename T>
T phi_of_w(const Charge& c, const T& w, int sign_b) {
  using std::atan;
  return (sign_b >= 0 ? 0.5 : -0.5) * std::numbers::pi + std::atan(0.5 * c.G) -
         atan((w + 0.5 * c.g) / c.h);
}

// Derivatives of a function of one real variable, by the configured method.
template <typename F>
Jet3 derive_1d(F f, double at, int order, const DiffConfig& cfg) {
  const ScalarField field = make_scalar_field([f](const Vector&, auto s) { return f(s[0]); });
  const double arg[1] = {at};
  return derive_y(field, Vector(), std::span<const double>(arg, 1), order, cfg);
}

// Steps of y-stencils are capped at this fraction of q, so central
// differences never straddle the cone q = 0 where K is only C^2.
constexpr double kConeStepFraction = 0.01;

DiffConfig near_cone(DiffConfig cfg, const Frame& f) {
  if (cfg.method == DiffMethod::kCentralFd) cfg.fd_step_cap = kConeStepFraction * f.q;
  return cfg;
}

// Stencil for the third-order generating-function check.
const DiffConfig kThirdOrderFd = DiffConfig::central_fd(3, 8.0);

// Difference oracles lose (S/q)^2 to roundoff near the cone; they are run
// only on samples with q >= kFdConeMargin S.
constexpr double kFdConeMargin = 1e-2;

bool fd_well_conditioned(const Frame& f) { return f.q >= kFdConeMargin * f.S; }

IdentityRecord with_skips(IdentityRecord r, std::size_t total) {
  const auto skipped = total - static_cast<std::size_t>(r.samples);
  if (skipped > 0 && r.note.empty())
    r.note = std::to_string(skipped) + " near-cone samples skipped by the difference oracle";
  return r;
}

struct ScalarSample {
  double value;
  int sign;
};

}  // namespace

VerifyReport run_verification(const RunConfig& cfg, std::uint64_t seed, int samples) {
  if (samples < 1) throw ConfigError("verify: --samples must be >= 1");
  const BackgroundSpace& space = cfg.space;
  const Charge& ch = cfg.charge;
  const Tolerances& tol = cfg.tol;
  const int n = space.dim();
  const bool fd = cfg.diff.method == DiffMethod::kCentralFd;
  // Central differences reach the upper end of the derivative-oracle ladder.
  const double tol_d1 = fd ? std::max(tol.first_derivative, tol.method_agreement) : tol.first_derivative;
  const double tol_d2 = fd ? std::max(tol.second_derivative, tol.method_agreement) : tol.second_derivative;

  VerifyReport rep;
  rep.background = space.label();
  rep.dim = n;
  rep.g = ch.g;
  rep.seed = seed;
  rep.samples = samples;

  Rng rng(seed);
  std::vector<Sample> pts;
  std::vector<ConditionFit> fits;
  pts.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const Vector x = sample_point(rng, n, cfg.sampling.x_low, cfg.sampling.x_high);
    const Site site = site_at(space, x);
    const VelocitySample vs = sample_velocity(rng, site);
    rep.rejections += vs.rejections;
    Connection conn = connection_at(space, x, cfg.diff);
    fits.push_back(fit_landsberg_condition(site, conn));
    pts.push_back({frame_at(site, vs.y), std::move(conn), 0.0});
  }
  rep.landsberg_condition = true;
  for (const auto& f : fits)
    if (!(f.residual <= 1e-8 * std::max(1.0, std::abs(f.k)))) rep.landsberg_condition = false;
  rep.condition_k = rep.landsberg_condition ? fits.front().k : 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    pts[i].c = rep.landsberg_condition ? ch.g * fits[i].k : ch.g;
  std::vector<Sample> pts_cone;
  for (const Sample& sm : pts)
    if (fd_well_conditioned(sm.frame)) pts_cone.push_back(sm);
  const std::vector<Sample>& pts_fd = fd ? pts_cone : pts;

  auto& out = rep.records;
  const std::string kBg = "background", kMetric = "finsleroid", kSpray = "spray",
                    kGen = "generating";

  // -- background ----------------------------------------------------------
  out.push_back(check("frame: S^2 = b^2 + q^2, r b = 0, v.b = 0, u.v = q^2, eta annihilates b, u, v",
                      kBg, tol.algebraic, pts, [&](const Sample& s) {
    const Frame& f = s.frame;
    const Site& st = f.site;
    double w = rel(f.S * f.S, f.b * f.b + f.q * f.q);
    const Vector rb = st.r_dn * st.b_up;
    w = std::max(w, max_abs_of(rb) / std::max(st.r_dn.cwiseAbs().maxCoeff(), 1e-12));
    w = std::max(w, relative_residual(f.v_dn.dot(st.b_up), f.v_dn.cwiseAbs().dot(st.b_up.cwiseAbs())));
    w = std::max(w, rel(f.u.dot(f.v_up), f.q * f.q));
    const Matrix& em = f.eta_mixed();
    const double es = std::max(em.cwiseAbs().maxCoeff(), st.r_mixed.cwiseAbs().maxCoeff());
    w = std::max(w, max_abs_of(Vector(st.b_dn.transpose() * em)) / es);
    w = std::max(w, max_abs_of(Vector(f.u.transpose() * em)) / (es * f.u.cwiseAbs().sum()));
    w = std::max(w, max_abs_of(Vector(em * f.v_up)) / (es * f.v_up.cwiseAbs().sum()));
    return w;
  }));

  out.push_back(with_skips(check("frame: db/dy^i = b_i, dq/dy^i = v_i/q", kBg, tol_d1, pts_fd,
                      [&](const Sample& s) {
    const Frame& f = s.frame;
    const Site& st = f.site;
    const ScalarField bf = make_scalar_field([&st](const Vector&, auto y) {
      using T = std::remove_cv_t<typename decltype(y)::value_type>;
      return contract<T>(st.b_dn, y);
    });
    const ScalarField qf = make_scalar_field([&st](const Vector&, auto y) {
      using T = std::remove_cv_t<typename decltype(y)::value_type>;
      return oneform_and_q<T>(st, y).q;
    });
    const Jet3 db = derive_y(bf, st.x, as_span(f.y), 1, near_cone(cfg.diff, f));
    const Jet3 dq = derive_y(qf, st.x, as_span(f.y), 1, near_cone(cfg.diff, f));
    return std::max(relative_difference(db.gradient(), st.b_dn),
                    relative_difference(dq.gradient(), Vector(f.v_dn / f.q)));
  }), pts.size()));

  out.push_back(with_skips(check("frame: dv^i/dy^n = r^i_n", kBg, tol_d1, pts_fd,
                      [&](const Sample& s) {
    const Frame& f = s.frame;
    const Site& st = f.site;
    const VectorField vf = make_vector_field([&st](const Vector&, auto y) {
      using T = std::remove_cv_t<typename decltype(y)::value_type>;
      const T b = contract<T>(st.b_dn, y);
      std::vector<T> v(y.begin(), y.end());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b * st.b_up(static_cast<Eigen::Index>(i));
      return v;
    });
    const auto d = derive_y(vf, st.x, as_span(f.y), 1, near_cone(cfg.diff, f));
    Matrix dv(n, n);
    for (int i = 0; i < n; ++i) dv.row(i) = d[static_cast<std::size_t>(i)].gradient().transpose();
    return relative_difference(dv, st.r_mixed);
  }), pts.size()));

  // Without analytic x-derivatives the connection itself comes from central differences.
  const double tol_conn = space.has_analytic_dx() ? tol.algebraic : tol.connection_fd;
  out.push_back(check("connection: b^j nabla_i b_j = 0", kBg, tol_conn, pts, [&](const Sample& s) {
    const Vector& bu = s.frame.site.b_up;
    const double floor = max_abs_of(bu) * s.conn.nabla_b.cwiseAbs().maxCoeff();
    double w = 0.0;
    for (int i = 0; i < n; ++i) {
      double sum = 0.0, scale = 0.0;
      for (int j = 0; j < n; ++j) {
        sum += bu(j) * s.conn.nabla_b(i, j);
        scale += std::abs(bu(j) * s.conn.nabla_b(i, j));
      }
      w = std::max(w, relative_residual(sum, scale, floor));
    }
    return w;
  }));

  out.push_back(check("connection: a^k_ij = a^k_ji, f_mn = -f_nm = d_m b_n - d_n b_m", kBg,
                      tol.algebraic, pts, [&](const Sample& s) {
    const Array3& G = s.conn.christoffel;
    double w = 0.0;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w = std::max(w, std::abs(G(k, i, j) - G(k, j, i)));
    w /= std::max(G.max_abs(), 1e-12);
    const Matrix& F = s.conn.f_form;
    const Matrix curl = s.conn.b_dx.transpose() - s.conn.b_dx;  // (m, n) = d_m b_n - d_n b_m
    w = std::max(w, relative_difference(F, Matrix(-F.transpose())));
    w = std::max(w, relative_difference(F, curl));
    return w;
  }));

  if (space.has_analytic_dx()) {
    out.push_back(check("connection: analytic = finite-difference Christoffels (absolute)", kBg,
                        tol.connection_fd, pts, [&](const Sample& s) {
      const Connection num =
          connection_at(space, s.frame.site.x, DiffConfig::central_fd(), ConnectionSource::kFiniteDifference);
      return std::max(max_abs_of(s.conn.christoffel - num.christoffel),
                      max_abs_of(Matrix(s.conn.nabla_b - num.nabla_b)));
    }));
  }

  // -- finsleroid ----------------------------------------------------------
  std::vector<MetricEval> metrics;
  for (const Sample& s : pts) metrics.push_back(evaluate_metric(ch, s.frame));
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<std::size_t> idx_cone;
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (fd_well_conditioned(pts[i].frame)) idx_cone.push_back(i);
  const std::vector<std::size_t>& idx_fd = fd ? idx_cone : idx;

  out.push_back(with_skips(check("y_i = (1/2) dK^2/dy^i", kMetric, tol_d1, idx_fd, [&](std::size_t i) {
    const Frame& f = pts[i].frame;
    const Jet3 j = derive_y(k_squared_field(ch, f.site), f.site.x, as_span(f.y), 1, near_cone(cfg.diff, f));
    return relative_difference(metrics[i].y_dn, Vector(0.5 * j.gradient()));
  }), idx.size()));

  out.push_back(check("y_i: u-variable form = v-variable form", kMetric, tol.algebraic, idx,
                      [&](std::size_t i) {
    const MetricEval& m = metrics[i];
    return relative_difference(m.y_dn, lower_y_u_form(ch, pts[i].frame, m.K, m.B));
  }));

  out.push_back(with_skips(check("g_ij = (1/2) d^2 K^2/dy^i dy^j", kMetric, tol_d2, idx_fd,
                      [&](std::size_t i) {
    const Frame& f = pts[i].frame;
    return relative_difference(metrics[i].g_dn, metric_from_k_squared(ch, f.site, f.y, near_cone(cfg.diff, f)));
  }), idx.size()));

  out.push_back(check("g_ij: u-variable form = v-variable form", kMetric, tol.algebraic, idx,
                      [&](std::size_t i) {
    const MetricEval& m = metrics[i];
    return relative_difference(m.g_dn, metric_tensor_u_form(ch, pts[i].frame, m.K, m.B));
  }));

  out.push_back(check("g^ij g_jk = delta^i_k (absolute)", kMetric, tol.algebraic, idx, [&](std::size_t i) {
    const MetricEval& m = metrics[i];
    return max_abs_of(Matrix(m.g_up * m.g_dn - Matrix::Identity(n, n)));
  }));

  out.push_back(check("g^ij: u-variable form = v-variable form", kMetric, tol.algebraic, idx,
                      [&](std::size_t i) {
    const MetricEval& m = metrics[i];
    return relative_difference(m.g_up, inverse_metric_u_form(ch, pts[i].frame, m.K, m.B));
  }));

  out.push_back(check("g^ij = numeric inverse of g_ij", kMetric, tol.numeric_inverse, idx,
                      [&](std::size_t i) {
    const MetricEval& m = metrics[i];
    return relative_difference(m.g_up, invert_spd(Matrix(0.5 * (m.g_dn + m.g_dn.transpose()))));
  }));

  out.push_back(check("det(g_ij)/det(a_ij) = (K^2/B)^N", kMetric, tol.determinant, idx, [&](std::size_t i) {
    const MetricEval& m = metrics[i];
    return rel(m.det_ratio, std::pow(m.K * m.K / m.B, n));
  }));

  out.push_back(check("g_ij y^i y^j = y_i y^i = K^2", kMetric, tol.algebraic, idx, [&](std::size_t i) {
    const MetricEval& m = metrics[i];
    const Vector& y = pts[i].frame.y;
    return std::max(rel(y.dot(m.g_dn * y), m.K * m.K), rel(m.y_dn.dot(y), m.K * m.K));
  }));

  out.push_back(with_skips(check("A_i = (K/2) g^jk dg_jk/dy^i", kMetric, fd ? tol.third_fd : tol.cartan, idx_fd,
                      [&](std::size_t i) {
    const MetricEval& m = metrics[i];
    const Frame& f = pts[i].frame;
    const Jet3 j = derive_y(k_squared_field(ch, f.site), f.site.x, as_span(f.y), 3, near_cone(cfg.diff, f));
    Vector A = Vector::Zero(n);
    for (int a = 0; a < n; ++a)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) A(a) += 0.5 * m.K * m.g_up(p, q) * 0.5 * j.third(p, q, a);
    return relative_difference(m.A_dn, A);
  }), idx.size()));

  out.push_back(check("A_i: y-form = v-form, A_i y^i = 0", kMetric, tol.algebraic, idx, [&](std::size_t i) {
    const MetricEval& m = metrics[i];
    const Frame& f = pts[i].frame;
    const Vector Ay = cartan_trace_y_form(ch, f, m.K, m.B, m.y_dn);
    return std::max(relative_difference(m.A_dn, Ay),
                    relative_residual(m.A_dn.dot(f.y), m.A_dn.cwiseAbs().dot(f.y.cwiseAbs())));
  }));

  out.push_back(check("K(x, ly) = l K(x, y) for l in {0.5, 2, 7}", kMetric, tol.homogeneity, idx,
                      [&](std::size_t i) {
    const Frame& f = pts[i].frame;
    double w = 0.0;
    for (double l : {0.5, 2.0, 7.0})
      w = std::max(w, rel(evaluate_K(ch, frame_at(f.site, Vector(l * f.y))).K, l * metrics[i].K));
    return w;
  }));

  out.push_back(check("g_ij(x, ly) = g_ij(x, y) for l in {0.5, 2, 7}", kMetric, tol.algebraic, idx,
                      [&](std::size_t i) {
    const Frame& f = pts[i].frame;
    double w = 0.0;
    for (double l : {0.5, 2.0, 7.0})
      w = std::max(w, relative_difference(evaluate_metric(ch, frame_at(f.site, Vector(l * f.y))).g_dn,
                                          metrics[i].g_dn));
    return w;
  }));

  out.push_back(check("y_i lies in span{b_i, u_i}", kMetric, tol.algebraic, idx, [&](std::size_t i) {
    const Frame& f = pts[i].frame;
    Matrix basis(n, 2);
    basis.col(0) = f.site.b_dn;
    basis.col(1) = f.u;
    const Vector& yd = metrics[i].y_dn;
    const Vector p = basis.colPivHouseholderQr().solve(yd);
    return max_abs_of(Vector(basis * p - yd)) / std::max(max_abs_of(yd), 1e-12);
  }));

  out.push_back(check("H^i_k H^k_m = H^i_m, trace H = N - 2", kMetric, tol.algebraic, idx,
                      [&](std::size_t i) {
    const Matrix& H = metrics[i].H_mixed;
    const double floor = pts[i].frame.site.r_mixed.cwiseAbs().maxCoeff();
    return std::max(relative_difference(Matrix(H * H), H, floor),
                    std::abs(H.trace() - (n - 2.0)) / std::max(1.0, n - 2.0));
  }));

  out.push_back(check("K continuous across b = 0", kMetric, tol.branch, idx, [&](std::size_t i) {
    const Frame& f = pts[i].frame;
    const double eps = 1e-8 * f.q;  // S of the vectors v^i +- eps b^i
    const Vector yp = f.v_up + eps * f.site.b_up;
    const Vector ym = f.v_up - eps * f.site.b_up;
    const double kp = evaluate_K(ch, frame_at(f.site, yp)).K;
    const double km = evaluate_K(ch, frame_at(f.site, ym)).K;
    return rel(kp, km);
  }));

  out.push_back(with_skips(check("K^2 Hessian: forward jets = central differences", kMetric, tol.method_agreement, idx_cone,
                      [&](std::size_t i) {
    const Frame& f = pts[i].frame;
    return relative_difference(metric_from_k_squared(ch, f.site, f.y, DiffConfig{}),
                               metric_from_k_squared(ch, f.site, f.y, near_cone(DiffConfig::central_fd(3), f)));
  }), idx.size()));

  // -- spray ---------------------------------------------------------------
  std::vector<SprayCoeffs> cascades;
  // Natural sizes of G^i_kmn and G_ikmn; at N = 2 both vanish identically
  // and comparisons are made on these scales instead of on roundoff.
  std::vector<double> g3_scale, low_scale;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Sample& s = pts[i];
    cascades.push_back(cascade_closed(s.c, s.frame, s.conn));
    const double rm = s.frame.site.r_mixed.cwiseAbs().maxCoeff();
    const double rd = s.frame.r().cwiseAbs().maxCoeff();
    const double kb = metrics[i].K * metrics[i].K / metrics[i].B;
    g3_scale.push_back(std::abs(s.c) / s.frame.q * rm * rd);
    low_scale.push_back(std::abs(s.c) / s.frame.q * kb * kb * rd * rd);
  }

  out.push_back(check("G^i_kmn: eta form = expanded form", kSpray, tol.algebraic, idx, [&](std::size_t i) {
    return relative_difference(cascades[i].G3, cascade_third_expanded(pts[i].c, pts[i].frame), g3_scale[i]);
  }));

  out.push_back(check("G^i_kmn: eta form = derivative of G^i_km", kSpray, tol.algebraic, idx,
                      [&](std::size_t i) {
    return relative_difference(cascades[i].G3, cascade_third_unsymmetrized(pts[i].c, pts[i].frame),
                               g3_scale[i]);
  }));

  out.push_back(check("b_i G^i_kmn = 0", kSpray, tol.algebraic, idx, [&](std::size_t i) {
    const Vector& w = pts[i].frame.site.b_dn;
    return contraction_residual(w, cascades[i].G3, max_abs_of(w) * g3_scale[i]);
  }));
  out.push_back(check("u_i G^i_kmn = 0", kSpray, tol.algebraic, idx, [&](std::size_t i) {
    const Vector& w = pts[i].frame.u;
    return contraction_residual(w, cascades[i].G3, max_abs_of(w) * g3_scale[i]);
  }));
  out.push_back(check("y_i G^i_kmn = 0 with the Finsleroid y_i", kSpray, tol.algebraic, idx,
                      [&](std::size_t i) {
    const Vector& w = metrics[i].y_dn;
    return contraction_residual(w, cascades[i].G3, max_abs_of(w) * g3_scale[i]);
  }));

  out.push_back(check("G^i_km, G^i_kmn symmetric in lower indices", kSpray, tol.algebraic, idx,
                      [&](std::size_t i) {
    const SprayCoeffs& c = cascades[i];
    double w = 0.0;
    for (int a = 0; a < n; ++a)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) w = std::max(w, std::abs(c.G2(a, k, m) - c.G2(a, m, k)));
    w /= std::max(c.G2.max_abs(), 1e-12);
    return std::max(w, symmetry_residual(c.G3, false, g3_scale[i]));
  }));

  out.push_back(with_skips(check("cascade = y-derivatives of the Landsberg-type spray", kSpray,
                      fd ? tol.third_fd : tol.third_jets, idx_fd, [&](std::size_t i) {
    const Sample& s = pts[i];
    const Site& st = s.frame.site;
    const auto d = derive_y(landsberg_spray_field(s.c, st, s.conn), st.x, as_span(s.frame.y), 3,
                            near_cone(cfg.diff, s.frame));
    const SprayCoeffs& c = cascades[i];
    Vector G(n);
    Matrix G1(n, n);
    Array3 G2(n);
    Array4 G3(n);
    for (int a = 0; a < n; ++a) {
      const Jet3& j = d[static_cast<std::size_t>(a)];
      G(a) = j.value();
      for (int k = 0; k < n; ++k) {
        G1(a, k) = j.grad(k);
        for (int m = 0; m < n; ++m) {
          G2(a, k, m) = j.hess(k, m);
          for (int p = 0; p < n; ++p) G3(a, k, m, p) = j.third(k, m, p);
        }
      }
    }
    return std::max({relative_difference(G, c.G_up), relative_difference(G1, c.G1),
                     relative_difference(G2, c.G2), relative_difference(G3, c.G3, g3_scale[i])});
  }), idx.size()));

  out.push_back(check("cascade homogeneity: degrees 2, 1, 0, -1 for l in {0.5, 3}", kSpray, tol.algebraic,
                      idx, [&](std::size_t i) {
    const Sample& s = pts[i];
    const SprayCoeffs& c = cascades[i];
    double w = 0.0;
    for (double l : {0.5, 3.0}) {
      const SprayCoeffs cl = cascade_closed(s.c, frame_at(s.frame.site, Vector(l * s.frame.y)), s.conn);
      Array3 g2 = c.G2;
      Array4 g3 = c.G3;
      for (double& v : g3.data()) v /= l;
      w = std::max({w, relative_difference(cl.G_up, Vector(l * l * c.G_up)),
                    relative_difference(cl.G1, Matrix(l * c.G1)), relative_difference(cl.G2, g2),
                    relative_difference(cl.G3, g3, g3_scale[i] / l)});
    }
    return w;
  }));

  std::vector<Array4> lowered;
  for (std::size_t i = 0; i < pts.size(); ++i)
    lowered.push_back(lowered_G(cascades[i], metrics[i], ch, pts[i].frame));

  out.push_back(check("G_ikmn totally symmetric", kSpray, tol.algebraic, idx,
                      [&](std::size_t i) { return symmetry_residual(lowered[i], true, low_scale[i]); }));

  out.push_back(check("y^i G_ikmn = b^i G_ikmn = A^i G_ikmn = 0", kSpray, tol.algebraic, idx,
                      [&](std::size_t i) {
    const MetricEval& m = metrics[i];
    const Vector A_up = m.g_up * m.A_dn;
    const Vector& y = pts[i].frame.y;
    const Vector& b = pts[i].frame.site.b_up;
    const double f = low_scale[i];
    return std::max({contraction_residual(y, lowered[i], max_abs_of(y) * f),
                     contraction_residual(b, lowered[i], max_abs_of(b) * f),
                     contraction_residual(A_up, lowered[i], max_abs_of(A_up) * f)});
  }));

  out.push_back(check("G_ikmn = (K^2/B) g_ij G^j_kmn", kSpray, tol.algebraic, idx, [&](std::size_t i) {
    const MetricEval& m = metrics[i];
    const Array4& G3 = cascades[i].G3;
    Array4 low(n);
    for (int a = 0; a < n; ++a)
      for (int k = 0; k < n; ++k)
        for (int q = 0; q < n; ++q)
          for (int p = 0; p < n; ++p) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += m.g_dn(a, j) * G3(j, k, q, p);
            low(a, k, q, p) = acc * m.K * m.K / m.B;
          }
    return relative_difference(lowered[i], low, low_scale[i]);
  }));

  if (n == 2) {
    out.push_back(check("G3 ≡ 0 (Berwald)", kSpray, tol.berwald, idx,
                        [&](std::size_t i) { return cascades[i].G3.max_abs(); }));

    out.push_back(check("N = 2: G^i_km independent of y on each side of b", kSpray, tol.algebraic, idx,
                        [&](std::size_t i) {
      const Sample& s = pts[i];
      const Site& st = s.frame.site;
      auto side = [&](const Vector& y) { return st.b_up(0) * y(1) - st.b_up(1) * y(0) > 0.0; };
      Rng local(seed ^ (0x5bd1e995ULL * (i + 1)));
      double w = 0.0;
      for (int t = 0; t < 5; ++t) {
        Vector y = sample_velocity(local, st).y;
        if (side(y) != side(s.frame.y)) y = -y;
        const SprayCoeffs other = cascade_closed(s.c, frame_at(st, y), s.conn);
        w = std::max(w, relative_difference(other.G2, cascades[i].G2));
      }
      return w;
    }));
  }

  out.push_back(check("geodesic spray: closed form = numeric Christoffel spray", kSpray, tol.spray_numeric,
                      idx, [&](std::size_t i) {
    const Sample& s = pts[i];
    const Vector closed = geodesic_spray_closed(ch, s.frame, s.conn);
    const Vector numeric = geodesic_spray_numeric(ch, space, s.frame.site.x, s.frame.y, cfg.diff);
    return relative_difference(closed, numeric);
  }));

  if (rep.landsberg_condition) {
    out.push_back(check("numeric geodesic spray = Landsberg-type spray with c = g k", kSpray,
                        tol.spray_numeric, idx, [&](std::size_t i) {
      const Sample& s = pts[i];
      const Vector numeric = geodesic_spray_numeric(ch, space, s.frame.site.x, s.frame.y, cfg.diff);
      return relative_difference(numeric, landsberg_spray(s.c, s.frame, s.conn));
    }));

    out.push_back(with_skips(check("dotA_jkl = 0 for the Landsberg-type spray, y_i = p1 b_i + p2 u_i", kSpray,
                        tol.landsberg, idx_fd, [&](std::size_t i) {
      const Sample& s = pts[i];
      const Site& st = s.frame.site;
      Rng local(seed ^ (0x9e3779b9ULL * (i + 1)));
      const VectorField G = landsberg_spray_field(s.c, st, s.conn);
      const double p1 = local.uniform(-2.0, 2.0);
      const double p2 = local.uniform(-2.0, 2.0);
      const Vector y_dn = p1 * st.b_dn + p2 * s.frame.u;
      return dot_A(G, y_dn, st.x, s.frame.y, near_cone(cfg.diff, s.frame)).max_abs();
    }), idx.size()));

    out.push_back(with_skips(check("dotA_jkl = 0 for the geodesic spray with the Finsleroid y_i", kSpray,
                        tol.landsberg, idx_fd, [&](std::size_t i) {
      const Sample& s = pts[i];
      const Site& st = s.frame.site;
      return dot_A(geodesic_spray_field(ch, st, s.conn), metrics[i].y_dn, st.x, s.frame.y,
                   near_cone(cfg.diff, s.frame))
          .max_abs();
    }), idx.size()));
  }

  // -- generating functions --------------------------------------------------
  std::vector<ScalarSample> ws, ss;
  Rng gen(seed ^ 0xa0761d6478bd642fULL);
  for (int i = 0; i < samples; ++i) ws.push_back({gen.uniform(-5.0, 5.0), gen.sign()});
  for (int i = 0; i < samples; ++i) ss.push_back({gen.uniform(-0.95, 0.95), 0});

  out.push_back(check("V' = wV/Q, V'' = V/Q^2", kGen, tol.generating, ws, [&](const ScalarSample& w) {
    const GeneratingV v = generating_V(ch, w.value, w.sign);
    return std::max(rel(v.dV, w.value * v.V / v.Q), rel(v.d2V, v.V / (v.Q * v.Q)));
  }));

  out.push_back(check("(V^2/Q)' = -gV^2/Q^2, (V^2/Q^2)' = -2(g+w)V^2/Q^3, Phi' = -h/Q", kGen,
                      tol.generating, ws, [&](const ScalarSample& w) {
    const double x = w.value;
    const GeneratingV v = generating_V(ch, x, w.sign);
    auto ratio = [&](auto t, int power) {
      const auto V = generating_V_value(ch, t, w.sign);
      auto Q = 1.0 + ch.g * t + t * t;
      auto Qp = Q;
      for (int k = 1; k < power; ++k) Qp = Qp * Q;
      return V * V / Qp;
    };
    const double V2 = v.V * v.V;
    const double d1 = derive_1d([&](auto t) { return ratio(t, 1); }, x, 1, cfg.diff).grad(0);
    const double d2 = derive_1d([&](auto t) { return ratio(t, 2); }, x, 1, cfg.diff).grad(0);
    const double dp = derive_1d([&](auto t) { return phi_of_w(ch, t, w.sign); }, x, 1, cfg.diff).grad(0);
    return std::max({rel(d1, -ch.g * V2 / (v.Q * v.Q)),
                     rel(d2, -2.0 * (ch.g + x) * V2 / (v.Q * v.Q * v.Q)), rel(dp, -ch.h / v.Q)});
  }));

  out.push_back(check("(V^2)'/2 = wV^2/Q, (V^2)''/2 = (Q - gw)V^2/Q^2", kGen, tol.generating, ws,
                      [&](const ScalarSample& w) {
    const double x = w.value;
    const GeneratingV v = generating_V(ch, x, w.sign);
    const Jet3 j = derive_1d(
        [&](auto t) {
          const auto V = generating_V_value(ch, t, w.sign);
          return V * V;
        },
        x, 2, cfg.diff);
    const double V2 = v.V * v.V;
    return std::max(rel(0.5 * j.grad(0), x * V2 / v.Q),
                    rel(0.5 * j.hess(0, 0), (v.Q - ch.g * x) * V2 / (v.Q * v.Q)));
  }));

  out.push_back(check("(V^2)'''/4 = -gV^2/Q^3 (central differences)", kGen, tol.generating_third, ws,
                      [&](const ScalarSample& w) {
    const double x = w.value;
    const GeneratingV v = generating_V(ch, x, w.sign);
    // Differentiate in units of sqrt(Q), the length over which V^2 varies.
    const double l = std::sqrt(v.Q);
    const Jet3 j = derive_1d(
        [&](auto t) {
          const auto V = generating_V_value(ch, x + l * t, w.sign);
          return V * V;
        },
        0.0, 3, kThirdOrderFd);
    const double V2 = v.V * v.V;
    const double d3 = j.third(0, 0, 0) / (l * l * l);
    // Both sides pass through zero with g; compare on the scale of V^2/Q^3.
    return std::abs(0.25 * d3 + ch.g * V2 / (v.Q * v.Q * v.Q)) /
           std::max(V2 / (v.Q * v.Q * v.Q), 1e-12);
  }));

  out.push_back(check("phi' and phi'' closed forms", kGen, tol.generating, ss, [&](const ScalarSample& s) {
    const double x = s.value;
    const GeneratingPhi p = generating_phi(ch, x);
    const double root = std::sqrt(1.0 - x * x);
    const double P = 1.0 + ch.g * x * root;
    const double J = std::exp(0.5 * ch.G * p.Phi);
    const double d1 = ch.g * root * J / std::sqrt(P);
    const double d2 = -ch.g * x * J / (root * P * std::sqrt(P));
    return std::max(std::abs(p.dphi - d1) / std::max({std::abs(d1), p.phi, 1e-12}),
                    std::abs(p.d2phi - d2) / std::max({std::abs(d2), p.phi, 1e-12}));
  }));

  out.push_back(check("phi(phi - s phi') = e^{G Phi}, phi - s phi' + (1-s^2) phi'' = J/P^{3/2}", kGen,
                      tol.generating, ss, [&](const ScalarSample& s) {
    const double x = s.value;
    const GeneratingPhi p = generating_phi(ch, x);
    const double root = std::sqrt(1.0 - x * x);
    const double P = 1.0 + ch.g * x * root;
    const double J = std::exp(0.5 * ch.G * p.Phi);
    return std::max(rel(p.phi * (p.phi - x * p.dphi), J * J),
                    rel(p.phi - x * p.dphi + (1.0 - x * x) * p.d2phi, J / (P * std::sqrt(P))));
  }));

  out.push_back(check("phi ratio identities: g/sqrt(1-s^2), -gs/sqrt(1-s^2), 1", kGen, tol.generating, ss,
                      [&](const ScalarSample& s) {
    const double x = s.value;
    const GeneratingPhi p = generating_phi(ch, x);
    const double root = std::sqrt(1.0 - x * x);
    const double D = (p.phi - x * p.dphi) + (1.0 - x * x) * p.d2phi;
    const double r1 = (p.phi * p.dphi - x * (p.phi * p.d2phi + p.dphi * p.dphi)) / (p.phi * D);
    const double r2 = p.d2phi / D;
    const double r3 = (p.phi - x * p.dphi) * (p.phi - x * p.dphi) / (p.phi * D);
    // r1 and r2 vanish with g; measure them on the scale 1/sqrt(1-s^2).
    return std::max({std::abs(r1 - ch.g / root) * root, std::abs(r2 + ch.g * x / root) * root,
                     std::abs(r3 - 1.0)});
  }));

  out.push_back(check("phi(0) = exp((G/2) atan(G/2))", kGen, tol.algebraic, std::vector<int>{0},
                      [&](int) {
    return rel(generating_phi(ch, 0.0).phi, std::exp(0.5 * ch.G * std::atan(0.5 * ch.G)));
  }));

  out.push_back(check("K = |b| V(q/b) and K = S phi(b/S)", kGen, tol.algebraic, idx, [&](std::size_t i) {
    const Frame& f = pts[i].frame;
    const double K = metrics[i].K;
    double w = 0.0;
    if (f.b != 0.0)
      w = rel(K, std::abs(f.b) * generating_V_value(ch, f.q / f.b, f.b >= 0.0 ? 1 : -1));
    const double s = f.b / f.S;
    if (std::abs(s) < 1.0 - kSMargin) w = std::max(w, rel(K, f.S * generating_phi_value(ch, s)));
    return w;
  }));

  rep.passed = true;
  for (const auto& r : rep.records) rep.passed = rep.passed && r.passed;
  return rep;
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["background"] = background;
  j["dim"] = dim;
  j["g"] = g;
  j["seed"] = seed;
  j["samples"] = samples;
  j["rejections"] = rejections;
  j["landsberg_condition"] = landsberg_condition;
  j["condition_k"] = condition_k;
  j["passed"] = passed;
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json o;
    o["name"] = r.name;
    o["group"] = r.group;
    o["samples"] = r.samples;
    o["errors"] = r.errors;
    o["max_residual"] = std::isfinite(r.max_residual) ? nlohmann::json(r.max_residual) : nlohmann::json();
    o["tolerance"] = r.tolerance;
    o["passed"] = r.passed;
    if (!r.note.empty()) o["note"] = r.note;
    recs.push_back(std::move(o));
  }
  j["identities"] = std::move(recs);
  return j;
}

void VerifyReport::print_table(std::ostream& os) const {
  os << "background: " << background << "  N = " << dim << "  g = " << g << "  seed = " << seed
     << "  samples = " << samples << "  rejections = " << rejections << '\n';
  os << "condition nabla_j b_i = k (a_ij - b_i b_j): "
     << (landsberg_condition ? "holds" : "does not hold") << '\n';
  std::size_t width = 0;
  for (const auto& r : records) width = std::max(width, r.name.size());
  for (const auto& r : records) {
    std::ostringstream res, tl;
    res << std::scientific << std::setprecision(2) << r.max_residual;
    tl << std::scientific << std::setprecision(0) << r.tolerance;
    os << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(11) << r.group
       << std::setw(static_cast<int>(width) + 2) << r.name << std::right << std::setw(10) << res.str()
       << " <= " << tl.str() << "  (" << r.samples << ")";
    if (!r.note.empty()) os << "  " << r.note;
    os << '\n';
  }
  os << (passed ? "all identities pass" : "some identities FAIL") << '\n';
}

}  // namespace finsler::app
