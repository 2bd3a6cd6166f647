#include "finsler/spray.hpp"

#include <cmath>

namespace finsler {

SprayScalars finsleroid_scalars(const Charge& charge, double k) {
  return {charge.g, charge.g * charge.g, -charge.g, charge.g * k, k};
}

namespace {

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Vector landsberg_spray(double c, const Frame& frame, const Connection& conn) {
  return to_vector(landsberg_spray<double>(c, frame.site, conn, as_span(frame.y)));
}

SprayCoeffs cascade_closed(double c, const Frame& frame, const Connection& conn) {
  frame.require_regular("cascade_closed");
  const int n = frame.dim();
  const double q = frame.q;
  const Vector& vu = frame.v_up;
  const Vector& vd = frame.v_dn;
  const Matrix& r = frame.r();
  const Matrix& rm = frame.site.r_mixed;  // (i, k) = r^i_k
  const Array3& gam = conn.christoffel;

  SprayCoeffs s;
  s.c = c;
  s.G_up = landsberg_spray(c, frame, conn);

  s.G1 = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double chr = 0.0;
      for (int m = 0; m < n; ++m) chr += gam(i, k, m) * frame.y(m);
      s.G1(i, k) = (c / q) * (vu(i) * vd(k) + q * q * rm(i, k)) + 2.0 * chr;
    }

  s.G2 = Array3(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m)
        s.G2(i, k, m) = (c / q) * (r(k, m) * vu(i) - vu(i) * vd(k) * vd(m) / (q * q) +
                                   vd(m) * rm(i, k) + vd(k) * rm(i, m)) +
                        2.0 * gam(i, k, m);

  const Matrix& em = frame.eta_mixed();  // (i, k) = eta^i_k
  const Matrix& ed = frame.eta_dn();
  s.G3 = Array4(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m)
        for (int p = 0; p < n; ++p)
          s.G3(i, k, m, p) =
              (c / q) * (em(i, k) * ed(m, p) + em(i, m) * ed(k, p) + em(i, p) * ed(k, m));
  return s;
}

Array4 cascade_third_expanded(double c, const Frame& frame) {
  frame.require_regular("cascade_third_expanded");
  const int n = frame.dim();
  const double q = frame.q;
  const double q3 = q * q * q;
  const double q5 = q3 * q * q;
  const Vector& vu = frame.v_up;
  const Vector& vd = frame.v_dn;
  const Matrix& r = frame.r();
  const Matrix& rm = frame.site.r_mixed;
  Array4 out(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m)
        for (int p = 0; p < n; ++p) {
          const double t1 = 3.0 * c / q5 * vu(i) * vd(k) * vd(m) * vd(p);
          const double t2 = rm(i, k) * vd(m) * vd(p) + rm(i, m) * vd(k) * vd(p) +
                            rm(i, p) * vd(k) * vd(m) +
                            vu(i) * (r(k, m) * vd(p) + r(k, p) * vd(m) + r(m, p) * vd(k));
          const double t3 = rm(i, k) * r(m, p) + rm(i, m) * r(k, p) + rm(i, p) * r(k, m);
          out(i, k, m, p) = t1 - c / q3 * t2 + c / q * t3;
        }
  return out;
}

Array4 cascade_third_unsymmetrized(double c, const Frame& frame) {
  frame.require_regular("cascade_third_unsymmetrized");
  const int n = frame.dim();
  const double q = frame.q;
  const double q2 = q * q;
  const Vector& vu = frame.v_up;
  const Vector& vd = frame.v_dn;
  const Matrix& r = frame.r();
  const Matrix& rm = frame.site.r_mixed;
  Array4 out(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m)
        for (int p = 0; p < n; ++p) {
          const double bracket1 =
              r(k, m) * vu(i) - vu(i) * vd(k) * vd(m) / q2 + vd(m) * rm(i, k) + vd(k) * rm(i, m);
          const double bracket2 =
              r(k, m) * rm(i, p) + 2.0 / (q2 * q2) * vd(p) * vu(i) * vd(k) * vd(m) -
              (rm(i, p) * vd(k) * vd(m) + vu(i) * r(k, p) * vd(m) + vu(i) * vd(k) * r(m, p)) / q2 +
              r(m, p) * rm(i, k) + r(k, p) * rm(i, m);
          out(i, k, m, p) = -c / (q2 * q) * vd(p) * bracket1 + c / q * bracket2;
        }
  return out;
}

Vector general_spray(const SprayScalars& s, const Frame& frame, const Connection& conn) {
  frame.require_regular("general_spray");
  return to_vector(general_spray<double>(s, frame.site, conn, as_span(frame.y)));
}

Vector geodesic_spray_closed(const Charge& charge, const Frame& frame, const Connection& conn) {
  return general_spray(finsleroid_scalars(charge), frame, conn);
}

Vector geodesic_spray_numeric(const Charge& charge, const BackgroundSpace& space, const Vector& x,
                              const Vector& y, const DiffConfig& cfg) {
  const int n = space.dim();
  const Frame frame = frame_at(space, x, y);
  frame.require_regular("geodesic_spray_numeric");

  auto metric_at = [&](const Vector& p) {
    const Matrix g = metric_from_k_squared(charge, site_at(space, p), y, DiffConfig{});
    return Vector(Eigen::Map<const Vector>(g.data(), g.size()));
  };
  // dflat(j * n + i, k) = d_k g_ij (column-major flattening)
  const Matrix dflat = derive_x(metric_at, x, cfg);
  auto dg = [&](int k, int i, int j) { return dflat(j * n + i, k); };

  // lowered_n = gamma_inj y^i y^j, gamma_inj = (1/2)(d_j g_ni + d_i g_nj - d_n g_ji)
  Vector lowered = Vector::Zero(n);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        lowered(m) += 0.5 * (dg(j, m, i) + dg(i, m, j) - dg(m, j, i)) * y(i) * y(j);

  const Matrix g = metric_from_k_squared(charge, frame.site, y, DiffConfig{});
  const Matrix gs = 0.5 * (g + g.transpose());
  return invert_spd(gs) * lowered;
}

Array3 dot_A(const VectorField& spray, const Vector& y_dn, const Vector& x, const Vector& y,
             const DiffConfig& cfg) {
  const int n = static_cast<int>(y.size());
  const auto d = derive_y(spray, x, as_span(y), 3, cfg);
  Array3 out(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += y_dn(i) * d[static_cast<std::size_t>(i)].third(j, k, l);
        out(j, k, l) = -0.25 * acc;
      }
  return out;
}

Array4 lowered_G(const SprayCoeffs& coeffs, const MetricEval& metric, const Charge&,
                 const Frame& frame) {
  frame.require_regular("lowered_G");
  const int n = frame.dim();
  const Matrix& H = metric.H_dn;
  const double cq = coeffs.c / frame.q;
  Array4 out(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m)
        for (int p = 0; p < n; ++p)
          out(i, k, m, p) = cq * (H(i, k) * H(m, p) + H(i, m) * H(k, p) + H(i, p) * H(k, m));
  return out;
}

VectorField landsberg_spray_field(double c, const Site& site, const Connection& conn) {
  return make_vector_field([c, site, conn](const Vector&, auto y) {
    using T = std::remove_cv_t<typename decltype(y)::value_type>;
    return landsberg_spray<T>(c, site, conn, y);
  });
}

VectorField geodesic_spray_field(const Charge& charge, const Site& site, const Connection& conn) {
  return make_vector_field([charge, site, conn](const Vector&, auto y) {
    using T = std::remove_cv_t<typename decltype(y)::value_type>;
    return geodesic_spray_closed<T>(charge, site, conn, y);
  });
}

VectorField riemann_spray_field(const Connection& conn) {
  return make_vector_field([conn](const Vector&, auto y) {
    using T = std::remove_cv_t<typename decltype(y)::value_type>;
    return riemann_spray<T>(conn, y);
  });
}

SprayFunction geodesic_spray_function(const BackgroundSpace& space, const Charge& charge,
                                      const DiffConfig& cfg) {
  return [space, charge, cfg](const Vector& x, const Vector& y) {
    const Site site = site_at(space, x);
    const Connection conn = connection_at(space, x, cfg);
    return to_vector(geodesic_spray_closed<double>(charge, site, conn, as_span(y)));
  };
}

SprayFunction riemann_spray_function(const BackgroundSpace& space, const DiffConfig& cfg) {
  return [space, cfg](const Vector& x, const Vector& y) {
    const Connection conn = connection_at(space, x, cfg);
    return to_vector(riemann_spray<double>(conn, as_span(y)));
  };
}

}  // namespace finsler
