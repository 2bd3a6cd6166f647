#include "finsler/finsleroid.hpp"

#include "finsler/errors.hpp"

#include <cmath>
#include <sstream>

namespace finsler {

Charge Charge::from_g(double g) {
  if (!(g > -2.0 && g < 2.0)) {
    std::ostringstream os;
    os << "Finsleroid charge g = " << g << " is out of range; require -2 < g < 2";
    throw ChargeRangeError(os.str());
  }
  Charge c;
  c.g = g;
  c.h = std::sqrt(1.0 - 0.25 * g * g);
  c.G = g / c.h;
  c.g_plus = 0.5 * g + c.h;
  c.g_minus = 0.5 * g - c.h;
  return c;
}

ScalarField k_squared_field(const Charge& c, const Site& site) {
  return make_scalar_field([c, site](const Vector&, auto y) {
    using T = typename decltype(y)::value_type;
    return finsleroid_K2<std::remove_cv_t<T>>(c, site, y);
  });
}

MetricScalars<double> evaluate_K(const Charge& c, const Frame& frame) {
  if (!(frame.S > 0.0)) throw DomainError("evaluate_K: y = 0");
  return metric_scalars<double>(c, frame.b, frame.q);
}

GeneratingV generating_V(const Charge& c, double w, int sign_b) {
  const Jet3 wj = Jet3::variable(1, 2, 0, w);
  const Jet3 V = generating_V_value<Jet3>(c, wj, sign_b);
  return {V.value(), V.grad(0), V.hess(0, 0), 1.0 + c.g * w + w * w};
}

GeneratingPhi generating_phi(const Charge& c, double s) {
  if (!(std::abs(s) < 1.0 - kSMargin)) {
    std::ostringstream os;
    os << "generating_phi: |s| = " << std::abs(s) << " is within " << kSMargin << " of 1";
    throw NearSingularError(os.str());
  }
  const Jet3 sj = Jet3::variable(1, 2, 0, s);
  const Jet3 phi = generating_phi_value<Jet3>(c, sj);
  const double root = std::sqrt(1.0 - s * s);
  const double Phi = std::atan(0.5 * c.G) + std::atan2(c.h * s, root + 0.5 * c.g * s);
  return {phi.value(), phi.grad(0), phi.hess(0, 0), Phi};
}

Vector lower_y(const Charge& c, const Frame& f, double K, double B) {
  return (f.v_dn + (f.b + c.g * f.q) * f.site.b_dn) * (K * K / B);
}

Vector lower_y_u_form(const Charge& c, const Frame& f, double K, double B) {
  return (f.u + c.g * f.q * f.site.b_dn) * (K * K / B);
}

MetricTensor metric_tensor(const Charge& c, const Frame& f, double K, double B) {
  f.require_regular("metric_tensor");
  const Vector& bd = f.site.b_dn;
  const Vector& v = f.v_dn;
  const double q = f.q;
  Matrix inner = q * (f.b + c.g * q) * (bd * bd.transpose()) +
                 q * (bd * v.transpose() + v * bd.transpose()) - (f.b / q) * (v * v.transpose());
  MetricTensor m;
  m.g_dn = (f.site.a + (c.g / B) * inner) * (K * K / B);
  m.det_ratio = m.g_dn.determinant() / f.site.a.determinant();
  return m;
}

Matrix metric_tensor_u_form(const Charge& c, const Frame& f, double K, double B) {
  f.require_regular("metric_tensor_u_form");
  const Vector& bd = f.site.b_dn;
  const Vector& u = f.u;
  const double q = f.q;
  const double S2 = f.S * f.S;
  Matrix inner = (c.g * q * q - f.b * S2 / q) * (bd * bd.transpose()) -
                 (f.b / q) * (u * u.transpose()) + (S2 / q) * (bd * u.transpose() + u * bd.transpose());
  return (f.site.a + (c.g / B) * inner) * (K * K / B);
}

Matrix inverse_metric(const Charge& c, const Frame& f, double K, double B) {
  f.require_regular("inverse_metric");
  const Vector& bu = f.site.b_up;
  const Vector& v = f.v_up;
  const double q = f.q;
  Matrix inner = -f.b * q * (bu * bu.transpose()) - q * (bu * v.transpose() + v * bu.transpose()) +
                 ((f.b + c.g * q) / q) * (v * v.transpose());
  return (f.site.a_inv + (c.g / B) * inner) * (B / (K * K));
}

Matrix inverse_metric_u_form(const Charge& c, const Frame& f, double K, double B) {
  f.require_regular("inverse_metric_u_form");
  const Vector& bu = f.site.b_up;
  const Vector& y = f.y;
  const double q = f.q;
  Matrix m = f.site.a_inv +
             (c.g / q) * (f.b * (bu * bu.transpose()) - bu * y.transpose() - y * bu.transpose()) +
             (c.g / (B * q)) * (f.b + c.g * q) * (y * y.transpose());
  return m * (B / (K * K));
}

Vector cartan_trace(const Charge& c, const Frame& f, double K, double B, const Vector&) {
  f.require_regular("cartan_trace");
  const double n = f.dim();
  const double q = f.q;
  return (n * K / 2.0) * c.g / (q * B) * (q * q * f.site.b_dn - f.b * f.v_dn);
}

Vector cartan_trace_y_form(const Charge& c, const Frame& f, double K, double, const Vector& y_dn) {
  f.require_regular("cartan_trace_y_form");
  const double n = f.dim();
  return (n * K / 2.0) * c.g / f.q * (f.site.b_dn - (f.b / (K * K)) * y_dn);
}

MetricEval evaluate_metric(const Charge& c, const Frame& f) {
  f.require_regular("evaluate_metric");
  const auto s = evaluate_K(c, f);
  MetricEval m;
  m.K = s.K;
  m.B = s.B;
  m.Phi = s.Phi;
  m.J = s.J;
  m.L = s.L;
  m.y_dn = lower_y(c, f, s.K, s.B);
  const MetricTensor mt = metric_tensor(c, f, s.K, s.B);
  m.g_dn = mt.g_dn;
  m.det_ratio = mt.det_ratio;
  m.g_up = inverse_metric(c, f, s.K, s.B);
  m.A_dn = cartan_trace(c, f, s.K, s.B, m.y_dn);
  m.H_dn = f.eta_dn() * (s.K * s.K / s.B);
  m.H_mixed = f.eta_mixed();
  return m;
}

Matrix metric_from_k_squared(const Charge& c, const Site& site, const Vector& y,
                             const DiffConfig& cfg) {
  const Jet3 k2 = derive_y(k_squared_field(c, site), site.x,
                           std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), 2, cfg);
  return 0.5 * k2.hessian();
}

}  // namespace finsler
