#pragma once

#include "finsler/background.hpp"
#include "finsler/jet.hpp"
#include "finsler/numkit.hpp"
#include "finsler/tensor.hpp"

#include <cmath>
#include <numbers>
#include <span>

namespace finsler {

/// The Finsleroid charge g in (-2, 2) with its derived constants.
struct Charge {
  double g = 0.0;
  double h = 1.0;        // sqrt(1 - g^2/4)
  double G = 0.0;        // g / h
  double g_plus = 1.0;   // g/2 + h
  double g_minus = -1.0; // g/2 - h

  /// Throws ChargeRangeError unless -2 < g < 2.
  static Charge from_g(double g);
};

/// Margin kept from |s| = 1 by the s-generating function.
inline constexpr double kSMargin = 1e-6;

/// Scalar pieces of the metric function at one (x, y).
template <typename T>
struct MetricScalars {
  T B;    // b^2 + g q b + q^2
  T L;    // q + (g/2) b
  T Phi;  // angle entering J
  T J;    // exp(G Phi / 2)
  T K;    // sqrt(B) J
};

/// K and its pieces as functions of (b, q). Phi is evaluated as
/// atan(G/2) + atan2(h b, L), which equals the b > 0 and b < 0 branch
/// expressions on their half-spaces and their common limit at b = 0.
template <typename T>
MetricScalars<T> metric_scalars(const Charge& c, const T& b, const T& q) {
  using std::atan;
  using std::atan2;
  using std::exp;
  using std::sqrt;
  MetricScalars<T> m{b * b + c.g * q * b + q * q, q + 0.5 * c.g * b, T(0.0), T(0.0), T(0.0)};
  m.Phi = std::atan(0.5 * c.G) + atan2(c.h * b, m.L);
  m.J = exp(0.5 * c.G * m.Phi);
  m.K = sqrt(m.B) * m.J;
  return m;
}

/// K(x, y)^2 at a fixed site, for T = double or Jet3.
template <typename T>
T finsleroid_K2(const Charge& c, const Site& site, std::span<const T> y) {
  const auto bq = oneform_and_q<T>(site, y);
  const auto m = metric_scalars<T>(c, bq.b, bq.q);
  return m.K * m.K;
}

/// K^2 as a differentiable field of y at the site (x argument ignored).
ScalarField k_squared_field(const Charge& c, const Site& site);

MetricScalars<double> evaluate_K(const Charge& c, const Frame& frame);

/// V(w) with K = |b| V(q/b); derivatives in w are propagated by jets.
struct GeneratingV {
  double V, dV, d2V, Q;
};
GeneratingV generating_V(const Charge& c, double w, int sign_b);

template <typename T>
T generating_V_value(const Charge& c, const T& w, int sign_b) {
  using std::atan;
  using std::exp;
  using std::sqrt;
  const T Q = 1.0 + c.g * w + w * w;
  const T Phi = (sign_b >= 0 ? 0.5 : -0.5) * std::numbers::pi + std::atan(0.5 * c.G) -
                atan((w + 0.5 * c.g) / c.h);
  return sqrt(Q) * exp(0.5 * c.G * Phi);
}

/// phi(s) with K = S phi(b/S); derivatives in s are propagated by jets.
/// Throws NearSingularError when |s| >= 1 - kSMargin.
struct GeneratingPhi {
  double phi, dphi, d2phi, Phi;
};
GeneratingPhi generating_phi(const Charge& c, double s);

template <typename T>
T generating_phi_value(const Charge& c, const T& s) {
  using std::atan2;
  using std::exp;
  using std::sqrt;
  const T root = sqrt(1.0 - s * s);
  const T P = 1.0 + c.g * s * root;
  const T Phi = std::atan(0.5 * c.G) + atan2(c.h * s, root + 0.5 * c.g * s);
  return sqrt(P) * exp(0.5 * c.G * Phi);
}

/// y_i = (v_i + (b + g q) b_i) K^2/B.
Vector lower_y(const Charge& c, const Frame& f, double K, double B);
/// y_i = (a_ij y^j + g q b_i) K^2/B.
Vector lower_y_u_form(const Charge& c, const Frame& f, double K, double B);

struct MetricTensor {
  Matrix g_dn;
  double det_ratio;  // det(g_ij) / det(a_ij), computed from the matrices
};
/// v-variable form of g_ij. Throws NearCollinearError when q <= q_min.
MetricTensor metric_tensor(const Charge& c, const Frame& f, double K, double B);
/// u-variable form of g_ij.
Matrix metric_tensor_u_form(const Charge& c, const Frame& f, double K, double B);

/// v-variable form of g^ij. Throws NearCollinearError when q <= q_min.
Matrix inverse_metric(const Charge& c, const Frame& f, double K, double B);
/// u-variable form of g^ij.
Matrix inverse_metric_u_form(const Charge& c, const Frame& f, double K, double B);

/// Contracted Cartan tensor A_i = (N K/2) g (q^2 b_i - b v_i)/(q B).
/// Singular on v^i = 0; throws NearCollinearError when q <= q_min.
Vector cartan_trace(const Charge& c, const Frame& f, double K, double B, const Vector& y_dn);
/// A_i = (N K/2) g (1/q)(b_i - (b/K^2) y_i).
Vector cartan_trace_y_form(const Charge& c, const Frame& f, double K, double B,
                           const Vector& y_dn);

/// Every Finsleroid quantity at one regular (x, y).
struct MetricEval {
  double K, B, Phi, J, L;
  Vector y_dn;
  Matrix g_dn;
  Matrix g_up;
  double det_ratio;
  Vector A_dn;
  Matrix H_dn;     // H_mn = eta_mn K^2/B
  Matrix H_mixed;  // (i, k) = H_k^i = eta^i_k
};

/// Throws NearCollinearError when q <= q_min.
MetricEval evaluate_metric(const Charge& c, const Frame& f);

/// g_ij = (1/2) d^2 K^2 / dy^i dy^j by differentiating K^2 directly.
Matrix metric_from_k_squared(const Charge& c, const Site& site, const Vector& y,
                             const DiffConfig& cfg = {});

}  // namespace finsler
