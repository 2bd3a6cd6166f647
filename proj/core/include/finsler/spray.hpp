#pragma once

#include "finsler/background.hpp"
#include "finsler/errors.hpp"
#include "finsler/finsleroid.hpp"
#include "finsler/numkit.hpp"
#include "finsler/tensor.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace finsler {

/// Coefficients of the general ansatz
///   G^i = c1 (1/q) y^j y^h nabla_j b_h v^i + c2 y^h b^j nabla_j b_h v^i
///         + c3 q f^i + a^i_km y^k y^m,
/// plus the Landsberg-type scalar c and the proportionality factor k of
/// nabla_j b_i = k (a_ij - b_i b_j) where that condition is used.
struct SprayScalars {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c = 0.0;
  double k = 0.0;
};

/// (c1, c2, c3) = (g, g^2, -g) and c = c1 k = g k.
SprayScalars finsleroid_scalars(const Charge& charge, double k = 0.0);

/// G^i and its y-derivative cascade, indexed as the symbols read:
/// G1(i, k) = G^i_k, G2(i, k, m) = G^i_km, G3(i, k, m, n) = G^i_kmn.
struct SprayCoeffs {
  double c = 0.0;
  Vector G_up;
  Matrix G1;
  Array3 G2;
  Array4 G3;
  std::optional<Array4> G3_low;  // G_ikmn
};

// ---------------------------------------------------------------------------
// Generic kernels (T = double or Jet3), all at a fixed site x.
// ---------------------------------------------------------------------------

/// a^i_km y^k y^m.
template <typename T>
std::vector<T> riemann_spray(const Connection& conn, std::span<const T> y) {
  const int n = conn.christoffel.dim();
  std::vector<T> out(y.size(), T(0.0));
  for (int i = 0; i < n; ++i) {
    T acc = 0.0;
    for (int k = 0; k < n; ++k) {
      T row = 0.0;
      for (int m = 0; m < n; ++m) row += conn.christoffel(i, k, m) * y[static_cast<std::size_t>(m)];
      acc += row * y[static_cast<std::size_t>(k)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

/// G^i = c q (y^i - b b^i) + a^i_km y^k y^m.
template <typename T>
std::vector<T> landsberg_spray(double c, const Site& site, const Connection& conn,
                               std::span<const T> y) {
  const auto bq = oneform_and_q<T>(site, y);
  std::vector<T> G = riemann_spray<T>(conn, y);
  const T cq = c * bq.q;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const T v = y[i] - bq.b * site.b_up(static_cast<Eigen::Index>(i));
    G[i] += cq * v;
  }
  return G;
}

/// General ansatz with explicit scalars. Throws NearCollinearError when q <= q_min.
template <typename T>
std::vector<T> general_spray(const SprayScalars& s, const Site& site, const Connection& conn,
                             std::span<const T> y) {
  using std::sqrt;
  const int n = site.dim();
  const auto bq = oneform_and_q<T>(site, y);
  const double S = std::sqrt(value_of(quadratic<T>(site.a, y)));
  if (!(value_of(bq.q) > kQMinRatio * S))
    throw NearCollinearError("general_spray: y is near-collinear with b");
  // y^j y^h nabla_j b_h and y^h b^j nabla_j b_h
  const Vector bnab = conn.nabla_b.transpose() * site.b_up;  // (h) = b^j nabla_j b_h
  T yy_nab = 0.0;
  T yb_nab = 0.0;
  for (int j = 0; j < n; ++j) {
    T row = 0.0;
    for (int h = 0; h < n; ++h) row += conn.nabla_b(j, h) * y[static_cast<std::size_t>(h)];
    yy_nab += row * y[static_cast<std::size_t>(j)];
    yb_nab += bnab(j) * y[static_cast<std::size_t>(j)];
  }
  const Matrix f_up = site.a_inv * conn.f_form;  // (i, n) = f^i_n
  const T coef = s.c1 * yy_nab / bq.q + s.c2 * yb_nab;
  std::vector<T> G = riemann_spray<T>(conn, y);
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const T v = y[ui] - bq.b * site.b_up(i);
    T fi = 0.0;
    for (int m = 0; m < n; ++m) fi += f_up(i, m) * y[static_cast<std::size_t>(m)];
    G[ui] += coef * v + s.c3 * bq.q * fi;
  }
  return G;
}

/// Finsleroid geodesic spray in closed form: general ansatz with
/// (c1, c2, c3) = (g, g^2, -g).
template <typename T>
std::vector<T> geodesic_spray_closed(const Charge& charge, const Site& site, const Connection& conn,
                                     std::span<const T> y) {
  return general_spray<T>(finsleroid_scalars(charge), site, conn, y);
}

// ---------------------------------------------------------------------------
// Point API
// ---------------------------------------------------------------------------

Vector landsberg_spray(double c, const Frame& frame, const Connection& conn);

/// G^i, G^i_k, G^i_km from their closed forms and G^i_kmn from the eta form
/// (c/q)(eta^i_k eta_mn + eta^i_m eta_kn + eta^i_n eta_km).
/// Throws NearCollinearError when q <= q_min.
SprayCoeffs cascade_closed(double c, const Frame& frame, const Connection& conn);

/// G^i_kmn from the expanded, explicitly symmetric form in v, r and 1/q powers.
Array4 cascade_third_expanded(double c, const Frame& frame);

/// G^i_kmn written as the derivative of G^i_km before symmetrisation.
Array4 cascade_third_unsymmetrized(double c, const Frame& frame);

Vector general_spray(const SprayScalars& s, const Frame& frame, const Connection& conn);
Vector geodesic_spray_closed(const Charge& charge, const Frame& frame, const Connection& conn);

/// gamma^k_ij y^i y^j from the Finsleroid metric tensor: g_ij = (1/2) d2 K^2
/// by jets in y, d_k g_ij by central differences in x (cfg), index raised
/// with the numeric inverse of g_ij.
Vector geodesic_spray_numeric(const Charge& charge, const BackgroundSpace& space, const Vector& x,
                              const Vector& y, const DiffConfig& cfg = {});

/// dotA_jkl = -(1/4) y_i d^3 G^i / dy^j dy^k dy^l.
Array3 dot_A(const VectorField& spray, const Vector& y_dn, const Vector& x, const Vector& y,
             const DiffConfig& cfg = {});

/// G_ikmn = (c/q)(H_ik H_mn + H_im H_kn + H_in H_km), H_mn = eta_mn K^2/B.
/// Equals (K^2/B) g_ij G^j_kmn.
Array4 lowered_G(const SprayCoeffs& coeffs, const MetricEval& metric, const Charge& charge,
                 const Frame& frame);

/// Fields of y at a fixed site, for derive_y / dot_A.
VectorField landsberg_spray_field(double c, const Site& site, const Connection& conn);
VectorField geodesic_spray_field(const Charge& charge, const Site& site, const Connection& conn);
VectorField riemann_spray_field(const Connection& conn);

/// Spray as a function of (x, y) over the whole chart, for integration.
using SprayFunction = std::function<Vector(const Vector& x, const Vector& y)>;
SprayFunction geodesic_spray_function(const BackgroundSpace& space, const Charge& charge,
                                      const DiffConfig& cfg = {});
SprayFunction riemann_spray_function(const BackgroundSpace& space, const DiffConfig& cfg = {});

}  // namespace finsler
