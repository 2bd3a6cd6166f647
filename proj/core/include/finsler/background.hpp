#pragma once

#include "finsler/jet.hpp"
#include "finsler/numkit.hpp"
#include "finsler/tensor.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace finsler {

/// Relative threshold below which q = sqrt(r_ij y^i y^j) counts as zero:
/// q <= kQMinRatio * S refuses every formula carrying 1/q.
inline constexpr double kQMinRatio = 1e-7;

/// Tolerance of the probe-point check ||b||_x = 1.
inline constexpr double kUnitNormTolerance = 1e-9;

/// The associated Riemannian space: metric a_ij(x) and a unit 1-form b_i(x)
/// in a single global chart, optionally with analytic first x-derivatives.
/// Immutable after construction.
class BackgroundSpace {
 public:
  using MetricFn = std::function<Matrix(const Vector& x)>;
  using OneFormFn = std::function<Vector(const Vector& x)>;
  /// result[k](i, j) = d a_ij / d x^k
  using MetricDxFn = std::function<std::vector<Matrix>(const Vector& x)>;
  /// result(i, k) = d b_i / d x^k
  using OneFormDxFn = std::function<Matrix(const Vector& x)>;

  BackgroundSpace(int dim, std::string label, MetricFn metric, OneFormFn oneform,
                  MetricDxFn metric_dx = nullptr, OneFormDxFn oneform_dx = nullptr);

  int dim() const noexcept { return dim_; }
  const std::string& label() const noexcept { return label_; }

  Matrix metric(const Vector& x) const;
  Vector oneform(const Vector& x) const;

  bool has_analytic_dx() const noexcept { return metric_dx_ && oneform_dx_; }
  std::vector<Matrix> metric_dx(const Vector& x) const;
  Matrix oneform_dx(const Vector& x) const;

 private:
  void check_point(const Vector& x) const;

  int dim_;
  std::string label_;
  MetricFn metric_;
  OneFormFn oneform_;
  MetricDxFn metric_dx_;
  OneFormDxFn oneform_dx_;
};

/// Everything about the background at one point x that does not involve y.
struct Site {
  Vector x;
  Matrix a;        // a_ij
  Matrix a_inv;    // a^ij
  Vector b_dn;     // b_i
  Vector b_up;     // b^i = a^ij b_j
  Matrix r_dn;     // r_ij = a_ij - b_i b_j
  Matrix r_mixed;  // r^i_n = delta^i_n - b^i b_n

  int dim() const noexcept { return static_cast<int>(x.size()); }
};

/// Validates a_ij (symmetric, positive-definite) and ||b||_x = 1 at x.
/// Throws NotPositiveDefiniteError / DomainError.
Site site_at(const BackgroundSpace& space, const Vector& x);

/// Levi-Civita data of the background at x.
struct Connection {
  Array3 christoffel;  // (k, i, j) = a^k_ij
  Matrix nabla_b;      // (j, i) = nabla_j b_i
  Matrix f_form;       // (m, n) = f_mn = d_m b_n - d_n b_m
  Matrix b_dx;         // (i, k) = d b_i / d x^k
};

enum class ConnectionSource { kAuto, kFiniteDifference };

/// a^k_ij from analytic derivatives when the space has them (kAuto), else
/// from central differences of a_ij and b_i.
Connection connection_at(const BackgroundSpace& space, const Vector& x,
                         const DiffConfig& cfg = {},
                         ConnectionSource source = ConnectionSource::kAuto);

/// f^i = a^ik f_kn y^n.
Vector f_vector(const Site& site, const Connection& conn, const Vector& y);

/// Best-fit k of nabla_j b_i = k (a_ij - b_i b_j), with the max-abs residual.
struct ConditionFit {
  double k = 0.0;
  double residual = 0.0;
};
ConditionFit fit_landsberg_condition(const Site& site, const Connection& conn);

/// Per-point algebra at (x, y).
class Frame {
 public:
  Site site;
  Vector y;
  double b = 0.0;  // b_i y^i
  double q = 0.0;  // sqrt(r_ij y^i y^j)
  double S = 0.0;  // sqrt(a_ij y^i y^j)
  Vector u;        // u_i = a_ij y^j
  Vector v_up;     // v^i = y^i - b b^i
  Vector v_dn;     // v_i = u_i - b b_i

  int dim() const noexcept { return site.dim(); }
  const Matrix& r() const noexcept { return site.r_dn; }
  double q_min() const noexcept { return kQMinRatio * S; }
  /// q > q_min: the eta-tensors and all 1/q formulas are available.
  bool regular() const noexcept { return q > q_min(); }

  /// eta^i_j = r^i_j - v^i v_j / q^2 as (i, j). Throws NearCollinearError.
  const Matrix& eta_mixed() const;
  /// eta_ij = r_ij - v_i v_j / q^2. Throws NearCollinearError.
  const Matrix& eta_dn() const;

  /// Throws NearCollinearError unless regular().
  void require_regular(const char* what) const;

 private:
  friend Frame frame_at(const Site& site, const Vector& y);
  Matrix eta_mixed_;
  Matrix eta_dn_;
};

/// Throws DomainError for y = 0.
Frame frame_at(const Site& site, const Vector& y);
Frame frame_at(const BackgroundSpace& space, const Vector& x, const Vector& y);

// ---------------------------------------------------------------------------
// Generic y-kernels (T = double or Jet3)
// ---------------------------------------------------------------------------

template <typename T>
T contract(const Vector& covector, std::span<const T> y) {
  T acc = 0.0;
  for (int i = 0; i < covector.size(); ++i) acc += covector(i) * y[static_cast<std::size_t>(i)];
  return acc;
}

template <typename T>
std::vector<T> lower(const Matrix& m, std::span<const T> y) {
  const auto n = static_cast<int>(y.size());
  std::vector<T> out(y.size(), T(0.0));
  for (int i = 0; i < n; ++i) {
    T acc = 0.0;
    for (int j = 0; j < n; ++j) acc += m(i, j) * y[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

template <typename T>
T quadratic(const Matrix& m, std::span<const T> y) {
  const auto my = lower<T>(m, y);
  T acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += my[i] * y[i];
  return acc;
}

/// b and q as functions of y at a fixed site.
template <typename T>
struct ScalarPair {
  T b;
  T q;
};

template <typename T>
ScalarPair<T> oneform_and_q(const Site& site, std::span<const T> y) {
  using std::sqrt;
  return {contract<T>(site.b_dn, y), sqrt(quadratic<T>(site.r_dn, y))};
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

/// a = delta, b = normalize(direction + twist * Omega x) with Omega the
/// antisymmetric "shift" matrix (Omega_{i,i+1} = 1). twist != 0 gives a
/// non-symmetric nabla b that violates nabla_j b_i = k (a_ij - b_i b_j).
BackgroundSpace make_euclidean_space(int dim, const Vector& direction, double twist = 0.0);
BackgroundSpace make_euclidean_space(int dim);

/// a = dt^2 + sigma(t)^2 (dx_1^2 + ... + dx_{N-1}^2), b = dt, t = x^0.
/// Satisfies nabla_j b_i = k (a_ij - b_i b_j) with k = sigma'(t)/sigma(t).
BackgroundSpace make_warped_space(int dim, std::function<double(double)> sigma,
                                  std::function<double(double)> sigma_prime,
                                  std::string label = "warped");
/// sigma(t) = exp(-kappa t), so k = -kappa everywhere.
BackgroundSpace make_exponential_warped_space(int dim, double kappa);
/// k(x) of a warped space built by make_warped_space.
double warped_k(const std::function<double(double)>& sigma,
                const std::function<double(double)>& sigma_prime, const Vector& x);

/// Gaussian normal chart a = dt^2 + h_ab(t, x) dx^a dx^b with
/// h_ab = exp(2 alpha t) delta_ab + beta s_a s_b, s_a = sin(x^a + t); b = dt.
/// nabla b = (1/2) d_t h is symmetric but not proportional to h.
BackgroundSpace make_normal_space(int dim, double alpha, double beta);

/// a(x) = A0 + sum_k x^k A_k and b = w / ||w||_a with w = b0 + sum_k x^k B_k.
/// Carries no analytic derivatives, so connections go through derive_x.
BackgroundSpace make_tabulated_space(const Matrix& a0, const std::vector<Matrix>& a_slopes,
                                     const Vector& b0, const std::vector<Vector>& b_slopes);

}  // namespace finsler
