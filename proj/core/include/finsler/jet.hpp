#pragma once

#include "finsler/tensor.hpp"

#include <span>
#include <vector>

namespace finsler {

/// Truncated third-order Taylor jet in a block of `dim` variables.
///
/// Carries f, df/dy^i, d2f/dy^i dy^j and d3f/dy^i dy^j dy^k at one point and
/// propagates them through arithmetic and the elementary functions used by
/// the metric formulas (forward mode). Derivatives above `order` are not
/// stored. Only components with i <= j <= k are computed; the remaining ones
/// are mirrored, so hess() and third() are exactly symmetric.
///
/// A jet built from a plain double has dim() == 0 and acts as a constant in
/// mixed arithmetic, so generic code can write `T acc = 0.0;`.
class Jet3 {
 public:
  Jet3() = default;
  Jet3(double value) : d_{value} {}  // NOLINT(google-explicit-constructor)

  static Jet3 constant(int dim, int order, double value);
  static Jet3 variable(int dim, int order, int index, double value);

  /// Jet with the given derivative arrays (row-major, full n, n^2, n^3
  /// storage; arrays beyond `order` may be empty).
  static Jet3 from_derivatives(int dim, int order, double value, std::span<const double> grad,
                               std::span<const double> hess, std::span<const double> third);

  /// One variable jet per coordinate of `y`.
  static std::vector<Jet3> variables(std::span<const double> y, int order);

  int dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }

  double value() const noexcept { return d_[0]; }
  double grad(int i) const noexcept { return dim_ ? d_[1 + i] : 0.0; }
  double hess(int i, int j) const noexcept {
    return order_ >= 2 ? d_[hess_off() + i * dim_ + j] : 0.0;
  }
  double third(int i, int j, int k) const noexcept {
    return order_ >= 3 ? d_[third_off() + (i * dim_ + j) * dim_ + k] : 0.0;
  }

  Vector gradient() const;
  Matrix hessian() const;
  Array3 third_array() const;

  Jet3& operator+=(const Jet3& o);
  Jet3& operator-=(const Jet3& o);
  Jet3& operator*=(const Jet3& o);
  Jet3& operator/=(const Jet3& o);
  Jet3& operator*=(double s);
  Jet3& operator+=(double s) {
    d_[0] += s;
    return *this;
  }

  Jet3 operator-() const;

  friend Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
  friend Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
  friend Jet3 operator*(const Jet3& a, const Jet3& b);
  friend Jet3 operator/(const Jet3& a, const Jet3& b);
  friend Jet3 operator*(Jet3 a, double s) { return a *= s; }
  friend Jet3 operator*(double s, Jet3 a) { return a *= s; }
  friend Jet3 operator+(Jet3 a, double s) { return a += s; }
  friend Jet3 operator+(double s, Jet3 a) { return a += s; }
  friend Jet3 operator-(Jet3 a, double s) { return a += -s; }
  friend Jet3 operator-(double s, const Jet3& a) { return (-a) + s; }
  friend Jet3 operator/(Jet3 a, double s) { return a *= (1.0 / s); }
  friend Jet3 operator/(double s, const Jet3& a);

  /// Composition f(u) given f and its first three derivatives at u.value().
  friend Jet3 compose(const Jet3& u, double f0, double f1, double f2, double f3);

 private:
  Jet3(int dim, int order);

  std::size_t hess_off() const noexcept { return 1 + static_cast<std::size_t>(dim_); }
  std::size_t third_off() const noexcept {
    return hess_off() + static_cast<std::size_t>(dim_ * dim_);
  }
  double& g(int i) noexcept { return d_[1 + i]; }
  double& h(int i, int j) noexcept { return d_[hess_off() + i * dim_ + j]; }
  double& t(int i, int j, int k) noexcept {
    return d_[third_off() + (i * dim_ + j) * dim_ + k];
  }
  double g(int i) const noexcept { return d_[1 + i]; }
  double h(int i, int j) const noexcept { return d_[hess_off() + i * dim_ + j]; }
  double t(int i, int j, int k) const noexcept {
    return d_[third_off() + (i * dim_ + j) * dim_ + k];
  }
  void mirror();
  void promote_to(int dim, int order);

  int dim_ = 0;
  int order_ = 0;
  std::vector<double> d_{0.0};
};

Jet3 sqrt(const Jet3& u);
Jet3 exp(const Jet3& u);
Jet3 log(const Jet3& u);
Jet3 atan(const Jet3& u);
Jet3 sin(const Jet3& u);
Jet3 cos(const Jet3& u);
/// Quadrant-aware arctangent, smooth away from the cut {y = 0, x < 0}.
Jet3 atan2(const Jet3& y, const Jet3& x);

inline double value_of(double v) noexcept { return v; }
inline double value_of(const Jet3& v) noexcept { return v.value(); }

}  // namespace finsler
