#include "finsler/jet.hpp"

#include "finsler/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace finsler {
namespace {

std::size_t storage_size(int dim, int order) {
  std::size_t n = static_cast<std::size_t>(dim);
  std::size_t s = 1;
  if (order >= 1) s += n;
  if (order >= 2) s += n * n;
  if (order >= 3) s += n * n * n;
  return s;
}

}  // namespace

Jet3::Jet3(int dim, int order) : dim_(dim), order_(order), d_(storage_size(dim, order), 0.0) {}

Jet3 Jet3::constant(int dim, int order, double value) {
  if (dim < 0 || order < 0 || order > 3) throw DomainError("Jet3: invalid dim/order");
  Jet3 j(dim, order);
  j.d_[0] = value;
  return j;
}

Jet3 Jet3::variable(int dim, int order, int index, double value) {
  Jet3 j = constant(dim, order, value);
  if (index < 0 || index >= dim) throw DomainError("Jet3: variable index out of range");
  if (order >= 1) j.g(index) = 1.0;
  return j;
}

Jet3 Jet3::from_derivatives(int dim, int order, double value, std::span<const double> grad,
                             std::span<const double> hess, std::span<const double> third) {
  Jet3 j = constant(dim, order, value);
  const auto n = static_cast<std::size_t>(dim);
  if ((order >= 1 && grad.size() != n) || (order >= 2 && hess.size() != n * n) ||
      (order >= 3 && third.size() != n * n * n))
    throw DomainError("Jet3: derivative array has the wrong size");
  std::copy_n(grad.begin(), order >= 1 ? n : 0, j.d_.begin() + 1);
  std::copy_n(hess.begin(), order >= 2 ? n * n : 0, j.d_.begin() + static_cast<long>(j.hess_off()));
  std::copy_n(third.begin(), order >= 3 ? n * n * n : 0,
              j.d_.begin() + static_cast<long>(j.third_off()));
  return j;
}

std::vector<Jet3> Jet3::variables(std::span<const double> y, int order) {
  const int n = static_cast<int>(y.size());
  std::vector<Jet3> out;
  out.reserve(y.size());
  for (int i = 0; i < n; ++i) out.push_back(variable(n, order, i, y[static_cast<std::size_t>(i)]));
  return out;
}

Vector Jet3::gradient() const {
  Vector v = Vector::Zero(dim_);
  for (int i = 0; i < dim_ && order_ >= 1; ++i) v(i) = d_[1 + i];
  return v;
}

Matrix Jet3::hessian() const {
  Matrix m = Matrix::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = hess(i, j);
  return m;
}

Array3 Jet3::third_array() const {
  Array3 a(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k) a(i, j, k) = third(i, j, k);
  return a;
}

void Jet3::mirror() {
  const int n = dim_;
  if (order_ >= 2) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) h(j, i) = h(i, j);
  }
  if (order_ >= 3) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k) {
          const double v = t(i, j, k);
          t(i, k, j) = v;
          t(j, i, k) = v;
          t(j, k, i) = v;
          t(k, i, j) = v;
          t(k, j, i) = v;
        }
  }
}

// Re-shape to (dim, order), keeping existing components. A dim-0 constant
// expands with zero derivatives; a higher order is truncated.
void Jet3::promote_to(int dim, int order) {
  if (dim == dim_ && order == order_) return;
  Jet3 r(dim, order);
  r.d_[0] = d_[0];
  if (dim_ == dim) {
    const int o = std::min(order, order_);
    for (int i = 0; i < dim && o >= 1; ++i) r.g(i) = g(i);
    for (int i = 0; i < dim && o >= 2; ++i)
      for (int j = 0; j < dim; ++j) r.h(i, j) = h(i, j);
    for (int i = 0; i < dim && o >= 3; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) r.t(i, j, k) = t(i, j, k);
  } else if (dim_ != 0) {
    throw DomainError("Jet3: mixing jets of different dimension");
  }
  *this = std::move(r);
}

Jet3& Jet3::operator+=(const Jet3& o) {
  if (o.dim_ == 0) {
    d_[0] += o.d_[0];
    return *this;
  }
  if (dim_ == 0) {
    const double v = d_[0];
    *this = o;
    d_[0] += v;
    return *this;
  }
  if (o.order_ < order_) promote_to(dim_, o.order_);
  if (o.dim_ != dim_) throw DomainError("Jet3: mixing jets of different dimension");
  for (std::size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
  return *this;
}

Jet3& Jet3::operator-=(const Jet3& o) { return *this += -o; }

Jet3& Jet3::operator*=(double s) {
  for (double& v : d_) v *= s;
  return *this;
}

Jet3& Jet3::operator*=(const Jet3& o) { return *this = *this * o; }
Jet3& Jet3::operator/=(const Jet3& o) { return *this = *this / o; }

Jet3 Jet3::operator-() const {
  Jet3 r = *this;
  for (double& v : r.d_) v = -v;
  return r;
}

Jet3 operator*(const Jet3& a, const Jet3& b) {
  if (a.dim_ == 0) return b * a.d_[0];
  if (b.dim_ == 0) return a * b.d_[0];
  if (a.dim_ != b.dim_) throw DomainError("Jet3: mixing jets of different dimension");
  const int n = a.dim_;
  const int order = std::min(a.order_, b.order_);
  Jet3 r(n, order);
  const double u = a.d_[0];
  const double v = b.d_[0];
  r.d_[0] = u * v;
  if (order >= 1) {
    for (int i = 0; i < n; ++i) r.g(i) = a.d_[1 + i] * v + u * b.d_[1 + i];
  }
  if (order >= 2) {
    const Jet3& A = a;
    const Jet3& B = b;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        r.h(i, j) = A.h(i, j) * v + A.g(i) * B.g(j) + A.g(j) * B.g(i) + u * B.h(i, j);
    if (order >= 3) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int k = j; k < n; ++k)
            r.t(i, j, k) = A.t(i, j, k) * v + u * B.t(i, j, k) + A.g(i) * B.h(j, k) +
                           A.g(j) * B.h(i, k) + A.g(k) * B.h(i, j) + A.h(i, j) * B.g(k) +
                           A.h(i, k) * B.g(j) + A.h(j, k) * B.g(i);
    }
    r.mirror();
  }
  return r;
}

Jet3 compose(const Jet3& u, double f0, double f1, double f2, double f3) {
  if (u.dim_ == 0) return Jet3(f0);
  const int n = u.dim_;
  Jet3 r(n, u.order_);
  const Jet3& U = u;
  r.d_[0] = f0;
  if (u.order_ >= 1) {
    for (int i = 0; i < n; ++i) r.g(i) = f1 * U.g(i);
  }
  if (u.order_ >= 2) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) r.h(i, j) = f2 * U.g(i) * U.g(j) + f1 * U.h(i, j);
    if (u.order_ >= 3) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int k = j; k < n; ++k)
            r.t(i, j, k) =
                f3 * U.g(i) * U.g(j) * U.g(k) +
                f2 * (U.h(i, j) * U.g(k) + U.h(i, k) * U.g(j) + U.h(j, k) * U.g(i)) +
                f1 * U.t(i, j, k);
    }
    r.mirror();
  }
  return r;
}

Jet3 operator/(double s, const Jet3& a) {
  const double v = a.value();
  const double r = 1.0 / v;
  return s * compose(a, r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
}

Jet3 operator/(const Jet3& a, const Jet3& b) {
  if (b.dim() == 0) return a / b.value();
  return a * (1.0 / b);
}

Jet3 sqrt(const Jet3& u) {
  const double v = u.value();
  const double s = std::sqrt(v);
  return compose(u, s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v));
}

Jet3 exp(const Jet3& u) {
  const double e = std::exp(u.value());
  return compose(u, e, e, e, e);
}

Jet3 log(const Jet3& u) {
  const double v = u.value();
  const double r = 1.0 / v;
  return compose(u, std::log(v), r, -r * r, 2.0 * r * r * r);
}

Jet3 atan(const Jet3& u) {
  const double x = u.value();
  const double d = 1.0 / (1.0 + x * x);
  return compose(u, std::atan(x), d, -2.0 * x * d * d, (6.0 * x * x - 2.0) * d * d * d);
}

Jet3 sin(const Jet3& u) {
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  return compose(u, s, c, -s, -c);
}

Jet3 cos(const Jet3& u) {
  const double s = std::sin(u.value());
  const double c = std::cos(u.value());
  return compose(u, c, -s, -c, s);
}

Jet3 atan2(const Jet3& y, const Jet3& x) {
  using std::numbers::pi;
  const double yv = y.value();
  const double xv = x.value();
  if (std::abs(xv) >= std::abs(yv)) {
    if (xv == 0.0) throw DomainError("atan2: both arguments are zero");
    Jet3 r = atan(y / x);
    if (xv < 0.0) r += (yv >= 0.0 ? pi : -pi);
    return r;
  }
  Jet3 r = -atan(x / y);
  r += (yv > 0.0 ? 0.5 * pi : -0.5 * pi);
  return r;
}

}  // namespace finsler
