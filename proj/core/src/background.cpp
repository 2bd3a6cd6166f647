#include "finsler/background.hpp"

#include "finsler/errors.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace finsler {

BackgroundSpace::BackgroundSpace(int dim, std::string label, MetricFn metric, OneFormFn oneform,
                                 MetricDxFn metric_dx, OneFormDxFn oneform_dx)
    : dim_(dim),
      label_(std::move(label)),
      metric_(std::move(metric)),
      oneform_(std::move(oneform)),
      metric_dx_(std::move(metric_dx)),
      oneform_dx_(std::move(oneform_dx)) {
  if (dim_ < 2) throw DomainError("BackgroundSpace: dimension must be >= 2");
  if (!metric_ || !oneform_) throw DomainError("BackgroundSpace: metric and 1-form are required");
}

void BackgroundSpace::check_point(const Vector& x) const {
  if (x.size() != dim_) {
    std::ostringstream os;
    os << "point has " << x.size() << " coordinates, space dimension is " << dim_;
    throw DomainError(os.str());
  }
  if (!x.allFinite()) throw DomainError("point has non-finite coordinates");
}

Matrix BackgroundSpace::metric(const Vector& x) const {
  check_point(x);
  Matrix a = metric_(x);
  if (a.rows() != dim_ || a.cols() != dim_ || !a.allFinite())
    throw DomainError("metric evaluated to a malformed or non-finite matrix");
  return a;
}

Vector BackgroundSpace::oneform(const Vector& x) const {
  check_point(x);
  Vector b = oneform_(x);
  if (b.size() != dim_ || !b.allFinite())
    throw DomainError("1-form evaluated to a malformed or non-finite covector");
  return b;
}

std::vector<Matrix> BackgroundSpace::metric_dx(const Vector& x) const {
  if (!metric_dx_) throw DomainError("space has no analytic metric derivatives");
  check_point(x);
  return metric_dx_(x);
}

Matrix BackgroundSpace::oneform_dx(const Vector& x) const {
  if (!oneform_dx_) throw DomainError("space has no analytic 1-form derivatives");
  check_point(x);
  return oneform_dx_(x);
}

Site site_at(const BackgroundSpace& space, const Vector& x) {
  Site s;
  s.x = x;
  s.a = space.metric(x);
  const double scale = s.a.cwiseAbs().maxCoeff();
  if ((s.a - s.a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("background metric is not symmetric");
  s.a_inv = invert_spd(s.a);
  s.b_dn = space.oneform(x);
  s.b_up = s.a_inv * s.b_dn;
  const double norm = std::sqrt(s.b_dn.dot(s.b_up));
  if (std::abs(norm - 1.0) > kUnitNormTolerance) {
    std::ostringstream os;
    os << "1-form is not of unit Riemannian length: ||b|| = " << norm;
    throw DomainError(os.str());
  }
  const int n = space.dim();
  s.r_dn = s.a - s.b_dn * s.b_dn.transpose();
  s.r_mixed = Matrix::Identity(n, n) - s.b_up * s.b_dn.transpose();
  return s;
}

Connection connection_at(const BackgroundSpace& space, const Vector& x, const DiffConfig& cfg,
                         ConnectionSource source) {
  const Site site = site_at(space, x);
  const int n = space.dim();

  std::vector<Matrix> da;  // da[k](i, j) = d_k a_ij
  Matrix db;               // db(i, k) = d_k b_i
  if (source == ConnectionSource::kAuto && space.has_analytic_dx()) {
    da = space.metric_dx(x);
    db = space.oneform_dx(x);
    if (static_cast<int>(da.size()) != n || db.rows() != n || db.cols() != n)
      throw DomainError("analytic derivatives have the wrong shape");
  } else {
    const Matrix dflat = derive_x(
        [&](const Vector& p) {
          const Matrix a = space.metric(p);
          return Vector(Eigen::Map<const Vector>(a.data(), a.size()));
        },
        x, cfg);
    da.assign(static_cast<std::size_t>(n), Matrix(n, n));
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) da[static_cast<std::size_t>(k)](i, j) = dflat(j * n + i, k);
    db = derive_x([&](const Vector& p) { return space.oneform(p); }, x, cfg);
  }

  Connection c;
  c.b_dx = db;
  // a_{n,ij} = (1/2)(d_j a_ni + d_i a_nj - d_n a_ji), then raise n.
  Array3 lowered(n);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        lowered(m, i, j) = 0.5 * (da[static_cast<std::size_t>(j)](m, i) +
                                  da[static_cast<std::size_t>(i)](m, j) -
                                  da[static_cast<std::size_t>(m)](j, i));
  c.christoffel = Array3(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m) acc += site.a_inv(k, m) * lowered(m, i, j);
        c.christoffel(k, i, j) = acc;
        c.christoffel(k, j, i) = acc;
      }
  c.nabla_b = Matrix(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double acc = db(i, j);
      for (int k = 0; k < n; ++k) acc -= c.christoffel(k, j, i) * site.b_dn(k);
      c.nabla_b(j, i) = acc;
    }
  c.f_form = db.transpose() - db;
  return c;
}

Vector f_vector(const Site& site, const Connection& conn, const Vector& y) {
  return site.a_inv * (conn.f_form * y);
}

ConditionFit fit_landsberg_condition(const Site& site, const Connection& conn) {
  const int n = site.dim();
  // Trace against a^ij: a^ij r_ij = N - 1.
  double tr = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) tr += site.a_inv(i, j) * conn.nabla_b(j, i);
  ConditionFit fit;
  fit.k = tr / (n - 1);
  fit.residual = (conn.nabla_b - fit.k * site.r_dn).cwiseAbs().maxCoeff();
  return fit;
}

const Matrix& Frame::eta_mixed() const {
  require_regular("eta-tensor");
  return eta_mixed_;
}

const Matrix& Frame::eta_dn() const {
  require_regular("eta-tensor");
  return eta_dn_;
}

void Frame::require_regular(const char* what) const {
  if (!regular()) {
    std::ostringstream os;
    os << what << " refused: y is near-collinear with b (q = " << q << " <= q_min = " << q_min()
       << ")";
    throw NearCollinearError(os.str());
  }
}

Frame frame_at(const Site& site, const Vector& y) {
  if (y.size() != site.dim()) throw DomainError("frame_at: y has the wrong dimension");
  if (!y.allFinite()) throw DomainError("frame_at: y is not finite");
  if (y.cwiseAbs().maxCoeff() == 0.0) throw DomainError("frame_at: y = 0");
  Frame f;
  f.site = site;
  f.y = y;
  f.u = site.a * y;
  f.b = site.b_dn.dot(y);
  f.S = std::sqrt(f.u.dot(y));
  f.q = std::sqrt(std::max(0.0, y.dot(site.r_dn * y)));
  f.v_up = y - f.b * site.b_up;
  f.v_dn = f.u - f.b * site.b_dn;
  if (f.regular()) {
    const double q2 = f.q * f.q;
    f.eta_mixed_ = site.r_mixed - f.v_up * f.v_dn.transpose() / q2;
    f.eta_dn_ = site.r_dn - f.v_dn * f.v_dn.transpose() / q2;
  }
  return f;
}

Frame frame_at(const BackgroundSpace& space, const Vector& x, const Vector& y) {
  return frame_at(site_at(space, x), y);
}

// ---------------------------------------------------------------------------

namespace {

Matrix shift_omega(int n) {
  Matrix om = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    om(i, i + 1) = 1.0;
    om(i + 1, i) = -1.0;
  }
  return om;
}

}  // namespace

BackgroundSpace make_euclidean_space(int dim, const Vector& direction, double twist) {
  if (direction.size() != dim || direction.norm() == 0.0)
    throw DomainError("euclidean fixture: direction must be a nonzero vector of length dim");
  const Matrix om = shift_omega(dim);
  auto w_of = [direction, om, twist](const Vector& x) -> Vector { return direction + twist * (om * x); };
  auto b_of = [w_of](const Vector& x) -> Vector {
    const Vector w = w_of(x);
    const double nw = w.norm();
    if (nw < 1e-12) throw DomainError("euclidean fixture: twisted 1-form vanishes");
    return w / nw;
  };
  auto db_of = [w_of, om, twist](const Vector& x) -> Matrix {
    const Vector w = w_of(x);
    const double nw = w.norm();
    if (nw < 1e-12) throw DomainError("euclidean fixture: twisted 1-form vanishes");
    const Matrix dw = twist * om;  // (i, k) = d_k w_i
    return dw / nw - w * (w.transpose() * dw) / (nw * nw * nw);
  };
  std::ostringstream label;
  label << "euclidean(N=" << dim << ", twist=" << twist << ")";
  return BackgroundSpace(
      dim, label.str(), [dim](const Vector&) -> Matrix { return Matrix::Identity(dim, dim); },
      b_of,
      [dim](const Vector&) { return std::vector<Matrix>(static_cast<std::size_t>(dim), Matrix::Zero(dim, dim)); },
      db_of);
}

BackgroundSpace make_euclidean_space(int dim) {
  Vector e = Vector::Zero(dim);
  if (dim > 0) e(0) = 1.0;
  return make_euclidean_space(dim, e, 0.0);
}

BackgroundSpace make_warped_space(int dim, std::function<double(double)> sigma,
                                  std::function<double(double)> sigma_prime, std::string label) {
  auto checked_sigma = [sigma](double t) {
    const double s = sigma(t);
    if (!(s > 0.0) || !std::isfinite(s)) {
      std::ostringstream os;
      os << "warped fixture: sigma(" << t << ") = " << s << " is not positive";
      throw DomainError(os.str());
    }
    return s;
  };
  auto metric = [dim, checked_sigma](const Vector& x) -> Matrix {
    const double s = checked_sigma(x(0));
    Matrix a = Matrix::Identity(dim, dim) * (s * s);
    a(0, 0) = 1.0;
    return a;
  };
  auto oneform = [dim](const Vector&) -> Vector { return Vector::Unit(dim, 0); };
  auto metric_dx = [dim, checked_sigma, sigma_prime](const Vector& x) {
    std::vector<Matrix> d(static_cast<std::size_t>(dim), Matrix::Zero(dim, dim));
    const double s = checked_sigma(x(0));
    const double ds = sigma_prime(x(0));
    for (int i = 1; i < dim; ++i) d[0](i, i) = 2.0 * s * ds;
    return d;
  };
  auto oneform_dx = [dim](const Vector&) -> Matrix { return Matrix::Zero(dim, dim); };
  return BackgroundSpace(dim, std::move(label), metric, oneform, metric_dx, oneform_dx);
}

BackgroundSpace make_exponential_warped_space(int dim, double kappa) {
  std::ostringstream label;
  label << "warped(N=" << dim << ", sigma=exp(-" << kappa << " t))";
  return make_warped_space(
      dim, [kappa](double t) { return std::exp(-kappa * t); },
      [kappa](double t) { return -kappa * std::exp(-kappa * t); }, label.str());
}

double warped_k(const std::function<double(double)>& sigma,
                const std::function<double(double)>& sigma_prime, const Vector& x) {
  return sigma_prime(x(0)) / sigma(x(0));
}

BackgroundSpace make_normal_space(int dim, double alpha, double beta) {
  if (beta < 0.0) throw DomainError("normal fixture: beta must be >= 0");
  auto metric = [dim, alpha, beta](const Vector& x) -> Matrix {
    const double t = x(0);
    Matrix a = Matrix::Zero(dim, dim);
    a(0, 0) = 1.0;
    for (int i = 1; i < dim; ++i)
      for (int j = 1; j < dim; ++j)
        a(i, j) = (i == j ? std::exp(2.0 * alpha * t) : 0.0) +
                  beta * std::sin(x(i) + t) * std::sin(x(j) + t);
    return a;
  };
  auto metric_dx = [dim, alpha, beta](const Vector& x) {
    const double t = x(0);
    std::vector<Matrix> d(static_cast<std::size_t>(dim), Matrix::Zero(dim, dim));
    for (int i = 1; i < dim; ++i)
      for (int j = 1; j < dim; ++j) {
        const double si = std::sin(x(i) + t), ci = std::cos(x(i) + t);
        const double sj = std::sin(x(j) + t), cj = std::cos(x(j) + t);
        d[0](i, j) = (i == j ? 2.0 * alpha * std::exp(2.0 * alpha * t) : 0.0) +
                     beta * (ci * sj + si * cj);
        d[static_cast<std::size_t>(i)](i, j) += beta * ci * sj;
        d[static_cast<std::size_t>(j)](i, j) += beta * si * cj;
      }
    return d;
  };
  std::ostringstream label;
  label << "normal(N=" << dim << ", alpha=" << alpha << ", beta=" << beta << ")";
  return BackgroundSpace(
      dim, label.str(), metric, [dim](const Vector&) -> Vector { return Vector::Unit(dim, 0); },
      metric_dx, [dim](const Vector&) -> Matrix { return Matrix::Zero(dim, dim); });
}

BackgroundSpace make_tabulated_space(const Matrix& a0, const std::vector<Matrix>& a_slopes,
                                     const Vector& b0, const std::vector<Vector>& b_slopes) {
  const auto n = static_cast<int>(a0.rows());
  if (a0.cols() != n || b0.size() != n) throw DomainError("tabulated fixture: shape mismatch");
  if (static_cast<int>(a_slopes.size()) > n || static_cast<int>(b_slopes.size()) > n)
    throw DomainError("tabulated fixture: more slopes than coordinates");
  for (const Matrix& m : a_slopes)
    if (m.rows() != n || m.cols() != n) throw DomainError("tabulated fixture: slope shape mismatch");
  for (const Vector& v : b_slopes)
    if (v.size() != n) throw DomainError("tabulated fixture: slope shape mismatch");
  auto metric = [a0, a_slopes](const Vector& x) -> Matrix {
    Matrix a = a0;
    for (std::size_t k = 0; k < a_slopes.size(); ++k) a += x(static_cast<Eigen::Index>(k)) * a_slopes[k];
    return 0.5 * (a + a.transpose());
  };
  auto oneform = [metric, b0, b_slopes](const Vector& x) -> Vector {
    Vector w = b0;
    for (std::size_t k = 0; k < b_slopes.size(); ++k) w += x(static_cast<Eigen::Index>(k)) * b_slopes[k];
    const Matrix ainv = invert_spd(metric(x));
    const double norm2 = w.dot(ainv * w);
    if (!(norm2 > 0.0)) throw DomainError("tabulated fixture: 1-form vanishes");
    return w / std::sqrt(norm2);
  };
  std::ostringstream label;
  label << "tabulated(N=" << n << ")";
  return BackgroundSpace(n, label.str(), metric, oneform);
}

}  // namespace finsler
