#include "finsler/numkit.hpp"

#include "finsler/errors.hpp"

#include <cmath>
#include <limits>

namespace finsler {

std::string to_string(DiffMethod m) {
  return m == DiffMethod::kForwardJets ? "forward-jets" : "central-fd";
}

DiffMethod parse_diff_method(const std::string& s) {
  if (s == "forward-jets" || s == "jets") return DiffMethod::kForwardJets;
  if (s == "central-fd" || s == "fd") return DiffMethod::kCentralFd;
  throw ConfigError("unknown differentiation method '" + s + "'");
}

void DiffConfig::validate() const {
  if (!(fd_step_scale > 0.0) || !std::isfinite(fd_step_scale))
    throw DomainError("DiffConfig: fd_step_scale must be > 0");
  if (richardson_levels < 1 || richardson_levels > 4)
    throw DomainError("DiffConfig: richardson_levels must be in [1, 4]");
  if (!(fd_step_cap >= 0.0) || !std::isfinite(fd_step_cap))
    throw DomainError("DiffConfig: fd_step_cap must be >= 0");
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

using Sample = std::vector<double>;
using Evaluator = std::function<Sample(std::span<const double>)>;

Sample checked(const Evaluator& f, std::span<const double> y) {
  Sample s = f(y);
  for (double v : s)
    if (!std::isfinite(v)) throw DomainError("non-finite field value at a stencil point");
  return s;
}

double base_step(double coord, int order, const DiffConfig& cfg) {
  const double h = cfg.fd_step_scale * std::max(1.0, std::abs(coord)) * std::pow(kEps, 1.0 / (order + 2));
  return cfg.fd_step_cap > 0.0 ? std::min(h, cfg.fd_step_cap) : h;
}

// Combines estimates taken at steps h, 2h, 4h, ... (finest first). Central
// stencils have an error series in even powers of h.
std::vector<double> richardson(std::vector<std::vector<double>> est) {
  const std::size_t levels = est.size();
  for (std::size_t m = 1; m < levels; ++m) {
    const double f = std::pow(4.0, static_cast<double>(m));
    for (std::size_t l = 0; l + m < levels; ++l)
      for (std::size_t c = 0; c < est[l].size(); ++c)
        est[l][c] = (f * est[l][c] - est[l + 1][c]) / (f - 1.0);
  }
  return est[0];
}

// Nested central difference over the multi-index `axes` (size 1..3) with
// per-axis steps `h`. Returns one entry per field component.
std::vector<double> nested_central(const Evaluator& f, std::span<const double> y,
                                   std::span<const int> axes, std::span<const double> h) {
  const std::size_t rank = axes.size();
  const std::size_t ncorner = std::size_t{1} << rank;
  std::vector<double> acc;
  std::vector<double> p(y.begin(), y.end());
  double denom = 1.0;
  for (std::size_t r = 0; r < rank; ++r) denom *= 2.0 * h[static_cast<std::size_t>(axes[r])];
  for (std::size_t corner = 0; corner < ncorner; ++corner) {
    std::copy(y.begin(), y.end(), p.begin());
    double sign = 1.0;
    for (std::size_t r = 0; r < rank; ++r) {
      const auto ax = static_cast<std::size_t>(axes[r]);
      const bool plus = (corner >> r) & 1U;
      p[ax] += plus ? h[ax] : -h[ax];
      if (!plus) sign = -sign;
    }
    const Sample s = checked(f, p);
    if (acc.empty()) acc.assign(s.size(), 0.0);
    for (std::size_t c = 0; c < s.size(); ++c) acc[c] += sign * s[c];
  }
  for (double& v : acc) v /= denom;
  return acc;
}

std::vector<Jet3> fd_jets(const Evaluator& f, std::span<const double> y, int order,
                          const DiffConfig& cfg) {
  const int n = static_cast<int>(y.size());
  const Sample f0 = checked(f, y);
  const std::size_t ncomp = f0.size();
  std::vector<Jet3> out(ncomp);

  std::vector<std::vector<double>> grad(ncomp, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> hess(ncomp, std::vector<double>(n * n, 0.0));
  std::vector<std::vector<double>> third(ncomp, std::vector<double>(n * n * n, 0.0));

  // Each derivative order uses its own base step.
  auto estimate = [&](std::span<const int> axes, int d) {
    std::vector<std::vector<double>> est;
    for (int l = 0; l < cfg.richardson_levels; ++l) {
      std::vector<double> h(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        h[static_cast<std::size_t>(i)] =
            std::ldexp(base_step(y[static_cast<std::size_t>(i)], d, cfg), l);
      est.push_back(nested_central(f, y, axes, h));
    }
    return richardson(std::move(est));
  };

  for (int i = 0; i < n && order >= 1; ++i) {
    const int ax[1] = {i};
    const auto v = estimate(ax, 1);
    for (std::size_t c = 0; c < ncomp; ++c) grad[c][i] = v[c];
  }
  for (int i = 0; i < n && order >= 2; ++i)
    for (int j = i; j < n; ++j) {
      const int ax[2] = {i, j};
      const auto v = estimate(ax, 2);
      for (std::size_t c = 0; c < ncomp; ++c) hess[c][i * n + j] = hess[c][j * n + i] = v[c];
    }
  for (int i = 0; i < n && order >= 3; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        const int ax[3] = {i, j, k};
        const auto v = estimate(ax, 3);
        const int perm[6][3] = {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}};
        for (std::size_t c = 0; c < ncomp; ++c)
          for (const auto& p : perm) third[c][(p[0] * n + p[1]) * n + p[2]] = v[c];
      }

  for (std::size_t c = 0; c < ncomp; ++c)
    out[c] = Jet3::from_derivatives(n, order, f0[c], grad[c], hess[c], third[c]);
  return out;
}

void check_jets(const std::vector<Jet3>& v) {
  for (const Jet3& j : v) {
    if (!std::isfinite(j.value())) throw DomainError("non-finite field value");
    for (int i = 0; i < j.dim(); ++i)
      if (!std::isfinite(j.grad(i))) throw DomainError("non-finite field derivative");
  }
}

}  // namespace

std::vector<Jet3> derive_y(const VectorField& f, const Vector& x, std::span<const double> y,
                           int order, const DiffConfig& cfg) {
  cfg.validate();
  if (order < 1 || order > 3) throw DomainError("derive_y: order must be 1, 2 or 3");
  if (cfg.method == DiffMethod::kForwardJets) {
    if (!f.eval_jet) throw DomainError("derive_y: field has no jet evaluation");
    const auto vars = Jet3::variables(y, order);
    std::vector<Jet3> out = f.eval_jet(x, vars);
    for (Jet3& j : out)
      if (j.dim() == 0) j = Jet3::constant(static_cast<int>(y.size()), order, j.value());
    check_jets(out);
    return out;
  }
  Evaluator ev = [&](std::span<const double> p) { return f.eval(x, p); };
  return fd_jets(ev, y, order, cfg);
}

Jet3 derive_y(const ScalarField& f, const Vector& x, std::span<const double> y, int order,
              const DiffConfig& cfg) {
  VectorField vf{
      [&](const Vector& xx, std::span<const double> yy) { return std::vector<double>{f.eval(xx, yy)}; },
      f.eval_jet ? std::function<std::vector<Jet3>(const Vector&, std::span<const Jet3>)>(
                       [&](const Vector& xx, std::span<const Jet3> yy) {
                         return std::vector<Jet3>{f.eval_jet(xx, yy)};
                       })
                 : nullptr};
  return derive_y(vf, x, y, order, cfg).front();
}

Matrix derive_x(const FieldOfX& f, const Vector& x, const DiffConfig& cfg) {
  cfg.validate();
  const Vector f0 = f(x);
  const int n = static_cast<int>(x.size());
  Matrix out(f0.size(), n);
  for (int k = 0; k < n; ++k) {
    std::vector<std::vector<double>> est;
    for (int l = 0; l < cfg.richardson_levels; ++l) {
      const double h = std::ldexp(base_step(x(k), 1, cfg), l);
      Vector xp = x;
      Vector xm = x;
      xp(k) += h;
      xm(k) -= h;
      const Vector fp = f(xp);
      const Vector fm = f(xm);
      if (!fp.allFinite() || !fm.allFinite())
        throw DomainError("derive_x: non-finite field value at a stencil point");
      std::vector<double> d(static_cast<std::size_t>(f0.size()));
      for (Eigen::Index c = 0; c < f0.size(); ++c)
        d[static_cast<std::size_t>(c)] = (fp(c) - fm(c)) / (xp(k) - xm(k));
      est.push_back(std::move(d));
    }
    const auto r = richardson(std::move(est));
    for (Eigen::Index c = 0; c < f0.size(); ++c) out(c, k) = r[static_cast<std::size_t>(c)];
  }
  return out;
}

Matrix invert_spd(const Matrix& m) {
  if (m.rows() != m.cols()) throw DomainError("invert_spd: matrix is not square");
  if (!m.allFinite()) throw DomainError("invert_spd: non-finite entry");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("invert_spd: matrix is not symmetric");
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("invert_spd: non-positive pivot");
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

bool is_positive_definite(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace finsler
