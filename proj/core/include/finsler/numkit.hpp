#pragma once

#include "finsler/jet.hpp"
#include "finsler/tensor.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace finsler {

enum class DiffMethod { kForwardJets, kCentralFd };

std::string to_string(DiffMethod m);
/// Accepts "forward-jets" and "central-fd".
DiffMethod parse_diff_method(const std::string& s);

struct DiffConfig {
  DiffMethod method = DiffMethod::kForwardJets;
  /// Multiplies the per-axis base step  max(1, |y_i|) * eps^(1/(order+2)).
  double fd_step_scale = 4.0;
  /// Number of step sizes h, 2h, 4h, ... combined by Richardson extrapolation.
  int richardson_levels = 2;
  /// When > 0, no base step exceeds this absolute value. Lets callers keep
  /// stencils away from a known singular set (e.g. the cone q = 0).
  double fd_step_cap = 0.0;

  /// Throws DomainError when fd_step_scale <= 0, fd_step_cap < 0 or levels
  /// outside [1, 4].
  void validate() const;

  static DiffConfig central_fd(int levels = 2, double scale = 4.0) {
    return {DiffMethod::kCentralFd, scale, levels, 0.0};
  }
};

/// A scalar function of (x, y) that can be evaluated on plain doubles and on
/// jets in y. x is always a plain point.
struct ScalarField {
  std::function<double(const Vector& x, std::span<const double> y)> eval;
  std::function<Jet3(const Vector& x, std::span<const Jet3> y)> eval_jet;
};

/// Vector-valued counterpart of ScalarField (e.g. spray coefficients G^i).
struct VectorField {
  std::function<std::vector<double>(const Vector& x, std::span<const double> y)> eval;
  std::function<std::vector<Jet3>(const Vector& x, std::span<const Jet3> y)> eval_jet;
};

/// Wraps a generic callable `f(x, span<const T> y) -> T` for T in {double, Jet3}.
template <typename F>
ScalarField make_scalar_field(F f) {
  return ScalarField{
      [f](const Vector& x, std::span<const double> y) { return static_cast<double>(f(x, y)); },
      [f](const Vector& x, std::span<const Jet3> y) { return Jet3(f(x, y)); }};
}

/// Wraps a generic callable `f(x, span<const T> y) -> std::vector<T>`.
template <typename F>
VectorField make_vector_field(F f) {
  return VectorField{
      [f](const Vector& x, std::span<const double> y) { return std::vector<double>(f(x, y)); },
      [f](const Vector& x, std::span<const Jet3> y) { return std::vector<Jet3>(f(x, y)); }};
}

/// Derivatives of f with respect to y at fixed x, up to `order` (1..3).
/// Jets mode propagates exact derivatives; central-fd mode uses nested
/// second-order central stencils with Richardson extrapolation.
/// Throws DomainError if f is non-finite at any evaluated point.
Jet3 derive_y(const ScalarField& f, const Vector& x, std::span<const double> y, int order,
              const DiffConfig& cfg = {});
std::vector<Jet3> derive_y(const VectorField& f, const Vector& x, std::span<const double> y,
                           int order, const DiffConfig& cfg = {});

/// First x-derivatives of a (flattened) field: result(c, k) = d f_c / d x^k.
/// Always central differences with Richardson extrapolation; cfg.method is
/// ignored since fields of x are plain user functions.
using FieldOfX = std::function<Vector(const Vector& x)>;
Matrix derive_x(const FieldOfX& f, const Vector& x, const DiffConfig& cfg = {});

/// Inverse of a symmetric positive-definite matrix via Cholesky.
/// Throws NotPositiveDefiniteError on a non-positive pivot, DomainError if
/// the matrix is not symmetric to 1e-12 relative.
Matrix invert_spd(const Matrix& m);

/// Cholesky succeeds.
bool is_positive_definite(const Matrix& m);

}  // namespace finsler
