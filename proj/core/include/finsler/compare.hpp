#pragma once

#include "finsler/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace finsler {

/// Flat view of a dense Eigen object or a CubicArray.
template <typename A>
const double* flat_data(const A& a) {
  if constexpr (requires { a.data().data(); })
    return a.data().data();
  else
    return a.data();
}

template <typename A>
std::size_t flat_size(const A& a) {
  return static_cast<std::size_t>(a.size());
}

template <typename A>
double max_abs_of(const A& a) {
  const double* p = flat_data(a);
  double m = 0.0;
  for (std::size_t i = 0; i < flat_size(a); ++i) m = std::max(m, std::abs(p[i]));
  return m;
}

/// max|a - b| / max(max|a|, max|b|, floor). Arrays of different size compare as +inf.
template <typename A, typename B>
double relative_difference(const A& a, const B& b, double floor = 1e-12) {
  if (flat_size(a) != flat_size(b)) return INFINITY;
  const double* pa = flat_data(a);
  const double* pb = flat_data(b);
  double diff = 0.0;
  double scale = floor;
  for (std::size_t i = 0; i < flat_size(a); ++i) {
    diff = std::max(diff, std::abs(pa[i] - pb[i]));
    scale = std::max({scale, std::abs(pa[i]), std::abs(pb[i])});
  }
  return diff / scale;
}

/// |value| / max(scale, floor), for quantities that should vanish and whose
/// natural size is `scale` (typically the sum of absolute terms).
inline double relative_residual(double value, double scale, double floor = 1e-12) {
  return std::abs(value) / std::max(scale, floor);
}

}  // namespace finsler
