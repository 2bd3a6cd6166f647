#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace finsler {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense cubic array of rank 3 or 4 over a runtime dimension, row-major.
/// Index order follows the symbol it stores: Array3(k, i, j) for a^k_ij,
/// Array4(i, k, m, n) for G^i_kmn.
template <std::size_t Rank>
class CubicArray {
  static_assert(Rank == 3 || Rank == 4);

 public:
  CubicArray() = default;
  explicit CubicArray(int dim, double fill = 0.0)
      : dim_(dim), data_(static_cast<std::size_t>(ipow(dim)), fill) {}

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return data_.size(); }

  template <typename... Idx>
  double& operator()(Idx... idx) noexcept {
    static_assert(sizeof...(Idx) == Rank);
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <typename... Idx>
  double operator()(Idx... idx) const noexcept {
    static_assert(sizeof...(Idx) == Rank);
    return data_[offset({static_cast<int>(idx)...})];
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  CubicArray& operator-=(const CubicArray& o) {
    assert(o.dim_ == dim_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  friend CubicArray operator-(CubicArray a, const CubicArray& b) { return a -= b; }

 private:
  static int ipow(int d) {
    int r = 1;
    for (std::size_t i = 0; i < Rank; ++i) r *= d;
    return r;
  }
  std::size_t offset(const std::array<int, Rank>& idx) const noexcept {
    std::size_t off = 0;
    for (int i : idx) {
      assert(i >= 0 && i < dim_);
      off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    }
    return off;
  }

  int dim_ = 0;
  std::vector<double> data_;
};

using Array3 = CubicArray<3>;
using Array4 = CubicArray<4>;

}  // namespace finsler
