#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fput2d {

using cplx = std::complex<double>;

/// Square periodic array stored row-major: element (i, j) lives at i * side + j.
/// The first index runs along x (lattice index m), the second along y (n).
template <class T>
class Grid2 {
 public:
  Grid2() = default;
  explicit Grid2(std::size_t side, T fill = T{}) : side_(side), data_(side * side, fill) {}

  std::size_t side() const noexcept { return side_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * side_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * side_ + j]; }
  T& operator[](std::size_t k) noexcept { return data_[k]; }
  const T& operator[](std::size_t k) const noexcept { return data_[k]; }

  /// Periodic access with signed offsets.
  const T& wrapped(std::ptrdiff_t i, std::ptrdiff_t j) const noexcept {
    const auto s = static_cast<std::ptrdiff_t>(side_);
    i %= s;
    j %= s;
    if (i < 0) i += s;
    if (j < 0) j += s;
    return data_[static_cast<std::size_t>(i * s + j)];
  }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }
  std::span<T> span() noexcept { return data_; }
  std::span<const T> span() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool operator==(const Grid2&) const = default;

 private:
  std::size_t side_ = 0;
  std::vector<T> data_;
};

using RealGrid = Grid2<double>;
using ComplexGrid = Grid2<cplx>;

}  // namespace fput2d
