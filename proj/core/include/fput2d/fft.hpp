#pragma once

#include <cstddef>
#include <memory>

#include "fput2d/grid.hpp"

namespace fput2d {

/// Unnormalized 2D complex DFT on a side x side grid, backed by FFTW.
///   forward:  F(j1, j2) = sum_{m,n} f(m, n) exp(-2 pi i (j1 m + j2 n) / side)
///   backward: the same sum with +i; backward(forward(f)) = side^2 * f.
/// Plans are built with FFTW_ESTIMATE so results are bitwise reproducible from
/// run to run. An instance may be used by one thread at a time.
class Fft2 {
 public:
  explicit Fft2(std::size_t side);
  ~Fft2();
  Fft2(Fft2&&) noexcept;
  Fft2& operator=(Fft2&&) noexcept;
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  std::size_t side() const noexcept { return side_; }

  void forward(ComplexGrid& g) const;
  void backward(ComplexGrid& g) const;

 private:
  struct Plans;
  std::size_t side_ = 0;
  std::unique_ptr<Plans> plans_;
};

/// Signed DFT index of slot j on a grid of the given side: j for j < side/2,
/// j - side otherwise (the Nyquist slot maps to -side/2).
inline std::ptrdiff_t signed_index(std::size_t j, std::size_t side) noexcept {
  const auto s = static_cast<std::ptrdiff_t>(side);
  const auto jj = static_cast<std::ptrdiff_t>(j);
  return jj < (s + 1) / 2 ? jj : jj - s;
}

}  // namespace fput2d
