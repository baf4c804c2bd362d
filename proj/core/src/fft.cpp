#include "fput2d/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "fput2d/errors.hpp"

namespace fput2d {

namespace {
// FFTW's planner is not thread-safe; execution with fftw_execute_dft is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft2::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  Plans() = default;
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

Fft2::Fft2(std::size_t side) : side_(side), plans_(std::make_unique<Plans>()) {
  if (side == 0) throw Error(ErrorKind::InvalidArgument, "FFT side must be positive");
  ComplexGrid scratch(side);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  const int n = static_cast<int>(side);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  plans_->fwd = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, flags);
  plans_->bwd = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, flags);
  if (!plans_->fwd || !plans_->bwd) throw Error(ErrorKind::InvalidArgument, "FFTW planning failed");
}

Fft2::~Fft2() = default;

Fft2::Fft2(Fft2&&) noexcept = default;
Fft2& Fft2::operator=(Fft2&&) noexcept = default;

void Fft2::forward(ComplexGrid& g) const {
  if (g.side() != side_) throw Error(ErrorKind::InvalidArgument, "FFT size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(g.data());
  fftw_execute_dft(plans_->fwd, p, p);
}

void Fft2::backward(ComplexGrid& g) const {
  if (g.side() != side_) throw Error(ErrorKind::InvalidArgument, "FFT size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(g.data());
  fftw_execute_dft(plans_->bwd, p, p);
}

}  // namespace fput2d
