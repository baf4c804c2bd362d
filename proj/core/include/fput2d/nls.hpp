#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fput2d/dispersion.hpp"
#include "fput2d/fft.hpp"
#include "fput2d/grid.hpp"

namespace fput2d {

/// Complex envelope A(X, Y, T) sampled on the periodic square
/// [-L/2, L/2)^2 at X_j = -L/2 + j L / M.
struct EnvelopeField {
  std::size_t grid_side = 0;
  double box_length = 0.0;
  ComplexGrid a;
  double slow_time = 0.0;
  EnvelopeVariant variant = EnvelopeVariant::strain_u;

  /// Zero field; InvalidArgument unless M is a power of two and L / M <= 0.5.
  static EnvelopeField zeros(std::size_t grid_side, double box_length, EnvelopeVariant variant);

  double spacing() const noexcept { return box_length / static_cast<double>(grid_side); }
  double coord(std::size_t j) const noexcept { return -0.5 * box_length + static_cast<double>(j) * spacing(); }
};

/// A(X, Y) = amplitude * exp(-(X^2 + Y^2) / sigma^2)
EnvelopeField gaussian_envelope(std::size_t grid_side, double box_length, EnvelopeVariant variant,
                                double amplitude, double sigma);

/// A(X, Y) = amplitude * exp(i (2 pi / L)(px X + py Y)), periodic on the box.
EnvelopeField plane_wave_envelope(std::size_t grid_side, double box_length, EnvelopeVariant variant,
                                  double amplitude, int px, int py);

struct NlsProblem {
  Mat2 hessian;
  cplx nonlin_coeff;
  double dT = 1e-3;

  /// Hessian and nonlinear coefficient of the given variant at a carrier.
  static NlsProblem from_dispersion(const DispersionData& d, EnvelopeVariant variant, double dT);
};

inline constexpr double kDefaultBlowupGuard = 1e3;

/// Split-step Fourier solver for
///   dA/dT = -(i/2) (dX, dY) H (dX, dY)^T A + g |A|^2 A,
/// whose Fourier symbol of the linear part is +(i/2) K^T H K.
/// Owns its FFT plans and scratch; use one instance per thread.
class NlsSolver {
 public:
  /// InvalidArgument when the nonlinear coefficient has a real part or the
  /// grid is invalid.
  NlsSolver(std::size_t grid_side, double box_length, NlsProblem problem);

  const NlsProblem& problem() const noexcept { return problem_; }
  std::size_t grid_side() const noexcept { return side_; }
  double box_length() const noexcept { return length_; }

  /// Angular wavenumber of DFT slot j (zero at the Nyquist slot).
  double wavenumber(std::size_t j) const noexcept { return k_[j]; }

  /// Exact linear flow over dT / 2.
  void linear_halfstep(EnvelopeField& f);
  /// Exact linear flow over an arbitrary slow-time interval.
  void linear_flow(EnvelopeField& f, double dT);
  /// A <- A exp(g |A|^2 dT), pointwise.
  void nonlinear_step(EnvelopeField& f, double dT) const;
  /// Half linear, full nonlinear, half linear; advances slow_time by dT.
  void strang_step(EnvelopeField& f);
  /// Strang step of an arbitrary size.
  void strang_step(EnvelopeField& f, double dT);

  /// Right-hand side dA/dT, spectral in the linear part.
  ComplexGrid rhs(const ComplexGrid& a) const;
  /// Linear part of the right-hand side only.
  ComplexGrid linear_part(const ComplexGrid& a) const;
  /// Second slow-time derivative given A and dA/dT.
  ComplexGrid second_derivative(const ComplexGrid& a, const ComplexGrid& a_t) const;
  /// Spectral derivatives (d/dX, d/dY).
  void gradient(const ComplexGrid& a, ComplexGrid& ax, ComplexGrid& ay) const;

  /// Discrete L2 mass sum |A|^2 h^2.
  double mass(const EnvelopeField& f) const;
  /// || (1 + |K|^2)^2 A^ ||, normalized to match the continuous H^4 norm.
  double h4proxy(const EnvelopeField& f) const;

  /// Fields at each requested slow time (ascending, >= f.slow_time). The
  /// final step into each sample is shortened so samples are hit exactly.
  /// EnvelopeBlowup when the H^4 proxy exceeds the guard or values are not
  /// finite.
  std::vector<EnvelopeField> evolve(EnvelopeField f, std::span<const double> sample_times,
                                    double blowup_guard = kDefaultBlowupGuard);

 private:
  void check_field(const EnvelopeField& f) const;
  void ensure_multiplier(double half_dT);

  std::size_t side_;
  double length_;
  NlsProblem problem_;
  Fft2 fft_;
  std::vector<double> k_;
  std::vector<double> symbol_;  // (1/2) K^T H K per mode
  std::vector<cplx> multiplier_;
  double multiplier_step_ = 0.0;
};

}  // namespace fput2d
