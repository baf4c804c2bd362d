#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "fput2d/grid.hpp"

namespace fput2d {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDefaultResonanceMargin = 1e-8;

/// Reduces an angle into (-pi, pi].
double wrap_angle(double x) noexcept;

/// A point on the Brillouin torus (-pi, pi]^2. Components are wrapped once, on
/// construction.
class WaveVector {
 public:
  constexpr WaveVector() = default;
  WaveVector(double k, double l) noexcept : k_(wrap_angle(k)), l_(wrap_angle(l)) {}

  double k() const noexcept { return k_; }
  double l() const noexcept { return l_; }
  bool is_zero() const noexcept { return k_ == 0.0 && l_ == 0.0; }

  WaveVector operator-() const noexcept { return {-k_, -l_}; }
  /// m * (k, l), wrapped.
  WaveVector times(int m) const noexcept { return {m * k_, m * l_}; }

 private:
  double k_ = 0.0;
  double l_ = 0.0;
};

/// Symmetric 2x2 matrix.
struct Mat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  /// v^T M v
  double quadratic(double vx, double vy) const noexcept {
    return xx * vx * vx + 2.0 * xy * vx * vy + yy * vy * vy;
  }
};

struct GroupVelocity {
  double cx = 0.0;
  double cy = 0.0;
};

/// 2 - 2 cos k, evaluated as 4 sin^2(k/2).
double omega_x2(double k) noexcept;

double omega(WaveVector kv) noexcept;
GroupVelocity group_velocity(WaveVector kv);
Mat2 hessian(WaveVector kv);

bool nonresonance_check(WaveVector kv, double delta_res = kDefaultResonanceMargin) noexcept;

/// Everything the envelope equations need to know about a carrier.
struct DispersionData {
  WaveVector carrier;
  double omega0 = 0.0;
  GroupVelocity group_velocity;
  Mat2 hessian;
  /// Strain-u coefficient; absent when k0 = 0 (the u-strain envelope vanishes).
  std::optional<cplx> gamma_a;
  /// Strain-v coefficient; absent when l0 = 0.
  std::optional<cplx> gamma_b;
  /// Displacement coefficient of |A|^2 A in the envelope equation.
  cplx gamma_q;
  bool nonresonant = false;
  bool axis_degenerate_k = false;
  bool axis_degenerate_l = false;
};

/// Throws ZeroFrequency for the zero carrier. Axis-degenerate carriers are
/// reported through the flags, not as errors.
DispersionData nls_coefficients(WaveVector kv, double delta_res = kDefaultResonanceMargin);

/// Which lattice field an envelope describes.
enum class EnvelopeVariant { strain_u, strain_v, displacement };

/// Coefficient of |A|^2 A in dA/dT for the given variant: 4 gamma_a, 4 gamma_b
/// or gamma_q.
cplx envelope_nonlinearity(const DispersionData& d, EnvelopeVariant variant);

/// (e^{i l0} - 1) / (e^{i k0} - 1), so that B = ratio * A. AxisDegenerate when k0 = 0.
cplx b_over_a(WaveVector kv);
/// (e^{i k0} - 1) / (e^{i l0} - 1). AxisDegenerate when l0 = 0.
cplx a_over_b(WaveVector kv);

std::vector<cplx> amplitude_b_from_a(WaveVector kv, std::span<const cplx> a_hat);

/// Linear-solve factors for the third-order harmonics. With A1 = 2A the
/// correction amplitudes are
///   A_{1,-1} = c_1m1 (A1 * A_{-1} * A_{-1}),
///   A_{1, 3} = c_13  (A1 * A1 * A1),
///   A_{1,-3} = c_1m3 (A_{-1} * A_{-1} * A_{-1}),
/// where * is convolution in Fourier space (pointwise product in physical
/// space) and A_{-1} = conj(A1). For strain_v the triples are in B.
struct CorrectionAmplitudeCoefficients {
  cplx c_1m1;
  cplx c_13;
  cplx c_1m3;
};

/// i m omega(k0) - i branch * omega(m k0): the factor multiplying the
/// correction amplitude at harmonic m on the +1 (branch = 1) or -1 diagonal
/// branch.
cplx correction_denominator(WaveVector kv, int m, int branch = 1) noexcept;

CorrectionAmplitudeCoefficients correction_coefficients(WaveVector kv, EnvelopeVariant variant,
                                                        double delta_res = kDefaultResonanceMargin);

/// n(k1,k2,k3) = (e^{ik1}-1)(e^{ik2}-1)(e^{ik3}-1) + c.c.
double kernel_n(double k1, double k2, double k3) noexcept;
/// D = n(k1,k2,k3) + n(l1,l2,l3)
double kernel_D(WaveVector a, WaveVector b, WaveVector c) noexcept;

}  // namespace fput2d
