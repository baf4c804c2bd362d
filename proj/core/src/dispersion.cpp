#include "fput2d/dispersion.hpp"

#include <cmath>

#include "fput2d/errors.hpp"

namespace fput2d {

namespace {

constexpr cplx kI{0.0, 1.0};

cplx expm1_i(double x) { return std::polar(1.0, x) - 1.0; }

double require_frequency(WaveVector kv) {
  const double w = omega(kv);
  if (w == 0.0) throw Error(ErrorKind::ZeroFrequency, "omega vanishes at the zero wave vector");
  return w;
}

// (e^{ik}-1)(1-e^{-il}): the coupling of v into the u equation.
cplx rho_u(WaveVector kv) { return expm1_i(kv.k()) * (1.0 - std::polar(1.0, -kv.l())); }
// (e^{il}-1)(1-e^{-ik}): the coupling of u into the v equation.
cplx rho_v(WaveVector kv) { return expm1_i(kv.l()) * (1.0 - std::polar(1.0, -kv.k())); }

}  // namespace

double wrap_angle(double x) noexcept {
  double r = std::remainder(x, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double omega_x2(double k) noexcept {
  const double s = std::sin(0.5 * k);
  return 4.0 * s * s;
}

double omega(WaveVector kv) noexcept { return std::sqrt(omega_x2(kv.k()) + omega_x2(kv.l())); }

GroupVelocity group_velocity(WaveVector kv) {
  const double w = require_frequency(kv);
  return {std::sin(kv.k()) / w, std::sin(kv.l()) / w};
}

Mat2 hessian(WaveVector kv) {
  const double w = require_frequency(kv);
  const double w3 = w * w * w;
  const double sk = std::sin(kv.k());
  const double sl = std::sin(kv.l());
  return {std::cos(kv.k()) / w - sk * sk / w3, -sk * sl / w3, std::cos(kv.l()) / w - sl * sl / w3};
}

bool nonresonance_check(WaveVector kv, double delta_res) noexcept {
  const double w3 = omega(kv.times(3));
  return w3 > 0.0 && std::abs(3.0 * omega(kv) - w3) > delta_res;
}

DispersionData nls_coefficients(WaveVector kv, double delta_res) {
  DispersionData d;
  d.carrier = kv;
  d.omega0 = require_frequency(kv);
  d.group_velocity = group_velocity(kv);
  d.hessian = hessian(kv);

  const double wx2 = omega_x2(kv.k());
  const double wy2 = omega_x2(kv.l());
  const double quartic = 3.0 * (wx2 * wx2 + wy2 * wy2);
  d.axis_degenerate_k = kv.k() == 0.0;
  d.axis_degenerate_l = kv.l() == 0.0;
  if (!d.axis_degenerate_k) d.gamma_a = -kI * (quartic / (8.0 * d.omega0 * wx2));
  if (!d.axis_degenerate_l) d.gamma_b = -kI * (quartic / (8.0 * d.omega0 * wy2));
  d.gamma_q = -kI * (quartic / (2.0 * d.omega0));
  d.nonresonant = nonresonance_check(kv, delta_res);
  return d;
}

cplx envelope_nonlinearity(const DispersionData& d, EnvelopeVariant variant) {
  switch (variant) {
    case EnvelopeVariant::strain_u:
      if (!d.gamma_a) throw Error(ErrorKind::AxisDegenerate, "gamma_a undefined for k0 = 0");
      return 4.0 * *d.gamma_a;
    case EnvelopeVariant::strain_v:
      if (!d.gamma_b) throw Error(ErrorKind::AxisDegenerate, "gamma_b undefined for l0 = 0");
      return 4.0 * *d.gamma_b;
    case EnvelopeVariant::displacement:
      return d.gamma_q;
  }
  return {};
}

cplx b_over_a(WaveVector kv) {
  if (kv.k() == 0.0) throw Error(ErrorKind::AxisDegenerate, "e^{ik0} = 1; derive A from B instead");
  return expm1_i(kv.l()) / expm1_i(kv.k());
}

cplx a_over_b(WaveVector kv) {
  if (kv.l() == 0.0) throw Error(ErrorKind::AxisDegenerate, "e^{il0} = 1; derive B from A instead");
  return expm1_i(kv.k()) / expm1_i(kv.l());
}

std::vector<cplx> amplitude_b_from_a(WaveVector kv, std::span<const cplx> a_hat) {
  const cplx r = b_over_a(kv);
  std::vector<cplx> out(a_hat.size());
  for (std::size_t i = 0; i < a_hat.size(); ++i) out[i] = r * a_hat[i];
  return out;
}

cplx correction_denominator(WaveVector kv, int m, int branch) noexcept {
  return kI * (m * omega(kv)) - kI * (branch * omega(kv.times(m)));
}

CorrectionAmplitudeCoefficients correction_coefficients(WaveVector kv, EnvelopeVariant variant,
                                                        double delta_res) {
  const double w0 = require_frequency(kv);
  if (!nonresonance_check(kv, delta_res))
    throw Error(ErrorKind::Resonant, "3 omega(k0) = omega(3 k0) or omega(3 k0) = 0");
  const double w3 = omega(kv.times(3));
  const WaveVector k3 = kv.times(3);

  cplx rhs_m1, rhs_3, rhs_m3;
  switch (variant) {
    case EnvelopeVariant::strain_u: {
      const cplx r = b_over_a(kv);
      const double wx2 = omega_x2(kv.k());
      const double wx2_3 = omega_x2(k3.k());
      rhs_m1 = 3.0 * (wx2 - rho_u(-kv) * r * std::conj(r) * std::conj(r)) / (8.0 * kI * w0);
      rhs_3 = (wx2_3 - rho_u(k3) * r * r * r) / (8.0 * kI * w3);
      rhs_m3 = (wx2_3 - rho_u(-k3) * std::pow(std::conj(r), 3)) / (8.0 * kI * w3);
      break;
    }
    case EnvelopeVariant::strain_v: {
      const cplx s = a_over_b(kv);
      const double wy2 = omega_x2(kv.l());
      const double wy2_3 = omega_x2(k3.l());
      rhs_m1 = 3.0 * (wy2 - rho_v(-kv) * s * std::conj(s) * std::conj(s)) / (8.0 * kI * w0);
      rhs_3 = (wy2_3 - rho_v(k3) * s * s * s) / (8.0 * kI * w3);
      rhs_m3 = (wy2_3 - rho_v(-k3) * std::pow(std::conj(s), 3)) / (8.0 * kI * w3);
      break;
    }
    case EnvelopeVariant::displacement: {
      rhs_m1 = -3.0 * kernel_D(kv, -kv, -kv) / (8.0 * kI * w0);
      rhs_3 = -kernel_D(kv, kv, kv) / (8.0 * kI * w3);
      rhs_m3 = -kernel_D(-kv, -kv, -kv) / (8.0 * kI * w3);
      break;
    }
  }

  const cplx d_m1 = correction_denominator(kv, -1);
  const cplx d_3 = correction_denominator(kv, 3);
  const cplx d_m3 = correction_denominator(kv, -3);
  for (const cplx& den : {d_m1, d_3, d_m3})
    if (std::abs(den) < delta_res) throw Error(ErrorKind::Resonant, "correction denominator below margin");
  return {rhs_m1 / d_m1, rhs_3 / d_3, rhs_m3 / d_m3};
}

double kernel_n(double k1, double k2, double k3) noexcept {
  return 2.0 * (expm1_i(k1) * expm1_i(k2) * expm1_i(k3)).real();
}

double kernel_D(WaveVector a, WaveVector b, WaveVector c) noexcept {
  return kernel_n(a.k(), b.k(), c.k()) + kernel_n(a.l(), b.l(), c.l());
}

}  // namespace fput2d
