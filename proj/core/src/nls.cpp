#include "fput2d/nls.hpp"

#include <bit>
#include <cmath>

#include "fput2d/errors.hpp"

namespace fput2d {

namespace {

constexpr cplx kI{0.0, 1.0};

void check_grid(std::size_t side, double length) {
  if (side < 2 || !std::has_single_bit(side))
    throw Error(ErrorKind::InvalidArgument, "envelope grid side must be a power of two");
  if (!(length > 0.0) || length / static_cast<double>(side) > 0.5)
    throw Error(ErrorKind::InvalidArgument, "envelope spacing L/M must lie in (0, 0.5]");
}

}  // namespace

EnvelopeField EnvelopeField::zeros(std::size_t grid_side, double box_length, EnvelopeVariant variant) {
  check_grid(grid_side, box_length);
  EnvelopeField f;
  f.grid_side = grid_side;
  f.box_length = box_length;
  f.a = ComplexGrid(grid_side);
  f.variant = variant;
  return f;
}

EnvelopeField gaussian_envelope(std::size_t grid_side, double box_length, EnvelopeVariant variant,
                                double amplitude, double sigma) {
  EnvelopeField f = EnvelopeField::zeros(grid_side, box_length, variant);
  const double s2 = sigma * sigma;
  for (std::size_t i = 0; i < grid_side; ++i) {
    const double x = f.coord(i);
    for (std::size_t j = 0; j < grid_side; ++j) {
      const double y = f.coord(j);
      f.a(i, j) = amplitude * std::exp(-(x * x + y * y) / s2);
    }
  }
  return f;
}

EnvelopeField plane_wave_envelope(std::size_t grid_side, double box_length, EnvelopeVariant variant,
                                  double amplitude, int px, int py) {
  EnvelopeField f = EnvelopeField::zeros(grid_side, box_length, variant);
  const double kx = 2.0 * kPi * px / box_length;
  const double ky = 2.0 * kPi * py / box_length;
  for (std::size_t i = 0; i < grid_side; ++i)
    for (std::size_t j = 0; j < grid_side; ++j)
      f.a(i, j) = amplitude * std::polar(1.0, kx * f.coord(i) + ky * f.coord(j));
  return f;
}

NlsProblem NlsProblem::from_dispersion(const DispersionData& d, EnvelopeVariant variant, double dT) {
  return {d.hessian, envelope_nonlinearity(d, variant), dT};
}

NlsSolver::NlsSolver(std::size_t grid_side, double box_length, NlsProblem problem)
    : side_(grid_side), length_(box_length), problem_(problem), fft_((check_grid(grid_side, box_length), grid_side)) {
  if (problem_.nonlin_coeff.real() != 0.0)
    throw Error(ErrorKind::InvalidArgument, "nonlinear coefficient must be purely imaginary");
  if (!(problem_.dT > 0.0)) throw Error(ErrorKind::InvalidArgument, "slow-time step must be positive");

  k_.resize(side_);
  for (std::size_t j = 0; j < side_; ++j) {
    // The Nyquist slot has no well-defined sign; it is treated as a zero mode.
    const bool nyquist = 2 * j == side_;
    k_[j] = nyquist ? 0.0 : 2.0 * kPi * static_cast<double>(signed_index(j, side_)) / length_;
  }
  symbol_.resize(side_ * side_);
  for (std::size_t i = 0; i < side_; ++i)
    for (std::size_t j = 0; j < side_; ++j) symbol_[i * side_ + j] = 0.5 * problem_.hessian.quadratic(k_[i], k_[j]);
}

void NlsSolver::check_field(const EnvelopeField& f) const {
  if (f.grid_side != side_ || f.a.side() != side_ || f.box_length != length_)
    throw Error(ErrorKind::InvalidArgument, "envelope field does not match the solver grid");
}

void NlsSolver::ensure_multiplier(double half_dT) {
  if (!multiplier_.empty() && multiplier_step_ == half_dT) return;
  multiplier_.resize(symbol_.size());
  const double norm = 1.0 / static_cast<double>(side_ * side_);
  for (std::size_t k = 0; k < symbol_.size(); ++k) multiplier_[k] = norm * std::polar(1.0, half_dT * symbol_[k]);
  multiplier_step_ = half_dT;
}

void NlsSolver::linear_flow(EnvelopeField& f, double dT) {
  check_field(f);
  ensure_multiplier(dT);
  fft_.forward(f.a);
  for (std::size_t k = 0; k < multiplier_.size(); ++k) f.a[k] *= multiplier_[k];
  fft_.backward(f.a);
}

void NlsSolver::linear_halfstep(EnvelopeField& f) { linear_flow(f, 0.5 * problem_.dT); }

void NlsSolver::nonlinear_step(EnvelopeField& f, double dT) const {
  check_field(f);
  const double g = problem_.nonlin_coeff.imag();
  for (cplx& z : f.a) z *= std::polar(1.0, g * std::norm(z) * dT);
}

void NlsSolver::strang_step(EnvelopeField& f) { strang_step(f, problem_.dT); }

void NlsSolver::strang_step(EnvelopeField& f, double dT) {
  linear_flow(f, 0.5 * dT);
  nonlinear_step(f, dT);
  linear_flow(f, 0.5 * dT);
  f.slow_time += dT;
}

ComplexGrid NlsSolver::linear_part(const ComplexGrid& a) const {
  ComplexGrid out = a;
  fft_.forward(out);
  const double norm = 1.0 / static_cast<double>(side_ * side_);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= kI * (symbol_[k] * norm);
  fft_.backward(out);
  return out;
}

ComplexGrid NlsSolver::rhs(const ComplexGrid& a) const {
  ComplexGrid out = linear_part(a);
  const cplx g = problem_.nonlin_coeff;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += g * std::norm(a[k]) * a[k];
  return out;
}

ComplexGrid NlsSolver::second_derivative(const ComplexGrid& a, const ComplexGrid& a_t) const {
  ComplexGrid out = linear_part(a_t);
  const cplx g = problem_.nonlin_coeff;
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] += g * (2.0 * std::norm(a[k]) * a_t[k] + a[k] * a[k] * std::conj(a_t[k]));
  return out;
}

void NlsSolver::gradient(const ComplexGrid& a, ComplexGrid& ax, ComplexGrid& ay) const {
  ComplexGrid spec = a;
  fft_.forward(spec);
  const double norm = 1.0 / static_cast<double>(side_ * side_);
  ax = spec;
  ay = spec;
  for (std::size_t i = 0; i < side_; ++i)
    for (std::size_t j = 0; j < side_; ++j) {
      ax(i, j) *= kI * (k_[i] * norm);
      ay(i, j) *= kI * (k_[j] * norm);
    }
  fft_.backward(ax);
  fft_.backward(ay);
}

double NlsSolver::mass(const EnvelopeField& f) const {
  check_field(f);
  double s = 0.0;
  for (const cplx& z : f.a) s += std::norm(z);
  const double h = f.spacing();
  return s * h * h;
}

double NlsSolver::h4proxy(const EnvelopeField& f) const {
  check_field(f);
  ComplexGrid spec = f.a;
  fft_.forward(spec);
  double s = 0.0;
  for (std::size_t i = 0; i < side_; ++i)
    for (std::size_t j = 0; j < side_; ++j) {
      const double w = 1.0 + k_[i] * k_[i] + k_[j] * k_[j];
      s += w * w * w * w * std::norm(spec(i, j));
    }
  return std::sqrt(s) * f.spacing() / static_cast<double>(side_);
}

std::vector<EnvelopeField> NlsSolver::evolve(EnvelopeField f, std::span<const double> sample_times,
                                             double blowup_guard) {
  check_field(f);
  std::vector<EnvelopeField> out;
  out.reserve(sample_times.size());
  auto guard = [&](const EnvelopeField& g) {
    for (const cplx& z : g.a)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error(ErrorKind::EnvelopeBlowup, "envelope became non-finite at T = " + std::to_string(g.slow_time));
    const double h4 = h4proxy(g);
    if (!(h4 <= blowup_guard))
      throw Error(ErrorKind::EnvelopeBlowup,
                  "H4 proxy " + std::to_string(h4) + " exceeds guard at T = " + std::to_string(g.slow_time));
  };
  guard(f);
  const double dT = problem_.dT;
  for (double target : sample_times) {
    if (target < f.slow_time - 1e-14)
      throw Error(ErrorKind::InvalidArgument, "sample times must be ascending and not before the start");
    const double span = target - f.slow_time;
    // Full steps of size dT, then one shorter step onto the sample.
    const auto full = static_cast<std::size_t>(std::floor(span / dT * (1.0 + 1e-12)));
    const double start = f.slow_time;
    for (std::size_t s = 0; s < full; ++s) strang_step(f, dT);
    const double rest = target - (start + static_cast<double>(full) * dT);
    if (rest > 1e-15 * std::max(1.0, std::abs(target))) strang_step(f, rest);
    f.slow_time = target;
    guard(f);
    out.push_back(f);
  }
  return out;
}

}  // namespace fput2d
