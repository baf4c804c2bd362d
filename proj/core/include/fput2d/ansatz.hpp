#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>

#include "fput2d/dispersion.hpp"
#include "fput2d/fft.hpp"
#include "fput2d/lattice.hpp"
#include "fput2d/nls.hpp"

namespace fput2d {

inline constexpr double kDefaultProjectionThreshold = 1e-9;

enum class ProjectionKind { oblique, orthogonal };

/// Modewise compatibility projection on N x N lattice spectra (slot j has
/// wavenumber 2 pi j / N). With a = e^{ik} - 1, b = e^{il} - 1:
///   oblique     (U, V) -> (a, b) (a U + b V) / (a^2 + b^2)
///   orthogonal  (U, V) -> (a, b) (conj(a) U + conj(b) V) / (|a|^2 + |b|^2)
/// Modes whose denominator is below the threshold in magnitude are left
/// untouched. Every spectrum pair passed in is projected with the same map.
/// Returns the number of untouched modes.
std::size_t compat_project(ComplexGrid& u_hat, ComplexGrid& ut_hat, ComplexGrid& v_hat, ComplexGrid& vt_hat,
                           ProjectionKind kind = ProjectionKind::oblique,
                           double threshold = kDefaultProjectionThreshold);

/// Single-pair form of the projection above.
std::size_t compat_project(ComplexGrid& u_hat, ComplexGrid& v_hat, ProjectionKind kind = ProjectionKind::oblique,
                           double threshold = kDefaultProjectionThreshold);

/// Evaluates an envelope grid function at the lattice points
/// X_m = eps (m - N/2 + shift). When eps N equals the box length this is an
/// exact zero-padded (or truncated) spectral interpolation through one N x N
/// FFT; otherwise a separable trigonometric sum over the envelope spectrum.
class EnvelopeResampler {
 public:
  /// FootprintExceeded when eps * n_side exceeds the box length.
  EnvelopeResampler(std::size_t grid_side, double box_length, std::size_t n_side, double eps);

  bool exact_fit() const noexcept { return exact_; }

  /// shift_x, shift_y in lattice units (c_x t, c_y t).
  ComplexGrid resample(const ComplexGrid& f, double shift_x, double shift_y);

 private:
  std::size_t m_, n_;
  double length_, eps_;
  bool exact_;
  Fft2 env_fft_;
  std::optional<Fft2> lat_fft_;
};

/// Lattice samples of the ansatz and its exact time derivatives. Strain
/// fields are filled for strain samples, q fields for displacement samples;
/// second derivatives only when requested.
struct AnsatzSample {
  double eps = 0.0;
  WaveVector carrier;
  double t = 0.0;
  LatticeForm form = LatticeForm::strain;
  RealGrid psi_u, psi_v, psi_ut, psi_vt;
  RealGrid psi_q, psi_qt;
  RealGrid psi_utt, psi_vtt, psi_qtt;

  /// Lattice state holding the ansatz values at time t.
  LatticeState as_state() const;
};

/// Third-harmonic correction fields on the envelope grid, for one variant:
/// a_m = 4 c_m T_m with T_{-1} = A conj(A)^2, T_3 = A^3, T_{-3} = conj(A)^3.
struct CorrectionSet {
  ComplexGrid a_1m1, a_13, a_1m3;
  bool include = false;
};
CorrectionSet build_corrections(const ComplexGrid& a, const CorrectionAmplitudeCoefficients& c);

struct ProjectionDiagnostics {
  std::size_t degenerate_modes = 0;
  double max_projection_displacement = 0.0;
};

struct InitialData {
  LatticeState state;
  ProjectionDiagnostics diagnostics;
};

struct AnsatzOptions {
  bool corrections = false;
  double delta_res = kDefaultResonanceMargin;
  ProjectionKind projection = ProjectionKind::oblique;
  double projection_threshold = kDefaultProjectionThreshold;
  /// Drops the cubic term of the envelope equation (for the linear force).
  bool linear_envelope = false;
};

/// Builds lattice samples from envelope fields at a fixed carrier, eps and
/// lattice size. Owns FFT plans and NLS evaluators; one instance per thread.
class AnsatzBuilder {
 public:
  AnsatzBuilder(const DispersionData& disp, double eps, std::size_t n_side, AnsatzOptions options = {});

  /// Ansatz at lattice time t from the envelope at slow time eps^2 t. For the
  /// strain form env is the A field (variant strain_u); env_b optionally
  /// supplies B (variant strain_v), which is required when k0 = 0. For the
  /// displacement form env has variant displacement.
  AnsatzSample sample(const EnvelopeField& env, double t, LatticeForm form, const EnvelopeField* env_b = nullptr,
                      bool with_acceleration = false);

  /// Ansatz at t = 0, projected onto compatible strain data for the strain
  /// form.
  InitialData build_initial_data(const EnvelopeField& env, LatticeForm form, const EnvelopeField* env_b = nullptr);

  /// (1/N^2) sum |DFT(psi_tt - rhs(psi))| over the fields of the form. For
  /// the strain form the ansatz is projected first.
  double residual_norm(const EnvelopeField& env, double t, LatticeForm form, const ForceLaw& force,
                       const EnvelopeField* env_b = nullptr);

  /// Projects the strain fields of a sample in place; returns diagnostics.
  ProjectionDiagnostics project(AnsatzSample& s);

  const DispersionData& dispersion() const noexcept { return disp_; }
  double eps() const noexcept { return eps_; }
  std::size_t n_side() const noexcept { return n_; }

 private:
  NlsSolver& solver_for(const EnvelopeField& env);
  EnvelopeResampler& resampler_for(const EnvelopeField& env);
  void add_carrier(const EnvelopeField& env, double t, const cplx& scale, const CorrectionAmplitudeCoefficients* cc,
                   RealGrid& psi, RealGrid& psi_t, RealGrid* psi_tt);

  DispersionData disp_;
  double eps_;
  std::size_t n_;
  AnsatzOptions options_;
  Fft2 lattice_fft_;
  std::map<int, std::unique_ptr<NlsSolver>> solvers_;
  std::unique_ptr<EnvelopeResampler> resampler_;
  std::size_t resampler_m_ = 0;
  double resampler_l_ = 0.0;
};

}  // namespace fput2d
