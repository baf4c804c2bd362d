#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fput2d/ansatz.hpp"
#include "fput2d/dispersion.hpp"
#include "fput2d/errors.hpp"
#include "fput2d/lattice.hpp"
#include "fput2d/nls.hpp"

namespace fput2d {

struct ForceSpec {
  ForceKind kind = ForceKind::cubic_baseline;
  double bound = 1.0;
  std::uint64_t seed = 20240917;
};

enum class EnvelopeShape { gaussian, plane_wave, zero };

/// Everything needed to run an eps sweep. Lattice side and step follow the
/// rules N = round(L / eps) rounded up to even and dt = dt_factor * eps
/// unless overridden.
struct ExperimentPlan {
  WaveVector carrier{kPi / 2, kPi / 2};
  LatticeForm form = LatticeForm::strain;
  ForceSpec force;
  std::vector<double> eps_list{0.2, 0.14, 0.1};
  double T0 = 1.0;
  double dt_factor = 0.25;
  double dt_override = 0.0;        // > 0 replaces the dt rule
  std::size_t n_side_override = 0;  // > 0 replaces the N rule
  double box_length = 40.0;
  std::size_t envelope_grid = 256;
  double nls_dT = 1e-3;
  bool corrections = false;
  std::size_t samples = 20;
  EnvelopeShape shape = EnvelopeShape::gaussian;
  double amplitude = 1.0;
  double sigma = 4.0;
  int plane_px = 1;
  int plane_py = 0;
  double blowup_guard = kDefaultBlowupGuard;
  double order_threshold = 1.8;
  double delta_res = kDefaultResonanceMargin;
  double delta_proj = kDefaultProjectionThreshold;
  ProjectionKind projection = ProjectionKind::oblique;
  int threads = 0;  // 0: all available
};

/// InvalidArgument on inconsistent plans; NonResonantCarrierRequired for
/// carriers failing the non-resonance check; ZeroFrequency for the origin.
void validate_plan(const ExperimentPlan& plan);

/// The checks of validate_plan that apply to a single eps; eps_list is ignored.
void validate_run(const ExperimentPlan& plan, double eps);

std::size_t lattice_side(const ExperimentPlan& plan, double eps);
double lattice_step(const ExperimentPlan& plan, double eps);

/// Sample times in [0, T0/eps^2] as multiples of dt: t = 0, the final time,
/// and points at golden-ratio fractions of the horizon in between. Returned
/// as step counts, ascending and unique.
std::vector<std::size_t> sample_steps(const ExperimentPlan& plan, double eps);

struct SamplePoint {
  double t = 0.0;
  double sup_error = 0.0;
  double energy = 0.0;         // nan in strain form
  double compat_defect = 0.0;  // nan in displacement form
  double max_amp = 0.0;
};

struct EpsRecord {
  double eps = 0.0;
  std::size_t n_side = 0;
  double dt = 0.0;
  std::size_t steps = 0;
  double envelope_box = 0.0;
  std::vector<SamplePoint> trajectory;
  double max_error = 0.0;
  double residual_norm = 0.0;
  double energy_drift = 0.0;       // relative; nan in strain form
  double compat_defect_max = 0.0;  // nan in displacement form
  double edge_mass = 0.0;          // envelope mass fraction outside the inner 80% of the box
  ProjectionDiagnostics projection;
  std::optional<ErrorKind> error;
  std::string error_message;
};

/// Called at each sample time with the sample index, the lattice state, the
/// envelope and the recorded point.
using SampleObserver =
    std::function<void(std::size_t, const LatticeState&, const EnvelopeField&, const SamplePoint&)>;

/// Runs one eps: NLS to T0, compatible initial data, lattice to T0 / eps^2,
/// sup error at the sample times. Library errors propagate.
EpsRecord run_single(const ExperimentPlan& plan, double eps, const SampleObserver& observer = {});

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double residual_rms = 0.0;
  std::size_t points = 0;
  bool degenerate = false;  // errors at the floor or no measurable slope
  bool at_floor = false;    // every error below the floor
};

inline constexpr double kErrorFloor = 1e-12;

/// Least-squares slope of log(error) against log(eps), with a 95% interval.
/// InvalidArgument with fewer than three points or non-positive eps.
FitResult fit_order(std::span<const double> eps, std::span<const double> errors);

struct ErrorReport {
  ExperimentPlan plan;
  std::vector<EpsRecord> records;
  FitResult fit;
  bool pass = false;
  bool synthetic = false;
  std::string config_hash;
  std::string version;
  double wall_time_s = 0.0;
};

/// Runs every eps on a bounded worker pool and fits the order. Per-eps
/// failures are recorded, not thrown; a sweep with failures does not pass.
ErrorReport run_sweep(const ExperimentPlan& plan);

struct ResidualRecord {
  double eps = 0.0;
  std::size_t n_side = 0;
  double residual_norm = 0.0;
};

struct ResidualReport {
  bool corrections = false;
  std::vector<ResidualRecord> records;
  FitResult fit;
};

/// Residual norm of the t = 0 ansatz for every eps of the plan and the fitted
/// order; corrections follow plan.corrections.
ResidualReport residual_sweep(const ExperimentPlan& plan);

/// Self-test: records with errors = eps^2 and no simulation.
ErrorReport synthetic_sweep(const ExperimentPlan& plan);

/// Stable-order JSON for the plan and the report, the order-fit TSV
/// (log_eps, log_maxerr) and a per-eps trajectory CSV
/// (t, sup_error, energy, compat_defect).
std::string plan_json(const ExperimentPlan& plan);
std::string report_json(const ErrorReport& report, bool include_wall_time = true);
std::string order_fit_tsv(const ErrorReport& report);
std::string trajectory_csv(const EpsRecord& record);
std::string residual_json(const ResidualReport& report);

/// Carrier coefficients as a JSON object with fields omega0, cx, cy, hess,
/// gamma_a_im, gamma_b_im, gamma_q_im, nonresonant, axis_degenerate_k,
/// axis_degenerate_l (absent gammas are null).
std::string coefficients_json(const DispersionData& d);

/// FNV-1a 64-bit hash of a string, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

std::string library_version();

}  // namespace fput2d
