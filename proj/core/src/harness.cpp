#include "fput2d/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "fput2d/parallel.hpp"

namespace fput2d {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Two-sided 95% Student t quantiles for 1..30 degrees of freedom.
constexpr double kStudent95[30] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                   2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                   2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};

double student95(std::size_t dof) { return dof >= 1 && dof <= 30 ? kStudent95[dof - 1] : 1.96; }

EnvelopeVariant lead_variant(LatticeForm form) {
  return form == LatticeForm::strain ? EnvelopeVariant::strain_u : EnvelopeVariant::displacement;
}

EnvelopeField initial_envelope(const ExperimentPlan& plan, double box, EnvelopeVariant variant) {
  switch (plan.shape) {
    case EnvelopeShape::gaussian:
      return gaussian_envelope(plan.envelope_grid, box, variant, plan.amplitude, plan.sigma);
    case EnvelopeShape::plane_wave:
      return plane_wave_envelope(plan.envelope_grid, box, variant, plan.amplitude, plan.plane_px, plan.plane_py);
    case EnvelopeShape::zero:
      break;
  }
  return EnvelopeField::zeros(plan.envelope_grid, box, variant);
}

ForceLaw make_force(const ExperimentPlan& plan, double eps, std::size_t n) {
  switch (plan.force.kind) {
    case ForceKind::linear:
      return ForceLaw::linear();
    case ForceKind::perturbed:
      return ForceLaw::perturbed(eps, BondPerturbation::random(n, plan.force.bound, plan.force.seed),
                                 plan.force.bound);
    case ForceKind::cubic_baseline:
      break;
  }
  return ForceLaw::cubic();
}

double sup_error(const LatticeState& s, const AnsatzSample& a) {
  double worst = 0.0;
  if (s.form == LatticeForm::strain) {
    for (std::size_t k = 0; k < s.u.size(); ++k)
      worst = std::max(worst, std::abs(s.u[k] - a.psi_u[k]) + std::abs(s.v[k] - a.psi_v[k]) +
                                  std::abs(s.ut[k] - a.psi_ut[k]) + std::abs(s.vt[k] - a.psi_vt[k]));
  } else {
    for (std::size_t k = 0; k < s.q.size(); ++k)
      worst = std::max(worst, std::abs(s.q[k] - a.psi_q[k]) + std::abs(s.w[k] - a.psi_qt[k]));
  }
  return worst;
}

double edge_mass_fraction(const EnvelopeField& f) {
  double inner = 0.0, total = 0.0;
  const double cut = 0.4 * f.box_length;
  for (std::size_t i = 0; i < f.grid_side; ++i)
    for (std::size_t j = 0; j < f.grid_side; ++j) {
      const double m = std::norm(f.a(i, j));
      total += m;
      if (std::abs(f.coord(i)) <= cut && std::abs(f.coord(j)) <= cut) inner += m;
    }
  return total > 0.0 ? (total - inner) / total : 0.0;
}

}  // namespace

namespace {

void validate_common(const ExperimentPlan& plan) {
  if (!(plan.T0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "T0 must be positive");
  if (!(plan.dt_factor > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt_factor must be positive");
  if (plan.samples < 2) throw Error(ErrorKind::InvalidArgument, "at least two sample times are required");
  if (!(plan.box_length > 0.0)) throw Error(ErrorKind::InvalidArgument, "box length must be positive");
  if (!(plan.nls_dT > 0.0)) throw Error(ErrorKind::InvalidArgument, "nls_dT must be positive");
  if (plan.shape == EnvelopeShape::gaussian && !(plan.sigma > 0.0))
    throw Error(ErrorKind::InvalidArgument, "sigma must be positive");
  if (plan.carrier.is_zero()) throw Error(ErrorKind::ZeroFrequency, "the carrier must not be the zero wave vector");
  if (!nonresonance_check(plan.carrier, plan.delta_res))
    throw Error(ErrorKind::NonResonantCarrierRequired, "carrier violates 3 omega(k0) != omega(3 k0)");
  if (plan.form == LatticeForm::strain && plan.carrier.k() == 0.0)
    throw Error(ErrorKind::MissingB, "strain runs with k0 = 0 need a B envelope; use the displacement form");
}

void validate_eps(const ExperimentPlan& plan, double e) {
  if (!(e > 0.0 && e < 0.5)) throw Error(ErrorKind::InvalidArgument, "every eps must lie in (0, 0.5)");
  const double footprint = e * static_cast<double>(lattice_side(plan, e));
  if (plan.n_side_override > 0 && footprint > plan.box_length * (1.0 + 1e-12))
    throw Error(ErrorKind::FootprintExceeded, "eps * N exceeds the box length");
  if (footprint / static_cast<double>(plan.envelope_grid) > 0.5)
    throw Error(ErrorKind::InvalidArgument, "envelope grid too coarse for the lattice footprint");
  if (lattice_step(plan, e) > kMaxLatticeStep) throw Error(ErrorKind::InvalidArgument, "lattice dt exceeds 0.5");
}

}  // namespace

void validate_plan(const ExperimentPlan& plan) {
  if (plan.eps_list.size() < 3) throw Error(ErrorKind::InvalidArgument, "eps_list needs at least three values");
  for (std::size_t i = 1; i < plan.eps_list.size(); ++i)
    if (!(plan.eps_list[i] < plan.eps_list[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "eps_list must be descending");
  validate_common(plan);
  for (double e : plan.eps_list) validate_eps(plan, e);
}

void validate_run(const ExperimentPlan& plan, double eps) {
  validate_common(plan);
  validate_eps(plan, eps);
}

std::size_t lattice_side(const ExperimentPlan& plan, double eps) {
  if (plan.n_side_override > 0) return plan.n_side_override;
  auto n = static_cast<std::size_t>(std::llround(plan.box_length / eps));
  if (n % 2) ++n;
  return std::max(n, kMinLatticeSide);
}

double lattice_step(const ExperimentPlan& plan, double eps) {
  return plan.dt_override > 0.0 ? plan.dt_override : plan.dt_factor * eps;
}

std::vector<std::size_t> sample_steps(const ExperimentPlan& plan, double eps) {
  const double horizon = plan.T0 / (eps * eps);
  const auto total = static_cast<std::size_t>(std::floor(horizon / lattice_step(plan, eps) + 1e-9));
  std::vector<std::size_t> steps{0, total};
  const double phi = std::numbers::phi - 1.0;
  for (std::size_t j = 1; j + 1 < plan.samples; ++j) {
    const double f = std::fmod(static_cast<double>(j) * phi, 1.0);
    steps.push_back(static_cast<std::size_t>(std::floor(f * static_cast<double>(total))));
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

EpsRecord run_single(const ExperimentPlan& plan, double eps, const SampleObserver& observer) {
  validate_run(plan, eps);
  EpsRecord rec;
  rec.eps = eps;
  rec.n_side = lattice_side(plan, eps);
  rec.dt = lattice_step(plan, eps);
  const std::size_t n = rec.n_side;
  // The envelope box matches the lattice footprint so resampling is exact.
  rec.envelope_box = plan.n_side_override > 0 ? plan.box_length : eps * static_cast<double>(n);

  const DispersionData disp = nls_coefficients(plan.carrier, plan.delta_res);
  const EnvelopeVariant variant = lead_variant(plan.form);
  const bool linear = plan.force.kind == ForceKind::linear;
  NlsProblem problem = NlsProblem::from_dispersion(disp, variant, plan.nls_dT);
  if (linear) problem.nonlin_coeff = 0.0;

  const auto steps = sample_steps(plan, eps);
  rec.steps = steps.back();
  std::vector<double> slow_times;
  for (std::size_t k : steps) slow_times.push_back(eps * eps * (static_cast<double>(k) * rec.dt));

  NlsSolver solver(plan.envelope_grid, rec.envelope_box, problem);
  const auto envelopes =
      solver.evolve(initial_envelope(plan, rec.envelope_box, variant), slow_times, plan.blowup_guard);
  rec.edge_mass = edge_mass_fraction(envelopes.back());

  AnsatzOptions opts;
  opts.corrections = plan.corrections;
  opts.delta_res = plan.delta_res;
  opts.projection = plan.projection;
  opts.projection_threshold = plan.delta_proj;
  opts.linear_envelope = linear;
  AnsatzBuilder builder(disp, eps, n, opts);

  const ForceLaw force = make_force(plan, eps, n);
  InitialData init = builder.build_initial_data(envelopes.front(), plan.form);
  rec.projection = init.diagnostics;
  rec.residual_norm = builder.residual_norm(envelopes.front(), 0.0, plan.form, force);

  LatticeState state = std::move(init.state);
  VerletIntegrator integrator(force, rec.dt);
  const bool displacement = plan.form == LatticeForm::displacement;
  const double e0 = displacement ? energy(state, force) : kNaN;
  rec.energy_drift = displacement ? 0.0 : kNaN;
  rec.compat_defect_max = displacement ? kNaN : 0.0;

  std::size_t done = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    integrator.advance(state, steps[i] - done);
    done = steps[i];
    const double t = static_cast<double>(steps[i]) * rec.dt;
    state.time = t;
    const AnsatzSample a = builder.sample(envelopes[i], t, plan.form);
    SamplePoint p;
    p.t = t;
    p.sup_error = sup_error(state, a);
    p.max_amp = max_amplitude(state);
    if (displacement) {
      p.energy = energy(state, force);
      p.compat_defect = kNaN;
      if (e0 != 0.0) rec.energy_drift = std::max(rec.energy_drift, std::abs(p.energy - e0) / std::abs(e0));
    } else {
      p.energy = kNaN;
      p.compat_defect = compatibility_defect(state);
      rec.compat_defect_max = std::max(rec.compat_defect_max, p.compat_defect);
    }
    rec.max_error = std::max(rec.max_error, p.sup_error);
    rec.trajectory.push_back(p);
    if (observer) observer(i, state, envelopes[i], p);
  }
  return rec;
}

FitResult fit_order(std::span<const double> eps, std::span<const double> errors) {
  if (eps.size() != errors.size() || eps.size() < 3)
    throw Error(ErrorKind::InvalidArgument, "order fit needs at least three (eps, error) pairs");
  FitResult r;
  r.points = eps.size();
  r.at_floor = std::all_of(errors.begin(), errors.end(), [](double e) { return e <= kErrorFloor; });
  const bool any_floor = std::any_of(errors.begin(), errors.end(), [](double e) { return !(e > kErrorFloor); });
  if (any_floor) {
    r.degenerate = true;
    return r;
  }
  const auto n = static_cast<double>(eps.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be positive");
    mx += std::log(eps[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double dx = std::log(eps[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::InvalidArgument, "eps values must differ");
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double res = std::log(errors[i]) - (r.intercept + r.slope * std::log(eps[i]));
    ss += res * res;
  }
  r.residual_rms = std::sqrt(ss / n);
  const double se = std::sqrt(ss / (n - 2.0) / sxx);
  const double half = student95(eps.size() - 2) * se;
  r.ci_low = r.slope - half;
  r.ci_high = r.slope + half;
  r.degenerate = std::abs(r.slope) < 0.1;
  return r;
}

namespace {

void finish_report(ErrorReport& rep) {
  std::vector<double> eps, err;
  bool failed = false;
  for (const auto& r : rep.records) {
    eps.push_back(r.eps);
    err.push_back(r.max_error);
    failed = failed || r.error.has_value();
  }
  if (failed) {
    rep.pass = false;
    return;
  }
  rep.fit = fit_order(eps, err);
  if (rep.fit.at_floor)
    rep.pass = true;
  else
    rep.pass = !rep.fit.degenerate && rep.fit.slope >= rep.plan.order_threshold;
}

}  // namespace

ErrorReport run_sweep(const ExperimentPlan& plan) {
  validate_plan(plan);
  const auto start = std::chrono::steady_clock::now();
  ErrorReport rep;
  rep.plan = plan;
  rep.records.resize(plan.eps_list.size());

  const int budget = plan.threads > 0 ? plan.threads : available_threads();
  const int workers = std::max(1, std::min<int>(budget, static_cast<int>(plan.eps_list.size())));
  const int per_worker = std::max(1, budget / workers);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    set_loop_threads(per_worker);
    for (std::size_t i = next++; i < plan.eps_list.size(); i = next++) {
      const double e = plan.eps_list[i];
      try {
        rep.records[i] = run_single(plan, e);
      } catch (const Error& err) {
        EpsRecord r;
        r.eps = e;
        r.n_side = lattice_side(plan, e);
        r.dt = lattice_step(plan, e);
        r.error = err.kind();
        r.error_message = err.what();
        rep.records[i] = std::move(r);
      } catch (const std::exception& err) {
        EpsRecord r;
        r.eps = e;
        r.error = ErrorKind::InvalidArgument;
        r.error_message = err.what();
        rep.records[i] = std::move(r);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  finish_report(rep);
  rep.config_hash = fnv1a_hex(plan_json(plan));
  rep.version = library_version();
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ResidualReport residual_sweep(const ExperimentPlan& plan) {
  validate_plan(plan);
  ResidualReport rep;
  rep.corrections = plan.corrections;
  const DispersionData disp = nls_coefficients(plan.carrier, plan.delta_res);
  const EnvelopeVariant variant = lead_variant(plan.form);
  std::vector<double> norms;
  for (double e : plan.eps_list) {
    ResidualRecord r;
    r.eps = e;
    r.n_side = lattice_side(plan, e);
    const double box = plan.n_side_override > 0 ? plan.box_length : e * static_cast<double>(r.n_side);
    AnsatzOptions opts;
    opts.corrections = plan.corrections;
    opts.delta_res = plan.delta_res;
    opts.projection = plan.projection;
    opts.projection_threshold = plan.delta_proj;
    opts.linear_envelope = plan.force.kind == ForceKind::linear;
    AnsatzBuilder builder(disp, e, r.n_side, opts);
    r.residual_norm = builder.residual_norm(initial_envelope(plan, box, variant), 0.0, plan.form,
                                            make_force(plan, e, r.n_side));
    norms.push_back(r.residual_norm);
    rep.records.push_back(r);
  }
  rep.fit = fit_order(plan.eps_list, norms);
  return rep;
}

ErrorReport synthetic_sweep(const ExperimentPlan& plan) {
  ErrorReport rep;
  rep.plan = plan;
  rep.synthetic = true;
  for (double e : plan.eps_list) {
    EpsRecord r;
    r.eps = e;
    r.max_error = e * e;
    r.trajectory.push_back({0.0, e * e, kNaN, kNaN, 0.0});
    rep.records.push_back(std::move(r));
  }
  finish_report(rep);
  rep.config_hash = fnv1a_hex(plan_json(plan));
  rep.version = library_version();
  return rep;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

std::string library_version() {
#ifdef FPUT2D_VERSION
  return FPUT2D_VERSION;
#else
  return "unknown";
#endif
}

}  // namespace fput2d
