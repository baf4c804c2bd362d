#include <cmath>
#include <iomanip>
#include <sstream>

#include "fput2d/harness.hpp"
#include "json.hpp"

namespace fput2d {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* form_name(LatticeForm f) { return f == LatticeForm::strain ? "strain" : "displacement"; }

const char* force_name(ForceKind k) {
  switch (k) {
    case ForceKind::perturbed:
      return "perturbed";
    case ForceKind::linear:
      return "linear";
    case ForceKind::cubic_baseline:
      break;
  }
  return "cubic";
}

const char* shape_name(EnvelopeShape s) {
  switch (s) {
    case EnvelopeShape::plane_wave:
      return "plane_wave";
    case EnvelopeShape::zero:
      return "zero";
    case EnvelopeShape::gaussian:
      break;
  }
  return "gaussian";
}

// NaN and infinities become null.
ordered_json num(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json plan_object(const ExperimentPlan& p) {
  ordered_json j;
  j["carrier_k_pi"] = p.carrier.k() / kPi;
  j["carrier_l_pi"] = p.carrier.l() / kPi;
  j["form"] = form_name(p.form);
  j["force"] = force_name(p.force.kind);
  j["force_bound"] = p.force.bound;
  j["seed"] = p.force.seed;
  j["eps_list"] = p.eps_list;
  j["T0"] = p.T0;
  j["dt_factor"] = p.dt_factor;
  j["dt"] = p.dt_override;
  j["n_side"] = p.n_side_override;
  j["box_length"] = p.box_length;
  j["envelope_grid"] = p.envelope_grid;
  j["nls_dT"] = p.nls_dT;
  j["corrections"] = p.corrections;
  j["samples"] = p.samples;
  j["envelope"] = shape_name(p.shape);
  j["amplitude"] = p.amplitude;
  j["sigma"] = p.sigma;
  j["plane_px"] = p.plane_px;
  j["plane_py"] = p.plane_py;
  j["blowup_guard"] = p.blowup_guard;
  j["order_threshold"] = p.order_threshold;
  j["delta_res"] = p.delta_res;
  j["delta_proj"] = p.delta_proj;
  j["projection"] = p.projection == ProjectionKind::oblique ? "oblique" : "orthogonal";
  return j;
}

ordered_json coefficients_object(const DispersionData& d) {
  ordered_json j;
  j["omega0"] = d.omega0;
  j["cx"] = d.group_velocity.cx;
  j["cy"] = d.group_velocity.cy;
  j["hess"] = {{d.hessian.xx, d.hessian.xy}, {d.hessian.xy, d.hessian.yy}};
  j["gamma_a_im"] = d.gamma_a ? ordered_json(d.gamma_a->imag()) : ordered_json(nullptr);
  j["gamma_b_im"] = d.gamma_b ? ordered_json(d.gamma_b->imag()) : ordered_json(nullptr);
  j["gamma_q_im"] = d.gamma_q.imag();
  j["nonresonant"] = d.nonresonant;
  j["axis_degenerate_k"] = d.axis_degenerate_k;
  j["axis_degenerate_l"] = d.axis_degenerate_l;
  return j;
}

}  // namespace

std::string plan_json(const ExperimentPlan& plan) { return plan_object(plan).dump(); }

std::string coefficients_json(const DispersionData& d) { return coefficients_object(d).dump(2); }

std::string report_json(const ErrorReport& rep, bool include_wall_time) {
  ordered_json j;
  j["pass"] = rep.pass;
  j["synthetic"] = rep.synthetic;
  ordered_json fit;
  fit["order"] = num(rep.fit.slope);
  fit["ci95"] = {num(rep.fit.ci_low), num(rep.fit.ci_high)};
  fit["intercept"] = num(rep.fit.intercept);
  fit["residual_rms"] = num(rep.fit.residual_rms);
  fit["points"] = rep.fit.points;
  fit["degenerate_fit"] = rep.fit.degenerate;
  fit["at_floor"] = rep.fit.at_floor;
  fit["threshold"] = rep.plan.order_threshold;
  j["fit"] = fit;
  if (!rep.synthetic) {
    try {
      j["coefficients"] = coefficients_object(nls_coefficients(rep.plan.carrier, rep.plan.delta_res));
    } catch (const Error&) {
      j["coefficients"] = nullptr;
    }
  }
  ordered_json runs = ordered_json::array();
  for (const auto& r : rep.records) {
    ordered_json e;
    e["eps"] = r.eps;
    e["n_side"] = r.n_side;
    e["dt"] = r.dt;
    e["steps"] = r.steps;
    e["envelope_box"] = r.envelope_box;
    e["max_error"] = num(r.max_error);
    e["max_error_over_eps2"] = num(r.max_error / (r.eps * r.eps));
    e["residual_norm"] = num(r.residual_norm);
    e["energy_drift"] = num(r.energy_drift);
    e["compat_defect_max"] = num(r.compat_defect_max);
    e["edge_mass"] = num(r.edge_mass);
    e["projection"] = {{"degenerate_modes", r.projection.degenerate_modes},
                       {"max_projection_displacement", num(r.projection.max_projection_displacement)}};
    e["error"] = r.error ? ordered_json(std::string(to_string(*r.error))) : ordered_json(nullptr);
    e["error_message"] = r.error_message;
    ordered_json traj = ordered_json::array();
    for (const auto& p : r.trajectory)
      traj.push_back({{"t", p.t},
                      {"sup_error", num(p.sup_error)},
                      {"energy", num(p.energy)},
                      {"compat_defect", num(p.compat_defect)},
                      {"max_amp", num(p.max_amp)}});
    e["trajectory"] = traj;
    runs.push_back(e);
  }
  j["runs"] = runs;
  j["plan"] = plan_object(rep.plan);
  ordered_json meta;
  meta["config_hash"] = rep.config_hash;
  meta["version"] = rep.version;
  if (include_wall_time) meta["wall_time_s"] = rep.wall_time_s;
  j["metadata"] = meta;
  return j.dump(2) + "\n";
}

std::string residual_json(const ResidualReport& rep) {
  ordered_json j;
  j["corrections"] = rep.corrections;
  j["order"] = num(rep.fit.slope);
  j["ci95"] = {num(rep.fit.ci_low), num(rep.fit.ci_high)};
  j["degenerate_fit"] = rep.fit.degenerate;
  ordered_json runs = ordered_json::array();
  for (const auto& r : rep.records)
    runs.push_back({{"eps", r.eps}, {"n_side", r.n_side}, {"residual_norm", num(r.residual_norm)}});
  j["runs"] = runs;
  return j.dump(2) + "\n";
}

std::string order_fit_tsv(const ErrorReport& rep) {
  std::ostringstream out;
  out << std::setprecision(17) << "log_eps\tlog_maxerr\n";
  for (const auto& r : rep.records) out << std::log(r.eps) << '\t' << std::log(r.max_error) << '\n';
  return out.str();
}

std::string trajectory_csv(const EpsRecord& rec) {
  std::ostringstream out;
  out << std::setprecision(17) << "t,sup_error,energy,compat_defect\n";
  for (const auto& p : rec.trajectory) out << p.t << ',' << p.sup_error << ',' << p.energy << ',' << p.compat_defect << '\n';
  return out.str();
}

}  // namespace fput2d
