#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "fput2d/snapshot.hpp"
#include "json.hpp"

namespace fput2d::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json num(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + root_.string() + ": " + ec.message());
  }

  fs::path file(const std::string& name) {
    files_.push_back(name);
    return root_ / name;
  }

  void write_text(const std::string& name, const std::string& text) {
    std::ofstream f(file(name));
    f << text;
    if (!f) throw Error(ErrorKind::Io, "write failed for " + name);
  }

  void write_manifest(const std::string& command, const ExperimentPlan& plan, double wall_time) {
    ordered_json m;
    m["command"] = command;
    m["version"] = library_version();
    m["config_hash"] = fnv1a_hex(plan_json(plan));
    m["plan"] = ordered_json::parse(plan_json(plan));
    m["files"] = files_;
    m["wall_time_s"] = wall_time;
    std::ofstream f(root_ / "manifest.json");
    f << m.dump(2) << '\n';
    if (!f) throw Error(ErrorKind::Io, "write failed for manifest.json");
  }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string indexed(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu.%s", stem, i, ext);
  return buf;
}

int cmd_coeffs(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const DispersionData d = nls_coefficients(cfg.plan.carrier, cfg.plan.delta_res);
  if (!d.nonresonant) {
    err << "error: carrier (" << cfg.plan.carrier.k() / kPi << " pi, " << cfg.plan.carrier.l() / kPi
        << " pi) is resonant: 3 omega(k0) is within delta_res of omega(3 k0)\n";
    return kCarrier;
  }
  out << coefficients_json(d) << '\n';
  return kOk;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentPlan& plan = cfg.plan;
  validate_run(plan, cfg.eps);
  OutputDir dir(out_dir);

  const std::size_t n_samples = sample_steps(plan, cfg.eps).size();
  std::set<std::size_t> snap;
  const std::size_t want = std::min(cfg.snapshots, n_samples);
  for (std::size_t j = 0; j < want; ++j)
    snap.insert(want == 1 ? 0 : static_cast<std::size_t>(std::llround(double(j) * double(n_samples - 1) / double(want - 1))));

  const DispersionData disp = nls_coefficients(plan.carrier, plan.delta_res);
  const EnvelopeVariant variant =
      plan.form == LatticeForm::strain ? EnvelopeVariant::strain_u : EnvelopeVariant::displacement;
  const double box = plan.n_side_override > 0 ? plan.box_length : cfg.eps * double(lattice_side(plan, cfg.eps));
  const NlsSolver diag(plan.envelope_grid, box, NlsProblem::from_dispersion(disp, variant, plan.nls_dT));

  std::ofstream lat_csv(dir.file("lattice_diagnostics.csv"));
  std::ofstream env_csv(dir.file("envelope_diagnostics.csv"));
  LatticeDiagnosticsCsv lat_rows(lat_csv);
  EnvelopeDiagnosticsCsv env_rows(env_csv);

  std::size_t snapshot_count = 0;
  auto observer = [&](std::size_t i, const LatticeState& s, const EnvelopeField& e, const SamplePoint& p) {
    lat_rows.row(p.t, p.energy, p.compat_defect, p.max_amp);
    double amax = 0.0;
    for (const cplx& z : e.a) amax = std::max(amax, std::abs(z));
    env_rows.row(e.slow_time, diag.mass(e), diag.h4proxy(e), amax);
    if (snap.count(i)) {
      write_snapshot(dir.file(indexed("lattice", snapshot_count, "bin")), s);
      write_snapshot(dir.file(indexed("envelope", snapshot_count, "bin")), e);
      ++snapshot_count;
    }
  };

  ordered_json summary;
  summary["eps"] = cfg.eps;
  int code = kOk;
  try {
    const EpsRecord rec = run_single(plan, cfg.eps, observer);
    summary["n_side"] = rec.n_side;
    summary["dt"] = rec.dt;
    summary["steps"] = rec.steps;
    summary["envelope_box"] = rec.envelope_box;
    summary["sup_error"] = num(rec.trajectory.back().sup_error);
    summary["max_error"] = num(rec.max_error);
    summary["residual_norm"] = num(rec.residual_norm);
    summary["energy_drift"] = num(rec.energy_drift);
    summary["compat_defect_max"] = num(rec.compat_defect_max);
    summary["edge_mass"] = num(rec.edge_mass);
    summary["projection"] = {{"degenerate_modes", rec.projection.degenerate_modes},
                             {"max_projection_displacement", num(rec.projection.max_projection_displacement)}};
    summary["snapshots"] = snapshot_count;
    summary["error"] = nullptr;
    out << "sup_error " << rec.trajectory.back().sup_error << " max " << rec.max_error << " after " << rec.steps
        << " steps\n";
  } catch (const Error& e) {
    summary["error"] = std::string(to_string(e.kind()));
    summary["message"] = e.what();
    err << "error: " << e.what() << '\n';
    code = exit_code_for(e.kind());
  }
  lat_csv.close();
  env_csv.close();
  dir.write_text("summary.json", summary.dump(2) + "\n");
  dir.write_manifest("simulate", plan, seconds_since(t0));
  return code;
}

int cmd_sweep(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_plan(cfg.plan);
  OutputDir dir(out_dir);
  const ErrorReport rep = cfg.synthetic ? synthetic_sweep(cfg.plan) : run_sweep(cfg.plan);
  dir.write_text("report.json", report_json(rep, false));
  dir.write_text("order_fit.tsv", order_fit_tsv(rep));
  if (!rep.synthetic)
    for (std::size_t i = 0; i < rep.records.size(); ++i)
      dir.write_text(indexed("trajectory", i, "csv"), trajectory_csv(rep.records[i]));
  dir.write_manifest("sweep", cfg.plan, seconds_since(t0));

  bool failed_run = false;
  for (const auto& r : rep.records)
    if (r.error) {
      failed_run = true;
      err << "eps " << r.eps << ": " << r.error_message << '\n';
    }
  out << "order " << rep.fit.slope << " (95% " << rep.fit.ci_low << " .. " << rep.fit.ci_high << ") "
      << (rep.pass ? "pass" : "FAIL") << '\n';
  if (rep.pass) return kOk;
  if (failed_run) return kSolver;
  return kAcceptance;
}

int cmd_residual(const RunConfig& cfg, const std::optional<fs::path>& out_dir, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ResidualReport rep = residual_sweep(cfg.plan);
  const std::string text = residual_json(rep);
  if (out_dir) {
    OutputDir dir(*out_dir);
    dir.write_text("residual.json", text);
    dir.write_manifest("residual", cfg.plan, seconds_since(t0));
  }
  out << text;
  return kOk;
}

std::string key_listing() {
  std::ostringstream s;
  s << "Config keys (JSON object in --config, or --set key=value):\n";
  for (const auto& k : config_keys()) {
    s << "  " << k.name;
    for (std::size_t pad = k.name.size(); pad < 18; ++pad) s << ' ';
    s << k.help << '\n';
  }
  s << "\nExit codes: 0 ok, 1 config, 2 carrier, 3 solver, 4 failed order fit.\n";
  return s.str();
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroFrequency:
    case ErrorKind::AxisDegenerate:
    case ErrorKind::Resonant:
    case ErrorKind::NonResonantCarrierRequired:
    case ErrorKind::MissingB:
      return kCarrier;
    case ErrorKind::UnstableStep:
    case ErrorKind::EnvelopeBlowup:
    case ErrorKind::FormMismatch:
      return kSolver;
    case ErrorKind::DegenerateFit:
      return kAcceptance;
    case ErrorKind::FootprintExceeded:
    case ErrorKind::InvalidArgument:
    case ErrorKind::Io:
      break;
  }
  return kConfig;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Envelope approximation experiments for the 2D FPUT lattice", "fput2d"};
  std::string command;
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir = "fput2d-out";
  bool out_given = false;
  app.add_option("command", command, "coeffs | simulate | sweep | residual")
      ->required()
      ->check(CLI::IsMember({"coeffs", "simulate", "sweep", "residual"}));
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--set", sets, "override one config key, key=value (repeatable)");
  app.add_option("--out", out_dir, "output directory")->each([&](const std::string&) { out_given = true; });
  app.add_flag("--version", "print the library version and exit");
  app.footer(key_listing());

  std::vector<const char*> argv{"fput2d"};
  for (const auto& a : args) argv.push_back(a.c_str());
  if (std::find(args.begin(), args.end(), "--version") != args.end()) {
    out << "fput2d " << library_version() << '\n';
    return kOk;
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kConfig;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    for (const auto& s : sets) apply_setting(cfg, s);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  }

  try {
    if (command == "coeffs") return cmd_coeffs(cfg, out, err);
    if (command == "simulate") return cmd_simulate(cfg, out_dir, out, err);
    if (command == "sweep") return cmd_sweep(cfg, out_dir, out, err);
    return cmd_residual(cfg, out_given ? std::optional<fs::path>(out_dir) : std::nullopt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  }
}

}  // namespace fput2d::cli
