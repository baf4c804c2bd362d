#include "config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "json.hpp"

namespace fput2d::cli {

namespace {

using json = nlohmann::json;
using Setter = std::function<void(RunConfig&, const json&)>;

struct Key {
  KeyDoc doc;
  Setter set;
};

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

double as_real(const std::string& key, const json& v) {
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

double as_positive(const std::string& key, const json& v) {
  const double x = as_real(key, v);
  if (!(x > 0.0) || !std::isfinite(x)) bad(key, "expected a positive number");
  return x;
}

long long as_integer(const std::string& key, const json& v) {
  if (!v.is_number()) bad(key, "expected an integer");
  const double x = v.get<double>();
  if (x != std::floor(x) || std::abs(x) > 9.0e15) bad(key, "expected an integer");
  return static_cast<long long>(x);
}

std::size_t as_count(const std::string& key, const json& v) {
  const long long n = as_integer(key, v);
  if (n < 0) bad(key, "expected a non-negative integer");
  return static_cast<std::size_t>(n);
}

bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  return v.get<bool>();
}

std::string as_word(const std::string& key, const json& v) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> as_list(const std::string& key, const json& v) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(as_real(key, x));
  } else if (v.is_string()) {
    std::stringstream in(v.get<std::string>());
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (item.find_first_not_of(" \t", used) != std::string::npos) bad(key, "bad list entry '" + item + "'");
      } catch (const std::logic_error&) {
        bad(key, "bad list entry '" + item + "'");
      }
    }
  } else if (v.is_number()) {
    out.push_back(v.get<double>());
  } else {
    bad(key, "expected a list of numbers");
  }
  return out;
}

void set_carrier(RunConfig& c, double k_pi, double l_pi) { c.plan.carrier = WaveVector(k_pi * kPi, l_pi * kPi); }

const std::vector<Key>& registry() {
  static const std::vector<Key> keys = {
      {{"carrier_k_pi", "carrier k0 in units of pi"},
       [](RunConfig& c, const json& v) { set_carrier(c, as_real("carrier_k_pi", v), c.plan.carrier.l() / kPi); }},
      {{"carrier_l_pi", "carrier l0 in units of pi"},
       [](RunConfig& c, const json& v) { set_carrier(c, c.plan.carrier.k() / kPi, as_real("carrier_l_pi", v)); }},
      {{"form", "lattice variables: strain | displacement"},
       [](RunConfig& c, const json& v) {
         const auto w = as_word("form", v);
         if (w == "strain")
           c.plan.form = LatticeForm::strain;
         else if (w == "displacement")
           c.plan.form = LatticeForm::displacement;
         else
           bad("form", "expected strain or displacement");
       }},
      {{"eps", "amplitude parameter for simulate"}, [](RunConfig& c, const json& v) { c.eps = as_positive("eps", v); }},
      {{"eps_list", "amplitude parameters for sweep and residual, descending"},
       [](RunConfig& c, const json& v) { c.plan.eps_list = as_list("eps_list", v); }},
      {{"T0", "slow-time horizon; lattice runs to T0 / eps^2"},
       [](RunConfig& c, const json& v) { c.plan.T0 = as_positive("T0", v); }},
      {{"dt", "lattice time step; 0 selects dt_factor * eps"},
       [](RunConfig& c, const json& v) {
         const double x = as_real("dt", v);
         if (x < 0.0) bad("dt", "must be non-negative");
         c.plan.dt_override = x;
       }},
      {{"dt_factor", "lattice time step per unit eps"},
       [](RunConfig& c, const json& v) { c.plan.dt_factor = as_positive("dt_factor", v); }},
      {{"n_side", "lattice side; 0 selects round(box_length / eps) made even"},
       [](RunConfig& c, const json& v) { c.plan.n_side_override = as_count("n_side", v); }},
      {{"box_length", "envelope box length L"},
       [](RunConfig& c, const json& v) { c.plan.box_length = as_positive("box_length", v); }},
      {{"envelope_grid", "envelope grid side M (power of two)"},
       [](RunConfig& c, const json& v) { c.plan.envelope_grid = as_count("envelope_grid", v); }},
      {{"nls_dT", "slow-time step of the envelope solver"},
       [](RunConfig& c, const json& v) { c.plan.nls_dT = as_positive("nls_dT", v); }},
      {{"corrections", "add third-harmonic corrections to the ansatz"},
       [](RunConfig& c, const json& v) { c.plan.corrections = as_bool("corrections", v); }},
      {{"force", "bond force: cubic | perturbed | linear"},
       [](RunConfig& c, const json& v) {
         const auto w = as_word("force", v);
         if (w == "cubic")
           c.plan.force.kind = ForceKind::cubic_baseline;
         else if (w == "perturbed")
           c.plan.force.kind = ForceKind::perturbed;
         else if (w == "linear")
           c.plan.force.kind = ForceKind::linear;
         else
           bad("force", "expected cubic, perturbed or linear");
       }},
      {{"force_bound", "sup bound of the per-bond perturbation coefficients"},
       [](RunConfig& c, const json& v) {
         const double x = as_real("force_bound", v);
         if (!(x >= 0.0)) bad("force_bound", "must be non-negative");
         c.plan.force.bound = x;
       }},
      {{"seed", "seed of the perturbation coefficients"},
       [](RunConfig& c, const json& v) { c.plan.force.seed = as_count("seed", v); }},
      {{"samples", "sample times per run"},
       [](RunConfig& c, const json& v) { c.plan.samples = as_count("samples", v); }},
      {{"envelope", "initial envelope: gaussian | plane_wave | zero"},
       [](RunConfig& c, const json& v) {
         const auto w = as_word("envelope", v);
         if (w == "gaussian")
           c.plan.shape = EnvelopeShape::gaussian;
         else if (w == "plane_wave")
           c.plan.shape = EnvelopeShape::plane_wave;
         else if (w == "zero")
           c.plan.shape = EnvelopeShape::zero;
         else
           bad("envelope", "expected gaussian, plane_wave or zero");
       }},
      {{"amplitude", "peak envelope amplitude"},
       [](RunConfig& c, const json& v) { c.plan.amplitude = as_real("amplitude", v); }},
      {{"sigma", "Gaussian envelope width"}, [](RunConfig& c, const json& v) { c.plan.sigma = as_positive("sigma", v); }},
      {{"plane_px", "plane-wave envelope mode number in X"},
       [](RunConfig& c, const json& v) { c.plan.plane_px = static_cast<int>(as_integer("plane_px", v)); }},
      {{"plane_py", "plane-wave envelope mode number in Y"},
       [](RunConfig& c, const json& v) { c.plan.plane_py = static_cast<int>(as_integer("plane_py", v)); }},
      {{"blowup_guard", "envelope smoothness bound that aborts a run"},
       [](RunConfig& c, const json& v) { c.plan.blowup_guard = as_positive("blowup_guard", v); }},
      {{"order_threshold", "minimum fitted order for a passing sweep"},
       [](RunConfig& c, const json& v) { c.plan.order_threshold = as_real("order_threshold", v); }},
      {{"delta_res", "relative margin of the non-resonance check"},
       [](RunConfig& c, const json& v) { c.plan.delta_res = as_positive("delta_res", v); }},
      {{"delta_proj", "denominator below which the projection skips a mode"},
       [](RunConfig& c, const json& v) { c.plan.delta_proj = as_positive("delta_proj", v); }},
      {{"projection", "compatibility projection: oblique | orthogonal"},
       [](RunConfig& c, const json& v) {
         const auto w = as_word("projection", v);
         if (w == "oblique")
           c.plan.projection = ProjectionKind::oblique;
         else if (w == "orthogonal")
           c.plan.projection = ProjectionKind::orthogonal;
         else
           bad("projection", "expected oblique or orthogonal");
       }},
      {{"threads", "worker threads; 0 uses all (capped by FPUT2D_THREADS)"},
       [](RunConfig& c, const json& v) { c.plan.threads = static_cast<int>(as_count("threads", v)); }},
      {{"synthetic", "sweep self-test with errors eps^2 and no simulation"},
       [](RunConfig& c, const json& v) { c.synthetic = as_bool("synthetic", v); }},
      {{"snapshots", "snapshot files written by simulate (at least 2)"},
       [](RunConfig& c, const json& v) {
         const auto n = as_count("snapshots", v);
         if (n < 2) bad("snapshots", "need at least two");
         c.snapshots = n;
       }},
  };
  return keys;
}

void apply(RunConfig& cfg, const std::string& key, const json& value) {
  for (const auto& k : registry())
    if (k.doc.name == key) {
      k.set(cfg, value);
      return;
    }
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

const std::vector<KeyDoc>& config_keys() {
  static const std::vector<KeyDoc> docs = [] {
    std::vector<KeyDoc> d;
    for (const auto& k : registry()) d.push_back(k.doc);
    return d;
  }();
  return docs;
}

void apply_config_text(RunConfig& cfg, std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) apply(cfg, it.key(), it.value());
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  apply_config_text(cfg, text.str());
}

void apply_setting(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + std::string(assignment) + "'");
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  apply(cfg, key, value);
}

}  // namespace fput2d::cli
