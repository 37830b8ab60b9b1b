#include "kslab/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kslab/error.hpp"

namespace kslab::cli {

using nlohmann::json;

json default_config() {
  return json::parse(R"({
  "grid": {"d": 2, "n": 64, "box_length": null, "dealias_fraction": 0.6666666666666666},
  "system": {"model": "PP", "tau": 1.0, "alpha": 0.0},
  "init": {"family": "Gaussian", "amplitude": 1.0, "width": 1.0, "seed": 0, "bumps": 6,
           "phi0": "zero"},
  "stepper": {"dt_init": 0.001, "dt_min": 1e-10, "dt_max": 0.1, "safety": 0.8,
              "blowup_threshold": 1e8, "t_end": 1.0, "snapshot_times": null,
              "tolerance": 1e-6, "adaptive": true, "decay_slack": 0.02, "snapshots": false},
  "norms": {"pm": null, "lp": null, "ep": null, "morrey": true},
  "experiment": {
    "picard": {"max_iters": 30, "t_grid": null, "a": null, "conv_tol": 1e-8, "refine": 4},
    "scan": {"tau_list": [1.0], "M_lo": 0.01, "M_hi": 10.0, "bisect_tol": 0.02, "t_end": 10.0,
             "t_end_per_tau": 0.0, "replicates": 1, "law": "TauOverLogCubed"},
    "selfsim": {"tau": 1.0, "M": 1.0, "window": [0.5, 2.0], "heat_only": false},
    "pe_limit": {"tau_list": [1.0, 0.3, 0.1, 0.03, 0.01], "t_lo": 0.1, "t_hi": 1.0,
                 "samples": 10},
    "kappa": {"kappa_hat": null, "kappa_tilde_hat": null, "rel_tol": 0.02,
              "u_fixed_fraction": 0.01},
    "bounds": {"lemma_samples": 10000}
  }
})");
}

namespace {

bool same_kind(const json& base, const json& v) {
  if (base.is_null()) return true;
  if (base.is_number_integer()) return v.is_number_integer();
  if (base.is_number()) return v.is_number();
  return base.type() == v.type();
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

}  // namespace

void merge_strict(json& base, const json& user, const std::string& path) {
  require(user.is_object(), ErrorKind::ConfigError,
          (path.empty() ? std::string("config") : path) + " must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string where = join(path, it.key());
    if (!base.contains(it.key())) fail(ErrorKind::ConfigError, "unknown key " + where);
    json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_strict(slot, it.value(), where);
    } else if (!same_kind(slot, it.value()) && !it.value().is_null()) {
      fail(ErrorKind::ConfigError, "type mismatch at " + where + ": expected " +
                                       std::string(slot.type_name()) + ", got " +
                                       it.value().type_name());
    } else {
      slot = it.value();
    }
  }
}

void apply_override(json& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string_view::npos && eq > 0, ErrorKind::ConfigError,
          "override must look like key=value: " + std::string(assignment));
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json patch = value;
  std::string rest = key;
  std::vector<std::string> parts;
  for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest = rest.substr(pos + 1)) {
    parts.push_back(rest.substr(0, pos));
  }
  parts.push_back(rest);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    require(!it->empty(), ErrorKind::ConfigError, "empty path segment in " + key);
    patch = json{{*it, patch}};
  }
  merge_strict(cfg, patch);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::ConfigError, path + " is not valid JSON");
  return j;
}

namespace {

// Typed read of cfg at a dotted path; wrong types become ConfigErrors.
template <class T>
T get(const json& cfg, const std::string& path) {
  const json* node = &cfg;
  std::string rest = path;
  for (std::size_t pos; (pos = rest.find('.')) != std::string::npos; rest = rest.substr(pos + 1)) {
    node = &node->at(rest.substr(0, pos));
  }
  node = &node->at(rest);
  try {
    return node->get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::ConfigError, "bad value at " + path + ": " + node->dump());
  }
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k) {
    out[k] = lo * std::pow(hi / lo, count == 1 ? 0.0 : double(k) / (count - 1));
  }
  return out;
}

// Numbers or "inf".
std::vector<double> exponents(const json& list, const std::string& path) {
  require(list.is_array(), ErrorKind::ConfigError, path + " must be a list");
  std::vector<double> out;
  for (const json& v : list) {
    if (v.is_number()) {
      out.push_back(v.get<double>());
    } else if (v == "inf") {
      out.push_back(kInfinity);
    } else {
      fail(ErrorKind::ConfigError, path + " entries must be numbers or \"inf\"");
    }
  }
  return out;
}

json exponents_json(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) {
    if (std::isinf(x)) out.push_back("inf");
    else out.push_back(x);
  }
  return out;
}

}  // namespace

RunConfig resolve(const json& user_cfg) {
  json cfg = default_config();
  merge_strict(cfg, user_cfg);
  RunConfig rc;

  const int d = get<int>(cfg, "grid.d");
  rc.grid = default_grid(d, get<int>(cfg, "grid.n"));
  if (!cfg["grid"]["box_length"].is_null()) rc.grid.box_length = get<double>(cfg, "grid.box_length");
  rc.grid.dealias_fraction = get<double>(cfg, "grid.dealias_fraction");
  rc.grid.validate();
  cfg["grid"]["box_length"] = rc.grid.box_length;

  rc.system.model = parse_model(get<std::string>(cfg, "system.model"));
  rc.system.d = d;
  rc.system.tau = get<double>(cfg, "system.tau");
  rc.system.alpha = get<double>(cfg, "system.alpha");
  rc.system.validate();

  rc.init.family = parse_family(get<std::string>(cfg, "init.family"));
  rc.init.amplitude = get<double>(cfg, "init.amplitude");
  rc.init.width = get<double>(cfg, "init.width");
  rc.init.seed = get<std::uint64_t>(cfg, "init.seed");
  rc.init.bumps = get<int>(cfg, "init.bumps");
  rc.init.validate();
  const auto phi0 = get<std::string>(cfg, "init.phi0");
  if (phi0 == "zero") rc.phi0 = Phi0Mode::Zero;
  else if (phi0 == "elliptic") rc.phi0 = Phi0Mode::Elliptic;
  else fail(ErrorKind::ConfigError, "init.phi0 must be \"zero\" or \"elliptic\"");

  NormRequest norms = default_norm_request(d);
  const json& nj = cfg["norms"];
  if (!nj["pm"].is_null()) norms.pm_exponents = exponents(nj["pm"], "norms.pm");
  if (!nj["lp"].is_null()) norms.lp_exponents = exponents(nj["lp"], "norms.lp");
  if (!nj["ep"].is_null()) norms.ep_exponents = exponents(nj["ep"], "norms.ep");
  norms.morrey = get<bool>(cfg, "norms.morrey");
  for (double a : norms.pm_exponents) {
    if (!(a >= 0.0 && a < d)) fail(ErrorKind::BadExponent, "norms.pm exponent outside [0, d)");
  }
  for (double p : norms.lp_exponents) {
    if (!(p >= 1.0)) fail(ErrorKind::BadExponent, "norms.lp exponent below 1");
  }
  for (double p : norms.ep_exponents) {
    if (!(p >= 1.0)) fail(ErrorKind::BadExponent, "norms.ep exponent below 1");
  }
  cfg["norms"]["pm"] = exponents_json(norms.pm_exponents);
  cfg["norms"]["lp"] = exponents_json(norms.lp_exponents);
  cfg["norms"]["ep"] = exponents_json(norms.ep_exponents);

  StepperConfig& st = rc.stepper;
  st.dt_init = get<double>(cfg, "stepper.dt_init");
  st.dt_min = get<double>(cfg, "stepper.dt_min");
  st.dt_max = get<double>(cfg, "stepper.dt_max");
  st.safety = get<double>(cfg, "stepper.safety");
  st.blowup_threshold = get<double>(cfg, "stepper.blowup_threshold");
  st.t_end = get<double>(cfg, "stepper.t_end");
  if (!cfg["stepper"]["snapshot_times"].is_null()) {
    st.snapshot_times = get<std::vector<double>>(cfg, "stepper.snapshot_times");
  }
  st.tolerance = get<double>(cfg, "stepper.tolerance");
  st.adaptive = get<bool>(cfg, "stepper.adaptive");
  st.decay_slack = get<double>(cfg, "stepper.decay_slack");
  st.norms = norms;
  rc.dump_snapshots = get<bool>(cfg, "stepper.snapshots");
  st.validate();
  st.snapshot_times = st.effective_snapshot_times();
  cfg["stepper"]["snapshot_times"] = st.snapshot_times;

  PicardConfig& pc = rc.picard;
  pc.max_iters = get<int>(cfg, "experiment.picard.max_iters");
  if (!cfg["experiment"]["picard"]["t_grid"].is_null()) {
    pc.t_grid = get<std::vector<double>>(cfg, "experiment.picard.t_grid");
  }
  if (!cfg["experiment"]["picard"]["a"].is_null()) pc.a = get<double>(cfg, "experiment.picard.a");
  pc.conv_tol = get<double>(cfg, "experiment.picard.conv_tol");
  pc.refine = get<int>(cfg, "experiment.picard.refine");
  pc.validate(d);
  pc.t_grid = pc.effective_t_grid();
  pc.a = pc.effective_a(d);
  cfg["experiment"]["picard"]["t_grid"] = pc.t_grid;
  cfg["experiment"]["picard"]["a"] = *pc.a;

  ScanSpec& sc = rc.scan;
  sc.spec_base = rc.system;
  sc.init = rc.init;
  sc.grid = rc.grid;
  sc.stepper = rc.stepper;
  sc.tau_list = get<std::vector<double>>(cfg, "experiment.scan.tau_list");
  sc.M_lo = get<double>(cfg, "experiment.scan.M_lo");
  sc.M_hi = get<double>(cfg, "experiment.scan.M_hi");
  sc.bisect_tol = get<double>(cfg, "experiment.scan.bisect_tol");
  sc.t_end = get<double>(cfg, "experiment.scan.t_end");
  sc.t_end_per_tau = get<double>(cfg, "experiment.scan.t_end_per_tau");
  sc.replicates = get<int>(cfg, "experiment.scan.replicates");
  rc.law = parse_law(get<std::string>(cfg, "experiment.scan.law"));
  require(!sc.tau_list.empty(), ErrorKind::ConfigError, "experiment.scan.tau_list is empty");
  sc.validate();

  rc.selfsim_tau = get<double>(cfg, "experiment.selfsim.tau");
  rc.selfsim_M = get<double>(cfg, "experiment.selfsim.M");
  const auto window = get<std::vector<double>>(cfg, "experiment.selfsim.window");
  require(window.size() == 2, ErrorKind::ConfigError, "experiment.selfsim.window needs [t1, t2]");
  rc.selfsim_window = {window[0], window[1]};
  rc.selfsim_heat_only = get<bool>(cfg, "experiment.selfsim.heat_only");
  require(rc.selfsim_tau > 0.0, ErrorKind::ConfigError, "experiment.selfsim.tau must be positive");

  rc.pe_taus = get<std::vector<double>>(cfg, "experiment.pe_limit.tau_list");
  rc.pe.t_lo = get<double>(cfg, "experiment.pe_limit.t_lo");
  rc.pe.t_hi = get<double>(cfg, "experiment.pe_limit.t_hi");
  rc.pe.samples = get<int>(cfg, "experiment.pe_limit.samples");
  rc.pe.stepper = rc.stepper;

  rc.kappa.picard = rc.picard;
  rc.kappa.rel_tol = get<double>(cfg, "experiment.kappa.rel_tol");
  rc.kappa.u_fixed_fraction = get<double>(cfg, "experiment.kappa.u_fixed_fraction");
  require(rc.kappa.rel_tol > 0.0 && rc.kappa.u_fixed_fraction > 0.0, ErrorKind::ConfigError,
          "experiment.kappa.rel_tol and u_fixed_fraction must be positive");
  if (!cfg["experiment"]["kappa"]["kappa_hat"].is_null()) {
    rc.kappa_hat = get<double>(cfg, "experiment.kappa.kappa_hat");
  }
  if (!cfg["experiment"]["kappa"]["kappa_tilde_hat"].is_null()) {
    rc.kappa_tilde_hat = get<double>(cfg, "experiment.kappa.kappa_tilde_hat");
  }

  const auto samples = get<long long>(cfg, "experiment.bounds.lemma_samples");
  require(samples >= 1, ErrorKind::ConfigError, "experiment.bounds.lemma_samples must be positive");
  rc.lemma_samples = static_cast<std::size_t>(samples);

  rc.effective = std::move(cfg);
  return rc;
}

}  // namespace kslab::cli
