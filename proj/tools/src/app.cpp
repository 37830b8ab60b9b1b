#include "kslab/cli/app.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kslab/bounds.hpp"
#include "kslab/cli/config.hpp"
#include "kslab/norms.hpp"

namespace kslab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::FamilyMismatch:
    case ErrorKind::PreconditionViolation:
    case ErrorKind::BadExponent:
    case ErrorKind::DomainError:
    case ErrorKind::GridMismatch:
    case ErrorKind::ModelMismatch:
    case ErrorKind::WindowInvalid:
      return 1;
    case ErrorKind::BracketInvalid:
    case ErrorKind::Diverged:
    case ErrorKind::NonFinite:
    case ErrorKind::QuadratureFailure:
    case ErrorKind::IoError:
    case ErrorKind::SymmetryViolation:
      return 2;
  }
  return 2;
}

namespace {

struct Options {
  std::string config_path;
  std::string out = "kslab_out";
  std::optional<std::uint64_t> seed;
  int threads = default_threads();
  std::vector<std::string> overrides;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::optional<SpectralField> initial_phi(const RunConfig& rc, const SpectralField& u0) {
  if (rc.phi0 == Phi0Mode::Elliptic) return elliptic_phi(u0);
  return std::nullopt;
}

SpectralField phi0_or_zero(const RunConfig& rc, const SpectralField& u0) {
  return rc.phi0 == Phi0Mode::Elliptic ? elliptic_phi(u0) : SpectralField(rc.grid);
}

int cmd_simulate(const RunConfig& rc, const fs::path& out) {
  const SpectralField u0 = make(rc.init, rc.grid);
  StepperConfig cfg = rc.stepper;
  if (rc.dump_snapshots) {
    cfg.snapshot_dir = out / "snapshots";
    fs::create_directories(*cfg.snapshot_dir);
  }
  const TrajectorySummary sum = run(make_state(u0, rc.system, initial_phi(rc, u0)), rc.system, cfg);

  std::ostringstream csv;
  write_csv_header(csv, cfg.norms);
  for (const NormReport& r : sum.norm_series) write_csv_row(csv, r);
  write_text(out / "norms.csv", csv.str());

  json s;
  s["outcome"] = to_string(sum.outcome);
  s["t_final"] = sum.t_final;
  s["blowup_time"] = sum.blowup_time ? json(*sum.blowup_time) : json(nullptr);
  s["steps"] = sum.steps;
  s["rejected"] = sum.rejected;
  s["decay_monitor"] = sum.decay_monitor;
  write_json(out / "summary.json", s);
  std::cout << "outcome " << to_string(sum.outcome) << " t_final " << sum.t_final << "\n";
  return 0;
}

int cmd_picard(const RunConfig& rc, const fs::path& out) {
  const SpectralField u0 = make(rc.init, rc.grid);
  const PicardReport rep = picard_solve(u0, phi0_or_zero(rc, u0), rc.system, rc.picard);
  write_json(out / "picard.json", rep.to_json());
  std::cout << "converged " << rep.converged << " iters " << rep.iters << "\n";
  return 0;
}

int cmd_verify_bounds(const RunConfig& rc, const fs::path& out) {
  const auto certs = verify_bounds_suite(rc.lemma_samples, rc.init.seed);
  json j = json::array();
  bool all = true;
  for (const BoundCertificate& c : certs) {
    j.push_back(c.to_json());
    all = all && c.passed;
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.lemma_id << " worst_ratio " << c.worst_ratio
              << "\n";
  }
  write_json(out / "certificates.json", j);
  if (!all) {
    std::cerr << "AcceptanceFailure: at least one bound certificate failed\n";
    return 3;
  }
  return 0;
}

int cmd_scan(RunConfig rc, const fs::path& out, int threads) {
  rc.scan.threads = threads;
  ScanResult res;
  if (rc.scan.tau_list.size() >= 4) {
    res = tau_scaling_study(rc.scan, rc.law);
  } else {
    res.n = rc.grid.n;
    res.t_end = rc.scan.t_end;
    res.rows.resize(rc.scan.tau_list.size());
    parallel_for(res.rows.size(), threads,
                 [&](std::size_t i) { res.rows[i] = critical_amplitude(rc.scan, rc.scan.tau_list[i]); });
  }
  std::ostringstream csv;
  res.write_csv(csv);
  write_text(out / "scan.csv", csv.str());
  write_json(out / "scan.json", res.to_json());
  for (const CriticalRow& r : res.rows) std::cout << "tau " << r.tau << " M* " << r.M_star << "\n";
  return 0;
}

int cmd_selfsim(const RunConfig& rc, const fs::path& out) {
  SelfSimOptions opts;
  opts.grid = rc.grid;
  opts.heat_only = rc.selfsim_heat_only;
  opts.stepper = rc.stepper;
  const int d = rc.grid.d;
  const SelfSimResult res =
      selfsimilar_check(rc.selfsim_tau, rc.selfsim_M, d, rc.selfsim_window, opts);
  json j;
  j["tau"] = rc.selfsim_tau;
  j["M"] = rc.selfsim_M;
  j["window"] = {rc.selfsim_window.first, rc.selfsim_window.second};
  j["heat_only"] = rc.selfsim_heat_only;
  j["deviation"] = res.deviation;
  j["per_time"] = res.per_time;
  if (rc.kappa_hat && rc.kappa_tilde_hat && rc.selfsim_tau >= 1.0) {
    const double b = rc.selfsim_tau >= std::exp(3.0) ? optimal_b(rc.selfsim_tau) : 1.0;
    const auto params =
        ThresholdParams::make(d, rc.selfsim_tau, b, *rc.kappa_hat, *rc.kappa_tilde_hat);
    InitSpec init;
    init.family = d == 2 ? Family::BandLimitedDelta : Family::Chandrasekhar;
    init.amplitude = rc.selfsim_M;
    const double u0_pm = pm_norm(make(init, rc.grid), d - 2.0);
    j["size_condition"] = {{"verdict", to_string(size_condition(params, u0_pm, 0.0))},
                           {"b", b},
                           {"u0_pm", u0_pm},
                           {"label", "empirical-kappa"}};
  }
  write_json(out / "selfsim.json", j);
  std::cout << "deviation " << res.deviation << "\n";
  return 0;
}

int cmd_pe_limit(const RunConfig& rc, const fs::path& out) {
  const SpectralField u0 = make(rc.init, rc.grid);
  const PeLimitResult res = pe_limit_study(rc.pe_taus, u0, rc.grid.d, rc.pe);
  json rows = json::array();
  for (const auto& [tau, dev] : res.rows) {
    rows.push_back({{"tau", tau}, {"deviation", dev}});
    std::cout << "tau " << tau << " deviation " << dev << "\n";
  }
  write_json(out / "pe_limit.json", {{"rows", rows},
                                     {"strictly_decreasing", res.strictly_decreasing},
                                     {"non_increasing", res.non_increasing}});
  return 0;
}

int cmd_estimate_kappa(RunConfig& rc, const fs::path& out) {
  const KappaEstimate est = estimate_kappa(rc.grid.d, rc.grid, rc.init, rc.kappa);
  json j = est.to_json();
  j["d"] = rc.grid.d;
  j["n"] = rc.grid.n;
  j["family"] = to_string(rc.init.family);
  write_json(out / "kappa.json", j);
  rc.effective["experiment"]["kappa"]["kappa_hat"] = est.kappa_hat;
  rc.effective["experiment"]["kappa"]["kappa_tilde_hat"] = est.kappa_tilde_hat;
  write_json(out / "config.json", rc.effective);
  std::cout << "kappa_hat " << est.kappa_hat << " kappa_tilde_hat " << est.kappa_tilde_hat << "\n";
  return 0;
}

int dispatch(const std::string& name, const Options& opt) {
  json user = json::object();
  if (!opt.config_path.empty()) user = read_json_file(opt.config_path);
  json merged = default_config();
  merge_strict(merged, user);
  for (const std::string& o : opt.overrides) apply_override(merged, o);
  if (opt.seed) merged["init"]["seed"] = *opt.seed;
  RunConfig rc = resolve(merged);

  fs::path out = opt.out;
  if (const char* env = std::getenv("KSLAB_OUT"); env && *env) out = env;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create " + out.string() + ": " + ec.message());
  write_json(out / "config.json", rc.effective);

  if (name == "simulate") return cmd_simulate(rc, out);
  if (name == "picard") return cmd_picard(rc, out);
  if (name == "verify-bounds") return cmd_verify_bounds(rc, out);
  if (name == "scan") return cmd_scan(rc, out, opt.threads);
  if (name == "selfsim") return cmd_selfsim(rc, out);
  if (name == "pe-limit") return cmd_pe_limit(rc, out);
  return cmd_estimate_kappa(rc, out);
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Keller-Segel spectral laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  std::uint64_t seed = 0;
  app.add_option("--config", opt.config_path, "JSON configuration file");
  app.add_option("--out", opt.out, "output directory (KSLAB_OUT overrides)");
  auto* seed_opt = app.add_option("--seed", seed, "seed for random data and samples");
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--override", opt.overrides, "key=value with a dotted key (repeatable)");

  const char* names[] = {"simulate", "picard", "verify-bounds", "scan",
                         "selfsim", "pe-limit", "estimate-kappa"};
  const char* help[] = {"one run with a norm CSV",
                        "Picard iteration of the mild formulation",
                        "numerical certificates for the analytic bounds",
                        "critical amplitude scan over tau",
                        "self-similarity check",
                        "tau -> 0 comparison with the elliptic system",
                        "empirical contraction constants"};
  for (int i = 0; i < 7; ++i) app.add_subcommand(names[i], help[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg) if (c == '\n') c = ' ';
    std::cerr << "ConfigError: " << msg << "\n";
    return 1;
  }
  if (*seed_opt) opt.seed = seed;

  try {
    return dispatch(app.get_subcommands().front()->get_name(), opt);
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& c : msg) if (c == '\n') c = ' ';
    std::cerr << to_string(e.kind()) << ": " << msg << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "IoError: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace kslab::cli
