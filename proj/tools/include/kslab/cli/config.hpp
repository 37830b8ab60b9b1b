#pragma once

// Run configuration: one JSON document with sections grid, system, init,
// stepper, norms and experiment. A user document is merged key by key onto
// the defaults; unknown keys and type mismatches are ConfigErrors. Fields
// whose default is null are resolved ("auto") before anything runs.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kslab/bounds.hpp"
#include "kslab/experiments.hpp"

namespace kslab::cli {

nlohmann::json default_config();

// Merges `user` onto `base` in place. `path` prefixes error messages.
void merge_strict(nlohmann::json& base, const nlohmann::json& user, const std::string& path = "");

// "a.b.c=value". The value is parsed as JSON and falls back to a string.
void apply_override(nlohmann::json& cfg, std::string_view assignment);

enum class Phi0Mode { Zero, Elliptic };

struct RunConfig {
  GridSpec grid;
  SystemSpec system;
  InitSpec init;
  Phi0Mode phi0 = Phi0Mode::Zero;
  StepperConfig stepper;
  bool dump_snapshots = false;

  PicardConfig picard;

  ScanSpec scan;
  ScalingLaw law = ScalingLaw::TauOverLogCubed;

  double selfsim_tau = 1.0;
  double selfsim_M = 1.0;
  std::pair<double, double> selfsim_window{0.5, 2.0};
  bool selfsim_heat_only = false;

  std::vector<double> pe_taus;
  PeLimitOptions pe;

  KappaOptions kappa;
  std::optional<double> kappa_hat;
  std::optional<double> kappa_tilde_hat;

  std::size_t lemma_samples = 10000;

  nlohmann::json effective;  // the document with every auto value filled in
};

// Resolves auto values and runs every module-level validation. Throws
// ConfigError (or the module's own validation error).
RunConfig resolve(const nlohmann::json& cfg);

nlohmann::json read_json_file(const std::string& path);

}  // namespace kslab::cli
