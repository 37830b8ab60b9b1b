#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "kslab/models.hpp"
#include "kslab/norms.hpp"

namespace kslab {

struct StepperConfig {
  double dt_init = 1e-3;
  double dt_min = 1e-10;
  double dt_max = 0.1;
  double safety = 0.8;
  double blowup_threshold = 1e8;  // on sup |u|
  double t_end = 1.0;
  // Times at which NormReports are emitted. Empty means 32 log-spaced
  // times in [t_end / 1000, t_end].
  std::vector<double> snapshot_times;

  // Relative local error target for the embedded estimate.
  double tolerance = 1e-6;
  bool adaptive = true;
  // Relative growth allowed between consecutive decay-monitor samples.
  double decay_slack = 0.02;

  NormRequest norms;
  bool keep_fields = false;  // keep full states at snapshot times
  std::optional<std::filesystem::path> snapshot_dir;  // KSF1 dumps

  // Throws ConfigError.
  void validate() const;
  std::vector<double> effective_snapshot_times() const;
};

enum class Outcome { GlobalDecay, Blowup, Undetermined };

std::string_view to_string(Outcome o);

struct TrajectorySummary {
  Outcome outcome = Outcome::Undetermined;
  double t_final = 0.0;
  std::optional<double> blowup_time;
  std::vector<NormReport> norm_series;
  std::vector<CoupledState> snapshots;  // filled when keep_fields
  // (t, t^{1-d/(2p)} ||u - mean u||_p) with p = d, sampled at snapshot times.
  std::vector<std::pair<double, double>> decay_monitor;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

struct StepResult {
  CoupledState state;
  double error_estimate = 0.0;  // relative, from the embedded Euler stage
  double max_grad_phi = 0.0;
};

// One ETD-RK2 step with the exact heat factor for u and the exact
// integrating factor for phi. Throws NonFinite if the result is not finite.
CoupledState step(const CoupledState& state, const SystemSpec& spec, double dt);
StepResult step_with_estimate(const CoupledState& state, const SystemSpec& spec, double dt);

TrajectorySummary run(CoupledState state0, const SystemSpec& spec, const StepperConfig& cfg);

}  // namespace kslab
