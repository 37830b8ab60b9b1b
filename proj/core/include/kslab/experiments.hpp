#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kslab/duhamel.hpp"
#include "kslab/initdata.hpp"
#include "kslab/stepper.hpp"

namespace kslab {

// Runs job(i) for every i in [0, count) on at most `threads` workers.
// The first exception thrown by a job is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job);

// Hardware concurrency, at least 1.
int default_threads();

struct ScanSpec {
  SystemSpec spec_base;
  InitSpec init;
  GridSpec grid;
  StepperConfig stepper;  // t_end and snapshot_times are replaced per probe
  std::vector<double> tau_list;
  double M_lo = 0.01;
  double M_hi = 10.0;
  double bisect_tol = 0.02;
  double t_end = 10.0;
  // When positive, each tau runs to t_end_per_tau * tau instead of t_end.
  double t_end_per_tau = 0.0;
  int replicates = 1;
  int threads = 1;

  void validate() const;
  double horizon(double tau) const;
};

struct Probe {
  double M = 0.0;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::Undetermined;
};

struct CriticalRow {
  double tau = 0.0;
  double t_end = 0.0;
  double M_star = 0.0;
  double M_lo = 0.0;  // final bracket
  double M_hi = 0.0;
  Outcome outcome_lo = Outcome::Undetermined;
  Outcome outcome_hi = Outcome::Undetermined;
  int runs_used = 0;
  bool valid = true;  // false on a monotonicity break
  std::string note;
  std::vector<Probe> probes;
};

// Outcome at amplitude M: GlobalDecay if every replicate decays, Blowup if
// any replicate blows up, Undetermined otherwise.
Outcome probe_outcome(const ScanSpec& scan, double tau, double M, std::vector<Probe>* log = nullptr);

// Bisection on M between the scan's bracket. Throws BracketInvalid unless
// M_lo decays and M_hi does not.
CriticalRow critical_amplitude(const ScanSpec& scan, double tau);

enum class ScalingLaw { TauOverLogCubed, SqrtTau };

std::string_view to_string(ScalingLaw law);
ScalingLaw parse_law(std::string_view name);

struct LawFit {
  ScalingLaw law = ScalingLaw::TauOverLogCubed;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least squares of log M against log(tau / (ln tau)^3) or (1/2) log tau.
LawFit fit_law(const std::vector<double>& taus, const std::vector<double>& m_star, ScalingLaw law);

struct ScanResult {
  std::vector<CriticalRow> rows;
  std::optional<LawFit> fit;
  bool increasing = false;  // M* strictly increasing along valid rows
  int n = 0;
  double t_end = 0.0;

  // Columns: tau, M_star, M_lo, M_hi, outcome_lo, outcome_hi, n, t_end.
  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
};

// Needs at least 4 taus spanning a factor of e^3, all >= e^3 for the
// log-cubed law. Rows run concurrently on scan.threads workers.
ScanResult tau_scaling_study(const ScanSpec& scan, ScalingLaw law);

struct SelfSimOptions {
  GridSpec grid = default_grid(3, 32);
  bool heat_only = false;
  StepperConfig stepper;
};

struct SelfSimResult {
  double deviation = 0.0;
  std::vector<std::pair<double, double>> per_time;  // (t, relative L2 distance)
};

// Evolves PP from Chandrasekhar (d >= 3) or band-limited delta (d = 2)
// data of amplitude M and compares u(t) with the rescaled profile taken at
// t1, at t = t1 4^j <= t2. Throws WindowInvalid unless t2 >= 4 t1 and
// 2 sqrt(t2) <= L/8.
SelfSimResult selfsimilar_check(double tau, double M, int d, std::pair<double, double> window,
                                const SelfSimOptions& opts);

struct PeLimitOptions {
  double t_lo = 0.1;
  double t_hi = 1.0;
  int samples = 10;
  StepperConfig stepper;
};

struct PeLimitResult {
  std::vector<std::pair<double, double>> rows;  // (tau, deviation)
  bool strictly_decreasing = false;
  bool non_increasing = false;
};

// PP with phi0 = elliptic_phi(u0) at each tau against one PE run; the
// deviation is the max relative L2 distance over the sample times.
PeLimitResult pe_limit_study(const std::vector<double>& tau_list, const SpectralField& u0, int d,
                             const PeLimitOptions& opts);

struct KappaOptions {
  PicardConfig picard;
  double rel_tol = 0.02;
  double u_fixed_fraction = 0.01;  // u0 size for the phi0 sweep, relative to the u edge
};

struct KappaEstimate {
  double kappa_hat = 0.0;        // half the contraction edge of ||u0||_{PM^{d-2}}
  double kappa_tilde_hat = 0.0;  // half the edge of ||grad phi0||_{PM^{d-1}}
  double edge_u = 0.0;
  double edge_phi = 0.0;
  int picard_runs = 0;

  nlohmann::json to_json() const;
};

// picard_solve converges within max_iters with every ratio below 1.
bool picard_contracts(const SpectralField& u0, const SpectralField& phi0, const SystemSpec& spec,
                      const PicardConfig& cfg);

// Contraction edges at tau = 1 along the family's amplitude ray. Throws
// BracketInvalid if no edge is found.
KappaEstimate estimate_kappa(int d, const GridSpec& grid, const InitSpec& family,
                             const KappaOptions& opts);

}  // namespace kslab
