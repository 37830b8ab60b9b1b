#pragma once

// Mild formulation of PP: u = U0 + L u + B(u, u) with
//   U0(t)    = e^{t D} u0
//   (L u)(t) = -int_0^t e^{(t-s) D} div(u grad psi0)(s) ds,  psi0(s) = e^{s D / tau} phi0
//   B(u,v)   = -int_0^t e^{(t-s) D} div(u grad psi[v])(s) ds,
//              tau psi_t = D psi + v, psi(0) = 0.
// Both operators are evaluated by marching the auxiliary equations between
// trajectory nodes with the exact heat factor and linear-in-time forcing.

#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "kslab/models.hpp"
#include "kslab/trajectory.hpp"

namespace kslab {

struct PicardConfig {
  int max_iters = 30;
  // Monitoring times; empty means 32 log-spaced points on [1e-3, 1e2].
  std::vector<double> t_grid;
  // Norm exponent; unset means d - 4/3.
  std::optional<double> a;
  double conv_tol = 1e-8;
  // Storage nodes per monitoring interval (log-spaced), plus t = 0.
  int refine = 4;

  std::vector<double> effective_t_grid() const;
  double effective_a(int d) const;
  // Throws ConfigError.
  void validate(int d) const;
};

// Storage nodes: 0, then each monitoring interval split into `refine`
// log-spaced pieces. The monitoring times are a subset.
std::vector<double> picard_nodes(const PicardConfig& cfg);

struct PicardReport {
  bool converged = false;
  int iters = 0;
  std::vector<double> ynorm_series;  // u^(0), ..., u^(iters)
  std::vector<double> diff_series;   // ||u^(k) - u^(k-1)||, k = 1..iters
  std::vector<double> ratio_series;  // diff_{k+1} / diff_k, length iters - 1
  double a = 0.0;
  Trajectory final;  // fixed-point iterate on the monitoring times

  // Every recorded ratio is below 1.
  bool contractive() const;
  nlohmann::json to_json() const;
};

Trajectory apply_L(const Trajectory& u, const SpectralField& phi0, double tau);
Trajectory apply_B(const Trajectory& u, const Trajectory& v, double tau);

// max over the monitoring times of t^{1+(a-d)/2} sup |xi|^a |F(xi, t)|.
double y_norm_on(const Trajectory& traj, const std::vector<double>& times, double a);

// Banach iteration from u^(0) = U0. Throws ModelMismatch unless the model
// is PP and Diverged once an iterate exceeds 1e6 ||U0||_Y.
PicardReport picard_solve(const SpectralField& u0, const SpectralField& phi0,
                          const SystemSpec& spec, const PicardConfig& cfg);

}  // namespace kslab
