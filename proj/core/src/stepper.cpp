#include "kslab/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kslab/error.hpp"
#include "kslab/snapshot.hpp"

namespace kslab {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::GlobalDecay: return "GlobalDecay";
    case Outcome::Blowup: return "Blowup";
    case Outcome::Undetermined: return "Undetermined";
  }
  return "?";
}

void StepperConfig::validate() const {
  std::ostringstream why;
  if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max)) {
    why << "stepper needs 0 < dt_min <= dt_init <= dt_max";
  } else if (!(safety > 0.0 && safety <= 1.0)) {
    why << "stepper.safety must be in (0, 1]";
  } else if (!(blowup_threshold > 0.0)) {
    why << "stepper.blowup_threshold must be positive";
  } else if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    why << "stepper.t_end must be positive";
  } else if (!(tolerance > 0.0)) {
    why << "stepper.tolerance must be positive";
  } else if (!(decay_slack >= 0.0)) {
    why << "stepper.decay_slack must be nonnegative";
  } else if (std::any_of(snapshot_times.begin(), snapshot_times.end(),
                         [&](double t) { return !(t >= 0.0 && t <= t_end); })) {
    why << "stepper.snapshot_times must lie in [0, t_end]";
  } else {
    return;
  }
  fail(ErrorKind::ConfigError, why.str());
}

std::vector<double> StepperConfig::effective_snapshot_times() const {
  std::vector<double> times = snapshot_times;
  if (times.empty()) {
    const int count = 32;
    const double lo = t_end * 1e-3;
    for (int k = 0; k < count; ++k) {
      times.push_back(lo * std::pow(t_end / lo, static_cast<double>(k) / (count - 1)));
    }
    times.back() = t_end;
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

namespace {

struct Stage {
  SpectralField N;
  double max_grad_phi = 0.0;
};

Stage evaluate(const CoupledState& s, const SystemSpec& spec) {
  NonlinearDiagnostics diag;
  Stage st{nonlinearity(s, spec, &diag), 0.0};
  st.max_grad_phi = diag.max_grad_phi;
  return st;
}

double l2(const SpectralField& F) {
  double s = 0.0;
  for (const cplx& c : F.coeffs) s += std::norm(c);
  return std::sqrt(s);
}

bool all_finite(const SpectralField& F) {
  return std::all_of(F.coeffs.begin(), F.coeffs.end(), [](const cplx& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

void refresh_phi(CoupledState& next, const CoupledState& prev, const SystemSpec& spec,
                 double h) {
  if (spec.evolves_phi()) {
    next.phi = phi_exact_update(*prev.phi, prev.u, next.u, spec.tau, spec.alpha, h);
  } else if (spec.model == Model::PE) {
    next.phi = elliptic_phi(next.u);
  }
  if (next.phi) next.phi->time_tag = next.time;
}

StepResult advance(const CoupledState& s, const SystemSpec& spec, double h, const Stage& first) {
  const auto table = wave_table(s.u.grid);
  const std::size_t size = s.u.size();

  CoupledState pred{SpectralField(s.u.grid, s.time + h), std::nullopt, s.time + h};
  std::vector<double> decay(size), w2(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double z = -table->ksq[i] * h;
    decay[i] = std::exp(z);
    w2[i] = h * etd_phi2(z);
    pred.u[i] = decay[i] * s.u[i] + h * etd_phi1(z) * first.N[i];
  }
  refresh_phi(pred, s, spec, h);

  const Stage second = evaluate(pred, spec);
  StepResult r;
  r.state = CoupledState{pred.u, std::nullopt, s.time + h};
  double diff = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const cplx corr = w2[i] * (second.N[i] - first.N[i]);
    r.state.u[i] += corr;
    diff += std::norm(corr);
  }
  refresh_phi(r.state, s, spec, h);

  if (!all_finite(r.state.u) || (r.state.phi && !all_finite(*r.state.phi))) {
    fail(ErrorKind::NonFinite, "non-finite coefficient after step");
  }
  const double scale = l2(r.state.u);
  r.error_estimate = scale > 0.0 ? std::sqrt(diff) / scale : 0.0;
  r.max_grad_phi = std::max(first.max_grad_phi, second.max_grad_phi);
  return r;
}

double sup_abs(const SpectralField& u) { return lp_norm(from_spectral(u), kInfinity); }

double fluctuation_monitor(const SpectralField& u, double t) {
  PhysicalField f = from_spectral(u);
  const double mean = u[0].real() / u.grid.volume();
  for (double& v : f.values) v -= mean;
  const double p = u.grid.d;
  return t > 0.0 ? ep_weight(t, u.grid.d, p) * lp_norm(f, p) : 0.0;
}

bool monitor_non_increasing(const std::vector<std::pair<double, double>>& series, double slack) {
  const std::size_t n = series.size();
  if (n < 2) return true;
  std::size_t start = (3 * n) / 4;
  start = std::min(start, n - 2);
  for (std::size_t k = start + 1; k < n; ++k) {
    if (series[k].second > (1.0 + slack) * series[k - 1].second) return false;
  }
  return series.back().second <= (1.0 + slack) * series[start].second;
}

}  // namespace

StepResult step_with_estimate(const CoupledState& state, const SystemSpec& spec, double dt) {
  require(dt > 0.0, ErrorKind::PreconditionViolation, "step needs dt > 0");
  return advance(state, spec, dt, evaluate(state, spec));
}

CoupledState step(const CoupledState& state, const SystemSpec& spec, double dt) {
  return step_with_estimate(state, spec, dt).state;
}

TrajectorySummary run(CoupledState state, const SystemSpec& spec, const StepperConfig& cfg) {
  cfg.validate();
  spec.validate();
  if (spec.evolves_phi() && !state.phi) state.phi = SpectralField(state.u.grid, state.time);
  if (spec.model == Model::PE) state.phi = elliptic_phi(state.u);

  const std::vector<double> stops = cfg.effective_snapshot_times();
  const bool drift = spec.model == Model::PP || spec.model == Model::PE;
  const double kmax = state.u.grid.max_wavenumber();

  TrajectorySummary out;
  std::size_t next_snap = 0;
  int dump_index = 0;

  auto record = [&](const CoupledState& s) {
    out.norm_series.push_back(make_report(s.u, s.time, cfg.norms));
    out.decay_monitor.emplace_back(s.time, fluctuation_monitor(s.u, s.time));
    if (cfg.keep_fields) out.snapshots.push_back(s);
    if (cfg.snapshot_dir) {
      std::filesystem::create_directories(*cfg.snapshot_dir);
      char name[32];
      std::snprintf(name, sizeof name, "u_%04d.ksf", dump_index);
      write_ksf1(*cfg.snapshot_dir / name, s.u);
      if (s.phi) {
        std::snprintf(name, sizeof name, "phi_%04d.ksf", dump_index);
        write_ksf1(*cfg.snapshot_dir / name, *s.phi);
      }
      ++dump_index;
    }
  };

  while (next_snap < stops.size() && stops[next_snap] <= state.time) {
    if (stops[next_snap] == state.time) record(state);
    ++next_snap;
  }

  auto blown = [&](const SpectralField& u) {
    const double m = sup_abs(u);
    return !std::isfinite(m) || m > cfg.blowup_threshold;
  };

  // Shrinks the failing step [t, t + h] until its length drops below
  // dt_min, advancing over every half that stays bounded.
  auto bracket_blowup = [&](double h) {
    while (h > cfg.dt_min) {
      h /= 2.0;
      try {
        StepResult r = step_with_estimate(state, spec, h);
        if (!blown(r.state.u)) {
          state = std::move(r.state);
          continue;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonFinite) throw;
      }
    }
    out.outcome = Outcome::Blowup;
    out.blowup_time = std::min(state.time + h, cfg.t_end);
    out.t_final = state.time;
  };

  Stage first = evaluate(state, spec);
  double dt = cfg.dt_init;
  while (state.time < cfg.t_end) {
    const double stop = next_snap < stops.size() ? stops[next_snap] : cfg.t_end;
    double h = std::min({dt, cfg.dt_max, stop - state.time});
    if (drift && cfg.adaptive) {
      h = std::min(h, 0.5 / (first.max_grad_phi * kmax + 1e-12));
    }
    h = std::max(h, std::min(cfg.dt_min, stop - state.time));
    // a remainder lost to rounding would leave a zero-length step next time
    if (stop - state.time - h <= 1e-12 * stop) h = stop - state.time;
    const bool lands = h >= stop - state.time;

    StepResult r;
    try {
      r = advance(state, spec, h, first);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonFinite) throw;
      if (cfg.adaptive && h > cfg.dt_min) {
        ++out.rejected;
        dt = std::max(cfg.dt_min, h / 4.0);
        continue;
      }
      bracket_blowup(h);
      return out;
    }

    if (cfg.adaptive && r.error_estimate > cfg.tolerance && h > cfg.dt_min) {
      ++out.rejected;
      const double factor = std::max(0.2, cfg.safety * std::sqrt(cfg.tolerance / r.error_estimate));
      dt = std::max(cfg.dt_min, h * factor);
      continue;
    }
    if (blown(r.state.u)) {
      bracket_blowup(h);
      return out;
    }

    state = std::move(r.state);
    if (lands) state.time = stop;
    if (state.phi) state.phi->time_tag = state.time;
    ++out.steps;

    if (cfg.adaptive) {
      const double factor = r.error_estimate > 0.0
                                ? std::min(5.0, cfg.safety * std::sqrt(cfg.tolerance / r.error_estimate))
                                : 5.0;
      dt = lands ? std::max(dt, h * factor) : h * factor;
      dt = std::clamp(dt, cfg.dt_min, cfg.dt_max);
    }

    if (lands && next_snap < stops.size()) {
      record(state);
      ++next_snap;
    }
    if (state.time < cfg.t_end) first = evaluate(state, spec);
  }

  out.t_final = state.time;
  out.outcome = monitor_non_increasing(out.decay_monitor, cfg.decay_slack)
                    ? Outcome::GlobalDecay
                    : Outcome::Undetermined;
  return out;
}

}  // namespace kslab
