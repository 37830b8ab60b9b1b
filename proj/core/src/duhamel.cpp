#include "kslab/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kslab/error.hpp"
#include "kslab/norms.hpp"

namespace kslab {

std::vector<double> PicardConfig::effective_t_grid() const {
  if (!t_grid.empty()) return t_grid;
  std::vector<double> g(32);
  for (std::size_t k = 0; k < g.size(); ++k) {
    g[k] = 1e-3 * std::pow(1e5, static_cast<double>(k) / (g.size() - 1));
  }
  g.back() = 1e2;
  return g;
}

double PicardConfig::effective_a(int d) const { return a ? *a : d - 4.0 / 3.0; }

void PicardConfig::validate(int d) const {
  std::ostringstream why;
  const auto g = effective_t_grid();
  const double av = effective_a(d);
  if (max_iters < 1) {
    why << "picard.max_iters must be positive";
  } else if (!(g.front() > 0.0) ||
             std::adjacent_find(g.begin(), g.end(), std::greater_equal<>()) != g.end()) {
    why << "picard.t_grid must be positive and strictly increasing";
  } else if (!(av >= d - 2.0 && av < d)) {
    why << "picard.a must lie in [d-2, d), got " << av;
  } else if (!(conv_tol > 0.0)) {
    why << "picard.conv_tol must be positive";
  } else if (refine < 1) {
    why << "picard.refine must be at least 1";
  } else {
    return;
  }
  fail(ErrorKind::ConfigError, why.str());
}

std::vector<double> picard_nodes(const PicardConfig& cfg) {
  const auto g = cfg.effective_t_grid();
  std::vector<double> nodes{0.0, g.front()};
  for (std::size_t k = 1; k < g.size(); ++k) {
    const double ratio = g[k] / g[k - 1];
    for (int j = 1; j < cfg.refine; ++j) {
      nodes.push_back(g[k - 1] * std::pow(ratio, static_cast<double>(j) / cfg.refine));
    }
    nodes.push_back(g[k]);
  }
  return nodes;
}

bool PicardReport::contractive() const {
  return std::all_of(ratio_series.begin(), ratio_series.end(), [](double r) { return r < 1.0; });
}

nlohmann::json PicardReport::to_json() const {
  nlohmann::json j;
  j["converged"] = converged;
  j["iters"] = iters;
  j["a"] = a;
  j["ynorm_series"] = ynorm_series;
  j["diff_series"] = diff_series;
  j["ratio_series"] = ratio_series;
  std::vector<double> ys;
  for (std::size_t k = 0; k < final.size(); ++k) {
    ys.push_back(y_snapshot(final.fields[k], a, final.times[k]));
  }
  j["final"] = {{"times", final.times}, {"y_snapshot", ys}};
  return j;
}

namespace {

SystemSpec drift_spec(int d) {
  SystemSpec s;
  s.model = Model::PP;
  s.d = d;
  return s;
}

// -div(u grad psi) at every node.
std::vector<SpectralField> drift_forcing(const Trajectory& u, const std::vector<SpectralField>& psi) {
  const SystemSpec spec = drift_spec(u.grid().d);
  std::vector<SpectralField> F;
  F.reserve(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    F.push_back(nonlinearity(CoupledState{u.fields[k], psi[k], u.times[k]}, spec));
  }
  return F;
}

// w_t = D w + F, w(t_0) = 0, with F linear between nodes.
Trajectory march(const std::vector<double>& times, const std::vector<SpectralField>& F) {
  const GridSpec& g = F.front().grid;
  const auto table = wave_table(g);
  Trajectory w;
  SpectralField cur(g, times.front());
  w.push_back(times.front(), cur);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = times[k + 1] - times[k];
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double z = -table->ksq[i] * h;
      cur[i] = std::exp(z) * cur[i] +
               h * (etd_phi1(z) * F[k][i] + etd_phi2(z) * (F[k + 1][i] - F[k][i]));
    }
    w.push_back(times[k + 1], cur);
  }
  return w;
}

std::vector<SpectralField> free_potential(const std::vector<double>& times, const SpectralField& phi0,
                                          double tau) {
  std::vector<SpectralField> psi;
  psi.reserve(times.size());
  for (double t : times) psi.push_back(heat_flow(phi0, (t - times.front()) / tau));
  return psi;
}

std::vector<SpectralField> induced_potential(const Trajectory& v, double tau) {
  std::vector<SpectralField> psi;
  psi.reserve(v.size());
  psi.emplace_back(v.grid(), v.times.front());
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    psi.push_back(phi_exact_update(psi.back(), v.fields[k], v.fields[k + 1], tau, 0.0,
                                   v.times[k + 1] - v.times[k]));
  }
  return psi;
}

void check_pair(const Trajectory& u, const Trajectory& v) {
  u.validate();
  v.validate();
  require(!u.empty(), ErrorKind::PreconditionViolation, "empty trajectory");
  require_same_grid(u.grid(), v.grid());
  require(u.times == v.times, ErrorKind::PreconditionViolation,
          "trajectories must share their time nodes");
}

std::vector<std::size_t> node_indices(const std::vector<double>& nodes, const std::vector<double>& times) {
  std::vector<std::size_t> idx;
  for (double t : times) {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), t);
    require(it != nodes.end() && *it == t, ErrorKind::PreconditionViolation,
            "monitoring time is not a trajectory node");
    idx.push_back(static_cast<std::size_t>(it - nodes.begin()));
  }
  return idx;
}

double y_distance(const Trajectory& x, const Trajectory& y, const std::vector<std::size_t>& idx, double a) {
  double best = 0.0;
  for (std::size_t k : idx) {
    best = std::max(best, y_snapshot(x.fields[k] - y.fields[k], a, x.times[k]));
  }
  return best;
}

double y_on_indices(const Trajectory& x, const std::vector<std::size_t>& idx, double a) {
  double best = 0.0;
  for (std::size_t k : idx) best = std::max(best, y_snapshot(x.fields[k], a, x.times[k]));
  return best;
}

}  // namespace

Trajectory apply_L(const Trajectory& u, const SpectralField& phi0, double tau) {
  u.validate();
  require(!u.empty(), ErrorKind::PreconditionViolation, "empty trajectory");
  require_same_grid(u.grid(), phi0.grid);
  require(tau > 0.0, ErrorKind::PreconditionViolation, "tau must be positive");
  return march(u.times, drift_forcing(u, free_potential(u.times, phi0, tau)));
}

Trajectory apply_B(const Trajectory& u, const Trajectory& v, double tau) {
  check_pair(u, v);
  require(tau > 0.0, ErrorKind::PreconditionViolation, "tau must be positive");
  return march(u.times, drift_forcing(u, induced_potential(v, tau)));
}

double y_norm_on(const Trajectory& traj, const std::vector<double>& times, double a) {
  return y_on_indices(traj, node_indices(traj.times, times), a);
}

PicardReport picard_solve(const SpectralField& u0, const SpectralField& phi0,
                          const SystemSpec& spec, const PicardConfig& cfg) {
  spec.validate();
  if (spec.model != Model::PP) fail(ErrorKind::ModelMismatch, "picard_solve needs model PP");
  require_same_grid(u0.grid, phi0.grid);
  require(u0.grid.d == spec.d, ErrorKind::ModelMismatch, "grid dimension differs from system.d");
  cfg.validate(spec.d);

  const double a = cfg.effective_a(spec.d);
  const std::vector<double> nodes = picard_nodes(cfg);
  const std::vector<double> monitor = cfg.effective_t_grid();
  const std::vector<std::size_t> idx = node_indices(nodes, monitor);

  Trajectory U0;
  for (double t : nodes) U0.push_back(t, heat_flow(u0, t));
  const std::vector<SpectralField> psi_free = free_potential(nodes, phi0, spec.tau);

  PicardReport rep;
  rep.a = a;
  const double y0 = y_on_indices(U0, idx, a);
  rep.ynorm_series.push_back(y0);

  Trajectory cur = U0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    std::vector<SpectralField> psi = induced_potential(cur, spec.tau);
    for (std::size_t k = 0; k < psi.size(); ++k) psi[k] += psi_free[k];
    const Trajectory w = march(nodes, drift_forcing(cur, psi));

    Trajectory next;
    for (std::size_t k = 0; k < nodes.size(); ++k) next.push_back(nodes[k], U0.fields[k] + w.fields[k]);

    const double yn = y_on_indices(next, idx, a);
    const double diff = y_distance(next, cur, idx, a);
    rep.iters = it;
    rep.ynorm_series.push_back(yn);
    if (!rep.diff_series.empty()) {
      const double prev = rep.diff_series.back();
      rep.ratio_series.push_back(prev > 0.0 ? diff / prev : 0.0);
    }
    rep.diff_series.push_back(diff);

    if (!std::isfinite(yn) || yn > 1e6 * y0) {
      std::ostringstream why;
      why << "Picard iterate " << it << " has Y norm " << yn << " against " << y0 << " for U0";
      fail(ErrorKind::Diverged, why.str());
    }
    cur = std::move(next);
    if (diff <= cfg.conv_tol * yn) {
      rep.converged = true;
      break;
    }
  }

  for (std::size_t k : idx) rep.final.push_back(cur.times[k], cur.fields[k]);
  return rep;
}

}  // namespace kslab
