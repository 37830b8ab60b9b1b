#include "kslab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "kslab/error.hpp"
#include "kslab/norms.hpp"

namespace kslab {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (first) std::rethrow_exception(first);
}

int default_threads() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void ScanSpec::validate() const {
  std::ostringstream why;
  if (!(M_lo > 0.0 && M_lo < M_hi)) {
    why << "scan needs 0 < M_lo < M_hi";
  } else if (std::any_of(tau_list.begin(), tau_list.end(), [](double t) { return !(t > 0.0); })) {
    why << "scan taus must be positive";
  } else if (!(bisect_tol > 0.0 && bisect_tol < 1.0)) {
    why << "scan.bisect_tol must be in (0, 1)";
  } else if (!(t_end > 0.0) || !(t_end_per_tau >= 0.0)) {
    why << "scan.t_end must be positive";
  } else if (replicates < 1 || threads < 1) {
    why << "scan.replicates and scan.threads must be positive";
  } else {
    grid.validate();
    init.validate();
    if (grid.d != spec_base.d) fail(ErrorKind::ConfigError, "grid.d differs from system.d");
    return;
  }
  fail(ErrorKind::ConfigError, why.str());
}

double ScanSpec::horizon(double tau) const {
  return t_end_per_tau > 0.0 ? t_end_per_tau * tau : t_end;
}

namespace {

Outcome single_run(const ScanSpec& scan, double tau, double M, std::uint64_t seed) {
  SystemSpec spec = scan.spec_base;
  spec.tau = tau;
  InitSpec init = scan.init;
  init.amplitude = M;
  init.seed = seed;
  StepperConfig cfg = scan.stepper;
  cfg.t_end = scan.horizon(tau);
  cfg.snapshot_times.clear();
  cfg.norms = NormRequest{};
  cfg.norms.morrey = false;
  cfg.keep_fields = false;
  cfg.snapshot_dir.reset();
  return run(make_state(make(init, scan.grid), spec), spec, cfg).outcome;
}

bool decays(Outcome o) { return o == Outcome::GlobalDecay; }

// Per seed, no decaying probe may sit above a non-decaying one.
bool monotone(const std::vector<Probe>& probes) {
  std::map<std::uint64_t, std::vector<std::pair<double, bool>>> by_seed;
  for (const Probe& p : probes) by_seed[p.seed].emplace_back(p.M, decays(p.outcome));
  for (auto& [seed, list] : by_seed) {
    std::sort(list.begin(), list.end());
    bool seen_growth = false;
    for (const auto& [M, ok] : list) {
      if (!ok) seen_growth = true;
      else if (seen_growth) return false;
    }
  }
  return true;
}

}  // namespace

Outcome probe_outcome(const ScanSpec& scan, double tau, double M, std::vector<Probe>* log) {
  bool all_decay = true;
  bool any_blowup = false;
  for (int r = 0; r < scan.replicates; ++r) {
    const std::uint64_t seed = scan.init.seed + static_cast<std::uint64_t>(r);
    const Outcome o = single_run(scan, tau, M, seed);
    if (log) log->push_back({M, seed, o});
    all_decay = all_decay && decays(o);
    any_blowup = any_blowup || o == Outcome::Blowup;
  }
  if (all_decay) return Outcome::GlobalDecay;
  return any_blowup ? Outcome::Blowup : Outcome::Undetermined;
}

CriticalRow critical_amplitude(const ScanSpec& scan, double tau) {
  scan.validate();
  CriticalRow row;
  row.tau = tau;
  row.t_end = scan.horizon(tau);
  row.M_lo = scan.M_lo;
  row.M_hi = scan.M_hi;
  row.outcome_lo = probe_outcome(scan, tau, row.M_lo, &row.probes);
  row.outcome_hi = probe_outcome(scan, tau, row.M_hi, &row.probes);
  if (!decays(row.outcome_lo) || decays(row.outcome_hi)) {
    std::ostringstream why;
    why << "tau=" << tau << ": M_lo=" << row.M_lo << " gives " << to_string(row.outcome_lo)
        << ", M_hi=" << row.M_hi << " gives " << to_string(row.outcome_hi);
    fail(ErrorKind::BracketInvalid, why.str());
  }
  while (row.M_hi - row.M_lo > scan.bisect_tol * row.M_hi) {
    const double mid = std::sqrt(row.M_lo * row.M_hi);
    const Outcome o = probe_outcome(scan, tau, mid, &row.probes);
    if (decays(o)) {
      row.M_lo = mid;
      row.outcome_lo = o;
    } else {
      row.M_hi = mid;
      row.outcome_hi = o;
    }
  }
  row.M_star = 0.5 * (row.M_lo + row.M_hi);
  row.runs_used = static_cast<int>(row.probes.size());
  if (!monotone(row.probes)) {
    row.valid = false;
    row.note = "MonotonicityBreak";
  }
  return row;
}

std::string_view to_string(ScalingLaw law) {
  return law == ScalingLaw::TauOverLogCubed ? "TauOverLogCubed" : "SqrtTau";
}

ScalingLaw parse_law(std::string_view name) {
  if (name == "TauOverLogCubed") return ScalingLaw::TauOverLogCubed;
  if (name == "SqrtTau") return ScalingLaw::SqrtTau;
  fail(ErrorKind::ConfigError, "unknown scaling law '" + std::string(name) + "'");
}

LawFit fit_law(const std::vector<double>& taus, const std::vector<double>& m_star, ScalingLaw law) {
  require(taus.size() == m_star.size() && taus.size() >= 2, ErrorKind::PreconditionViolation,
          "fit needs at least two (tau, M*) pairs");
  const std::size_t n = taus.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lt = std::log(taus[i]);
    x[i] = law == ScalingLaw::TauOverLogCubed ? lt - 3.0 * std::log(lt) : 0.5 * lt;
    y[i] = std::log(m_star[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorKind::PreconditionViolation, "fit needs distinct abscissae");
  LawFit f;
  f.law = law;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double ss_res = syy - f.slope * sxy;
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

void ScanResult::write_csv(std::ostream& os) const {
  os << "tau,M_star,M_lo,M_hi,outcome_lo,outcome_hi,n,t_end\n";
  char buf[256];
  for (const CriticalRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%s,%s,%d,%.17g\n", r.tau, r.M_star,
                  r.M_lo, r.M_hi, std::string(to_string(r.outcome_lo)).c_str(),
                  std::string(to_string(r.outcome_hi)).c_str(), n, r.t_end);
    os << buf;
  }
}

nlohmann::json ScanResult::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["t_end"] = t_end;
  j["increasing"] = increasing;
  j["rows"] = nlohmann::json::array();
  for (const CriticalRow& r : rows) {
    j["rows"].push_back({{"tau", r.tau},
                         {"t_end", r.t_end},
                         {"M_star", r.M_star},
                         {"M_lo", r.M_lo},
                         {"M_hi", r.M_hi},
                         {"outcome_lo", to_string(r.outcome_lo)},
                         {"outcome_hi", to_string(r.outcome_hi)},
                         {"runs_used", r.runs_used},
                         {"valid", r.valid},
                         {"note", r.note}});
  }
  if (fit) {
    j["fit"] = {{"law", to_string(fit->law)},
                {"slope", fit->slope},
                {"intercept", fit->intercept},
                {"r2", fit->r2}};
  } else {
    j["fit"] = nullptr;
  }
  return j;
}

ScanResult tau_scaling_study(const ScanSpec& scan, ScalingLaw law) {
  scan.validate();
  const auto& taus = scan.tau_list;
  require(taus.size() >= 4, ErrorKind::PreconditionViolation,
          "tau scaling study needs at least 4 taus");
  const auto [lo, hi] = std::minmax_element(taus.begin(), taus.end());
  const double e3 = std::exp(3.0) * (1.0 - 1e-12);
  require(*hi / *lo >= e3, ErrorKind::PreconditionViolation,
          "tau list must span at least a factor e^3");
  if (law == ScalingLaw::TauOverLogCubed) {
    require(*lo >= e3, ErrorKind::PreconditionViolation, "log-cubed law needs every tau >= e^3");
  }

  ScanResult res;
  res.n = scan.grid.n;
  res.t_end = scan.t_end;
  res.rows.resize(taus.size());
  parallel_for(taus.size(), scan.threads,
               [&](std::size_t i) { res.rows[i] = critical_amplitude(scan, taus[i]); });

  std::vector<double> ft, fm;
  for (const CriticalRow& r : res.rows) {
    if (!r.valid) continue;
    ft.push_back(r.tau);
    fm.push_back(r.M_star);
  }
  std::vector<std::size_t> order(ft.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ft[a] < ft[b]; });
  res.increasing = order.size() >= 2;
  for (std::size_t k = 1; k < order.size(); ++k) {
    res.increasing = res.increasing && fm[order[k]] > fm[order[k - 1]];
  }
  if (ft.size() >= 2) res.fit = fit_law(ft, fm, law);
  return res;
}

namespace {

double relative_l2(const SpectralField& x, const SpectralField& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += std::norm(x[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : (num > 0.0 ? kInfinity : 0.0);
}

// Profile at t1 rescaled to t = t1 4^j: F(xi) = 4^{j(d/2-1)} F_1(2^j xi).
SpectralField rescale(const SpectralField& F1, int j) {
  const GridSpec& g = F1.grid;
  SpectralField out(g);
  const int factor = 1 << j;
  const double gain = std::pow(4.0, j * (g.d / 2.0 - 1.0));
  std::array<int, kMaxDim> w{};
  for (std::size_t flat = 1; flat < g.size(); ++flat) {
    std::size_t rem = flat;
    bool inside = true;
    for (int a = g.d - 1; a >= 0; --a) {
      w[a] = wrap_index(static_cast<int>(rem % g.n), g.n) * factor;
      rem /= g.n;
      inside = inside && w[a] >= -g.n / 2 && w[a] < g.n / 2;
    }
    if (inside) out[flat] = gain * F1[mode_index(g, std::span<const int>(w.data(), g.d))];
  }
  return out;
}

SpectralField without_mean(SpectralField F) {
  F[0] = 0.0;
  return F;
}

}  // namespace

SelfSimResult selfsimilar_check(double tau, double M, int d, std::pair<double, double> window,
                                const SelfSimOptions& opts) {
  const GridSpec& g = opts.grid;
  g.validate();
  require(g.d == d, ErrorKind::ConfigError, "selfsim grid dimension differs from d");
  const auto [t1, t2] = window;
  if (!(t1 > 0.0 && t2 >= 4.0 * t1 && 2.0 * std::sqrt(t2) <= g.box_length / 8.0)) {
    std::ostringstream why;
    why << "window (" << t1 << ", " << t2 << ") needs t2 >= 4 t1 and 2 sqrt(t2) <= L/8 = "
        << g.box_length / 8.0;
    fail(ErrorKind::WindowInvalid, why.str());
  }

  std::vector<double> times;
  for (double t = t1; t <= t2 * (1.0 + 1e-12); t *= 4.0) times.push_back(t);

  SelfSimResult res;
  if (M == 0.0) {
    for (double t : times) res.per_time.emplace_back(t, 0.0);
    return res;
  }

  InitSpec init;
  init.family = d == 2 ? Family::BandLimitedDelta : Family::Chandrasekhar;
  init.amplitude = M;
  const SpectralField u0 = make(init, g);

  std::vector<SpectralField> fields;
  if (opts.heat_only) {
    for (double t : times) fields.push_back(heat_flow(u0, t));
  } else {
    SystemSpec spec;
    spec.model = Model::PP;
    spec.d = d;
    spec.tau = tau;
    StepperConfig cfg = opts.stepper;
    cfg.t_end = times.back();
    cfg.snapshot_times = times;
    cfg.keep_fields = true;
    cfg.norms = NormRequest{};
    cfg.norms.morrey = false;
    const TrajectorySummary sum = run(make_state(u0, spec), spec, cfg);
    if (sum.snapshots.size() != times.size()) {
      fail(ErrorKind::Diverged, "self-similarity run stopped before the window closed");
    }
    for (const CoupledState& s : sum.snapshots) fields.push_back(s.u);
  }

  for (std::size_t j = 0; j < times.size(); ++j) {
    const double dev = relative_l2(rescale(fields[0], static_cast<int>(j)), without_mean(fields[j]));
    res.per_time.emplace_back(times[j], dev);
    res.deviation = std::max(res.deviation, dev);
  }
  return res;
}

PeLimitResult pe_limit_study(const std::vector<double>& tau_list, const SpectralField& u0, int d,
                             const PeLimitOptions& opts) {
  require(u0.grid.d == d, ErrorKind::ConfigError, "u0 grid dimension differs from d");
  require(!tau_list.empty(), ErrorKind::PreconditionViolation, "pe-limit needs taus");
  for (std::size_t i = 0; i < tau_list.size(); ++i) {
    require(tau_list[i] > 0.0 && tau_list[i] <= 1.0, ErrorKind::PreconditionViolation,
            "pe-limit taus must lie in (0, 1]");
    require(i == 0 || tau_list[i] < tau_list[i - 1], ErrorKind::PreconditionViolation,
            "pe-limit taus must be strictly decreasing");
  }
  require(opts.samples >= 1 && opts.t_lo > 0.0 && opts.t_hi >= opts.t_lo,
          ErrorKind::ConfigError, "pe-limit needs samples >= 1 and 0 < t_lo <= t_hi");

  std::vector<double> times;
  for (int k = 0; k < opts.samples; ++k) {
    times.push_back(opts.samples == 1 ? opts.t_hi
                                      : opts.t_lo + (opts.t_hi - opts.t_lo) * k / (opts.samples - 1));
  }
  StepperConfig cfg = opts.stepper;
  cfg.t_end = times.back();
  cfg.snapshot_times = times;
  cfg.keep_fields = true;
  cfg.norms = NormRequest{};
  cfg.norms.morrey = false;

  auto evolve = [&](const SystemSpec& spec, std::optional<SpectralField> phi0) {
    const TrajectorySummary sum = run(make_state(u0, spec, std::move(phi0)), spec, cfg);
    if (sum.snapshots.size() != times.size()) {
      fail(ErrorKind::Diverged, std::string(to_string(spec.model)) + " run ended early");
    }
    return sum.snapshots;
  };

  SystemSpec pe;
  pe.model = Model::PE;
  pe.d = d;
  const auto reference = evolve(pe, std::nullopt);

  PeLimitResult res;
  for (double tau : tau_list) {
    SystemSpec pp = pe;
    pp.model = Model::PP;
    pp.tau = tau;
    const auto states = evolve(pp, elliptic_phi(u0));
    double dev = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      dev = std::max(dev, relative_l2(states[k].u, reference[k].u));
    }
    res.rows.emplace_back(tau, dev);
  }
  res.strictly_decreasing = res.non_increasing = true;
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    res.strictly_decreasing = res.strictly_decreasing && res.rows[i].second < res.rows[i - 1].second;
    res.non_increasing = res.non_increasing && res.rows[i].second <= res.rows[i - 1].second;
  }
  return res;
}

nlohmann::json KappaEstimate::to_json() const {
  return {{"kappa_hat", kappa_hat},
          {"kappa_tilde_hat", kappa_tilde_hat},
          {"edge_u", edge_u},
          {"edge_phi", edge_phi},
          {"picard_runs", picard_runs},
          {"label", "empirical-kappa"}};
}

bool picard_contracts(const SpectralField& u0, const SpectralField& phi0, const SystemSpec& spec,
                      const PicardConfig& cfg) {
  try {
    const PicardReport rep = picard_solve(u0, phi0, spec, cfg);
    return rep.converged && rep.contractive();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Diverged) return false;
    throw;
  }
}

namespace {

// Largest s with ok(s) along a ray, to relative width rel_tol.
double contraction_edge(const std::function<bool(double)>& ok, double start, double rel_tol) {
  double lo = start;
  int shrink = 0;
  while (!ok(lo)) {
    lo /= 10.0;
    if (++shrink > 8) fail(ErrorKind::BracketInvalid, "no contracting amplitude found");
  }
  double hi = 4.0 * lo;
  int grow = 0;
  while (ok(hi)) {
    lo = hi;
    hi *= 4.0;
    if (++grow > 40) fail(ErrorKind::BracketInvalid, "no contraction edge found");
  }
  while (hi / lo > 1.0 + rel_tol) {
    const double mid = std::sqrt(lo * hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

KappaEstimate estimate_kappa(int d, const GridSpec& grid, const InitSpec& family,
                             const KappaOptions& opts) {
  grid.validate();
  require(grid.d == d, ErrorKind::ConfigError, "grid dimension differs from d");
  SystemSpec spec;
  spec.model = Model::PP;
  spec.d = d;
  spec.tau = 1.0;

  InitSpec unit = family;
  unit.amplitude = 1.0;
  const SpectralField shape = make(unit, grid);
  const double shape_norm = pm_norm(shape, d - 2.0);
  require(shape_norm > 0.0, ErrorKind::BracketInvalid, "data family has zero norm");
  const SpectralField zero(grid);

  KappaEstimate est;
  auto u_ok = [&](double s) {
    ++est.picard_runs;
    return picard_contracts((s / shape_norm) * shape, zero, spec, opts.picard);
  };
  est.edge_u = contraction_edge(u_ok, 1e-2, opts.rel_tol);
  est.kappa_hat = 0.5 * est.edge_u;

  const SpectralField u_small = (opts.u_fixed_fraction * est.edge_u / shape_norm) * shape;
  const SpectralField phi_shape = elliptic_phi(shape);
  const double phi_norm = grad_pm_norm(phi_shape, d - 1.0);
  require(phi_norm > 0.0, ErrorKind::BracketInvalid, "potential of the family has zero norm");
  auto phi_ok = [&](double s) {
    ++est.picard_runs;
    return picard_contracts(u_small, (s / phi_norm) * phi_shape, spec, opts.picard);
  };
  est.edge_phi = contraction_edge(phi_ok, 1e-2, opts.rel_tol);
  est.kappa_tilde_hat = 0.5 * est.edge_phi;
  return est;
}

}  // namespace kslab
