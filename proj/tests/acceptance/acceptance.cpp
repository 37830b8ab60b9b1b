// Acceptance checks. One line per criterion:
//   [PASS] criterion N: <title> | <measurements>
// Usage: kslab_acceptance [N ...]   (no argument runs all of them)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kslab/bounds.hpp"
#include "kslab/duhamel.hpp"
#include "kslab/error.hpp"
#include "kslab/experiments.hpp"
#include "kslab/initdata.hpp"
#include "kslab/norms.hpp"
#include "kslab/stepper.hpp"
#include "oracles/oracles.hpp"

using namespace kslab;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Result()> check;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SpectralField uniform(const GridSpec& g, double c) {
  SpectralField F(g);
  F[0] = c * g.volume();
  return F;
}

double rel_l2(const SpectralField& a, const SpectralField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = a * std::pow(b / a, double(i) / (n - 1));
  t.back() = b;
  return t;
}

Result c1_constants() {
  const double pi3 = std::pow(kPi, 3);
  const double err_id = std::abs(riesz_constant(2.0, 2.0, 3) - pi3);
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int d : {2, 3}) {
    std::uniform_real_distribution<double> U(0.0, double(d));
    int done = 0;
    while (done < 20) {
      const double a = U(rng), b = U(rng);
      // keep away from the poles of the Gamma quotient
      if (a < 0.05 || b < 0.05 || a > d - 0.05 || b > d - 0.05 || a + b < d + 0.05) continue;
      ++done;
      const double ref = oracle::riesz_convolution(a, b, d);
      worst = std::max(worst, std::abs(riesz_constant(a, b, d) - ref) / ref);
    }
  }
  return {err_id <= 1e-10 && worst <= 1e-3,
          fmt("|C(2,2,3) - pi^3| = %.2e, worst oracle rel err = %.2e over 40 points", err_id, worst)};
}

Result c2_integral() {
  const BoundCertificate c = integral_lemma_sweep(10000, 7);
  return {c.passed, fmt("10000 samples, worst (value + err) / bound = %.4f", c.worst_ratio)};
}

Result c3_kscaling() {
  bool ok = true;
  std::string detail;
  for (int d : {2, 3}) {
    const BoundCertificate band = bilinear_K_band(d);
    const BoundCertificate slope = bilinear_K_slope(d);
    ok = ok && band.passed && slope.passed;
    const double spread = band.details["max_Kb3"].get<double>() / band.details["min_Kb3"].get<double>();
    detail += fmt("d=%d: max/min of K b^3 = %.3f (need <= 3), slope = %.3f (need -3 +- 0.1); ", d, spread,
                  slope.details["slope"].get<double>());
  }
  return {ok, detail};
}

double nlh_fixed_step_error(double dt) {
  const GridSpec g = default_grid(2, 64);
  SystemSpec spec;
  spec.model = Model::NLH;
  CoupledState s = make_state(uniform(g, 1.0), spec);
  const int steps = static_cast<int>(std::lround(0.5 / dt));
  for (int k = 0; k < steps; ++k) s = step(s, spec, dt);
  return std::abs(s.u[0].real() / g.volume() - 2.0);
}

Result c4_stepper() {
  const GridSpec g = default_grid(2, 64);
  SystemSpec spec;
  spec.model = Model::NLH;
  StepperConfig cfg;
  cfg.t_end = 2.0;
  const TrajectorySummary up = run(make_state(uniform(g, 1.0), spec), spec, cfg);
  const double tb = up.blowup_time.value_or(NAN);
  const bool blow_ok = up.outcome == Outcome::Blowup && std::abs(tb - 1.0) <= 1e-3;

  StepperConfig dcfg;
  dcfg.snapshot_times = {1.0};
  dcfg.keep_fields = true;
  const TrajectorySummary down = run(make_state(uniform(g, -1.0), spec), spec, dcfg);
  const double u1 = down.snapshots.empty() ? NAN : down.snapshots.back().u[0].real() / g.volume();
  const double derr = std::abs(u1 + 0.5);
  const bool decay_ok = down.outcome == Outcome::GlobalDecay && derr <= 1e-6;

  const double e1 = nlh_fixed_step_error(1e-2), e2 = nlh_fixed_step_error(5e-3),
               e3 = nlh_fixed_step_error(2.5e-3);
  const double order = std::min(std::log2(e1 / e2), std::log2(e2 / e3));
  return {blow_ok && decay_ok && order >= 1.9,
          fmt("blowup at %.7f, |u(1) + 1/2| = %.2e, observed order %.3f", tb, derr, order)};
}

Result c5_mass() {
  const GridSpec g = default_grid(2, 128);
  SystemSpec spec;
  InitSpec init;
  const SpectralField u0 = make(init, g);
  CoupledState s = make_state(u0, spec);
  double drift = 0.0;
  for (int k = 0; k < 1000; ++k) {
    s = step(s, spec, 1e-3);
    drift = std::max(drift, std::abs(s.u[0] - u0[0]));
  }
  return {drift <= 1e-10, fmt("1000 steps, max |u^(0, t) - u^(0, 0)| = %.2e (mass %.6f)", drift,
                              u0[0].real())};
}

Result c6_picard_vs_stepper() {
  const KappaEstimate k2 = estimate_kappa(2, default_grid(2, 32), InitSpec{}, KappaOptions{});
  const GridSpec g = default_grid(2, 64);
  InitSpec init;
  const double unit_pm = pm_norm(make(init, g), 0.0);
  init.amplitude = 1e-3 * k2.kappa_hat / unit_pm;
  const SpectralField u0 = make(init, g);
  SystemSpec spec;
  PicardConfig pc;
  const PicardReport rep = picard_solve(u0, SpectralField(g), spec, pc);
  bool monotone = true;
  for (std::size_t i = 1; i < rep.ratio_series.size(); ++i) {
    monotone = monotone && rep.ratio_series[i] < rep.ratio_series[i - 1];
  }

  StepperConfig sc;
  sc.t_end = pc.effective_t_grid().back();
  sc.snapshot_times = pc.effective_t_grid();
  sc.keep_fields = true;
  sc.norms.morrey = false;
  const TrajectorySummary traj = run(make_state(u0, spec), spec, sc);
  double worst = 0.0;
  const std::size_t m = std::min(traj.snapshots.size(), rep.final.size());
  for (std::size_t i = 0; i < m; ++i) {
    worst = std::max(worst, rel_l2(rep.final.fields[i], traj.snapshots[i].u));
  }
  const bool ok = rep.converged && rep.iters <= 10 && monotone && m == rep.final.size() && worst <= 1e-5;
  return {ok, fmt("kappa_hat = %.3f, pm norm = %.3e, %d iterations, ratios decreasing: %s, max rel "
                  "diff vs run() = %.2e",
                  k2.kappa_hat, pm_norm(u0, 0.0), rep.iters, monotone ? "yes" : "no", worst)};
}

Result c7_tau_contraction() {
  const GridSpec g = default_grid(2, 64);
  InitSpec init;
  const SpectralField u0 = make(init, g);
  PicardConfig pc;
  pc.conv_tol = 1e-12;
  std::vector<double> first;
  std::string detail;
  for (double tau : {1.0, 10.0, 100.0}) {
    SystemSpec spec;
    spec.tau = tau;
    const PicardReport rep = picard_solve(u0, SpectralField(g), spec, pc);
    first.push_back(rep.ratio_series.empty() ? NAN : rep.ratio_series.front());
    detail += fmt("tau=%g: %.4f; ", tau, first.back());
  }
  const bool ok = first[1] <= first[0] && first[2] <= first[1];
  return {ok, "first contraction ratio " + detail};
}

Result c8_scaling() {
  ScanSpec s;
  s.spec_base.model = Model::TM2;
  s.grid = default_grid(2, 128);
  s.tau_list = {std::exp(3.0), std::exp(4.0), std::exp(5.0), std::exp(6.0)};
  s.M_lo = 1.0;
  s.M_hi = 1e5;
  s.bisect_tol = 0.05;
  s.t_end_per_tau = 4.0;
  s.stepper.tolerance = 1e-4;
  s.stepper.dt_max = 1.0;
  s.stepper.norms.morrey = false;
  s.threads = default_threads();
  const ScanResult res = tau_scaling_study(s, ScalingLaw::TauOverLogCubed);
  std::vector<double> taus, ms;
  std::string rows;
  for (const CriticalRow& r : res.rows) {
    taus.push_back(r.tau);
    ms.push_back(r.M_star);
    rows += fmt("M*(e^%.0f) = %.4g; ", std::log(r.tau), r.M_star);
  }
  const LawFit sq = fit_law(taus, ms, ScalingLaw::SqrtTau);
  const double slope = res.fit ? res.fit->slope : NAN;
  const bool ok = res.increasing && slope >= 0.7 && slope <= 1.3;
  return {ok, rows + fmt("increasing: %s, slope vs tau/ln^3 tau = %.3f (r2 %.3f); reported: slope vs "
                         "sqrt(tau) = %.3f",
                         res.increasing ? "yes" : "no", slope, res.fit ? res.fit->r2 : NAN, sq.slope)};
}

Result c9_selfsimilar() {
  const double tau = std::exp(4.0);
  InitSpec fam;
  fam.family = Family::Chandrasekhar;
  const KappaEstimate k3 = estimate_kappa(3, default_grid(3, 16), fam, KappaOptions{});
  const double b = optimal_b(tau);
  const ThresholdParams tp = ThresholdParams::make(3, tau, b, k3.kappa_hat, k3.kappa_tilde_hat);

  SelfSimOptions opts;
  opts.grid = default_grid(3, 64);
  fam.amplitude = 1.0;
  const double unit_pm = pm_norm(make(fam, opts.grid), 1.0);
  // half of the large-tau size limit
  const double M = 0.5 * k3.kappa_hat * b * b * b * std::pow(tau, 1.0 - b) / unit_pm;
  const bool size_ok = size_condition(tp, M * unit_pm, 0.0) == kslab::Verdict::SatisfiesLargeTau;

  const std::pair<double, double> window{0.5, 2.0};
  const double dev = selfsimilar_check(tau, M, 3, window, opts).deviation;
  opts.heat_only = true;
  const double heat = selfsimilar_check(tau, M, 3, window, opts).deviation;
  return {size_ok && dev <= 0.05 && heat <= 1e-3,
          fmt("kappa_hat = %.3f, M = %.4f, size condition %s, deviation %.2e, heat-only %.2e",
              k3.kappa_hat, M, size_ok ? "met" : "NOT met", dev, heat)};
}

Result c10_pe_limit() {
  const GridSpec g = default_grid(2, 64);
  InitSpec init;
  init.amplitude = 0.5;
  const PeLimitResult r = pe_limit_study({1.0, 0.3, 0.1, 0.03, 0.01}, make(init, g), 2, PeLimitOptions{});
  std::string rows;
  for (const auto& [tau, dev] : r.rows) rows += fmt("tau=%g: %.3e; ", tau, dev);
  return {r.strictly_decreasing, rows + (r.strictly_decreasing ? "strictly decreasing" : "NOT decreasing")};
}

Result c11_besov() {
  const GridSpec g{2, 1024, 400.0};
  InitSpec init;
  const double v = besov_norm(make(init, g), 2.0, log_grid(1e-3, 1e3, 32));
  const double exact = 0.5 * std::sqrt(kPi / 2.0);
  const double rel = std::abs(v - exact) / exact;
  return {rel <= 1e-2, fmt("besov_norm = %.6f, closed form %.6f, rel diff %.2e", v, exact, rel)};
}

Result c12_smoothing() {
  const GridSpec g = default_grid(2, 128);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    PhysicalField f(g);
    for (double& v : f.values) v = U(rng);
    const SpectralField F = dealias(to_spectral(f));
    const PhysicalField f0 = from_spectral(F);
    for (auto [p, q] : {std::pair{1.0, 2.0}, std::pair{2.0, kInfinity}, std::pair{1.0, kInfinity}}) {
      const double C = oracle::heat_young_constant(p, q, 2);
      const double gap = 1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q);
      for (double t : log_grid(1e-3, 10.0, 25)) {
        const double ratio =
            lp_norm(from_spectral(heat_flow(F, t)), q) * std::pow(t, gap) / lp_norm(f0, p);
        worst = std::max(worst, ratio / C);
      }
    }
  }
  return {worst <= 1.1, fmt("max ratio / sharp Gaussian constant = %.4f (need <= 1.1)", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "analytic constants", 10, c1_constants},
      {2, "integral lemma", 30, c2_integral},
      {3, "K-coefficient scaling", 5, c3_kscaling},
      {4, "stepper oracle", 60, c4_stepper},
      {5, "mass conservation", 120, c5_mass},
      {6, "Picard vs stepper", 300, c6_picard_vs_stepper},
      {7, "tau-contraction monotonicity", 600, c7_tau_contraction},
      {8, "scaling-law headline", 7200, c8_scaling},
      {9, "self-similarity", 1200, c9_selfsimilar},
      {10, "PE limit", 1800, c10_pe_limit},
      {11, "Besov closed form", 10, c11_besov},
      {12, "heat Lp-Lq smoothing", 60, c12_smoothing},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = v.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("[%s] criterion %d: %s | %s | %.1f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id,
                c.title, v.detail.c_str(), secs, c.budget_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
