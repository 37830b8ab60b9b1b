#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <sstream>

#include "kslab/error.hpp"
#include "kslab/experiments.hpp"

using namespace kslab;

namespace {

ScanSpec nlh_scan() {
  ScanSpec s;
  s.spec_base.model = Model::NLH;
  s.init.family = Family::Uniform;
  s.grid = GridSpec{2, 8, 1.0};
  s.tau_list = {1.0};
  s.M_lo = 0.01;
  s.M_hi = 1.0;
  s.bisect_tol = 0.01;
  s.t_end = 10.0;
  return s;
}

template <class F>
void expect_kind(F&& f, ErrorKind kind) {
  try {
    f();
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(ParallelFor, RunsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_GE(default_threads(), 1);
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) fail(ErrorKind::NonFinite, "job 7");
                            }),
               Error);
}

TEST(Scan, UniformNLHCriticalAmplitude) {
  // u' = u^2 from u = M blows up at 1/M, so with t_end = 10 the threshold is 0.1.
  const CriticalRow row = critical_amplitude(nlh_scan(), 1.0);
  EXPECT_TRUE(row.valid);
  EXPECT_NEAR(row.M_star, 0.1, 0.002);
  EXPECT_EQ(row.outcome_lo, Outcome::GlobalDecay);
  EXPECT_EQ(row.outcome_hi, Outcome::Blowup);
  EXPECT_LE(row.M_lo, row.M_star);
  EXPECT_GE(row.M_hi, row.M_star);
  EXPECT_LE((row.M_hi - row.M_lo) / row.M_star, 0.011);
  EXPECT_EQ(static_cast<std::size_t>(row.runs_used), row.probes.size());
}

TEST(Scan, BracketInvalid) {
  ScanSpec s = nlh_scan();
  s.M_lo = 0.5;
  expect_kind([&] { critical_amplitude(s, 1.0); }, ErrorKind::BracketInvalid);
  s = nlh_scan();
  s.M_hi = 0.05;
  expect_kind([&] { critical_amplitude(s, 1.0); }, ErrorKind::BracketInvalid);
}

TEST(Scan, StudyPreconditions) {
  ScanSpec s = nlh_scan();
  expect_kind([&] { tau_scaling_study(s, ScalingLaw::SqrtTau); }, ErrorKind::PreconditionViolation);
  s.tau_list = {1.0, 2.0, 3.0, 4.0};
  expect_kind([&] { tau_scaling_study(s, ScalingLaw::SqrtTau); }, ErrorKind::PreconditionViolation);
  s.tau_list = {1.0, 3.0, 9.0, 27.0};
  expect_kind([&] { tau_scaling_study(s, ScalingLaw::TauOverLogCubed); },
              ErrorKind::PreconditionViolation);
}

TEST(Scan, ThreadCountDoesNotChangeResults) {
  ScanSpec s = nlh_scan();
  s.tau_list = {1.0, 3.0, 9.0, 27.0};
  s.t_end_per_tau = 2.0;
  s.threads = 1;
  const ScanResult one = tau_scaling_study(s, ScalingLaw::SqrtTau);
  s.threads = 4;
  const ScanResult four = tau_scaling_study(s, ScalingLaw::SqrtTau);
  ASSERT_EQ(one.rows.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(one.rows[k].M_star, four.rows[k].M_star);
    EXPECT_DOUBLE_EQ(one.rows[k].t_end, 2.0 * s.tau_list[k]);
    // Threshold is 1 / t_end.
    EXPECT_NEAR(one.rows[k].M_star * one.rows[k].t_end, 1.0, 0.02);
  }
  EXPECT_FALSE(one.increasing);
  ASSERT_TRUE(one.fit.has_value());
  EXPECT_NEAR(one.fit->slope, -2.0, 0.05);

  std::ostringstream csv;
  one.write_csv(csv);
  EXPECT_EQ(csv.str().substr(0, 4), "tau,");
  EXPECT_EQ(one.to_json()["rows"].size(), 4u);
}

TEST(Scan, ToyModelBracketIsValid) {
  ScanSpec s;
  s.spec_base.model = Model::TM;
  s.grid = default_grid(2, 32);
  s.M_lo = 0.01;
  s.M_hi = 200.0;
  s.t_end = 50.0;
  s.bisect_tol = 0.2;
  s.stepper.tolerance = 1e-4;
  const CriticalRow row = critical_amplitude(s, 1.0);
  EXPECT_EQ(row.outcome_lo, Outcome::GlobalDecay);
  EXPECT_NE(row.outcome_hi, Outcome::GlobalDecay);
  EXPECT_GT(row.M_star, 0.01);
  EXPECT_LT(row.M_star, 200.0);
}

TEST(FitLaw, ExactData) {
  std::vector<double> taus{25.0, 60.0, 150.0, 400.0, 1000.0}, m1, m2;
  for (double t : taus) {
    m1.push_back(3.0 * t / std::pow(std::log(t), 3));
    m2.push_back(0.5 * std::sqrt(t));
  }
  const LawFit a = fit_law(taus, m1, ScalingLaw::TauOverLogCubed);
  EXPECT_NEAR(a.slope, 1.0, 1e-12);
  EXPECT_NEAR(a.intercept, std::log(3.0), 1e-11);
  EXPECT_NEAR(a.r2, 1.0, 1e-12);
  const LawFit b = fit_law(taus, m2, ScalingLaw::SqrtTau);
  EXPECT_NEAR(b.slope, 1.0, 1e-12);
  EXPECT_NEAR(b.intercept, std::log(0.5), 1e-11);
  EXPECT_EQ(parse_law(to_string(ScalingLaw::SqrtTau)), ScalingLaw::SqrtTau);
}

TEST(SelfSimilar, ZeroAmplitudeAndWindow) {
  SelfSimOptions opts;
  opts.grid = default_grid(3, 16);
  EXPECT_EQ(selfsimilar_check(1.0, 0.0, 3, {0.5, 2.0}, opts).deviation, 0.0);
  for (std::pair<double, double> w : {std::pair{1.0, 2.0}, std::pair{0.0, 2.0}, std::pair{1.0, 100.0}}) {
    expect_kind([&] { selfsimilar_check(1.0, 1.0, 3, w, opts); }, ErrorKind::WindowInvalid);
  }
}

TEST(SelfSimilar, HeatFlowIsSelfSimilar) {
  SelfSimOptions opts;
  opts.grid = default_grid(3, 64);
  opts.heat_only = true;
  const SelfSimResult r = selfsimilar_check(1.0, 1.0, 3, {0.5, 2.0}, opts);
  EXPECT_LT(r.deviation, 1e-3);
  EXPECT_FALSE(r.per_time.empty());
}

TEST(PeLimit, ZeroDataGivesZeroDeviation) {
  const GridSpec g = default_grid(2, 16);
  const PeLimitResult r = pe_limit_study({1.0, 0.1}, SpectralField(g), 2, PeLimitOptions{});
  ASSERT_EQ(r.rows.size(), 2u);
  for (const auto& [tau, dev] : r.rows) EXPECT_EQ(dev, 0.0);
  EXPECT_TRUE(r.non_increasing);
  EXPECT_FALSE(r.strictly_decreasing);
}

TEST(Kappa, ContractionAndJson) {
  const GridSpec g = default_grid(2, 16);
  InitSpec init;
  init.amplitude = 0.2;
  SystemSpec spec;
  PicardConfig cfg;
  cfg.t_grid = {1e-2, 1e-1, 1.0, 10.0};
  EXPECT_TRUE(picard_contracts(make(init, g), SpectralField(g), spec, cfg));
  KappaEstimate k;
  k.kappa_hat = 2.0;
  const auto j = k.to_json();
  EXPECT_EQ(j["kappa_hat"], 2.0);
  EXPECT_EQ(j["label"], "empirical-kappa");
}
