#include <benchmark/benchmark.h>

#include "kslab/initdata.hpp"
#include "kslab/models.hpp"
#include "kslab/stepper.hpp"

namespace {

kslab::SpectralField gaussian(int d, int n) {
  kslab::InitSpec init;
  init.amplitude = 1.0;
  return kslab::make(init, kslab::default_grid(d, n));
}

void BM_RoundTrip(benchmark::State& state) {
  const auto F = gaussian(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    auto f = kslab::from_spectral(F);
    benchmark::DoNotOptimize(kslab::to_spectral(f));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(F.size()));
}
BENCHMARK(BM_RoundTrip)->Args({2, 64})->Args({2, 128})->Args({2, 256})->Args({3, 32})->Args({3, 64});

void BM_Nonlinearity(benchmark::State& state) {
  kslab::SystemSpec spec;
  spec.model = static_cast<kslab::Model>(state.range(0));
  spec.d = 2;
  const auto u0 = gaussian(2, static_cast<int>(state.range(1)));
  const auto s = kslab::make_state(u0, spec, kslab::elliptic_phi(u0));
  for (auto _ : state) benchmark::DoNotOptimize(kslab::nonlinearity(s, spec));
}
BENCHMARK(BM_Nonlinearity)
    ->Args({static_cast<int>(kslab::Model::PP), 128})
    ->Args({static_cast<int>(kslab::Model::TM2), 128})
    ->Args({static_cast<int>(kslab::Model::NLH), 128});

void BM_Step(benchmark::State& state) {
  kslab::SystemSpec spec;
  spec.d = static_cast<int>(state.range(0));
  const auto u0 = gaussian(spec.d, static_cast<int>(state.range(1)));
  const auto s = kslab::make_state(u0, spec);
  for (auto _ : state) benchmark::DoNotOptimize(kslab::step_with_estimate(s, spec, 1e-3));
}
BENCHMARK(BM_Step)->Args({2, 64})->Args({2, 128})->Args({3, 32});

void BM_HeatFlow(benchmark::State& state) {
  const auto F = gaussian(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kslab::heat_flow(F, 0.1));
}
BENCHMARK(BM_HeatFlow)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
