#include <benchmark/benchmark.h>

#include "bwk/harness.hpp"

using namespace bwk;

namespace {

StochasticEnvSpec bench_instance(std::size_t k, double budget) {
  StochasticEnvSpec spec;
  spec.params = InstanceParams{k, budget, 0.25, 1.0};
  for (std::size_t i = 0; i < k; ++i) {
    const double p = 0.2 + 0.6 * static_cast<double>(i) / static_cast<double>(k);
    spec.arms.push_back({ScaledBernoulli{0.0, 1.0, p}, UniformInterval{0.25, 1.0}});
  }
  return spec;
}

template <class P>
void step_loop(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto spec = bench_instance(k, 1e12);
  P policy(spec.params);
  RngStream prng(1, 1), erng(1, 2);
  for (auto _ : state) {
    const auto sel = policy.select(prng);
    policy.update(sel.arm, sel.probs, stochastic_step(spec, sel.arm, erng));
    benchmark::DoNotOptimize(sel.arm);
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_Exp3BwkStep(benchmark::State& state) { step_loop<Exp3Bwk>(state); }
void BM_Exp3PlusPlusBwkStep(benchmark::State& state) { step_loop<Exp3PlusPlusBwk>(state); }

void BM_Episode(benchmark::State& state) {
  const auto kind = static_cast<PolicyKind>(state.range(0));
  const auto spec = bench_instance(5, static_cast<double>(state.range(1)));
  std::uint64_t seed = 0;
  std::int64_t rounds = 0;
  for (auto _ : state) {
    const auto trace = run_episode(PolicyConfig{kind}, spec, seed++, 0);
    rounds += static_cast<std::int64_t>(trace.tau());
  }
  state.SetItemsProcessed(rounds);
  state.SetLabel(to_string(kind));
}

void BM_Hindsight(benchmark::State& state) {
  RngStream rng(3, 0);
  const auto matrix = realize_matrix(bench_instance(5, static_cast<double>(state.range(0))), rng);
  for (auto _ : state) benchmark::DoNotOptimize(hindsight_fixed_arms(matrix));
}

}  // namespace

BENCHMARK(BM_Exp3BwkStep)->Arg(2)->Arg(10)->Arg(100);
BENCHMARK(BM_Exp3PlusPlusBwkStep)->Arg(2)->Arg(10)->Arg(100);
BENCHMARK(BM_Episode)
    ->Args({static_cast<int>(PolicyKind::kExp3Bwk), 4000})
    ->Args({static_cast<int>(PolicyKind::kExp3PPBwk), 4000})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Hindsight)->Arg(4000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
