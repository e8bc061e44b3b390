#include <benchmark/benchmark.h>

#include "contexcert/randomtests.hpp"
#include "contexcert/rng.hpp"

namespace cc = contexcert;

static void BM_DefaultBattery(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  cc::Rng rng(4);
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = rng.bernoulli(0.5) ? 1u : 0u;
  const cc::LabelSequence seq({"0", "1"}, std::move(v));
  const auto battery = cc::default_battery(seq, 9);
  for (auto _ : state) benchmark::DoNotOptimize(cc::randomness_test(seq, battery, cc::StatisticalTolerance{4.0}));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_DefaultBattery)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
