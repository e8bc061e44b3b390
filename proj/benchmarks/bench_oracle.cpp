#include <benchmark/benchmark.h>

#include "contexcert/jpdoracle.hpp"

namespace cc = contexcert;

static void BM_ChshFeasibility(benchmark::State& state) {
  // just inside and just outside the classical region
  const auto inside = cc::ChshInput::from_values(0.5, 0.5, 0.5, -0.5);
  const auto outside = cc::ChshInput::from_values(0.7, 0.7, 0.7, -0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cc::chsh_jpd_feasible(inside));
    benchmark::DoNotOptimize(cc::chsh_jpd_feasible(outside));
  }
}
BENCHMARK(BM_ChshFeasibility);

static void BM_TripleFeasibility(benchmark::State& state) {
  const auto in = cc::TripleInput::from_values(-0.6, -0.6, -0.6);
  for (auto _ : state) benchmark::DoNotOptimize(cc::triple_jpd_feasible(in));
}
BENCHMARK(BM_TripleFeasibility);

// All pairs over n variables at zero correlation: the LP grows as 2^n atoms.
static void BM_PairwiseSystem(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  cc::MarginalConstraintSystem system;
  for (std::size_t i = 0; i < n; ++i) system.variables.push_back("V" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      system.constraints.push_back(cc::zero_mean_pair_table(system.variables[i], system.variables[j], 0.0));
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(cc::jpd_feasible(system));
}
BENCHMARK(BM_PairwiseSystem)->Arg(4)->Arg(6)->Arg(8);

static void BM_ChshExact(benchmark::State& state) {
  const std::array<cc::Rational, 4> c{cc::Rational(1, 2), cc::Rational(1, 2), cc::Rational(1, 2),
                                      cc::Rational(-1, 2)};
  for (auto _ : state) benchmark::DoNotOptimize(cc::chsh_jpd_feasible_exact(c));
}
BENCHMARK(BM_ChshExact);
