#include <benchmark/benchmark.h>

#include <numbers>

#include "contexcert/quantumgen.hpp"

namespace cc = contexcert;

static void BM_SingletChsh(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  constexpr double pi = std::numbers::pi;
  for (auto _ : state) benchmark::DoNotOptimize(cc::sample_singlet_chsh({0, pi / 2, pi / 4, 3 * pi / 4}, n, 5));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * 4 * n));
}
BENCHMARK(BM_SingletChsh)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_SphereLhv(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  cc::Rng rng(1);
  const auto model = cc::random_sphere_lhv_model({"A1", "A2", "B1", "B2"}, rng);
  const std::vector<cc::LhvSetting> settings{{{"A1", "B1"}, n}, {{"A1", "B2"}, n}, {{"A2", "B1"}, n}, {{"A2", "B2"}, n}};
  for (auto _ : state) benchmark::DoNotOptimize(cc::sample_lhv_dataset(model, settings, 3));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * 4 * n));
}
BENCHMARK(BM_SphereLhv)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_BornTable(benchmark::State& state) {
  cc::Rng rng(2);
  const auto rho = cc::DensityState::random(rng, 8);
  const std::vector<cc::ProjectiveObservable> obs{cc::ProjectiveObservable::planar_spin("A", 0.1, 0, 3),
                                                  cc::ProjectiveObservable::planar_spin("B", 0.7, 1, 3),
                                                  cc::ProjectiveObservable::planar_spin("C", 1.3, 2, 3)};
  for (auto _ : state) benchmark::DoNotOptimize(cc::born_table(rho, obs));
}
BENCHMARK(BM_BornTable);
