#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace contexcert {

// Seeded generator with a fixed, implementation-independent output stream.
//
// std::mt19937_64 is fully specified by the standard; the floating-point
// conversion below is done by hand because the std distributions are not.
// Any change to the stream must bump kRngName.
class Rng {
 public:
  static constexpr std::string_view kRngName = "mt19937_64+splitmix64-substreams/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Inverse-CDF draw over `weights` taken in order; weights need not be
  // normalized but must be nonnegative with a positive sum.
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Sub-seed for stream `index` of a run seeded with `seed`. Part of the
// reproducibility contract: stream i of seed s is Rng(derive_subseed(s, i)).
std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t index);

}  // namespace contexcert
