#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "contexcert/belltests.hpp"
#include "contexcert/quantumgen.hpp"
#include "contexcert/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace contexcert;

namespace {

constexpr double kPi = std::numbers::pi;
const double kTsirelson = 2.0 * std::numbers::sqrt2;

ChshInput singlet_input(double a1, double a2, double b1, double b2) {
  return ChshInput::from_values(singlet_correlation(a1, b1), singlet_correlation(a1, b2),
                                singlet_correlation(a2, b1), singlet_correlation(a2, b2));
}

}  // namespace

TEST(ChshValue, Examples) {
  EXPECT_EQ(chsh_value(ChshInput::from_values(0, 0, 0, 0), 4), 0.0);
  EXPECT_EQ(chsh_value(ChshInput::from_values(1, 1, 1, 1), 4), 2.0);
  const auto q = singlet_input(0, kPi / 2, kPi / 4, 3 * kPi / 4);
  // -cos(-pi/4) + cos(-3pi/4) - cos(pi/4) - cos(-pi/4)
  const double by_hand = -std::cos(-kPi / 4) + std::cos(-3 * kPi / 4) - std::cos(kPi / 4) - std::cos(-kPi / 4);
  EXPECT_NEAR(chsh_value(q, 2), by_hand, 1e-15);
  EXPECT_NEAR(chsh_value(q, 2), -kTsirelson, 1e-12);
  EXPECT_NEAR(chsh_value(q, 4), 0.0, 1e-15);
}

TEST(ChshValue, MissingPairAndBadPosition) {
  ChshInput in;
  in.correlations.set("A1", "B1", 0.5);
  expect_code(ErrorCode::MissingPair, [&] { chsh_value(in, 1); });
  expect_code(ErrorCode::InvalidArgument, [] { chsh_value(ChshInput::from_values(0, 0, 0, 0), 5); });
}

TEST(ChshMax, Examples) {
  EXPECT_EQ(chsh_max(ChshInput::from_values(0, 0, 0, 0)), 0.0);
  EXPECT_EQ(chsh_max(ChshInput::from_values(1, 1, 1, -1)), 4.0);
  EXPECT_NEAR(chsh_max(singlet_input(0, kPi / 2, kPi / 4, 3 * kPi / 4)), kTsirelson, 1e-12);
}

TEST(ChshMax, MatchesHandEnumeration) {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const double c[4] = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    EXPECT_NEAR(chsh_max(ChshInput::from_values(c[0], c[1], c[2], c[3])), oracle::chsh_max(c[0], c[1], c[2], c[3]),
                1e-15);
  }
}

TEST(ChshMax, RelabelingInvariance) {
  Rng rng(23);
  for (int i = 0; i < 1000; ++i) {
    const double c11 = rng.uniform(-1, 1), c12 = rng.uniform(-1, 1), c21 = rng.uniform(-1, 1),
                 c22 = rng.uniform(-1, 1);
    const double base = chsh_max(ChshInput::from_values(c11, c12, c21, c22));
    // A1 <-> A2
    EXPECT_NEAR(base, chsh_max(ChshInput::from_values(c21, c22, c11, c12)), 1e-14);
    // B1 <-> B2
    EXPECT_NEAR(base, chsh_max(ChshInput::from_values(c12, c11, c22, c21)), 1e-14);
    // block swap: <AiBj> -> <BiAj> = <AjBi>
    EXPECT_NEAR(base, chsh_max(ChshInput::from_values(c11, c21, c12, c22)), 1e-14);
    // A1 -> -A1
    EXPECT_NEAR(base, chsh_max(ChshInput::from_values(-c11, -c12, c21, c22)), 1e-14);
    // B2 -> -B2
    EXPECT_NEAR(base, chsh_max(ChshInput::from_values(c11, -c12, c21, -c22)), 1e-14);
  }
}

TEST(ChshMax, QuantumCeilingOnAngleGrid) {
  // 0.01 rad grid over [0, 2pi)^4 with A1 fixed at 0 (the value depends on
  // angle differences only).
  const int steps = static_cast<int>(std::ceil(2 * kPi / 0.01));
  std::vector<double> corr(2 * steps + 1);
  for (int d = -steps; d <= steps; ++d) corr[d + steps] = singlet_correlation(0.0, d * 0.01);
  auto e = [&](int i, int j) { return corr[i - j + steps]; };
  double best = 0.0;
  for (int a2 = 0; a2 < steps; ++a2) {
    for (int b1 = 0; b1 < steps; ++b1) {
      const double c11 = e(0, b1), c21 = e(a2, b1);
      for (int b2 = 0; b2 < steps; ++b2) {
        best = std::max(best, oracle::chsh_max(c11, e(0, b2), c21, e(a2, b2)));
      }
    }
  }
  EXPECT_LE(best, kTsirelson + 1e-9);
  EXPECT_GT(best, kTsirelson - 1e-3);
}

TEST(ChshTest, Examples) {
  auto v = chsh_test(ChshInput::from_values(1, 1, 1, 1), 0.0);
  EXPECT_EQ(v.outcome, TestOutcome::rejected_noncontextual);
  EXPECT_EQ(v.statistic, 2.0);
  EXPECT_EQ(v.bound, 2.0);

  v = chsh_test(singlet_input(0, kPi / 2, kPi / 4, 3 * kPi / 4), 0.01);
  EXPECT_EQ(v.outcome, TestOutcome::passed_contextuality_test);
  EXPECT_NEAR(v.margin, kTsirelson - 2.0, 1e-12);

  EXPECT_EQ(chsh_test(ChshInput::from_values(0, 0, 0, 0), 0.0).outcome, TestOutcome::rejected_noncontextual);
  expect_code(ErrorCode::InvalidArgument, [] { chsh_test(ChshInput::from_values(0, 0, 0, 0), -1.0); });
}

TEST(SzTest, Examples) {
  auto v = sz_test(TripleInput::from_values(-1, -1, -1), 0.0);
  EXPECT_EQ(v.statistic, -3.0);
  EXPECT_EQ(v.outcome, TestOutcome::passed_contextuality_test);

  v = sz_test(TripleInput::from_values(1, 1, 1), 0.0);
  EXPECT_EQ(v.statistic, 3.0);
  EXPECT_EQ(v.details["upper_bound"].get<double>(), 3.0);
  EXPECT_EQ(v.outcome, TestOutcome::rejected_noncontextual);

  v = sz_test(TripleInput::from_values(0, 0, 0), 0.0);
  EXPECT_EQ(v.outcome, TestOutcome::rejected_noncontextual);
}

TEST(SzTest, ZeroMeanPrecondition) {
  auto in = TripleInput::from_values(0.2, 0.1, 0.0, 1e-3);
  in.correlations.set_mean("X2", 0.01);
  expect_code(ErrorCode::ZeroMeanViolated, [&] { sz_test(in, 0.0); });
}

TEST(SzTest, MatchesTetrahedronOracle) {
  Rng rng(31);
  for (int i = 0; i < 20000; ++i) {
    const double x12 = rng.uniform(-1, 1), x23 = rng.uniform(-1, 1), x13 = rng.uniform(-1, 1);
    const bool violated =
        sz_test(TripleInput::from_values(x12, x23, x13), 0.0).outcome == TestOutcome::passed_contextuality_test;
    EXPECT_EQ(violated, !oracle::in_correlation_tetrahedron(x12, x23, x13, 0.0)) << x12 << " " << x23 << " " << x13;
  }
}

TEST(OriginalBell, Examples) {
  auto v = original_bell_test(ChshInput::from_values(1, 1, 1, 1), 0.01, 0.0);
  EXPECT_EQ(v.statistic, 1.0);
  EXPECT_EQ(v.outcome, TestOutcome::rejected_noncontextual);
  expect_code(ErrorCode::CorrelationConstraintUnmet,
              [] { original_bell_test(ChshInput::from_values(0, 0, 0.5, 0), 0.01, 0.0); });
}

TEST(OriginalBell, AntiCorrelationBranchAtOptimalAngles) {
  // A2 = B1 = 0 anti-correlates the singlet pair; a1 = 2pi/3, b2 = -2pi/3.
  const auto in = singlet_input(2 * kPi / 3, 0.0, 0.0, -2 * kPi / 3);
  const auto v = original_bell_test(in, 0.0, 0.0);
  EXPECT_EQ(v.details["branch"], "anti_correlation");
  EXPECT_NEAR(v.statistic, 1.5, 1e-12);
  EXPECT_NEAR(v.statistic, oracle::bell_original_singlet(2 * kPi / 3, -2 * kPi / 3), 1e-12);
  EXPECT_EQ(v.outcome, TestOutcome::passed_contextuality_test);
}

TEST(OriginalBell, StatisticHelperMatchesTest) {
  Rng rng(41);
  for (int i = 0; i < 500; ++i) {
    const std::array<double, 4> t{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.bernoulli(0.5) ? 1.0 : -1.0,
                                  rng.uniform(-1, 1)};
    const auto v = original_bell_test(ChshInput::from_values(t[0], t[1], t[2], t[3]), 0.0, 0.0);
    EXPECT_EQ(*original_bell_statistic(t, 0.0), v.statistic);
  }
  EXPECT_FALSE(original_bell_statistic({0, 0, 0.5, 0}, 0.01));
}

TEST(OriginalBell, AgreesWithTripleTestAfterSignFlip) {
  // With <A2B1> = 1 exactly, A2 = B1 and <A2B2> = <B1B2>. The original
  // inequality is the lower side of the triple condition on (-A1, B1, B2).
  Rng rng(43);
  int compared = 0;
  for (int i = 0; i < 5000; ++i) {
    const double c11 = rng.uniform(-1, 1), c12 = rng.uniform(-1, 1), c22 = rng.uniform(-1, 1);
    const auto v = original_bell_test(ChshInput::from_values(c11, c12, 1.0, c22), 0.0, 0.0);
    const auto sz = sz_test(TripleInput::from_values(-c11, c22, -c12), 0.0);
    const bool lower = sz.details["lower_violated"].get<bool>();
    const bool upper = sz.details["upper_violated"].get<bool>();
    EXPECT_EQ(v.outcome == TestOutcome::passed_contextuality_test, lower);
    EXPECT_EQ(v.details["triple_two_sided_violated"].get<bool>(),
              sz.outcome == TestOutcome::passed_contextuality_test);
    EXPECT_NEAR(v.details["triple_sum"].get<double>(), -v.statistic, 1e-15);
    if (!upper) {
      EXPECT_EQ(v.outcome, sz.outcome);
      ++compared;
    }
  }
  EXPECT_GT(compared, 1000);
}

TEST(Tolerance, KSigmaPropagation) {
  ChshInput in;
  in.correlations.set("A1", "B1", 0.6, 10000);
  in.correlations.set("A1", "B2", 0.0, 10000);
  in.correlations.set("A2", "B1", 0.0, 10000);
  in.correlations.set("A2", "B2", -0.6, 10000);
  // sqrt((0.64 + 1 + 1 + 0.64) / 10^4) * 3
  EXPECT_NEAR(chsh_tolerance(in, 3.0), 3.0 * std::sqrt(3.28 / 10000), 1e-15);
  // three terms (A1B1, A1B2, A2B2)
  EXPECT_NEAR(original_bell_tolerance(in, 2.0), 2.0 * std::sqrt(2.28 / 10000), 1e-15);
  expect_code(ErrorCode::InvalidArgument, [] { chsh_tolerance(ChshInput::from_values(0, 0, 0, 0), 3.0); });
}
