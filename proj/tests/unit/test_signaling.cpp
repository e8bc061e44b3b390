#include <gtest/gtest.h>

#include "contexcert/rng.hpp"
#include "contexcert/signaling.hpp"
#include "test_util.hpp"

using namespace contexcert;

namespace {

Dataset two_context_dataset(double pa_ab, double pa_ac, std::size_t n, std::uint64_t seed) {
  const auto scenario = Scenario::dichotomous({"A", "B", "C"}, {{"A", "B"}, {"A", "C"}});
  std::vector<OutcomeRecord> records;
  Rng r1(derive_subseed(seed, 0)), r2(derive_subseed(seed, 1));
  for (std::size_t i = 0; i < n; ++i) {
    records.push_back({{"A", "B"}, {r1.bernoulli(pa_ab) ? 1 : -1, r1.bernoulli(0.5) ? 1 : -1}});
  }
  for (std::size_t i = 0; i < n; ++i) {
    records.push_back({{"A", "C"}, {r2.bernoulli(pa_ac) ? 1 : -1, r2.bernoulli(0.5) ? 1 : -1}});
  }
  return Dataset(scenario, std::move(records));
}

}  // namespace

TEST(SignalingDeviation, IdenticalTablesGiveZero) {
  const auto t = ProbTable::dichotomous({"A", "B"}, {0.1, 0.2, 0.3, 0.4});
  const std::vector<ProbTable> tables{t, t};
  EXPECT_EQ(signaling_deviation(tables, "A"), 0.0);
}

TEST(SignalingDeviation, HandComputedGap) {
  // A marginals 0.5 and 0.6
  const std::vector<ProbTable> tables{ProbTable::dichotomous({"A", "B"}, {0.25, 0.25, 0.25, 0.25}),
                                      ProbTable::dichotomous({"A", "C"}, {0.3, 0.3, 0.2, 0.2})};
  EXPECT_NEAR(signaling_deviation(tables, "A"), 0.1, 1e-15);
  EXPECT_NEAR(signaling_total_variation(tables, "A"), 0.1, 1e-15);
}

TEST(SignalingDeviation, SymmetricAndSupportOrderInvariant) {
  const auto t1 = ProbTable::dichotomous({"A", "B"}, {0.1, 0.2, 0.3, 0.4});
  const auto t2 = ProbTable::dichotomous({"C", "A"}, {0.3, 0.1, 0.2, 0.4});
  const auto t2_swapped = marginalize(t2, {"A", "C"});
  const std::vector<ProbTable> a{t1, t2}, b{t2, t1}, c{t1, t2_swapped};
  EXPECT_EQ(signaling_deviation(a, "A"), signaling_deviation(b, "A"));
  EXPECT_NEAR(signaling_deviation(a, "A"), signaling_deviation(c, "A"), 1e-15);
}

TEST(SignalingDeviation, Errors) {
  const auto t = ProbTable::dichotomous({"A", "B"}, {0.25, 0.25, 0.25, 0.25});
  const std::vector<ProbTable> one{t}, two{t, t};
  expect_code(ErrorCode::FewerThanTwoContexts, [&] { signaling_deviation(one, "A"); });
  expect_code(ErrorCode::ObservableNotFound, [&] { signaling_deviation(two, "Z"); });
}

TEST(SignalingDeviation, MarginalsOfOneJpdAgree) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> p(8);
    double total = 0.0;
    for (auto& v : p) total += (v = rng.uniform01());
    for (auto& v : p) v /= total;
    const auto jpd = ProbTable::dichotomous({"A", "B", "C"}, p);
    const std::vector<ProbTable> tables{marginalize(jpd, {"A", "B"}), marginalize(jpd, {"A", "C"}),
                                        marginalize(jpd, {"C", "B"})};
    EXPECT_LE(signaling_deviation(tables, "A"), 1e-12);
    EXPECT_LE(signaling_deviation(tables, "B"), 1e-12);
    EXPECT_LE(signaling_deviation(tables, "C"), 1e-12);
  }
}

TEST(NoSignalingTest, CommonMarginalPasses) {
  const auto ds = two_context_dataset(0.5, 0.5, 100000, 11);
  const auto report = no_signaling_test(ds, StatisticalTolerance{3.0});
  EXPECT_EQ(report.verdict, SignalingVerdict::no_signaling);
  ASSERT_EQ(report.comparisons.size(), 1u);
  EXPECT_EQ(report.comparisons[0].observable, "A");
}

TEST(NoSignalingTest, ConstructedDeviationIsCaught) {
  const auto ds = two_context_dataset(0.5, 0.8, 100000, 11);
  const auto report = no_signaling_test(ds, StatisticalTolerance{3.0});
  EXPECT_EQ(report.verdict, SignalingVerdict::signaling);
  EXPECT_NEAR(report.per_observable.at("A").deviation, 0.3, 0.01);
}

TEST(NoSignalingTest, SingleContextHasNothingToCompare) {
  const auto scenario = Scenario::dichotomous({"A", "B"}, {{"A", "B"}});
  const Dataset ds(scenario, {{{"A", "B"}, {1, 1}}});
  expect_code(ErrorCode::NoSharedObservables, [&] { no_signaling_test(ds, FixedTolerance{0.01}); });
}

TEST(NoSignalingTest, StandaloneContextTakesPart) {
  const auto scenario = Scenario::dichotomous({"A", "B"}, {{"A", "B"}});
  const Dataset ds(scenario, {{{"A", "B"}, {1, 1}}, {{"A"}, {-1}}});
  const auto report = no_signaling_test(ds, FixedTolerance{0.01});
  EXPECT_EQ(report.verdict, SignalingVerdict::signaling);
  EXPECT_EQ(report.per_observable.at("A").deviation, 1.0);
}

TEST(NoSignalingTest, MonotoneInTolerance) {
  const auto ds = two_context_dataset(0.5, 0.52, 20000, 3);
  bool seen_pass = false;
  for (double eps = 0.0; eps <= 0.05; eps += 0.001) {
    const bool pass = no_signaling_test(ds, FixedTolerance{eps}).verdict == SignalingVerdict::no_signaling;
    if (seen_pass) EXPECT_TRUE(pass) << eps;
    seen_pass = seen_pass || pass;
  }
  EXPECT_TRUE(seen_pass);
}

TEST(NoSignalingTest, VerdictMatchesComparisons) {
  const auto ds = two_context_dataset(0.5, 0.51, 20000, 4);
  const auto report = no_signaling_test(ds, FixedTolerance{0.005});
  bool all = true;
  for (const auto& c : report.comparisons) all = all && c.deviation <= report.tolerance_used;
  EXPECT_EQ(all, report.verdict == SignalingVerdict::no_signaling);
}
