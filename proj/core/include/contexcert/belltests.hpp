#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "contexcert/scenario.hpp"

namespace contexcert {

// Observable roles of the four-observable scenario: A1, A2 on one side and
// B1, B2 on the other, each A compatible with each B.
struct ChshRoles {
  std::string a1 = "A1";
  std::string a2 = "A2";
  std::string b1 = "B1";
  std::string b2 = "B2";
};

struct ChshInput {
  CorrelationSet correlations;
  ChshRoles roles;

  // Terms in the order <A1B1>, <A1B2>, <A2B1>, <A2B2>. Throws MissingPair.
  std::array<double, 4> terms() const;
  std::array<ObservablePair, 4> pairs() const;

  static ChshInput from_values(double a1b1, double a1b2, double a2b1, double a2b2);
};

struct TripleRoles {
  std::string x1 = "X1";
  std::string x2 = "X2";
  std::string x3 = "X3";
};

struct TripleInput {
  CorrelationSet correlations;
  TripleRoles roles;
  double zero_mean_tolerance = 1e-9;

  // <X1X2>, <X2X3>, <X1X3>. Throws MissingPair.
  std::array<double, 3> terms() const;
  std::array<ObservablePair, 3> pairs() const;

  static TripleInput from_values(double x1x2, double x2x3, double x1x3,
                                 double zero_mean_tolerance = 1e-9);
};

// "passed" means the inequality is violated: the data passed the test for
// contextuality. "rejected" means the data is rejected as noncontextual.
enum class TestOutcome { rejected_noncontextual, passed_contextuality_test };
std::string_view to_string(TestOutcome o);

struct TestVerdict {
  std::string test_name;
  double statistic = 0.0;
  double bound = 0.0;
  TestOutcome outcome = TestOutcome::rejected_noncontextual;
  // Signed violation amount: positive when the inequality is violated.
  double margin = 0.0;
  double tolerance = 0.0;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

// CHSH combination with the minus sign on term `sign_position` (1..4);
// position 4 is <A1B1> + <A1B2> + <A2B1> - <A2B2>.
double chsh_value(const ChshInput& input, int sign_position);

// Largest |CHSH| over the four minus-sign placements, which is the orbit of
// the CHSH expression under swaps within and between the A and B blocks.
double chsh_max(const ChshInput& input);

// Passed iff chsh_max > 2 + tolerance.
TestVerdict chsh_test(const ChshInput& input, double tolerance);

// Two-sided triple condition -1 <= S <= 1 + 2 min{<X1X2>, <X2X3>, <X1X3>}
// with S the sum of the three correlations. Requires zero means.
TestVerdict sz_test(const TripleInput& input, double tolerance);

// Three-correlation inequality under the precise (anti)correlation
// constraint on <A2B1>.
//
// Correlation branch (<A2B1> >= 1 - delta):
//   statistic = <A1B1> - <A2B2> + <A1B2>
// Anti-correlation branch (<A2B1> <= -1 + delta), A2 relabelled to -A2:
//   statistic = <A1B1> + <A2B2> + <A1B2>
// Passed iff statistic > 1 + tolerance. The details carry the equivalent
// triple (-A1, B1, B2) and its two-sided check.
TestVerdict original_bell_test(const ChshInput& input, double delta, double tolerance);

// +1 (correlation branch), -1 (anti-correlation branch) or 0 when <A2B1>
// is not within delta of either.
double original_bell_branch(double a2b1, double delta);
// The statistic alone from terms in CHSH order; empty when the constraint
// fails. Cheap enough for angle scans.
std::optional<double> original_bell_statistic(const std::array<double, 4>& terms, double delta);

// Standard error of a sum of correlation estimates, each with binomial
// variance (1 - c^2) / N. Throws InvalidArgument when a sample size is absent.
double correlation_sum_sigma(const CorrelationSet& correlations,
                             std::span<const ObservablePair> pairs);

double chsh_tolerance(const ChshInput& input, double k);
double sz_tolerance(const TripleInput& input, double k);
// Covers the three correlations entering the original Bell statistic.
double original_bell_tolerance(const ChshInput& input, double k);

}  // namespace contexcert
