#pragma once

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "contexcert/scenario.hpp"

namespace contexcert {

// Tolerance rules shared by the signaling and randomness checks.
struct FixedTolerance {
  double epsilon = 0.0;
};
struct StatisticalTolerance {
  double k = 3.0;
};
using TolerancePolicy = std::variant<FixedTolerance, StatisticalTolerance>;

std::string describe(const TolerancePolicy& policy);

enum class SignalingVerdict { no_signaling, signaling };
std::string_view to_string(SignalingVerdict v);

// One comparison of an observable's marginal between two contexts.
struct ContextComparison {
  std::string observable;
  std::vector<std::string> context_a;
  std::vector<std::string> context_b;
  double deviation = 0.0;         // L-infinity over outcome values
  double total_variation = 0.0;   // informational
  double tolerance = 0.0;         // tolerance at the outcome attaining `deviation`
  bool within_tolerance = true;
};

struct ObservableSignaling {
  double deviation = 0.0;  // max over this observable's comparisons
  double total_variation = 0.0;
  std::vector<std::vector<std::string>> contexts;
};

struct SignalingReport {
  std::map<std::string, ObservableSignaling> per_observable;
  std::vector<ContextComparison> comparisons;
  SignalingVerdict verdict = SignalingVerdict::no_signaling;
  TolerancePolicy policy = StatisticalTolerance{};
  // The policy's epsilon, or the largest per-comparison tolerance under k-sigma.
  double tolerance_used = 0.0;
};

// Max over outcome values and table pairs of the gap between the
// observable's marginals.
double signaling_deviation(std::span<const ProbTable> tables, const std::string& observable);

// Total-variation counterpart of signaling_deviation (half the L1 gap,
// maximized over table pairs).
double signaling_total_variation(std::span<const ProbTable> tables, const std::string& observable);

// Compares every observable shared by two or more of the dataset's contexts.
//
// Under a statistical policy each comparison's tolerance is
// k * sqrt(p(1-p) * (1/N_a + 1/N_b)) with p the pooled marginal: the standard
// error of a difference of two independent frequency estimates.
SignalingReport no_signaling_test(const Dataset& dataset, const TolerancePolicy& policy);

}  // namespace contexcert
