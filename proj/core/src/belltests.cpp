#include "contexcert/belltests.hpp"

#include <algorithm>
#include <cmath>

#include "contexcert/error.hpp"

namespace contexcert {

std::array<ObservablePair, 4> ChshInput::pairs() const {
  return {ObservablePair{roles.a1, roles.b1}, ObservablePair{roles.a1, roles.b2},
          ObservablePair{roles.a2, roles.b1}, ObservablePair{roles.a2, roles.b2}};
}

std::array<double, 4> ChshInput::terms() const {
  std::array<double, 4> out{};
  const auto p = pairs();
  for (std::size_t i = 0; i < 4; ++i) out[i] = correlations.at(p[i].first, p[i].second);
  return out;
}

ChshInput ChshInput::from_values(double a1b1, double a1b2, double a2b1, double a2b2) {
  ChshInput in;
  in.correlations.set(in.roles.a1, in.roles.b1, a1b1);
  in.correlations.set(in.roles.a1, in.roles.b2, a1b2);
  in.correlations.set(in.roles.a2, in.roles.b1, a2b1);
  in.correlations.set(in.roles.a2, in.roles.b2, a2b2);
  return in;
}

std::array<ObservablePair, 3> TripleInput::pairs() const {
  return {ObservablePair{roles.x1, roles.x2}, ObservablePair{roles.x2, roles.x3},
          ObservablePair{roles.x1, roles.x3}};
}

std::array<double, 3> TripleInput::terms() const {
  std::array<double, 3> out{};
  const auto p = pairs();
  for (std::size_t i = 0; i < 3; ++i) out[i] = correlations.at(p[i].first, p[i].second);
  return out;
}

TripleInput TripleInput::from_values(double x1x2, double x2x3, double x1x3,
                                     double zero_mean_tolerance) {
  TripleInput in;
  in.zero_mean_tolerance = zero_mean_tolerance;
  in.correlations.set(in.roles.x1, in.roles.x2, x1x2);
  in.correlations.set(in.roles.x2, in.roles.x3, x2x3);
  in.correlations.set(in.roles.x1, in.roles.x3, x1x3);
  return in;
}

std::string_view to_string(TestOutcome o) {
  return o == TestOutcome::passed_contextuality_test ? "passed_contextuality_test"
                                                     : "rejected_noncontextual";
}

double chsh_value(const ChshInput& input, int sign_position) {
  if (sign_position < 1 || sign_position > 4) {
    throw Error(ErrorCode::InvalidArgument, "sign position must be in 1..4");
  }
  const auto t = input.terms();
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) sum += (i + 1 == sign_position ? -t[i] : t[i]);
  return sum;
}

double chsh_max(const ChshInput& input) {
  double best = 0.0;
  for (int pos = 1; pos <= 4; ++pos) best = std::max(best, std::abs(chsh_value(input, pos)));
  return best;
}

TestVerdict chsh_test(const ChshInput& input, double tolerance) {
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  TestVerdict v;
  v.test_name = "chsh";
  v.bound = 2.0;
  v.tolerance = tolerance;
  const auto t = input.terms();
  int argmax = 1;
  double best = -1.0;
  auto& placements = v.details["placements"] = nlohmann::ordered_json::array();
  for (int pos = 1; pos <= 4; ++pos) {
    const double value = chsh_value(input, pos);
    placements.push_back({{"minus_on_term", pos}, {"value", value}});
    if (std::abs(value) > best) {
      best = std::abs(value);
      argmax = pos;
    }
  }
  v.statistic = best;
  v.margin = v.statistic - v.bound;
  v.outcome = v.statistic > v.bound + tolerance ? TestOutcome::passed_contextuality_test
                                                : TestOutcome::rejected_noncontextual;
  const auto p = input.pairs();
  auto& terms = v.details["terms"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    terms.push_back({{"pair", {p[i].first, p[i].second}}, {"correlation", t[i]}});
  }
  v.details["maximizing_minus_position"] = argmax;
  return v;
}

TestVerdict sz_test(const TripleInput& input, double tolerance) {
  if (!(tolerance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  for (const auto& id : {input.roles.x1, input.roles.x2, input.roles.x3}) {
    const auto m = input.correlations.mean(id);
    if (m && std::abs(*m) > input.zero_mean_tolerance) {
      throw Error(ErrorCode::ZeroMeanViolated, "mean of '" + id + "' is " + std::to_string(*m) +
                                                   ", beyond the zero-mean tolerance");
    }
  }
  const auto t = input.terms();
  const double sum = t[0] + t[1] + t[2];
  const double upper = 1.0 + 2.0 * std::min({t[0], t[1], t[2]});
  const double lower = -1.0;

  TestVerdict v;
  v.test_name = "suppes_zanotti";
  v.statistic = sum;
  v.tolerance = tolerance;
  const double below = lower - sum;  // > 0 when the lower side fails
  const double above = sum - upper;  // > 0 when the upper side fails
  if (below >= above) {
    v.bound = lower;
    v.margin = below;
  } else {
    v.bound = upper;
    v.margin = above;
  }
  v.outcome = v.margin > tolerance ? TestOutcome::passed_contextuality_test
                                   : TestOutcome::rejected_noncontextual;
  v.details["lower_bound"] = lower;
  v.details["upper_bound"] = upper;
  v.details["lower_violated"] = below > tolerance;
  v.details["upper_violated"] = above > tolerance;
  v.details["correlations"] = {t[0], t[1], t[2]};
  return v;
}

double original_bell_branch(double a2b1, double delta) {
  if (a2b1 >= 1.0 - delta) return 1.0;
  if (a2b1 <= -1.0 + delta) return -1.0;
  return 0.0;
}

std::optional<double> original_bell_statistic(const std::array<double, 4>& t, double delta) {
  const double sign = original_bell_branch(t[2], delta);
  if (sign == 0.0) return std::nullopt;
  return t[0] - sign * t[3] + t[1];
}

TestVerdict original_bell_test(const ChshInput& input, double delta, double tolerance) {
  if (!(tolerance >= 0.0) || !(delta >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "delta and tolerance must be >= 0");
  }
  const auto t = input.terms();
  const double c11 = t[0], c12 = t[1], c21 = t[2], c22 = t[3];

  const double sign = original_bell_branch(c21, delta);
  if (sign == 0.0) {
    throw Error(ErrorCode::CorrelationConstraintUnmet,
                "<" + input.roles.a2 + input.roles.b1 + "> = " + std::to_string(c21) +
                    " is not within delta of +1 or -1");
  }

  TestVerdict v;
  v.test_name = "original_bell";
  v.statistic = *original_bell_statistic(t, delta);
  v.bound = 1.0;
  v.margin = v.statistic - v.bound;
  v.tolerance = tolerance;
  v.outcome = v.statistic > v.bound + tolerance ? TestOutcome::passed_contextuality_test
                                                : TestOutcome::rejected_noncontextual;

  // With A2 = sign * B1 exactly, <A2B2> = sign * <B1B2>; flipping A1 turns
  // the inequality into the lower side of the triple condition on
  // (-A1, B1, B2).
  const double x12 = -c11;         // <(-A1) B1>
  const double x13 = -c12;         // <(-A1) B2>
  const double x23 = sign * c22;   // <B1 B2>
  const double sz_sum = x12 + x23 + x13;
  const double sz_upper = 1.0 + 2.0 * std::min({x12, x23, x13});
  v.details["branch"] = sign > 0 ? "correlation" : "anti_correlation";
  v.details["constraint_correlation"] = c21;
  v.details["delta"] = delta;
  v.details["terms"] = {{"a1b1", c11}, {"a1b2", c12}, {"a2b1", c21}, {"a2b2", c22}};
  v.details["sign_flipped_triple"] = {{"x1x2", x12}, {"x2x3", x23}, {"x1x3", x13}};
  v.details["triple_sum"] = sz_sum;
  v.details["triple_lower_bound"] = -1.0;
  v.details["triple_upper_bound"] = sz_upper;
  v.details["triple_lower_violated"] = -1.0 - sz_sum > tolerance;
  v.details["triple_upper_violated"] = sz_sum - sz_upper > tolerance;
  v.details["triple_two_sided_violated"] = (-1.0 - sz_sum > tolerance) || (sz_sum - sz_upper > tolerance);
  return v;
}

double correlation_sum_sigma(const CorrelationSet& correlations,
                             std::span<const ObservablePair> pairs) {
  double var = 0.0;
  for (const auto& [a, b] : pairs) {
    const double c = correlations.at(a, b);
    const auto n = correlations.sample_size(a, b);
    if (!n || *n == 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "no sample size recorded for (" + a + "," + b + "); k-sigma tolerance undefined");
    }
    var += (1.0 - c * c) / static_cast<double>(*n);
  }
  return std::sqrt(var);
}

double chsh_tolerance(const ChshInput& input, double k) {
  const auto p = input.pairs();
  return k * correlation_sum_sigma(input.correlations, p);
}

double sz_tolerance(const TripleInput& input, double k) {
  const auto p = input.pairs();
  return k * correlation_sum_sigma(input.correlations, p);
}

double original_bell_tolerance(const ChshInput& input, double k) {
  const auto all = input.pairs();
  const std::array<ObservablePair, 3> used{all[0], all[1], all[3]};
  return k * correlation_sum_sigma(input.correlations, used);
}

}  // namespace contexcert
