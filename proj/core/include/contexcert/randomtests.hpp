#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "contexcert/signaling.hpp"

namespace contexcert {

// Finite sequence over a label alphabet. Values are stored as indices into
// labels().
class LabelSequence {
 public:
  LabelSequence(std::vector<std::string> labels, std::vector<std::uint32_t> values);

  // Labels default to the distinct symbols in order of first appearance.
  static LabelSequence from_symbols(const std::vector<std::string>& symbols,
                                    std::vector<std::string> labels = {});
  static LabelSequence from_outcomes(std::span<const Outcome> outcomes,
                                     const std::vector<Outcome>& alphabet = kDichotomousAlphabet);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::uint32_t>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  std::uint32_t label_index(const std::string& label) const;  // throws UnknownLabel
  const std::string& symbol(std::size_t n) const { return labels_[values_[n]]; }

 private:
  std::vector<std::string> labels_;
  std::vector<std::uint32_t> values_;
};

namespace selection {

// Positions are 1-based throughout, as in the usual statement of place
// selections.
struct PrimeIndex {};
// Retain x_n when x_{n-k..n-1} equals the pattern.
struct AfterPattern {
  std::vector<std::string> pattern;
};
// Retain x_n when n mod modulus == residue.
struct IndexArithmetic {
  std::size_t modulus = 2;
  std::size_t residue = 0;
};
// Independent coin with P(heads) = bias; retain x_n on heads at toss n.
struct ExternalCoin {
  std::uint64_t seed = 0;
  double bias = 0.5;
};
// Decision from (n, x_1..x_{n-1}); the callee only ever sees the prefix.
struct Custom {
  std::function<bool(std::size_t, std::span<const std::uint32_t>)> decide;
};

}  // namespace selection

struct PlaceSelection {
  std::variant<selection::PrimeIndex, selection::AfterPattern, selection::IndexArithmetic,
               selection::ExternalCoin, selection::Custom>
      kind;
  std::string description;

  static PlaceSelection prime_index();
  static PlaceSelection after_pattern(std::vector<std::string> pattern);
  static PlaceSelection index_arithmetic(std::size_t modulus, std::size_t residue);
  static PlaceSelection external_coin(std::uint64_t seed, double bias = 0.5);
  static PlaceSelection custom(std::function<bool(std::size_t, std::span<const std::uint32_t>)> decide,
                               std::string description);

  // Retain/reject decision for each position of `seq`. Decision n is made
  // from positions 1..n-1 only.
  std::vector<bool> decisions(const LabelSequence& seq) const;
};

// Parses "prime", "after:01" (single-character symbols) or "after:1,-1",
// "mod:M:R", "coin", "coin:SEED" and "coin:SEED:BIAS". A coin without an
// explicit seed uses `default_coin_seed`.
PlaceSelection parse_selection(const std::string& spec, std::uint64_t default_coin_seed);

// n_N(label) / N over the whole sequence.
double frequency(const LabelSequence& seq, const std::string& label);

std::vector<std::pair<std::size_t, double>> stabilization_profile(
    const LabelSequence& seq, const std::string& label, std::span<const std::size_t> checkpoints);

LabelSequence apply_selection(const LabelSequence& seq, const PlaceSelection& sel);

enum class SelectionStatus { passed, failed, inconclusive };
std::string_view to_string(SelectionStatus s);

struct SelectionResult {
  std::string description;
  std::size_t retained = 0;
  std::map<std::string, double> frequencies;
  double max_deviation = 0.0;
  double tolerance = 0.0;  // at the label attaining max_deviation
  SelectionStatus status = SelectionStatus::inconclusive;
};

enum class RandomnessVerdict { passed, failed };
std::string_view to_string(RandomnessVerdict v);

// Outcome of a finite battery. A pass means "passes this battery", never
// "is random".
struct RandomnessReport {
  std::size_t length = 0;
  std::map<std::string, double> overall_freq;
  std::vector<SelectionResult> per_selection;
  RandomnessVerdict verdict = RandomnessVerdict::passed;
  TolerancePolicy policy = StatisticalTolerance{4.0};
  double tolerance_used = 0.0;  // fixed epsilon, or the largest k-sigma tolerance
  std::size_t min_retained = 30;
  std::vector<std::string> notes;
};

inline constexpr std::size_t kMinRetainedFloor = 30;

// Fails iff some selection retaining at least `min_retained` elements moves
// a label frequency away from its overall value by more than the tolerance
// (statistical: k * sqrt(p(1-p)/retained) with p the overall frequency).
RandomnessReport randomness_test(const LabelSequence& seq, std::span<const PlaceSelection> selections,
                                 const TolerancePolicy& policy,
                                 std::size_t min_retained = kMinRetainedFloor);

// prime, after-pattern over the first two labels (the "01" word), mod 2
// residue 0 and an external fair coin.
std::vector<PlaceSelection> default_battery(const LabelSequence& seq, std::uint64_t coin_seed);

}  // namespace contexcert
