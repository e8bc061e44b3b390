#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace contexcert {

using Outcome = int;
using OutcomeTuple = std::vector<Outcome>;

// The ±1 alphabet in its canonical cell order (+1 first).
inline const std::vector<Outcome> kDichotomousAlphabet{+1, -1};

struct Observable {
  std::string id;
  std::vector<Outcome> alphabet = kDichotomousAlphabet;

  bool is_dichotomous() const;
};

// Observables plus the declared jointly-measurable sets. Singletons are
// implicitly compatible and any subset of a declared set is compatible.
class Scenario {
 public:
  Scenario() = default;
  Scenario(std::vector<Observable> observables,
           std::vector<std::vector<std::string>> compatible_sets);

  // All observables ±1-valued.
  static Scenario dichotomous(const std::vector<std::string>& ids,
                              std::vector<std::vector<std::string>> compatible_sets);

  const std::vector<Observable>& observables() const { return observables_; }
  const std::vector<std::vector<std::string>>& compatible_sets() const { return compatible_; }

  std::optional<std::size_t> find(std::string_view id) const;
  const Observable& observable(std::string_view id) const;
  bool is_compatible(std::span<const std::string> ids) const;

  // Reorders `ids` into declaration order. Throws on unknown or repeated ids.
  std::vector<std::string> canonicalize(std::span<const std::string> ids) const;

  friend bool operator==(const Scenario&, const Scenario&);

 private:
  std::vector<Observable> observables_;
  std::vector<std::vector<std::string>> compatible_;
};

struct OutcomeRecord {
  std::vector<std::string> setting;
  std::vector<Outcome> outcomes;

  friend bool operator==(const OutcomeRecord&, const OutcomeRecord&) = default;
};

using Meta = std::map<std::string, std::string>;

// Validated, immutable collection of joint-measurement records. Records keep
// acquisition order.
class Dataset {
 public:
  Dataset(Scenario scenario, std::vector<OutcomeRecord> records, Meta meta = {});

  const Scenario& scenario() const { return scenario_; }
  const std::vector<OutcomeRecord>& records() const { return records_; }
  const Meta& meta() const { return meta_; }

  // Distinct settings in canonical order, listed by first appearance.
  const std::vector<std::vector<std::string>>& settings() const { return settings_; }
  // Index into settings() for each record.
  std::size_t setting_index(std::size_t record) const;
  // Record outcomes reordered to the canonical order of their setting.
  OutcomeTuple canonical_outcomes(std::size_t record) const;
  std::size_t count(std::size_t setting) const;

 private:
  Scenario scenario_;
  std::vector<OutcomeRecord> records_;
  Meta meta_;
  std::vector<std::vector<std::string>> settings_;
  // One layout per distinct raw setting order: its canonical setting and the
  // permutation from record position to canonical position.
  struct Layout {
    std::size_t setting = 0;
    std::vector<std::size_t> perm;
  };
  std::vector<Layout> layouts_;
  std::vector<std::size_t> record_layout_;
};

// Normalized probability table over the product of the support's alphabets.
// Cells are stored densely in lexicographic order of the alphabets as
// declared, last coordinate fastest.
class ProbTable {
 public:
  static constexpr double kNormalizationTolerance = 1e-12;

  ProbTable(std::vector<std::string> support, std::vector<std::vector<Outcome>> alphabets,
            std::vector<double> probs, std::optional<std::size_t> sample_size = std::nullopt);

  static ProbTable dichotomous(std::vector<std::string> support, std::vector<double> probs,
                               std::optional<std::size_t> sample_size = std::nullopt);

  const std::vector<std::string>& support() const { return support_; }
  const std::vector<std::vector<Outcome>>& alphabets() const { return alphabets_; }
  const std::vector<double>& probs() const { return probs_; }
  std::optional<std::size_t> sample_size() const { return sample_size_; }

  std::size_t cell_count() const { return probs_.size(); }
  OutcomeTuple cell(std::size_t index) const;
  std::size_t index_of(std::span<const Outcome> tuple) const;
  double prob(std::span<const Outcome> tuple) const;
  double prob(std::initializer_list<Outcome> tuple) const {
    return prob(std::span<const Outcome>(tuple.begin(), tuple.size()));
  }
  std::optional<std::size_t> position(std::string_view id) const;
  bool is_dichotomous() const;

 private:
  std::vector<std::string> support_;
  std::vector<std::vector<Outcome>> alphabets_;
  std::vector<double> probs_;
  std::optional<std::size_t> sample_size_;
};

using ObservablePair = std::pair<std::string, std::string>;

// Pairwise correlations and per-observable means. Pair keys are unordered.
class CorrelationSet {
 public:
  void set(const std::string& a, const std::string& b, double value,
           std::optional<std::size_t> sample_size = std::nullopt);
  void set_mean(const std::string& id, double value);

  bool contains(const std::string& a, const std::string& b) const;
  double at(const std::string& a, const std::string& b) const;
  std::optional<std::size_t> sample_size(const std::string& a, const std::string& b) const;
  std::optional<double> mean(const std::string& id) const;

  const std::map<ObservablePair, double>& entries() const { return entries_; }
  const std::map<std::string, double>& means() const { return means_; }

  // Every recorded mean within `tolerance` of zero.
  bool is_zero_mean(double tolerance) const;
  bool empty() const { return entries_.empty(); }

  static ObservablePair key(const std::string& a, const std::string& b);

 private:
  std::map<ObservablePair, double> entries_;
  std::map<ObservablePair, std::size_t> sample_sizes_;
  std::map<std::string, double> means_;
};

// Empirical table of the records whose setting equals `setting` as a set.
ProbTable estimate_table(const Dataset& dataset, std::span<const std::string> setting);
ProbTable estimate_table(const Dataset& dataset, std::initializer_list<std::string> setting);

// Sums out every coordinate not in `keep`; the result follows `keep`'s order.
ProbTable marginalize(const ProbTable& table, std::span<const std::string> keep);
ProbTable marginalize(const ProbTable& table, std::initializer_list<std::string> keep);

// Sum of a*b*p(a,b) over a two-observable ±1 table.
double correlation(const ProbTable& table);

CorrelationSet correlation_set(const Dataset& dataset, std::span<const ObservablePair> pairs);

}  // namespace contexcert
