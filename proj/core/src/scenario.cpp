#include "contexcert/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "contexcert/error.hpp"

namespace contexcert {

namespace {

std::string join_ids(std::span<const std::string> ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += '+';
    out += id;
  }
  return out;
}

bool is_subset_of(std::span<const std::string> ids, const std::vector<std::string>& set) {
  return std::all_of(ids.begin(), ids.end(), [&](const std::string& id) {
    return std::find(set.begin(), set.end(), id) != set.end();
  });
}

std::size_t cell_index(const std::vector<std::vector<Outcome>>& alphabets,
                       std::span<const Outcome> tuple) {
  std::size_t index = 0;
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    const auto& a = alphabets[k];
    index = index * a.size() +
            static_cast<std::size_t>(std::find(a.begin(), a.end(), tuple[k]) - a.begin());
  }
  return index;
}

}  // namespace

bool Observable::is_dichotomous() const {
  return alphabet.size() == 2 &&
         std::is_permutation(alphabet.begin(), alphabet.end(), kDichotomousAlphabet.begin());
}

Scenario::Scenario(std::vector<Observable> observables,
                   std::vector<std::vector<std::string>> compatible_sets)
    : observables_(std::move(observables)), compatible_(std::move(compatible_sets)) {
  std::set<std::string> seen;
  for (const auto& obs : observables_) {
    if (obs.id.empty()) throw Error(ErrorCode::InvalidScenario, "observable with empty id");
    if (!seen.insert(obs.id).second) {
      throw Error(ErrorCode::InvalidScenario, "duplicate observable id '" + obs.id + "'");
    }
    if (obs.alphabet.empty()) {
      throw Error(ErrorCode::InvalidScenario, "observable '" + obs.id + "' has an empty alphabet");
    }
    std::set<Outcome> values(obs.alphabet.begin(), obs.alphabet.end());
    if (values.size() != obs.alphabet.size()) {
      throw Error(ErrorCode::InvalidScenario,
                  "observable '" + obs.id + "' has repeated alphabet values");
    }
  }
  for (const auto& set : compatible_) {
    if (set.empty()) throw Error(ErrorCode::InvalidScenario, "empty compatible set");
    std::set<std::string> members;
    for (const auto& id : set) {
      if (!seen.count(id)) {
        throw Error(ErrorCode::InvalidScenario,
                    "compatible set refers to undeclared observable '" + id + "'");
      }
      if (!members.insert(id).second) {
        throw Error(ErrorCode::InvalidScenario, "compatible set repeats '" + id + "'");
      }
    }
  }
}

Scenario Scenario::dichotomous(const std::vector<std::string>& ids,
                               std::vector<std::vector<std::string>> compatible_sets) {
  std::vector<Observable> obs;
  obs.reserve(ids.size());
  for (const auto& id : ids) obs.push_back(Observable{id, kDichotomousAlphabet});
  return Scenario(std::move(obs), std::move(compatible_sets));
}

std::optional<std::size_t> Scenario::find(std::string_view id) const {
  for (std::size_t i = 0; i < observables_.size(); ++i) {
    if (observables_[i].id == id) return i;
  }
  return std::nullopt;
}

const Observable& Scenario::observable(std::string_view id) const {
  auto idx = find(id);
  if (!idx) throw Error(ErrorCode::ObservableNotFound, "unknown observable '" + std::string(id) + "'");
  return observables_[*idx];
}

bool Scenario::is_compatible(std::span<const std::string> ids) const {
  if (ids.empty()) return false;
  for (const auto& id : ids) {
    if (!find(id)) return false;
  }
  std::set<std::string> unique(ids.begin(), ids.end());
  if (unique.size() != ids.size()) return false;
  if (ids.size() == 1) return true;
  return std::any_of(compatible_.begin(), compatible_.end(),
                     [&](const auto& set) { return is_subset_of(ids, set); });
}

std::vector<std::string> Scenario::canonicalize(std::span<const std::string> ids) const {
  std::vector<std::pair<std::size_t, std::string>> indexed;
  indexed.reserve(ids.size());
  for (const auto& id : ids) {
    auto idx = find(id);
    if (!idx) throw Error(ErrorCode::ObservableNotFound, "unknown observable '" + id + "'");
    indexed.emplace_back(*idx, id);
  }
  std::sort(indexed.begin(), indexed.end());
  for (std::size_t i = 1; i < indexed.size(); ++i) {
    if (indexed[i].first == indexed[i - 1].first) {
      throw Error(ErrorCode::InvalidArgument, "setting repeats '" + indexed[i].second + "'");
    }
  }
  std::vector<std::string> out;
  out.reserve(indexed.size());
  for (auto& [_, id] : indexed) out.push_back(std::move(id));
  return out;
}

bool operator==(const Scenario& a, const Scenario& b) {
  if (a.observables_.size() != b.observables_.size()) return false;
  for (std::size_t i = 0; i < a.observables_.size(); ++i) {
    if (a.observables_[i].id != b.observables_[i].id ||
        a.observables_[i].alphabet != b.observables_[i].alphabet) {
      return false;
    }
  }
  return a.compatible_ == b.compatible_;
}

// ---------------------------------------------------------------------------

Dataset::Dataset(Scenario scenario, std::vector<OutcomeRecord> records, Meta meta)
    : scenario_(std::move(scenario)), records_(std::move(records)), meta_(std::move(meta)) {
  record_layout_.reserve(records_.size());
  std::map<std::vector<std::string>, std::size_t> layout_ids;
  std::map<std::vector<std::string>, std::size_t> setting_ids;
  for (std::size_t r = 0; r < records_.size(); ++r) {
    const auto& rec = records_[r];
    const auto where = "record " + std::to_string(r) + ": ";
    if (rec.setting.size() != rec.outcomes.size()) {
      throw Error(ErrorCode::InvalidRecord, where + "setting and outcome lengths differ");
    }
    auto layout_it = layout_ids.find(rec.setting);
    if (layout_it == layout_ids.end()) {
      if (!scenario_.is_compatible(rec.setting)) {
        throw Error(ErrorCode::InvalidRecord,
                    where + "setting " + join_ids(rec.setting) + " is not a compatible set");
      }
      auto canonical = scenario_.canonicalize(rec.setting);
      Layout layout;
      layout.perm.resize(rec.setting.size());
      for (std::size_t i = 0; i < rec.setting.size(); ++i) {
        layout.perm[i] = static_cast<std::size_t>(
            std::find(canonical.begin(), canonical.end(), rec.setting[i]) - canonical.begin());
      }
      auto [it, inserted] = setting_ids.try_emplace(canonical, settings_.size());
      if (inserted) settings_.push_back(canonical);
      layout.setting = it->second;
      layout_it = layout_ids.emplace(rec.setting, layouts_.size()).first;
      layouts_.push_back(std::move(layout));
    }
    for (std::size_t i = 0; i < rec.setting.size(); ++i) {
      const auto& alphabet = scenario_.observable(rec.setting[i]).alphabet;
      if (std::find(alphabet.begin(), alphabet.end(), rec.outcomes[i]) == alphabet.end()) {
        throw Error(ErrorCode::InvalidRecord, where + "outcome " + std::to_string(rec.outcomes[i]) +
                                                  " not in the alphabet of '" + rec.setting[i] +
                                                  "'");
      }
    }
    record_layout_.push_back(layout_it->second);
  }
}

std::size_t Dataset::setting_index(std::size_t record) const {
  return layouts_[record_layout_.at(record)].setting;
}

OutcomeTuple Dataset::canonical_outcomes(std::size_t record) const {
  const auto& rec = records_.at(record);
  const auto& perm = layouts_[record_layout_[record]].perm;
  OutcomeTuple out(rec.outcomes.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = rec.outcomes[i];
  return out;
}

std::size_t Dataset::count(std::size_t setting) const {
  std::size_t n = 0;
  for (std::size_t layout : record_layout_) {
    if (layouts_[layout].setting == setting) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------

ProbTable::ProbTable(std::vector<std::string> support, std::vector<std::vector<Outcome>> alphabets,
                     std::vector<double> probs, std::optional<std::size_t> sample_size)
    : support_(std::move(support)),
      alphabets_(std::move(alphabets)),
      probs_(std::move(probs)),
      sample_size_(sample_size) {
  if (support_.empty()) throw Error(ErrorCode::InvalidTable, "empty support");
  if (support_.size() != alphabets_.size()) {
    throw Error(ErrorCode::InvalidTable, "support and alphabet counts differ");
  }
  std::set<std::string> unique(support_.begin(), support_.end());
  if (unique.size() != support_.size()) throw Error(ErrorCode::InvalidTable, "repeated support id");
  std::size_t cells = 1;
  for (const auto& a : alphabets_) {
    if (a.empty()) throw Error(ErrorCode::InvalidTable, "empty alphabet");
    cells *= a.size();
  }
  if (probs_.size() != cells) {
    throw Error(ErrorCode::InvalidTable, "expected " + std::to_string(cells) + " cells, got " +
                                             std::to_string(probs_.size()));
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw Error(ErrorCode::InvalidTable, "negative or NaN probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorCode::InvalidTable, "probabilities sum to " + std::to_string(total));
  }
}

ProbTable ProbTable::dichotomous(std::vector<std::string> support, std::vector<double> probs,
                                 std::optional<std::size_t> sample_size) {
  std::vector<std::vector<Outcome>> alphabets(support.size(), kDichotomousAlphabet);
  return ProbTable(std::move(support), std::move(alphabets), std::move(probs), sample_size);
}

OutcomeTuple ProbTable::cell(std::size_t index) const {
  OutcomeTuple tuple(support_.size());
  for (std::size_t k = support_.size(); k-- > 0;) {
    const auto& a = alphabets_[k];
    tuple[k] = a[index % a.size()];
    index /= a.size();
  }
  return tuple;
}

std::size_t ProbTable::index_of(std::span<const Outcome> tuple) const {
  if (tuple.size() != support_.size()) {
    throw Error(ErrorCode::WrongArity, "tuple length does not match table support");
  }
  std::size_t index = 0;
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    const auto& a = alphabets_[k];
    auto it = std::find(a.begin(), a.end(), tuple[k]);
    if (it == a.end()) {
      throw Error(ErrorCode::InvalidArgument,
                  "value " + std::to_string(tuple[k]) + " outside alphabet of '" + support_[k] + "'");
    }
    index = index * a.size() + static_cast<std::size_t>(it - a.begin());
  }
  return index;
}

double ProbTable::prob(std::span<const Outcome> tuple) const { return probs_[index_of(tuple)]; }

std::optional<std::size_t> ProbTable::position(std::string_view id) const {
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i] == id) return i;
  }
  return std::nullopt;
}

bool ProbTable::is_dichotomous() const {
  return std::all_of(alphabets_.begin(), alphabets_.end(), [](const auto& a) {
    return Observable{"", a}.is_dichotomous();
  });
}

// ---------------------------------------------------------------------------

ObservablePair CorrelationSet::key(const std::string& a, const std::string& b) {
  return a < b ? ObservablePair{a, b} : ObservablePair{b, a};
}

void CorrelationSet::set(const std::string& a, const std::string& b, double value,
                         std::optional<std::size_t> sample_size) {
  if (a == b) throw Error(ErrorCode::InvalidArgument, "correlation pair needs two observables");
  if (!(std::abs(value) <= 1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "correlation outside [-1, 1]");
  }
  const auto k = key(a, b);
  entries_[k] = std::clamp(value, -1.0, 1.0);
  if (sample_size) {
    sample_sizes_[k] = *sample_size;
  } else {
    sample_sizes_.erase(k);
  }
}

void CorrelationSet::set_mean(const std::string& id, double value) {
  if (!(std::abs(value) <= 1.0 + 1e-12)) throw Error(ErrorCode::InvalidArgument, "mean outside [-1, 1]");
  means_[id] = std::clamp(value, -1.0, 1.0);
}

bool CorrelationSet::contains(const std::string& a, const std::string& b) const {
  return entries_.count(key(a, b)) > 0;
}

double CorrelationSet::at(const std::string& a, const std::string& b) const {
  auto it = entries_.find(key(a, b));
  if (it == entries_.end()) throw Error(ErrorCode::MissingPair, "no correlation for (" + a + "," + b + ")");
  return it->second;
}

std::optional<std::size_t> CorrelationSet::sample_size(const std::string& a,
                                                       const std::string& b) const {
  auto it = sample_sizes_.find(key(a, b));
  if (it == sample_sizes_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> CorrelationSet::mean(const std::string& id) const {
  auto it = means_.find(id);
  if (it == means_.end()) return std::nullopt;
  return it->second;
}

bool CorrelationSet::is_zero_mean(double tolerance) const {
  return std::all_of(means_.begin(), means_.end(),
                     [&](const auto& kv) { return std::abs(kv.second) <= tolerance; });
}

// ---------------------------------------------------------------------------

ProbTable estimate_table(const Dataset& dataset, std::span<const std::string> setting) {
  const auto& scenario = dataset.scenario();
  if (!scenario.is_compatible(setting)) {
    throw Error(ErrorCode::IncompatibleSetting, join_ids(setting) + " is not a compatible set");
  }
  const auto canonical = scenario.canonicalize(setting);
  const auto& settings = dataset.settings();
  auto it = std::find(settings.begin(), settings.end(), canonical);
  if (it == settings.end()) {
    throw Error(ErrorCode::UnknownSetting, "no records for setting " + join_ids(canonical));
  }
  const auto setting_idx = static_cast<std::size_t>(it - settings.begin());

  std::vector<std::vector<Outcome>> alphabets;
  for (const auto& id : canonical) alphabets.push_back(scenario.observable(id).alphabet);
  std::size_t cells = 1;
  for (const auto& a : alphabets) cells *= a.size();

  std::vector<std::size_t> counts(cells, 0);
  std::size_t total = 0;
  for (std::size_t r = 0; r < dataset.records().size(); ++r) {
    if (dataset.setting_index(r) != setting_idx) continue;
    ++counts[cell_index(alphabets, dataset.canonical_outcomes(r))];
    ++total;
  }
  std::vector<double> probs(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    probs[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  }
  return ProbTable(canonical, std::move(alphabets), std::move(probs), total);
}

ProbTable estimate_table(const Dataset& dataset, std::initializer_list<std::string> setting) {
  return estimate_table(dataset, std::span<const std::string>(setting.begin(), setting.size()));
}

ProbTable marginalize(const ProbTable& table, std::span<const std::string> keep) {
  if (keep.empty()) throw Error(ErrorCode::NotSubset, "cannot marginalize to an empty support");
  std::vector<std::size_t> positions;
  std::vector<std::vector<Outcome>> alphabets;
  for (const auto& id : keep) {
    auto pos = table.position(id);
    if (!pos) throw Error(ErrorCode::NotSubset, "'" + id + "' is not in the table support");
    if (std::find(positions.begin(), positions.end(), *pos) != positions.end()) {
      throw Error(ErrorCode::NotSubset, "'" + id + "' requested twice");
    }
    positions.push_back(*pos);
    alphabets.push_back(table.alphabets()[*pos]);
  }
  std::size_t cells = 1;
  for (const auto& a : alphabets) cells *= a.size();

  std::vector<double> probs(cells, 0.0);
  for (std::size_t i = 0; i < table.cell_count(); ++i) {
    const auto full = table.cell(i);
    std::size_t index = 0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
      const auto& a = alphabets[k];
      const auto digit = static_cast<std::size_t>(
          std::find(a.begin(), a.end(), full[positions[k]]) - a.begin());
      index = index * a.size() + digit;
    }
    probs[index] += table.probs()[i];
  }
  return ProbTable(std::vector<std::string>(keep.begin(), keep.end()), std::move(alphabets),
                   std::move(probs), table.sample_size());
}

ProbTable marginalize(const ProbTable& table, std::initializer_list<std::string> keep) {
  return marginalize(table, std::span<const std::string>(keep.begin(), keep.size()));
}

double correlation(const ProbTable& table) {
  if (table.support().size() != 2) {
    throw Error(ErrorCode::WrongArity, "correlation needs a two-observable table");
  }
  if (!table.is_dichotomous()) {
    throw Error(ErrorCode::NonDichotomous, "correlation needs ±1-valued observables");
  }
  double c = 0.0;
  for (std::size_t i = 0; i < table.cell_count(); ++i) {
    const auto t = table.cell(i);
    c += t[0] * t[1] * table.probs()[i];
  }
  return std::clamp(c, -1.0, 1.0);
}

CorrelationSet correlation_set(const Dataset& dataset, std::span<const ObservablePair> pairs) {
  CorrelationSet out;
  for (const auto& [a, b] : pairs) {
    const std::vector<std::string> setting{a, b};
    const auto table = estimate_table(dataset, setting);
    out.set(a, b, correlation(table), table.sample_size());
    for (const auto& id : {a, b}) {
      if (out.mean(id)) continue;
      const std::vector<std::string> one{id};
      const auto m = marginalize(table, one);
      out.set_mean(id, m.prob({+1}) - m.prob({-1}));
    }
  }
  return out;
}

}  // namespace contexcert
