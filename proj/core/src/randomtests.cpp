#include "contexcert/randomtests.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "contexcert/error.hpp"
#include "contexcert/rng.hpp"

namespace contexcert {

namespace {

std::vector<bool> prime_sieve(std::size_t n) {
  std::vector<bool> prime(n + 1, true);
  prime[0] = false;
  if (n >= 1) prime[1] = false;
  for (std::size_t i = 2; i * i <= n; ++i) {
    if (!prime[i]) continue;
    for (std::size_t j = i * i; j <= n; j += i) prime[j] = false;
  }
  return prime;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

LabelSequence::LabelSequence(std::vector<std::string> labels, std::vector<std::uint32_t> values)
    : labels_(std::move(labels)), values_(std::move(values)) {
  if (labels_.empty()) throw Error(ErrorCode::InvalidArgument, "empty label alphabet");
  std::vector<std::string> sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::InvalidArgument, "repeated label");
  }
  if (values_.empty()) throw Error(ErrorCode::InvalidArgument, "sequence must have length >= 1");
  for (auto v : values_) {
    if (v >= labels_.size()) throw Error(ErrorCode::UnknownLabel, "value outside the label alphabet");
  }
}

LabelSequence LabelSequence::from_symbols(const std::vector<std::string>& symbols,
                                          std::vector<std::string> labels) {
  const bool infer = labels.empty();
  std::vector<std::uint32_t> values;
  values.reserve(symbols.size());
  for (const auto& s : symbols) {
    auto it = std::find(labels.begin(), labels.end(), s);
    if (it == labels.end()) {
      if (!infer) throw Error(ErrorCode::UnknownLabel, "symbol '" + s + "' is not a declared label");
      labels.push_back(s);
      it = labels.end() - 1;
    }
    values.push_back(static_cast<std::uint32_t>(it - labels.begin()));
  }
  return LabelSequence(std::move(labels), std::move(values));
}

LabelSequence LabelSequence::from_outcomes(std::span<const Outcome> outcomes,
                                           const std::vector<Outcome>& alphabet) {
  std::vector<std::string> labels;
  for (auto a : alphabet) labels.push_back(std::to_string(a));
  std::vector<std::uint32_t> values;
  values.reserve(outcomes.size());
  for (auto o : outcomes) {
    auto it = std::find(alphabet.begin(), alphabet.end(), o);
    if (it == alphabet.end()) throw Error(ErrorCode::UnknownLabel, "outcome outside alphabet");
    values.push_back(static_cast<std::uint32_t>(it - alphabet.begin()));
  }
  return LabelSequence(std::move(labels), std::move(values));
}

std::uint32_t LabelSequence::label_index(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorCode::UnknownLabel, "unknown label '" + label + "'");
  return static_cast<std::uint32_t>(it - labels_.begin());
}

// ---------------------------------------------------------------------------

PlaceSelection PlaceSelection::prime_index() { return {selection::PrimeIndex{}, "prime"}; }

PlaceSelection PlaceSelection::after_pattern(std::vector<std::string> pattern) {
  if (pattern.empty()) throw Error(ErrorCode::InvalidArgument, "empty pattern");
  std::string desc = "after:";
  bool single_chars = std::all_of(pattern.begin(), pattern.end(),
                                  [](const std::string& s) { return s.size() == 1; });
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (i > 0 && !single_chars) desc += ',';
    desc += pattern[i];
  }
  return {selection::AfterPattern{std::move(pattern)}, desc};
}

PlaceSelection PlaceSelection::index_arithmetic(std::size_t modulus, std::size_t residue) {
  if (modulus == 0 || residue >= modulus) {
    throw Error(ErrorCode::InvalidArgument, "need modulus >= 1 and residue < modulus");
  }
  return {selection::IndexArithmetic{modulus, residue},
          "mod:" + std::to_string(modulus) + ":" + std::to_string(residue)};
}

PlaceSelection PlaceSelection::external_coin(std::uint64_t seed, double bias) {
  if (!(bias > 0.0 && bias <= 1.0)) throw Error(ErrorCode::InvalidArgument, "coin bias must be in (0, 1]");
  std::ostringstream os;
  os.precision(17);
  os << "coin:" << seed << ":" << bias;
  return {selection::ExternalCoin{seed, bias}, os.str()};
}

PlaceSelection PlaceSelection::custom(
    std::function<bool(std::size_t, std::span<const std::uint32_t>)> decide, std::string description) {
  return {selection::Custom{std::move(decide)}, std::move(description)};
}

std::vector<bool> PlaceSelection::decisions(const LabelSequence& seq) const {
  const auto& x = seq.values();
  const std::size_t n_total = x.size();
  std::vector<bool> keep(n_total, false);
  std::visit(
      overloaded{
          [&](const selection::PrimeIndex&) {
            const auto prime = prime_sieve(n_total);
            for (std::size_t n = 1; n <= n_total; ++n) keep[n - 1] = prime[n];
          },
          [&](const selection::AfterPattern& p) {
            std::vector<std::int64_t> pat;
            for (const auto& sym : p.pattern) pat.push_back(seq.label_index(sym));
            const std::size_t k = pat.size();
            for (std::size_t n = 1; n <= n_total; ++n) {
              // prefix is x_1..x_{n-1}, i.e. x[0..n-2]
              if (n - 1 < k) continue;
              bool match = true;
              for (std::size_t i = 0; i < k && match; ++i) {
                match = static_cast<std::int64_t>(x[n - 1 - k + i]) == pat[i];
              }
              keep[n - 1] = match;
            }
          },
          [&](const selection::IndexArithmetic& m) {
            for (std::size_t n = 1; n <= n_total; ++n) keep[n - 1] = n % m.modulus == m.residue;
          },
          [&](const selection::ExternalCoin& c) {
            Rng coin(c.seed);
            for (std::size_t n = 1; n <= n_total; ++n) keep[n - 1] = coin.bernoulli(c.bias);
          },
          [&](const selection::Custom& c) {
            for (std::size_t n = 1; n <= n_total; ++n) {
              keep[n - 1] = c.decide(n, std::span<const std::uint32_t>(x.data(), n - 1));
            }
          },
      },
      kind);
  return keep;
}

PlaceSelection parse_selection(const std::string& spec, std::uint64_t default_coin_seed) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw Error(ErrorCode::ParseError, "empty selection");
  const auto& name = parts[0];
  try {
    if (name == "prime" && parts.size() == 1) return PlaceSelection::prime_index();
    if (name == "after" && parts.size() == 2 && !parts[1].empty()) {
      std::vector<std::string> pattern;
      if (parts[1].find(',') != std::string::npos) {
        pattern = split(parts[1], ',');
      } else {
        for (char ch : parts[1]) pattern.emplace_back(1, ch);
      }
      return PlaceSelection::after_pattern(std::move(pattern));
    }
    if (name == "mod" && parts.size() == 3) {
      return PlaceSelection::index_arithmetic(std::stoull(parts[1]), std::stoull(parts[2]));
    }
    if (name == "coin" && parts.size() <= 3) {
      const std::uint64_t seed = parts.size() >= 2 ? std::stoull(parts[1]) : default_coin_seed;
      const double bias = parts.size() == 3 ? std::stod(parts[2]) : 0.5;
      return PlaceSelection::external_coin(seed, bias);
    }
  } catch (const std::logic_error&) {
    // std::stoull / std::stod failures fall through to the parse error
  }
  throw Error(ErrorCode::ParseError, "cannot parse selection '" + spec + "'");
}

// ---------------------------------------------------------------------------

double frequency(const LabelSequence& seq, const std::string& label) {
  const auto idx = seq.label_index(label);
  const auto n = std::count(seq.values().begin(), seq.values().end(), idx);
  return static_cast<double>(n) / static_cast<double>(seq.size());
}

std::vector<std::pair<std::size_t, double>> stabilization_profile(
    const LabelSequence& seq, const std::string& label, std::span<const std::size_t> checkpoints) {
  const auto idx = seq.label_index(label);
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] == 0 || checkpoints[i] > seq.size() ||
        (i > 0 && checkpoints[i] <= checkpoints[i - 1])) {
      throw Error(ErrorCode::BadCheckpoints,
                  "checkpoints must be strictly increasing within 1..sequence length");
    }
  }
  std::vector<std::pair<std::size_t, double>> out;
  std::size_t hits = 0;
  std::size_t pos = 0;
  for (auto cp : checkpoints) {
    for (; pos < cp; ++pos) hits += seq.values()[pos] == idx;
    out.emplace_back(cp, static_cast<double>(hits) / static_cast<double>(cp));
  }
  return out;
}

LabelSequence apply_selection(const LabelSequence& seq, const PlaceSelection& sel) {
  const auto keep = sel.decisions(seq);
  std::vector<std::uint32_t> retained;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i]) retained.push_back(seq.values()[i]);
  }
  if (retained.empty()) {
    throw Error(ErrorCode::EmptySelection, "'" + sel.description + "' retained nothing");
  }
  return LabelSequence(seq.labels(), std::move(retained));
}

std::string_view to_string(SelectionStatus s) {
  switch (s) {
    case SelectionStatus::passed: return "passed";
    case SelectionStatus::failed: return "failed";
    case SelectionStatus::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(RandomnessVerdict v) {
  return v == RandomnessVerdict::passed ? "passed" : "failed";
}

RandomnessReport randomness_test(const LabelSequence& seq, std::span<const PlaceSelection> selections,
                                 const TolerancePolicy& policy, std::size_t min_retained) {
  if (selections.empty()) throw Error(ErrorCode::InvalidArgument, "no place selections given");
  if (min_retained < kMinRetainedFloor) {
    throw Error(ErrorCode::InvalidArgument, "min_retained must be at least 30");
  }
  RandomnessReport report;
  report.length = seq.size();
  report.policy = policy;
  report.min_retained = min_retained;
  if (const auto* f = std::get_if<FixedTolerance>(&policy)) report.tolerance_used = f->epsilon;

  const std::size_t m = seq.labels().size();
  std::vector<std::size_t> counts(m, 0);
  for (auto v : seq.values()) ++counts[v];
  std::vector<double> overall(m);
  for (std::size_t l = 0; l < m; ++l) {
    overall[l] = static_cast<double>(counts[l]) / static_cast<double>(seq.size());
    report.overall_freq[seq.labels()[l]] = overall[l];
  }

  bool any_admissible = false;
  for (const auto& sel : selections) {
    const auto keep = sel.decisions(seq);
    std::vector<std::size_t> sub(m, 0);
    std::size_t retained = 0;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      if (!keep[i]) continue;
      ++sub[seq.values()[i]];
      ++retained;
    }
    SelectionResult r;
    r.description = sel.description;
    r.retained = retained;
    if (retained < min_retained) {
      r.status = SelectionStatus::inconclusive;
      report.per_selection.push_back(std::move(r));
      continue;
    }
    any_admissible = true;
    bool ok = true;
    bool first = true;
    for (std::size_t l = 0; l < m; ++l) {
      const double f = static_cast<double>(sub[l]) / static_cast<double>(retained);
      r.frequencies[seq.labels()[l]] = f;
      const double gap = std::abs(f - overall[l]);
      double tol = 0.0;
      if (const auto* fx = std::get_if<FixedTolerance>(&policy)) {
        tol = fx->epsilon;
      } else {
        const double k = std::get<StatisticalTolerance>(policy).k;
        tol = k * std::sqrt(overall[l] * (1.0 - overall[l]) / static_cast<double>(retained));
      }
      if (gap > tol) ok = false;
      if (first || gap > r.max_deviation) {
        r.max_deviation = gap;
        r.tolerance = tol;
        first = false;
      }
    }
    if (std::holds_alternative<StatisticalTolerance>(policy)) {
      report.tolerance_used = std::max(report.tolerance_used, r.tolerance);
    }
    r.status = ok ? SelectionStatus::passed : SelectionStatus::failed;
    if (!ok) report.verdict = RandomnessVerdict::failed;
    report.per_selection.push_back(std::move(r));
  }
  if (!any_admissible) {
    throw Error(ErrorCode::AllSelectionsInconclusive,
                "every selection retained fewer than " + std::to_string(min_retained) + " elements");
  }
  if (std::any_of(overall.begin(), overall.end(), [](double f) { return f == 1.0; })) {
    report.notes.push_back(
        "degenerate: a single label makes up the whole sequence; frequencies stabilize trivially");
  }
  report.notes.push_back("a pass means the sequence passes this battery of place selections only");
  return report;
}

std::vector<PlaceSelection> default_battery(const LabelSequence& seq, std::uint64_t coin_seed) {
  const auto& labels = seq.labels();
  std::vector<std::string> word{labels[0], labels.size() > 1 ? labels[1] : labels[0]};
  return {PlaceSelection::prime_index(), PlaceSelection::after_pattern(std::move(word)),
          PlaceSelection::index_arithmetic(2, 0), PlaceSelection::external_coin(coin_seed, 0.5)};
}

}  // namespace contexcert
