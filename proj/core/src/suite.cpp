#include "contexcert/suite.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "contexcert/error.hpp"
#include "contexcert/rng.hpp"

namespace contexcert {

namespace {

bool has_setting(const Dataset& ds, const ObservablePair& p) {
  const std::set<std::string> want{p.first, p.second};
  return std::any_of(ds.settings().begin(), ds.settings().end(), [&](const auto& s) {
    return std::set<std::string>(s.begin(), s.end()) == want;
  });
}

template <std::size_t N>
std::vector<std::vector<std::string>> missing_pairs(const Dataset& ds,
                                                    const std::array<ObservablePair, N>& pairs) {
  std::vector<std::vector<std::string>> out;
  for (const auto& p : pairs) {
    if (!has_setting(ds, p)) out.push_back({p.first, p.second});
  }
  return out;
}

SkipEntry skip_from(const Error& e) {
  return SkipEntry{std::string(to_string(e.code())), e.what(), {}};
}

SkipEntry missing_entry(const std::string& test, std::vector<std::vector<std::string>> missing) {
  std::string msg = test + " needs pair settings";
  for (const auto& m : missing) msg += " " + m[0] + "+" + m[1];
  return SkipEntry{std::string(to_string(ErrorCode::MissingSettings)), msg, std::move(missing)};
}

double k_of(const TolerancePolicy& p) {
  const auto* s = std::get_if<StatisticalTolerance>(&p);
  return s ? s->k : 0.0;
}

template <std::size_t N>
std::vector<ProbTable> pair_tables(const Dataset& ds, const std::array<ObservablePair, N>& pairs) {
  std::vector<ProbTable> out;
  for (const auto& p : pairs) out.push_back(estimate_table(ds, {p.first, p.second}));
  return out;
}

std::vector<std::size_t> checkpoints(std::size_t length, std::size_t points) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= points; ++i) {
    const std::size_t cp = (length * i) / points;
    if (cp > 0 && (out.empty() || cp > out.back())) out.push_back(cp);
  }
  return out;
}

ordered_json skip_json(const SkipEntry& s) {
  ordered_json j{{"reason", s.reason}, {"message", s.message}};
  if (!s.missing.empty()) j["missing"] = s.missing;
  return j;
}

}  // namespace

bool verdict_consistent(const TestVerdict& v) {
  return (v.outcome == TestOutcome::passed_contextuality_test) == (v.margin > v.tolerance);
}

TestEntry run_inequality_test(const Dataset& dataset, const std::string& test,
                              const SuiteConfig& config) {
  const double k = k_of(config.policy);
  const bool statistical = std::holds_alternative<StatisticalTolerance>(config.policy);
  const double fixed_eps = statistical ? 0.0 : std::get<FixedTolerance>(config.policy).epsilon;
  TestEntry entry{test, std::nullopt, std::nullopt};

  if (test == "chsh" || test == "bell-original") {
    ChshInput chsh;
    chsh.roles = config.chsh_roles;
    const auto pairs = chsh.pairs();
    if (auto missing = missing_pairs(dataset, pairs); !missing.empty()) {
      entry.skipped = missing_entry(test, std::move(missing));
      return entry;
    }
    try {
      chsh.correlations = correlation_set(dataset, std::vector<ObservablePair>(pairs.begin(), pairs.end()));
      if (test == "chsh") {
        entry.verdict = chsh_test(chsh, statistical ? chsh_tolerance(chsh, k) : fixed_eps);
      } else {
        entry.verdict = original_bell_test(chsh, config.bell_delta,
                                           statistical ? original_bell_tolerance(chsh, k) : fixed_eps);
      }
    } catch (const Error& e) {
      entry.skipped = skip_from(e);
    }
    return entry;
  }
  if (test == "sz") {
    TripleInput triple;
    triple.roles = config.triple_roles;
    const auto pairs = triple.pairs();
    if (auto missing = missing_pairs(dataset, pairs); !missing.empty()) {
      entry.skipped = missing_entry(test, std::move(missing));
      return entry;
    }
    try {
      triple.correlations = correlation_set(dataset, std::vector<ObservablePair>(pairs.begin(), pairs.end()));
      // Empirical means are only zero up to sampling error; 1/sqrt(N) bounds
      // the standard error of a ±1 mean.
      std::size_t n_min = 0;
      for (const auto& p : pairs) {
        const auto n = triple.correlations.sample_size(p.first, p.second).value_or(0);
        n_min = n_min == 0 ? n : std::min(n_min, n);
      }
      triple.zero_mean_tolerance =
          statistical ? k / std::sqrt(static_cast<double>(std::max<std::size_t>(n_min, 1)))
                      : std::max(fixed_eps, 1e-9);
      entry.verdict = sz_test(triple, statistical ? sz_tolerance(triple, k) : fixed_eps);
    } catch (const Error& e) {
      entry.skipped = skip_from(e);
    }
    return entry;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown test '" + test + "'");
}

CertReport run_full_suite(const Dataset& dataset, const SuiteConfig& config) {
  if (config.profile_points == 0) throw Error(ErrorCode::InvalidArgument, "profile_points must be >= 1");
  CertReport report;
  report.provenance = dataset.meta();
  report.record_count = dataset.records().size();
  for (std::size_t s = 0; s < dataset.settings().size(); ++s) {
    report.settings.emplace_back(dataset.settings()[s], dataset.count(s));
  }

  try {
    report.signaling = no_signaling_test(dataset, config.policy);
  } catch (const Error& e) {
    report.signaling_skipped = skip_from(e);
  }

  const double k = k_of(config.policy);
  const bool statistical = std::holds_alternative<StatisticalTolerance>(config.policy);
  const double fixed_eps = statistical ? 0.0 : std::get<FixedTolerance>(config.policy).epsilon;

  for (const char* name : {"chsh", "sz", "bell-original"}) {
    report.tests.push_back(run_inequality_test(dataset, name, config));
  }
  auto outcome_of = [&](const std::string& name) -> std::optional<TestOutcome> {
    for (const auto& t : report.tests) {
      if (t.test == name && t.verdict) return t.verdict->outcome;
    }
    return std::nullopt;
  };
  ChshInput chsh;
  chsh.roles = config.chsh_roles;
  TripleInput triple;
  triple.roles = config.triple_roles;
  const auto chsh_missing = missing_pairs(dataset, chsh.pairs());
  const auto sz_missing = missing_pairs(dataset, triple.pairs());

  // Oracle cross-check on the empirical pair tables.
  auto run_oracle = [&](const std::string& name, std::vector<std::string> variables,
                        const std::vector<std::vector<std::string>>& missing, auto pairs,
                        std::optional<TestOutcome> outcome) {
    OracleEntry entry;
    entry.name = name;
    entry.variables = variables;
    if (!missing.empty()) {
      entry.skipped = missing_entry(name, missing);
      report.oracle.push_back(std::move(entry));
      return;
    }
    try {
      MarginalConstraintSystem system{std::move(variables), pair_tables(dataset, pairs), 0.0};
      system.cell_tolerance = statistical ? statistical_cell_tolerance(system.constraints, k) : fixed_eps;
      entry.cell_tolerance = system.cell_tolerance;
      entry.result = jpd_feasible(system);
      if (outcome) {
        entry.agrees_with_test = (entry.result->status == FeasibilityStatus::feasible) ==
                                 (*outcome == TestOutcome::rejected_noncontextual);
      }
    } catch (const Error& e) {
      entry.skipped = skip_from(e);
    }
    report.oracle.push_back(std::move(entry));
  };
  const auto& cr = config.chsh_roles;
  run_oracle("chsh", {cr.a1, cr.a2, cr.b1, cr.b2}, chsh_missing, chsh.pairs(), outcome_of("chsh"));
  const auto& tr = config.triple_roles;
  run_oracle("sz", {tr.x1, tr.x2, tr.x3}, sz_missing, triple.pairs(), outcome_of("sz"));

  // Per-setting, per-observable outcome streams in acquisition order.
  std::vector<std::vector<std::vector<Outcome>>> streams(dataset.settings().size());
  for (std::size_t s = 0; s < dataset.settings().size(); ++s) {
    streams[s].resize(dataset.settings()[s].size());
  }
  for (std::size_t r = 0; r < dataset.records().size(); ++r) {
    const auto s = dataset.setting_index(r);
    const auto tuple = dataset.canonical_outcomes(r);
    for (std::size_t i = 0; i < tuple.size(); ++i) streams[s][i].push_back(tuple[i]);
  }
  std::uint64_t stream_index = 0;
  for (std::size_t s = 0; s < streams.size(); ++s) {
    for (std::size_t i = 0; i < streams[s].size(); ++i, ++stream_index) {
      StreamEntry entry;
      entry.setting = dataset.settings()[s];
      entry.observable = entry.setting[i];
      try {
        const auto& alphabet = dataset.scenario().observable(entry.observable).alphabet;
        const auto seq = LabelSequence::from_outcomes(streams[s][i], alphabet);
        const auto coin_seed = derive_subseed(config.seed, stream_index);
        std::vector<PlaceSelection> selections;
        if (config.selections.empty()) {
          selections = default_battery(seq, coin_seed);
        } else {
          for (const auto& spec : config.selections) selections.push_back(parse_selection(spec, coin_seed));
        }
        entry.profile_label = seq.labels().front();
        const auto cps = checkpoints(seq.size(), config.profile_points);
        entry.profile = stabilization_profile(seq, entry.profile_label, cps);
        entry.report = randomness_test(seq, selections, config.randomness_policy, config.min_retained);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::InvalidArgument) throw;
        entry.skipped = skip_from(e);
      }
      report.randomness.push_back(std::move(entry));
    }
  }
  return report;
}

ordered_json to_json(const SuiteConfig& c) {
  return {{"policy", to_json(c.policy)},
          {"randomness_policy", to_json(c.randomness_policy)},
          {"bell_delta", c.bell_delta},
          {"seed", c.seed},
          {"selections", c.selections},
          {"min_retained", c.min_retained},
          {"chsh_roles", {c.chsh_roles.a1, c.chsh_roles.a2, c.chsh_roles.b1, c.chsh_roles.b2}},
          {"triple_roles", {c.triple_roles.x1, c.triple_roles.x2, c.triple_roles.x3}},
          {"profile_points", c.profile_points}};
}

ordered_json to_json(const CertReport& r, const SuiteConfig& config) {
  ordered_json j;
  j["tool"] = {{"name", "contexcert"}, {"version", kToolVersion}};
  j["prng"] = std::string(Rng::kRngName);
  j["seed"] = config.seed;
  j["config"] = to_json(config);

  ordered_json settings = ordered_json::array();
  for (const auto& [s, n] : r.settings) settings.push_back({{"setting", s}, {"count", n}});
  j["dataset"] = {{"provenance", to_json(r.provenance)}, {"records", r.record_count}, {"settings", settings}};

  j["signaling"] = r.signaling ? to_json(*r.signaling) : ordered_json{{"skipped", skip_json(*r.signaling_skipped)}};

  bool consistent = true;
  ordered_json tests = ordered_json::array();
  ordered_json test_summary = ordered_json::object();
  for (const auto& t : r.tests) {
    ordered_json e{{"test", t.test}};
    if (t.verdict) {
      e["status"] = "ran";
      e["verdict"] = to_json(*t.verdict);
      consistent = consistent && verdict_consistent(*t.verdict);
      test_summary[t.test] = std::string(to_string(t.verdict->outcome));
    } else {
      e["status"] = "skipped";
      e["skip"] = skip_json(*t.skipped);
      test_summary[t.test] = "skipped";
    }
    tests.push_back(std::move(e));
  }
  j["tests"] = std::move(tests);

  ordered_json oracle = ordered_json::array();
  ordered_json oracle_summary = ordered_json::object();
  for (const auto& o : r.oracle) {
    ordered_json e{{"name", o.name}, {"variables", o.variables}};
    if (o.result) {
      e["status"] = "ran";
      e["cell_tolerance"] = o.cell_tolerance;
      e["result"] = to_json(*o.result);
      e["agrees_with_test"] = o.agrees_with_test ? ordered_json(*o.agrees_with_test) : ordered_json(nullptr);
      oracle_summary[o.name] = std::string(to_string(o.result->status));
    } else {
      e["status"] = "skipped";
      e["skip"] = skip_json(*o.skipped);
      oracle_summary[o.name] = "skipped";
    }
    oracle.push_back(std::move(e));
  }
  j["oracle"] = std::move(oracle);

  ordered_json streams = ordered_json::array();
  std::size_t passed = 0, failed = 0, skipped = 0;
  for (const auto& s : r.randomness) {
    ordered_json e{{"setting", s.setting}, {"observable", s.observable}};
    if (s.report) {
      e["status"] = "ran";
      e["report"] = to_json(*s.report);
      ordered_json cps = ordered_json::array();
      ordered_json freqs = ordered_json::array();
      for (const auto& [cp, f] : s.profile) {
        cps.push_back(cp);
        freqs.push_back(f);
      }
      e["profile"] = {{"label", s.profile_label}, {"checkpoints", cps}, {"frequencies", freqs}};
      (s.report->verdict == RandomnessVerdict::passed ? passed : failed) += 1;
    } else {
      e["status"] = "skipped";
      e["skip"] = skip_json(*s.skipped);
      ++skipped;
    }
    streams.push_back(std::move(e));
  }
  j["randomness"] = std::move(streams);

  j["summary"] = {
      {"signaling", r.signaling ? std::string(to_string(r.signaling->verdict)) : std::string("skipped")},
      {"tests", test_summary},
      {"oracle", oracle_summary},
      {"randomness", {{"passed", passed}, {"failed", failed}, {"skipped", skipped}}},
      {"verdicts_consistent", consistent}};
  return j;
}

}  // namespace contexcert
