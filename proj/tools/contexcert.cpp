// contexcert command-line front end.
//
// Exit codes: 0 finished (whatever the verdicts), 1 operational failure
// (I/O, parse, validation), 2 bad usage, 3 the input cannot support the
// requested test (missing settings, unmet precondition).

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contexcert/error.hpp"
#include "contexcert/io.hpp"
#include "contexcert/quantumgen.hpp"
#include "contexcert/suite.hpp"

namespace cc = contexcert;
namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUnsupported = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Accepts plain numbers and multiples of pi: "0.5", "pi", "pi/4", "3pi/4",
// "3*pi/4", "-pi/2".
double parse_angle(std::string text) {
  std::erase(text, ' ');
  const auto pos = text.find("pi");
  if (pos == std::string::npos) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) throw UsageError("bad angle '" + text + "'");
    return v;
  }
  std::string coef = text.substr(0, pos);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double k = 1.0;
  if (coef == "-") {
    k = -1.0;
  } else if (!coef.empty() && coef != "+") {
    try {
      k = std::stod(coef);
    } catch (const std::logic_error&) {
      throw UsageError("bad angle '" + text + "'");
    }
  }
  double d = 1.0;
  const std::string rest = text.substr(pos + 2);
  if (!rest.empty()) {
    if (rest[0] != '/' || rest.size() < 2) throw UsageError("bad angle '" + text + "'");
    try {
      d = std::stod(rest.substr(1));
    } catch (const std::logic_error&) {
      throw UsageError("bad angle '" + text + "'");
    }
  }
  return k * std::numbers::pi / d;
}

std::vector<double> parse_angles(const std::string& text) {
  std::vector<double> out;
  for (const auto& t : split(text, ',')) out.push_back(parse_angle(t));
  return out;
}

std::vector<std::vector<std::string>> parse_settings(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : split(text, ',')) {
    auto ids = split(s, '+');
    for (const auto& id : ids) {
      if (id.empty()) throw UsageError("bad setting list '" + text + "'");
    }
    out.push_back(std::move(ids));
  }
  return out;
}

// Comma-separated selections; pieces that do not start a new selection
// belong to the previous one ("after:1,-1,prime").
std::vector<std::string> split_selections(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& piece : split(text, ',')) {
    const auto head = piece.substr(0, piece.find(':'));
    const bool starts = head == "prime" || head == "after" || head == "mod" || head == "coin";
    if (!starts && !out.empty()) {
      out.back() += "," + piece;
    } else {
      out.push_back(piece);
    }
  }
  return out;
}

std::optional<std::uint64_t> resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("CONTEXCERT_SEED"); env && *env) {
    char* end = nullptr;
    errno = 0;
    const auto v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || env[0] == '-') {
      throw UsageError(std::string("CONTEXCERT_SEED is not an unsigned integer: '") + env + "'");
    }
    return v;
  }
  return std::nullopt;
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& flag) {
  const auto s = resolve_seed(flag);
  if (!s) throw UsageError("a seed is required: pass --seed or set CONTEXCERT_SEED");
  return *s;
}

void emit(const cc::ordered_json& j, const std::string& format, const std::string& out_path) {
  const std::string text = format == "text" ? cc::render_text(j) : j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    cc::write_text_file(out_path, text);
  }
}

cc::Dataset load_dataset(const std::string& data, const std::string& scenario) {
  return scenario.empty() ? cc::ingest(data) : cc::ingest(data, scenario);
}

std::string sidecar_path(const std::string& out, const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  fs::path p(out);
  p.replace_extension(".scenario.json");
  return p.string();
}

cc::ordered_json write_generated(const cc::Dataset& ds, const std::string& out,
                                 const std::string& scenario_out) {
  const auto scen = sidecar_path(out, scenario_out);
  cc::write_text_file(out, cc::to_csv(ds));
  cc::write_text_file(scen, cc::to_json(ds.scenario()).dump(2) + "\n");
  return {{"data", out}, {"scenario", scen}, {"records", ds.records().size()}, {"meta", cc::to_json(ds.meta())}};
}

void apply_roles(cc::SuiteConfig& config, const std::string& roles, const std::string& triple_roles) {
  if (!roles.empty()) {
    const auto r = split(roles, ',');
    if (r.size() != 4) throw UsageError("--roles needs four ids A1,A2,B1,B2");
    config.chsh_roles = {r[0], r[1], r[2], r[3]};
  }
  if (!triple_roles.empty()) {
    const auto r = split(triple_roles, ',');
    if (r.size() != 3) throw UsageError("--triple-roles needs three ids X1,X2,X3");
    config.triple_roles = {r[0], r[1], r[2]};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contexcert: contextuality and randomness certification of measurement data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cc::kToolVersion));
  std::string format = "json";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();

  // generate ---------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Synthesize a dataset (CSV plus scenario sidecar)");
  gen->require_subcommand(1);
  gen->fallthrough();
  std::optional<std::uint64_t> seed;
  std::size_t n = 10000;
  std::string out, scenario_out;
  std::string angles_text;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "PRNG seed (falls back to CONTEXCERT_SEED)");
    sub->add_option("--n", n, "Records per setting")->capture_default_str();
    sub->add_option("--out", out, "Output CSV")->required();
    sub->add_option("--scenario-out", scenario_out, "Scenario JSON (default: <out>.scenario.json)");
    sub->fallthrough();
  };
  auto* gen_singlet = gen->add_subcommand("singlet", "Singlet state, CHSH settings A1,A2 x B1,B2");
  add_common(gen_singlet);
  gen_singlet->add_option("--angles", angles_text, "a1,a2,b1,b2 (radians; 'pi/4' style allowed)")
      ->required();

  auto* gen_lhv = gen->add_subcommand("lhv", "Local hidden-variable model");
  add_common(gen_lhv);
  std::string model = "sphere";
  std::string observables_text = "A1,A2,B1,B2";
  std::string settings_text = "A1+B1,A1+B2,A2+B1,A2+B2";
  gen_lhv->add_option("--model", model)->check(CLI::IsMember({"sphere", "constant", "coin"}))->capture_default_str();
  gen_lhv->add_option("--observables", observables_text)->capture_default_str();
  gen_lhv->add_option("--settings", settings_text, "Comma-separated '+'-joined settings")->capture_default_str();
  gen_lhv->add_option("--angles", angles_text, "Sphere model: x-z plane axis angle per observable (default random)");

  auto* gen_state = gen->add_subcommand("state-file", "Born-rule sampling from a state and observables in JSON");
  add_common(gen_state);
  std::string state_path, observables_path;
  gen_state->add_option("--state", state_path, "{dim, matrix}")->required()->check(CLI::ExistingFile);
  gen_state->add_option("--observables", observables_path, "JSON array of observables")
      ->required()
      ->check(CLI::ExistingFile);
  gen_state->add_option("--settings", settings_text, "Comma-separated '+'-joined settings")->required();

  // test -------------------------------------------------------------------
  auto* test = app.add_subcommand("test", "Run one inequality test");
  test->fallthrough();
  std::string test_name, data, scenario, policy_text = "k-sigma:3", roles, triple_roles;
  double delta = 0.01;
  test->add_option("name", test_name)->required()->check(CLI::IsMember({"chsh", "sz", "bell-original"}));
  test->add_option("--data", data, "Records CSV")->required()->check(CLI::ExistingFile);
  test->add_option("--scenario", scenario, "Scenario JSON (default: inferred from the CSV)")
      ->check(CLI::ExistingFile);
  test->add_option("--tolerance-policy", policy_text, "k-sigma:K or fixed:EPS")->capture_default_str();
  test->add_option("--roles", roles, "A1,A2,B1,B2 observable ids");
  test->add_option("--triple-roles", triple_roles, "X1,X2,X3 observable ids");
  test->add_option("--delta", delta, "Precise-correlation slack for bell-original")->capture_default_str();

  // oracle -----------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "JPD feasibility of a marginal constraint system");
  oracle->fallthrough();
  std::string constraints_path;
  oracle->add_option("--constraints", constraints_path)->required()->check(CLI::ExistingFile);

  // randomness -------------------------------------------------------------
  auto* rnd = app.add_subcommand("randomness", "Place-selection battery on one sequence");
  rnd->fallthrough();
  std::string stream_path, selections_text, setting_text, observable;
  std::string rnd_policy_text = "k-sigma:4";
  std::size_t min_retained = cc::kMinRetainedFloor;
  std::size_t profile_points = 10;
  auto* stream_opt = rnd->add_option("--stream", stream_path, "One symbol per line")->check(CLI::ExistingFile);
  auto* rnd_data_opt = rnd->add_option("--data", data, "Records CSV (with --setting/--observable)")
                           ->check(CLI::ExistingFile);
  stream_opt->excludes(rnd_data_opt);
  rnd->add_option("--scenario", scenario)->check(CLI::ExistingFile);
  rnd->add_option("--setting", setting_text, "e.g. A1+B1");
  rnd->add_option("--observable", observable);
  rnd->add_option("--selections", selections_text, "prime,after:01,mod:2:0,coin[:SEED[:BIAS]] (default battery)");
  rnd->add_option("--tolerance-policy", rnd_policy_text)->capture_default_str();
  rnd->add_option("--min-retained", min_retained)->capture_default_str();
  rnd->add_option("--profile-points", profile_points)->capture_default_str();
  rnd->add_option("--seed", seed, "Seed for coin selections (falls back to CONTEXCERT_SEED, then 0)");

  // full-suite -------------------------------------------------------------
  auto* suite = app.add_subcommand("full-suite", "Signaling, inequality tests, oracle and randomness");
  suite->fallthrough();
  std::string report_out;
  suite->add_option("--data", data)->required()->check(CLI::ExistingFile);
  suite->add_option("--scenario", scenario)->check(CLI::ExistingFile);
  suite->add_option("--out", report_out, "Report path (default: stdout)");
  suite->add_option("--tolerance-policy", policy_text)->capture_default_str();
  suite->add_option("--randomness-policy", rnd_policy_text)->capture_default_str();
  suite->add_option("--selections", selections_text);
  suite->add_option("--min-retained", min_retained)->capture_default_str();
  suite->add_option("--profile-points", profile_points)->capture_default_str();
  suite->add_option("--delta", delta)->capture_default_str();
  suite->add_option("--roles", roles);
  suite->add_option("--triple-roles", triple_roles);
  suite->add_option("--seed", seed, "Seed for coin selections (falls back to CONTEXCERT_SEED, then 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const auto s = require_seed(seed);
      if (gen_singlet->parsed()) {
        const auto a = parse_angles(angles_text);
        if (a.size() != 4) throw UsageError("--angles needs four values a1,a2,b1,b2");
        const auto ds = cc::sample_singlet_chsh({a[0], a[1], a[2], a[3]}, n, s);
        emit(write_generated(ds, out, scenario_out), format, "");
      } else if (gen_lhv->parsed()) {
        const auto ids = split(observables_text, ',');
        cc::LhvModel m;
        if (model == "sphere") {
          if (angles_text.empty()) {
            cc::Rng axis_rng(cc::derive_subseed(s, std::uint64_t{1} << 32));
            m = cc::random_sphere_lhv_model(ids, axis_rng);
          } else {
            const auto a = parse_angles(angles_text);
            if (a.size() != ids.size()) throw UsageError("--angles needs one angle per observable");
            std::map<std::string, std::array<double, 3>> axes;
            // Bloch axis of cos(t) Z + sin(t) X
            for (std::size_t i = 0; i < ids.size(); ++i) axes[ids[i]] = {std::sin(a[i]), 0.0, std::cos(a[i])};
            m = cc::sphere_lhv_model(axes);
          }
        } else if (model == "constant") {
          m = cc::constant_lhv_model(ids);
        } else {
          m = cc::shared_coin_lhv_model(ids);
        }
        std::vector<cc::LhvSetting> settings;
        for (auto& st : parse_settings(settings_text)) settings.push_back({std::move(st), n});
        const auto ds = cc::sample_lhv_dataset(m, settings, s);
        emit(write_generated(ds, out, scenario_out), format, "");
      } else {
        const auto state = cc::state_from_json(cc::read_json_file(state_path));
        auto obs_json = cc::read_json_file(observables_path);
        if (obs_json.is_object() && obs_json.contains("observables")) obs_json = obs_json["observables"];
        if (!obs_json.is_array()) throw cc::Error(cc::ErrorCode::ParseError, "observables file must hold an array");
        std::map<std::string, cc::ProjectiveObservable> by_id;
        for (const auto& o : obs_json) {
          auto obs = cc::observable_from_json(o, state.dim());
          const auto id = obs.id();
          by_id.emplace(id, std::move(obs));
        }
        std::vector<cc::QuantumSetting> settings;
        for (const auto& st : parse_settings(settings_text)) {
          cc::QuantumSetting qs;
          qs.count = n;
          for (const auto& id : st) {
            const auto it = by_id.find(id);
            if (it == by_id.end()) throw UsageError("setting uses undeclared observable '" + id + "'");
            qs.observables.push_back(it->second);
          }
          settings.push_back(std::move(qs));
        }
        const auto ds = cc::sample_quantum_dataset(state, settings, s);
        emit(write_generated(ds, out, scenario_out), format, "");
      }
      return 0;
    }

    if (test->parsed()) {
      cc::SuiteConfig config;
      config.policy = cc::parse_tolerance_policy(policy_text);
      config.bell_delta = delta;
      apply_roles(config, roles, triple_roles);
      const auto ds = load_dataset(data, scenario);
      const auto entry = cc::run_inequality_test(ds, test_name, config);
      if (entry.verdict) {
        emit(cc::to_json(*entry.verdict), format, "");
        return 0;
      }
      cc::ordered_json j{{"test", test_name},
                         {"status", "skipped"},
                         {"reason", entry.skipped->reason},
                         {"message", entry.skipped->message}};
      if (!entry.skipped->missing.empty()) j["missing"] = entry.skipped->missing;
      emit(j, format, "");
      return kExitUnsupported;
    }

    if (oracle->parsed()) {
      const auto system = cc::constraint_system_from_json(cc::read_json_file(constraints_path));
      auto j = cc::ordered_json{{"variables", system.variables}, {"cell_tolerance", system.cell_tolerance}};
      const auto result = cc::to_json(cc::jpd_feasible(system));
      for (const auto& [k, v] : result.items()) j[k] = v;
      emit(j, format, "");
      return 0;
    }

    if (rnd->parsed()) {
      const auto coin_seed = resolve_seed(seed).value_or(0);
      std::optional<cc::LabelSequence> seq;
      cc::ordered_json source;
      if (!stream_path.empty()) {
        seq = cc::read_sequence(stream_path);
        source = {{"stream", fs::path(stream_path).filename().string()}};
      } else if (!data.empty()) {
        if (setting_text.empty() || observable.empty()) {
          throw UsageError("--data needs --setting and --observable");
        }
        const auto ds = load_dataset(data, scenario);
        const auto want = ds.scenario().canonicalize(split(setting_text, '+'));
        std::vector<cc::Outcome> outcomes;
        std::optional<std::size_t> pos;
        for (std::size_t r = 0; r < ds.records().size(); ++r) {
          if (ds.settings()[ds.setting_index(r)] != want) continue;
          if (!pos) {
            const auto it = std::find(want.begin(), want.end(), observable);
            if (it == want.end()) throw UsageError("observable not in the setting");
            pos = static_cast<std::size_t>(it - want.begin());
          }
          outcomes.push_back(ds.canonical_outcomes(r)[*pos]);
        }
        if (outcomes.empty()) throw cc::Error(cc::ErrorCode::UnknownSetting, "no records for " + setting_text);
        seq = cc::LabelSequence::from_outcomes(outcomes, ds.scenario().observable(observable).alphabet);
        source = {{"data", fs::path(data).filename().string()}, {"setting", want}, {"observable", observable}};
      } else {
        throw UsageError("pass --stream or --data");
      }
      std::vector<cc::PlaceSelection> selections;
      if (selections_text.empty()) {
        selections = cc::default_battery(*seq, coin_seed);
      } else {
        for (const auto& spec : split_selections(selections_text)) {
          selections.push_back(cc::parse_selection(spec, coin_seed));
        }
      }
      const auto policy = cc::parse_tolerance_policy(rnd_policy_text);
      const auto report = cc::randomness_test(*seq, selections, policy, min_retained);
      std::vector<std::size_t> cps;
      for (std::size_t i = 1; i <= std::max<std::size_t>(profile_points, 1); ++i) {
        const auto cp = seq->size() * i / std::max<std::size_t>(profile_points, 1);
        if (cp > 0 && (cps.empty() || cp > cps.back())) cps.push_back(cp);
      }
      const auto& label = seq->labels().front();
      cc::ordered_json freqs = cc::ordered_json::array();
      for (const auto& [cp, f] : cc::stabilization_profile(*seq, label, cps)) freqs.push_back(f);
      cc::ordered_json j{{"source", source}, {"seed", coin_seed}};
      const auto body = cc::to_json(report);
      for (const auto& [k, v] : body.items()) j[k] = v;
      j["profile"] = {{"label", label}, {"checkpoints", cps}, {"frequencies", freqs}};
      emit(j, format, "");
      return 0;
    }

    if (suite->parsed()) {
      cc::SuiteConfig config;
      config.policy = cc::parse_tolerance_policy(policy_text);
      config.randomness_policy = cc::parse_tolerance_policy(rnd_policy_text);
      config.bell_delta = delta;
      config.seed = resolve_seed(seed).value_or(0);
      if (!selections_text.empty()) config.selections = split_selections(selections_text);
      config.min_retained = min_retained;
      config.profile_points = profile_points;
      apply_roles(config, roles, triple_roles);
      const auto ds = load_dataset(data, scenario);
      const auto report = cc::run_full_suite(ds, config);
      emit(cc::to_json(report, config), format, report_out);
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "contexcert: " << e.what() << "\n";
    return kExitUsage;
  } catch (const cc::Error& e) {
    std::cerr << "contexcert: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "contexcert: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
