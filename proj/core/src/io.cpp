#include "contexcert/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "contexcert/error.hpp"

namespace contexcert {

namespace {

std::string trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_int(const std::string& text, int& value) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last && first != last;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

template <class T>
T require(const nlohmann::json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": field '" + key + "': " + e.what());
  }
}

std::complex<double> complex_entry(const nlohmann::json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw Error(ErrorCode::ParseError, "matrix entry must be a number or [re, im]");
}

ordered_json certificate_json(const InfeasibilityCertificate& cert) {
  ordered_json terms = ordered_json::array();
  for (const auto& t : cert.terms) {
    terms.push_back({{"constraint", t.constraint}, {"cell", t.cell}, {"coefficient", t.coefficient}});
  }
  return {{"terms", terms}, {"bound", cert.bound}, {"value", cert.value}};
}

void render(const ordered_json& j, int indent, std::ostringstream& os);

bool is_flat(const ordered_json& j) {
  return j.is_array() && std::all_of(j.begin(), j.end(), [](const ordered_json& e) {
           return e.is_primitive() || (e.is_array() && std::all_of(e.begin(), e.end(),
                                                                   [](const ordered_json& x) {
                                                                     return x.is_primitive();
                                                                   }));
         });
}

std::string scalar_text(const ordered_json& j) {
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

void render(const ordered_json& j, int indent, std::ostringstream& os) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_primitive()) {
        os << pad << key << ": " << scalar_text(value) << '\n';
      } else if (is_flat(value)) {
        os << pad << key << ": " << value.dump() << '\n';
      } else if (value.empty()) {
        os << pad << key << ": " << value.dump() << '\n';
      } else {
        os << pad << key << ":\n";
        render(value, indent + 2, os);
      }
    }
  } else if (j.is_array()) {
    for (const auto& value : j) {
      if (value.is_object()) {
        os << pad << "-\n";
        render(value, indent + 2, os);
      } else if (value.is_primitive() || is_flat(value)) {
        os << pad << "- " << (value.is_primitive() ? scalar_text(value) : value.dump()) << '\n';
      } else {
        os << pad << "-\n";
        render(value, indent + 2, os);
      }
    }
  } else {
    os << pad << scalar_text(j) << '\n';
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

Scenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "scenario must be a JSON object");
  std::vector<Observable> observables;
  for (const auto& o : require<nlohmann::json>(j, "observables", "scenario")) {
    Observable obs;
    obs.id = require<std::string>(o, "id", "observable");
    if (o.contains("alphabet")) obs.alphabet = require<std::vector<Outcome>>(o, "alphabet", "observable");
    observables.push_back(std::move(obs));
  }
  std::vector<std::vector<std::string>> compatible;
  if (j.contains("compatible")) {
    compatible = require<std::vector<std::vector<std::string>>>(j, "compatible", "scenario");
  }
  return Scenario(std::move(observables), std::move(compatible));
}

ordered_json to_json(const Scenario& scenario) {
  ordered_json obs = ordered_json::array();
  for (const auto& o : scenario.observables()) obs.push_back({{"id", o.id}, {"alphabet", o.alphabet}});
  return {{"observables", obs}, {"compatible", scenario.compatible_sets()}};
}

Dataset parse_csv(std::istream& in, const Scenario& scenario, Meta meta) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<OutcomeRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (!header_seen) {
      std::string compact;
      std::copy_if(text.begin(), text.end(), std::back_inserter(compact),
                   [](char c) { return c != ' ' && c != '\t'; });
      if (compact != "setting;outcomes") parse_error(line_no, "expected header 'setting;outcomes'");
      header_seen = true;
      continue;
    }
    const auto fields = split(text, ';');
    if (fields.size() != 2) parse_error(line_no, "expected exactly one ';' separator");
    OutcomeRecord rec;
    for (const auto& id : split(fields[0], '+')) {
      auto t = trim(id);
      if (t.empty()) parse_error(line_no, "empty observable id in setting");
      rec.setting.push_back(std::move(t));
    }
    for (const auto& v : split(fields[1], ',')) {
      int value = 0;
      if (!parse_int(trim(v), value)) parse_error(line_no, "outcome '" + trim(v) + "' is not an integer");
      rec.outcomes.push_back(value);
    }

    const auto where = "record " + std::to_string(records.size()) + " (line " +
                       std::to_string(line_no) + "): ";
    if (rec.setting.size() != rec.outcomes.size()) {
      throw Error(ErrorCode::ValidationError, where + "setting has " +
                                                  std::to_string(rec.setting.size()) + " ids but " +
                                                  std::to_string(rec.outcomes.size()) + " outcomes");
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < rec.setting.size(); ++i) {
      const auto& id = rec.setting[i];
      if (!scenario.find(id)) throw Error(ErrorCode::ValidationError, where + "unknown observable '" + id + "'");
      if (!seen.insert(id).second) {
        throw Error(ErrorCode::ValidationError, where + "observable '" + id + "' repeated");
      }
      const auto& alphabet = scenario.observable(id).alphabet;
      if (std::find(alphabet.begin(), alphabet.end(), rec.outcomes[i]) == alphabet.end()) {
        throw Error(ErrorCode::ValidationError, where + "outcome " + std::to_string(rec.outcomes[i]) +
                                                    " not in the alphabet of '" + id + "'");
      }
    }
    if (!scenario.is_compatible(rec.setting)) {
      throw Error(ErrorCode::ValidationError,
                  where + "setting " + join(rec.setting, "+") + " is not a compatible set");
    }
    records.push_back(std::move(rec));
  }
  if (!header_seen) parse_error(line_no == 0 ? 1 : line_no, "missing header 'setting;outcomes'");
  return Dataset(scenario, std::move(records), std::move(meta));
}

Dataset ingest(const std::filesystem::path& csv_path, const std::filesystem::path& scenario_path) {
  const auto scenario = scenario_from_json(read_json_file(scenario_path));
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + csv_path.string() + "'");
  return parse_csv(in, scenario, Meta{{"source", csv_path.filename().string()}});
}

Scenario infer_scenario(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> sets;
  std::set<std::set<std::string>> seen_sets;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto semi = text.find(';');
    if (semi == std::string::npos) parse_error(line_no, "expected exactly one ';' separator");
    std::vector<std::string> setting;
    for (const auto& id : split(std::string_view(text).substr(0, semi), '+')) {
      auto t = trim(id);
      if (t.empty()) parse_error(line_no, "empty observable id in setting");
      if (std::find(ids.begin(), ids.end(), t) == ids.end()) ids.push_back(t);
      setting.push_back(std::move(t));
    }
    if (seen_sets.insert(std::set<std::string>(setting.begin(), setting.end())).second) {
      sets.push_back(std::move(setting));
    }
  }
  if (!header_seen) parse_error(1, "missing header 'setting;outcomes'");
  try {
    return Scenario::dichotomous(ids, std::move(sets));
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, e.what());
  }
}

Dataset ingest(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + csv_path.string() + "'");
  const auto scenario = infer_scenario(in);
  in.clear();
  in.seekg(0);
  return parse_csv(in, scenario, Meta{{"source", csv_path.filename().string()}});
}

void write_csv(std::ostream& out, const Dataset& dataset) {
  out << "setting;outcomes\n";
  for (const auto& rec : dataset.records()) {
    out << join(rec.setting, "+") << ';';
    for (std::size_t i = 0; i < rec.outcomes.size(); ++i) {
      if (i) out << ',';
      out << rec.outcomes[i];
    }
    out << '\n';
  }
}

std::string to_csv(const Dataset& dataset) {
  std::ostringstream os;
  write_csv(os, dataset);
  return os.str();
}

LabelSequence parse_sequence(std::istream& in) {
  std::vector<std::string> symbols;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty()) symbols.push_back(std::move(t));
  }
  if (symbols.empty()) throw Error(ErrorCode::ParseError, "sequence file holds no symbols");
  return LabelSequence::from_symbols(symbols);
}

LabelSequence read_sequence(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return parse_sequence(in);
}

TolerancePolicy parse_tolerance_policy(const std::string& text) {
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto name = text.substr(0, colon);
    const auto arg = text.substr(colon + 1);
    double v = 0.0;
    std::size_t used = 0;
    try {
      v = std::stod(arg, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == arg.size() && used > 0 && std::isfinite(v) && v >= 0.0) {
      if (name == "k-sigma") return StatisticalTolerance{v};
      if (name == "fixed") return FixedTolerance{v};
    }
  }
  throw Error(ErrorCode::ParseError, "tolerance policy must be 'k-sigma:K' or 'fixed:EPS', got '" + text + "'");
}

ordered_json to_json(const TolerancePolicy& policy) {
  if (const auto* f = std::get_if<FixedTolerance>(&policy)) {
    return {{"kind", "fixed"}, {"epsilon", f->epsilon}};
  }
  return {{"kind", "k-sigma"}, {"k", std::get<StatisticalTolerance>(policy).k}};
}

MarginalConstraintSystem constraint_system_from_json(const nlohmann::json& j) {
  MarginalConstraintSystem system;
  system.variables = require<std::vector<std::string>>(j, "variables", "constraint system");
  if (j.contains("cell_tolerance")) system.cell_tolerance = require<double>(j, "cell_tolerance", "constraint system");
  const auto constraints = require<nlohmann::json>(j, "constraints", "constraint system");
  if (!constraints.is_array()) throw Error(ErrorCode::ParseError, "'constraints' must be an array");
  for (const auto& c : constraints) {
    auto support = require<std::vector<std::string>>(c, "support", "constraint");
    if (c.contains("correlation")) {
      if (support.size() != 2) {
        throw Error(ErrorCode::ParseError, "a correlation constraint needs a two-element support");
      }
      system.constraints.push_back(
          zero_mean_pair_table(support[0], support[1], require<double>(c, "correlation", "constraint")));
    } else {
      std::optional<std::size_t> n;
      if (c.contains("sample_size")) n = require<std::size_t>(c, "sample_size", "constraint");
      system.constraints.push_back(
          ProbTable::dichotomous(std::move(support), require<std::vector<double>>(c, "probs", "constraint"), n));
    }
  }
  return system;
}

ComplexMatrix matrix_from_json(const nlohmann::json& j, int dim) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "matrix must be an array");
  ComplexMatrix m(dim, dim);
  const auto n = static_cast<std::size_t>(dim);
  // n*n entries means flat; n rows means nested. Only n = 1 is ambiguous,
  // settled by whether the single element is itself an entry.
  const bool nested = n == 1 ? (j.size() == 1 && j[0].is_array() && j[0].size() == 1)
                             : j.size() == n;
  if (nested && !std::all_of(j.begin(), j.end(), [&](const nlohmann::json& row) {
        return row.is_array() && row.size() == n;
      })) {
    throw Error(ErrorCode::ParseError, "matrix rows must each have " + std::to_string(n) + " entries");
  }
  if (nested) {
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) m(static_cast<int>(r), static_cast<int>(c)) = complex_entry(j[r][c]);
    }
    return m;
  }
  if (j.size() != n * n) {
    throw Error(ErrorCode::ParseError, "matrix needs " + std::to_string(n * n) + " entries");
  }
  for (std::size_t k = 0; k < n * n; ++k) {
    m(static_cast<int>(k / n), static_cast<int>(k % n)) = complex_entry(j[k]);
  }
  return m;
}

DensityState state_from_json(const nlohmann::json& j) {
  const int dim = require<int>(j, "dim", "state");
  if (dim < 1 || dim > kMaxHilbertDimension) {
    throw Error(ErrorCode::InvalidState, "dimension must be in 1.." + std::to_string(kMaxHilbertDimension));
  }
  return DensityState(matrix_from_json(require<nlohmann::json>(j, "matrix", "state"), dim));
}

ProjectiveObservable observable_from_json(const nlohmann::json& j, int dim) {
  auto id = require<std::string>(j, "id", "observable");
  if (j.contains("angle")) {
    int n_qubits = 0;
    while ((1 << n_qubits) < dim) ++n_qubits;
    if ((1 << n_qubits) != dim || n_qubits == 0) {
      throw Error(ErrorCode::InvalidObservable, "angle shorthand needs a qubit register");
    }
    const int qubit = j.contains("qubit") ? require<int>(j, "qubit", "observable") : 0;
    if (qubit < 0 || qubit >= n_qubits) throw Error(ErrorCode::InvalidObservable, "qubit out of range");
    return ProjectiveObservable::planar_spin(std::move(id), require<double>(j, "angle", "observable"), qubit,
                                             n_qubits);
  }
  const auto projectors = require<nlohmann::json>(j, "projectors", "observable");
  if (!projectors.is_object()) throw Error(ErrorCode::ParseError, "'projectors' must be an object");
  std::map<Outcome, ComplexMatrix> map;
  for (const auto& [key, value] : projectors.items()) {
    int outcome = 0;
    if (!parse_int(key, outcome)) throw Error(ErrorCode::ParseError, "projector key '" + key + "' is not an integer");
    map.emplace(outcome, matrix_from_json(value, dim));
  }
  return ProjectiveObservable(std::move(id), std::move(map));
}

// ---------------------------------------------------------------------------

ordered_json to_json(const ProbTable& table) {
  ordered_json cells = ordered_json::array();
  for (std::size_t i = 0; i < table.cell_count(); ++i) cells.push_back(table.cell(i));
  ordered_json j{{"support", table.support()}, {"cells", cells}, {"probs", table.probs()}};
  if (table.sample_size()) j["sample_size"] = *table.sample_size();
  return j;
}

ordered_json to_json(const SignalingReport& report) {
  ordered_json per = ordered_json::object();
  for (const auto& [id, s] : report.per_observable) {
    per[id] = {{"deviation", s.deviation}, {"total_variation", s.total_variation}, {"contexts", s.contexts}};
  }
  ordered_json comps = ordered_json::array();
  for (const auto& c : report.comparisons) {
    comps.push_back({{"observable", c.observable},
                     {"context_a", c.context_a},
                     {"context_b", c.context_b},
                     {"deviation", c.deviation},
                     {"total_variation", c.total_variation},
                     {"tolerance", c.tolerance},
                     {"within_tolerance", c.within_tolerance}});
  }
  return {{"observables", per},
          {"comparisons", comps},
          {"verdict", std::string(to_string(report.verdict))},
          {"policy", to_json(report.policy)},
          {"tolerance", report.tolerance_used}};
}

ordered_json to_json(const TestVerdict& v) {
  return {{"test", v.test_name},       {"statistic", v.statistic},
          {"bound", v.bound},          {"outcome", std::string(to_string(v.outcome))},
          {"margin", v.margin},        {"tolerance", v.tolerance},
          {"details", v.details}};
}

ordered_json to_json(const FeasibilityResult& r) {
  ordered_json j{{"status", std::string(to_string(r.status))}, {"slack", r.slack}};
  j["witness"] = r.witness ? to_json(*r.witness) : ordered_json(nullptr);
  j["certificate"] = r.certificate ? certificate_json(*r.certificate) : ordered_json(nullptr);
  return j;
}

ordered_json to_json(const RandomnessReport& r) {
  ordered_json sels = ordered_json::array();
  for (const auto& s : r.per_selection) {
    sels.push_back({{"selection", s.description},
                    {"retained", s.retained},
                    {"frequencies", s.frequencies},
                    {"max_deviation", s.max_deviation},
                    {"tolerance", s.tolerance},
                    {"status", std::string(to_string(s.status))}});
  }
  return {{"length", r.length},
          {"overall_frequencies", r.overall_freq},
          {"selections", sels},
          {"verdict", std::string(to_string(r.verdict))},
          {"policy", to_json(r.policy)},
          {"tolerance", r.tolerance_used},
          {"min_retained", r.min_retained},
          {"notes", r.notes}};
}

ordered_json to_json(const Meta& meta) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : meta) j[k] = v;
  return j;
}

std::string render_text(const ordered_json& j) {
  std::ostringstream os;
  render(j, 0, os);
  return os.str();
}

}  // namespace contexcert
