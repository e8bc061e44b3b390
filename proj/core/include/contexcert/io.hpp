#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "contexcert/belltests.hpp"
#include "contexcert/jpdoracle.hpp"
#include "contexcert/quantumgen.hpp"
#include "contexcert/randomtests.hpp"
#include "contexcert/scenario.hpp"
#include "contexcert/signaling.hpp"

namespace contexcert {

using ordered_json = nlohmann::ordered_json;

// --- file helpers ----------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);  // IoError
void write_text_file(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json_file(const std::filesystem::path& path);  // IoError, ParseError

// --- scenario and records --------------------------------------------------

Scenario scenario_from_json(const nlohmann::json& j);
ordered_json to_json(const Scenario& scenario);

// "setting;outcomes" header, then rows like "A1+B2;1,-1". Blank lines and
// trailing CR are ignored. Syntax problems raise ParseError naming the line;
// rows that parse but do not fit the scenario raise ValidationError naming
// the record index and the line.
Dataset parse_csv(std::istream& in, const Scenario& scenario, Meta meta = {});
Dataset ingest(const std::filesystem::path& csv_path, const std::filesystem::path& scenario_path);

// Scenario implied by a CSV alone: ±1 observables in order of first
// appearance, one compatible set per distinct setting.
Scenario infer_scenario(std::istream& in);
Dataset ingest(const std::filesystem::path& csv_path);

void write_csv(std::ostream& out, const Dataset& dataset);
std::string to_csv(const Dataset& dataset);

// One symbol per line; surrounding whitespace trimmed, blank lines skipped.
LabelSequence parse_sequence(std::istream& in);
LabelSequence read_sequence(const std::filesystem::path& path);

// --- tolerance policies ----------------------------------------------------

// "k-sigma:K" or "fixed:EPS".
TolerancePolicy parse_tolerance_policy(const std::string& text);
ordered_json to_json(const TolerancePolicy& policy);

// --- oracle input ----------------------------------------------------------

// {variables:[..], constraints:[{support:[..], probs:[..]} |
//  {support:[a,b], correlation:c}], cell_tolerance?: x}
// probs are in cell order (+1 first, last coordinate fastest); the
// correlation form is the zero-mean pair table.
MarginalConstraintSystem constraint_system_from_json(const nlohmann::json& j);

// --- quantum inputs --------------------------------------------------------

// Matrix given either as nested rows [[[re,im],..],..] or as a flat
// row-major list [[re,im],..]; plain numbers count as real entries.
ComplexMatrix matrix_from_json(const nlohmann::json& j, int dim);
// {dim, matrix}
DensityState state_from_json(const nlohmann::json& j);
// {id, projectors:{"+1":M,"-1":M}} or {id, angle, qubit?}. The angle form
// needs the register size, taken from `dim` (a power of two).
ProjectiveObservable observable_from_json(const nlohmann::json& j, int dim);

// --- reports ---------------------------------------------------------------

ordered_json to_json(const ProbTable& table);
ordered_json to_json(const SignalingReport& report);
ordered_json to_json(const TestVerdict& verdict);
ordered_json to_json(const FeasibilityResult& result);
ordered_json to_json(const RandomnessReport& report);
ordered_json to_json(const Meta& meta);

// Indented key/value rendering of a JSON document for terminals.
std::string render_text(const ordered_json& j);

}  // namespace contexcert
