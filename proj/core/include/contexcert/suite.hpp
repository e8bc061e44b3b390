#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "contexcert/io.hpp"

namespace contexcert {

struct SuiteConfig {
  // Signaling, inequality tests and the oracle's cell allowance.
  TolerancePolicy policy = StatisticalTolerance{3.0};
  TolerancePolicy randomness_policy = StatisticalTolerance{4.0};
  double bell_delta = 0.01;
  // Seeds the external-coin selections (one sub-seed per stream).
  std::uint64_t seed = 0;
  // Selection strings as accepted by parse_selection; empty means the default
  // battery.
  std::vector<std::string> selections;
  std::size_t min_retained = kMinRetainedFloor;
  ChshRoles chsh_roles;
  TripleRoles triple_roles;
  std::size_t profile_points = 10;
};

// A test that could not run: the error code name plus what was missing.
struct SkipEntry {
  std::string reason;
  std::string message;
  std::vector<std::vector<std::string>> missing;
};

struct TestEntry {
  std::string test;
  std::optional<TestVerdict> verdict;
  std::optional<SkipEntry> skipped;
};

struct OracleEntry {
  std::string name;  // "chsh" or "sz": which variable set was checked
  std::vector<std::string> variables;
  double cell_tolerance = 0.0;
  std::optional<FeasibilityResult> result;
  std::optional<SkipEntry> skipped;
  // Feasible exactly when the matching inequality test rejected.
  std::optional<bool> agrees_with_test;
};

struct StreamEntry {
  std::vector<std::string> setting;
  std::string observable;
  std::optional<RandomnessReport> report;
  std::optional<SkipEntry> skipped;
  std::string profile_label;
  std::vector<std::pair<std::size_t, double>> profile;
};

struct CertReport {
  Meta provenance;
  std::size_t record_count = 0;
  std::vector<std::pair<std::vector<std::string>, std::size_t>> settings;
  std::optional<SignalingReport> signaling;
  std::optional<SkipEntry> signaling_skipped;
  std::vector<TestEntry> tests;
  std::vector<OracleEntry> oracle;
  std::vector<StreamEntry> randomness;
};

// Inequality verdicts are internally consistent when the outcome is
// "passed" exactly when the margin exceeds the tolerance.
bool verdict_consistent(const TestVerdict& v);

// "chsh", "sz" or "bell-original" on the dataset's pair settings, with the
// configured roles and tolerance policy. Missing settings and unmet
// preconditions come back as a skip entry.
TestEntry run_inequality_test(const Dataset& dataset, const std::string& test,
                              const SuiteConfig& config);

// Signaling check, inequality tests, oracle cross-check and per-stream
// randomness battery. Tests lacking data are recorded as skips; the suite
// itself only throws on invalid configuration.
CertReport run_full_suite(const Dataset& dataset, const SuiteConfig& config);

// Deterministic JSON: embeds tool version, PRNG name, seed and every
// tolerance so the run can be repeated from the report alone.
ordered_json to_json(const CertReport& report, const SuiteConfig& config);
ordered_json to_json(const SuiteConfig& config);

inline constexpr const char* kToolVersion = CONTEXCERT_VERSION;

}  // namespace contexcert
