#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contexcert/belltests.hpp"
#include "contexcert/scenario.hpp"
#include "contexcert/simplex.hpp"

namespace contexcert {

inline constexpr std::size_t kMaxOracleVariables = 12;
inline constexpr double kFeasibilityTolerance = 1e-9;

// Does a JPD over `variables` (all ±1-valued) exist whose marginals match
// every constraint table? With cell_tolerance > 0 each constraint cell may
// be missed by up to that amount.
struct MarginalConstraintSystem {
  std::vector<std::string> variables;
  std::vector<ProbTable> constraints;
  double cell_tolerance = 0.0;
};

enum class FeasibilityStatus { feasible, infeasible };
std::string_view to_string(FeasibilityStatus s);

struct CertificateTerm {
  std::size_t constraint = 0;
  OutcomeTuple cell;
  double coefficient = 0.0;
};

// Linear functional f over the constraint cells separating the given
// marginals from the marginal polytope: every JPD maps to f <= bound while
// the constraint point (worst case over the tolerance box) has f = value.
struct InfeasibilityCertificate {
  std::vector<CertificateTerm> terms;
  double bound = 0.0;
  double value = 0.0;
};

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::infeasible;
  std::optional<ProbTable> witness;
  std::optional<InfeasibilityCertificate> certificate;
  // Feasible: phase-one residual. Infeasible: certificate value - bound.
  double slack = 0.0;
};

FeasibilityResult jpd_feasible(const MarginalConstraintSystem& system);

// Per-cell allowance k * 0.5 / sqrt(N_min) for empirical tables (0.5 bounds
// the binomial standard deviation of any cell). Throws InvalidArgument when
// a table carries no sample size.
double statistical_cell_tolerance(std::span<const ProbTable> tables, double k);

// Evaluates a certificate against the system from scratch; used to audit
// solver output. Returns (bound, value).
std::pair<double, double> evaluate_certificate(const MarginalConstraintSystem& system,
                                               const InfeasibilityCertificate& certificate);

// Unique zero-mean ±1 pair table with correlation c: p(a,b) = (1 + a b c)/4.
ProbTable zero_mean_pair_table(const std::string& a, const std::string& b, double c);

FeasibilityResult triple_jpd_feasible(const TripleInput& input);
FeasibilityResult chsh_jpd_feasible(const ChshInput& input);

// True iff LP feasibility and chsh_max <= 2 agree (both within 1e-9).
bool fine_equivalence_check(const ChshInput& input);

// --- exact rational mode -------------------------------------------------

struct ExactConstraint {
  std::vector<std::string> support;
  // Cells in ProbTable order for the ±1 alphabet (+1 first, last fastest).
  std::vector<Rational> probs;
};

struct ExactFeasibility {
  FeasibilityStatus status = FeasibilityStatus::infeasible;
  std::vector<Rational> witness;  // atoms over the variables when feasible
  Rational residual;
};

ExactFeasibility jpd_feasible_exact(const std::vector<std::string>& variables,
                                    const std::vector<ExactConstraint>& constraints);

ExactConstraint zero_mean_pair_exact(const std::string& a, const std::string& b,
                                     const Rational& c);

// Quadrupole feasibility for exact zero-mean CHSH correlations in the order
// <A1B1>, <A1B2>, <A2B1>, <A2B2>.
ExactFeasibility chsh_jpd_feasible_exact(const std::array<Rational, 4>& correlations);

}  // namespace contexcert
