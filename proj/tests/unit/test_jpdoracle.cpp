#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "contexcert/jpdoracle.hpp"
#include "contexcert/quantumgen.hpp"
#include "contexcert/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace contexcert;

namespace {

constexpr double kPi = std::numbers::pi;

void expect_witness_sound(const MarginalConstraintSystem& system, const FeasibilityResult& r) {
  ASSERT_EQ(r.status, FeasibilityStatus::feasible);
  ASSERT_TRUE(r.witness);
  const auto& w = *r.witness;
  EXPECT_EQ(w.support(), system.variables);
  for (double p : w.probs()) EXPECT_GE(p, -1e-12);
  for (const auto& c : system.constraints) {
    std::vector<std::size_t> keep;
    for (const auto& id : c.support()) {
      keep.push_back(static_cast<std::size_t>(
          std::find(system.variables.begin(), system.variables.end(), id) - system.variables.begin()));
    }
    const auto m = oracle::brute_marginal(w.probs(), system.variables.size(), keep);
    for (std::size_t i = 0; i < m.size(); ++i) {
      EXPECT_NEAR(m[i], c.probs()[i], 1e-9 + system.cell_tolerance);
    }
  }
}

void expect_certificate_sound(const MarginalConstraintSystem& system, const FeasibilityResult& r) {
  ASSERT_EQ(r.status, FeasibilityStatus::infeasible);
  ASSERT_TRUE(r.certificate);
  const auto& cert = *r.certificate;
  // Recompute the functional on every deterministic atom and on the data.
  const std::size_t n = system.variables.size();
  double bound = -1e300;
  for (std::size_t atom = 0; atom < (std::size_t{1} << n); ++atom) {
    double f = 0.0;
    for (const auto& t : cert.terms) {
      const auto& c = system.constraints[t.constraint];
      bool match = true;
      for (std::size_t i = 0; i < c.support().size(); ++i) {
        const auto k = static_cast<std::size_t>(
            std::find(system.variables.begin(), system.variables.end(), c.support()[i]) - system.variables.begin());
        match = match && oracle::atom_value(atom, k, n) == t.cell[i];
      }
      if (match) f += t.coefficient;
    }
    bound = std::max(bound, f);
  }
  double value = 0.0, l1 = 0.0;
  for (const auto& t : cert.terms) {
    value += t.coefficient * system.constraints[t.constraint].prob(t.cell);
    l1 += std::abs(t.coefficient);
  }
  value -= system.cell_tolerance * l1;
  EXPECT_NEAR(bound, cert.bound, 1e-9);
  EXPECT_NEAR(value, cert.value, 1e-9);
  EXPECT_GE(value - bound, 1e-9);
  EXPECT_NEAR(r.slack, value - bound, 1e-9);
}

}  // namespace

TEST(JpdFeasible, SingleConstraintIsItsOwnWitness) {
  const auto t = ProbTable::dichotomous({"A", "B"}, {0.1, 0.2, 0.3, 0.4});
  const MarginalConstraintSystem system{{"A", "B"}, {t}, 0.0};
  const auto r = jpd_feasible(system);
  expect_witness_sound(system, r);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.witness->probs()[i], t.probs()[i], 1e-12);
}

TEST(JpdFeasible, PerfectAnticorrelationTriangleIsInfeasible) {
  // Exhaustion over the 8 atoms: each atom has at least one equal pair.
  for (std::size_t atom = 0; atom < 8; ++atom) {
    const int a = oracle::atom_value(atom, 0, 3), b = oracle::atom_value(atom, 1, 3), c = oracle::atom_value(atom, 2, 3);
    EXPECT_TRUE(a == b || b == c || a == c);
  }
  const MarginalConstraintSystem system{{"A", "B", "C"},
                                        {zero_mean_pair_table("A", "B", -1), zero_mean_pair_table("B", "C", -1),
                                         zero_mean_pair_table("A", "C", -1)},
                                        0.0};
  const auto r = jpd_feasible(system);
  expect_certificate_sound(system, r);
  const auto [bound, value] = evaluate_certificate(system, *r.certificate);
  EXPECT_NEAR(bound, r.certificate->bound, 1e-12);
  EXPECT_NEAR(value, r.certificate->value, 1e-12);
}

TEST(JpdFeasible, TsirelsonSingletIsInfeasible) {
  const double a[2] = {0, kPi / 2}, b[2] = {kPi / 4, 3 * kPi / 4};
  std::vector<ProbTable> tables;
  const char* an[2] = {"A1", "A2"};
  const char* bn[2] = {"B1", "B2"};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const auto p = oracle::singlet_pair(a[i], b[j]);
      tables.push_back(ProbTable::dichotomous({an[i], bn[j]}, {p[0], p[1], p[2], p[3]}));
    }
  }
  const MarginalConstraintSystem system{{"A1", "A2", "B1", "B2"}, tables, 0.0};
  expect_certificate_sound(system, jpd_feasible(system));
}

TEST(JpdFeasible, RandomJpdMarginalsAreFeasible) {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(16);
    double total = 0.0;
    for (auto& v : p) total += (v = rng.uniform01());
    for (auto& v : p) v /= total;
    const auto jpd = ProbTable::dichotomous({"A", "B", "C", "D"}, p);
    const MarginalConstraintSystem system{
        {"A", "B", "C", "D"},
        {marginalize(jpd, {"A", "B"}), marginalize(jpd, {"B", "C"}), marginalize(jpd, {"C", "D"}),
         marginalize(jpd, {"A", "D"}), marginalize(jpd, {"A", "C"})},
        0.0};
    expect_witness_sound(system, jpd_feasible(system));
  }
}

TEST(JpdFeasible, Errors) {
  std::vector<std::string> many;
  for (int i = 0; i < 13; ++i) many.push_back("V" + std::to_string(i));
  expect_code(ErrorCode::TooManyVariables, [&] { jpd_feasible({many, {}, 0.0}); });
  // A's marginal 0.5 vs 0.8: signaling, rejected up front
  const MarginalConstraintSystem bad{{"A", "B", "C"},
                                     {ProbTable::dichotomous({"A", "B"}, {0.25, 0.25, 0.25, 0.25}),
                                      ProbTable::dichotomous({"A", "C"}, {0.4, 0.4, 0.1, 0.1})},
                                     0.0};
  expect_code(ErrorCode::InconsistentConstraints, [&] { jpd_feasible(bad); });
  const MarginalConstraintSystem unknown{{"A"}, {ProbTable::dichotomous({"Z"}, {0.5, 0.5})}, 0.0};
  expect_code(ErrorCode::InvalidArgument, [&] { jpd_feasible(unknown); });
}

TEST(JpdFeasible, CellToleranceAbsorbsSmallNoise) {
  // Tables a hair off a feasible point stay feasible within the tolerance and
  // the witness lands inside the box.
  const MarginalConstraintSystem system{{"A", "B", "C"},
                                        {ProbTable::dichotomous({"A", "B"}, {0.251, 0.249, 0.25, 0.25}),
                                         ProbTable::dichotomous({"B", "C"}, {0.25, 0.25, 0.249, 0.251})},
                                        0.002};
  expect_witness_sound(system, jpd_feasible(system));
}

TEST(TripleFeasible, Examples) {
  auto r = triple_jpd_feasible(TripleInput::from_values(0, 0, 0));
  ASSERT_EQ(r.status, FeasibilityStatus::feasible);
  // Any witness must have uniform pair marginals; the third moment is free.
  for (const auto& keep : {std::vector<std::size_t>{0, 1}, {1, 2}, {0, 2}}) {
    for (double p : oracle::brute_marginal(r.witness->probs(), 3, keep)) EXPECT_NEAR(p, 0.25, 1e-9);
  }

  r = triple_jpd_feasible(TripleInput::from_values(-1, -1, -1));
  EXPECT_EQ(r.status, FeasibilityStatus::infeasible);

  r = triple_jpd_feasible(TripleInput::from_values(1, 1, 1));
  ASSERT_EQ(r.status, FeasibilityStatus::feasible);
  EXPECT_NEAR(r.witness->prob({1, 1, 1}), 0.5, 1e-9);
  EXPECT_NEAR(r.witness->prob({-1, -1, -1}), 0.5, 1e-9);
}

TEST(FineEquivalence, Examples) {
  EXPECT_TRUE(fine_equivalence_check(ChshInput::from_values(1, 1, 1, -1)));
  EXPECT_EQ(chsh_jpd_feasible(ChshInput::from_values(1, 1, 1, -1)).status, FeasibilityStatus::infeasible);
  EXPECT_TRUE(fine_equivalence_check(ChshInput::from_values(0, 0, 0, 0)));
  EXPECT_EQ(chsh_jpd_feasible(ChshInput::from_values(0, 0, 0, 0)).status, FeasibilityStatus::feasible);
}

TEST(FineEquivalence, RandomQuadruples) {
  Rng rng(2718);
  for (int i = 0; i < 10000; ++i) {
    const auto in = ChshInput::from_values(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    ASSERT_TRUE(fine_equivalence_check(in)) << i;
  }
}

TEST(ExactOracle, ChshGridPoints) {
  const std::array<Rational, 4> pr{1, 1, 1, -1};
  EXPECT_EQ(chsh_jpd_feasible_exact(pr).status, FeasibilityStatus::infeasible);
  const std::array<Rational, 4> boundary{1, 1, 0, 0};  // CHSH exactly 2
  const auto r = chsh_jpd_feasible_exact(boundary);
  EXPECT_EQ(r.status, FeasibilityStatus::feasible);
  EXPECT_EQ(r.residual, 0);
  Rational total = 0;
  for (const auto& w : r.witness) {
    EXPECT_GE(w, 0);
    total += w;
  }
  EXPECT_EQ(total, 1);
  const std::array<Rational, 4> just_over{Rational(1), Rational(1), Rational(1, 10), Rational(1, 5)};
  EXPECT_FALSE(oracle::chsh_within_two_exact(just_over));
  EXPECT_EQ(chsh_jpd_feasible_exact(just_over).status, FeasibilityStatus::infeasible);
}

TEST(ExactOracle, RejectsSignalingConstraints) {
  const std::vector<ExactConstraint> cs{{{"A", "B"}, {Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)}},
                                        {{"A", "C"}, {Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 8)}}};
  expect_code(ErrorCode::InconsistentConstraints, [&] { jpd_feasible_exact({"A", "B", "C"}, cs); });
}

TEST(StatisticalCellTolerance, UsesSmallestSample) {
  const std::vector<ProbTable> tables{ProbTable::dichotomous({"A"}, {0.5, 0.5}, 400),
                                      ProbTable::dichotomous({"B"}, {0.5, 0.5}, 100)};
  EXPECT_NEAR(statistical_cell_tolerance(tables, 3.0), 3.0 * 0.5 / 10.0, 1e-15);
  const std::vector<ProbTable> theory{ProbTable::dichotomous({"A"}, {0.5, 0.5})};
  expect_code(ErrorCode::InvalidArgument, [&] { statistical_cell_tolerance(theory, 3.0); });
}
