#include "contexcert/jpdoracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "contexcert/error.hpp"

namespace contexcert {

namespace {

Outcome atom_value(std::size_t atom, std::size_t var, std::size_t n_vars) {
  return ((atom >> (n_vars - 1 - var)) & 1U) ? -1 : +1;
}

std::vector<std::size_t> support_positions(const std::vector<std::string>& variables,
                                           const std::vector<std::string>& support) {
  std::vector<std::size_t> pos;
  for (const auto& id : support) {
    auto it = std::find(variables.begin(), variables.end(), id);
    if (it == variables.end()) {
      throw Error(ErrorCode::InvalidArgument, "constraint variable '" + id + "' is not declared");
    }
    pos.push_back(static_cast<std::size_t>(it - variables.begin()));
  }
  std::set<std::size_t> unique(pos.begin(), pos.end());
  if (unique.size() != pos.size()) throw Error(ErrorCode::InvalidArgument, "repeated constraint variable");
  return pos;
}

void check_variables(const std::vector<std::string>& variables) {
  if (variables.empty()) throw Error(ErrorCode::InvalidArgument, "no variables");
  if (variables.size() > kMaxOracleVariables) {
    throw Error(ErrorCode::TooManyVariables,
                std::to_string(variables.size()) + " variables exceed the cap of " +
                    std::to_string(kMaxOracleVariables));
  }
  std::set<std::string> unique(variables.begin(), variables.end());
  if (unique.size() != variables.size()) throw Error(ErrorCode::InvalidArgument, "repeated variable");
}

// Row index (within the constraint's own cells) hit by each atom, using the
// ±1 cell order of ProbTable::dichotomous.
std::vector<std::size_t> atom_to_cell(std::size_t n_vars, const std::vector<std::size_t>& pos) {
  const std::size_t atoms = std::size_t{1} << n_vars;
  std::vector<std::size_t> out(atoms);
  for (std::size_t j = 0; j < atoms; ++j) {
    std::size_t cell = 0;
    for (std::size_t p : pos) cell = cell * 2 + ((j >> (n_vars - 1 - p)) & 1U);
    out[j] = cell;
  }
  return out;
}

// Permutation taking a table's own cell index to the ±1 canonical index
// (handles tables whose alphabet is declared as {-1, +1}).
std::vector<double> canonical_cells(const ProbTable& table) {
  std::vector<double> out(table.cell_count());
  for (std::size_t i = 0; i < table.cell_count(); ++i) {
    const auto tuple = table.cell(i);
    std::size_t idx = 0;
    for (Outcome v : tuple) idx = idx * 2 + (v == +1 ? 0 : 1);
    out[idx] = table.probs()[i];
  }
  return out;
}

void check_consistency(const MarginalConstraintSystem& system) {
  const auto& cs = system.constraints;
  for (std::size_t a = 0; a < cs.size(); ++a) {
    for (std::size_t b = a + 1; b < cs.size(); ++b) {
      std::vector<std::string> shared;
      for (const auto& v : system.variables) {
        if (cs[a].position(v) && cs[b].position(v)) shared.push_back(v);
      }
      if (shared.empty()) continue;
      const auto ma = marginalize(cs[a], shared);
      const auto mb = marginalize(cs[b], shared);
      const double cells_shared = static_cast<double>(ma.cell_count());
      // each marginal cell sums cells/cells_shared constraint cells
      const double budget =
          kFeasibilityTolerance +
          system.cell_tolerance * (static_cast<double>(cs[a].cell_count()) / cells_shared +
                                   static_cast<double>(cs[b].cell_count()) / cells_shared);
      for (std::size_t i = 0; i < ma.cell_count(); ++i) {
        const double gap = std::abs(ma.probs()[i] - mb.prob(ma.cell(i)));
        if (gap > budget) {
          throw Error(ErrorCode::InconsistentConstraints,
                      "constraints " + std::to_string(a) + " and " + std::to_string(b) +
                          " disagree on a shared marginal by " + std::to_string(gap));
        }
      }
    }
  }
}

}  // namespace

std::string_view to_string(FeasibilityStatus s) {
  return s == FeasibilityStatus::feasible ? "feasible" : "infeasible";
}

FeasibilityResult jpd_feasible(const MarginalConstraintSystem& system) {
  check_variables(system.variables);
  if (!(system.cell_tolerance >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cell tolerance must be >= 0");
  }
  const std::size_t n_vars = system.variables.size();
  const std::size_t atoms = std::size_t{1} << n_vars;

  std::vector<std::vector<std::size_t>> maps;
  std::vector<std::vector<double>> cells;
  std::size_t total_cells = 0;
  for (const auto& c : system.constraints) {
    if (!c.is_dichotomous()) {
      throw Error(ErrorCode::NonDichotomous, "oracle constraints must be ±1-valued");
    }
    maps.push_back(atom_to_cell(n_vars, support_positions(system.variables, c.support())));
    cells.push_back(canonical_cells(c));
    total_cells += c.cell_count();
  }
  check_consistency(system);

  const double eps = system.cell_tolerance;
  const bool tolerant = eps > 0.0;
  // Rows: one per constraint cell, then normalization, then (tolerant)
  // one box row per cell.  Columns: atoms, then (tolerant) s and t per cell
  // for  A x - s = b - eps,  s + t = 2 eps.
  const std::size_t rows = total_cells + 1 + (tolerant ? total_cells : 0);
  const std::size_t cols = atoms + (tolerant ? 2 * total_cells : 0);
  DenseMatrix<double> a(rows, cols);
  std::vector<double> b(rows, 0.0);
  std::size_t row = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t k = 0; k < cells[c].size(); ++k) {
      b[row + k] = cells[c][k] - eps;
    }
    for (std::size_t j = 0; j < atoms; ++j) a(row + maps[c][j], j) = 1.0;
    row += cells[c].size();
  }
  for (std::size_t j = 0; j < atoms; ++j) a(total_cells, j) = 1.0;
  b[total_cells] = 1.0;
  if (tolerant) {
    for (std::size_t r = 0; r < total_cells; ++r) {
      a(r, atoms + r) = -1.0;
      a(total_cells + 1 + r, atoms + r) = 1.0;
      a(total_cells + 1 + r, atoms + total_cells + r) = 1.0;
      b[total_cells + 1 + r] = 2.0 * eps;
    }
  }

  const auto lp = solve_phase_one(a, b, 1e-12);

  FeasibilityResult result;
  if (lp.residual <= kFeasibilityTolerance) {
    result.status = FeasibilityStatus::feasible;
    result.slack = lp.residual;
    std::vector<double> x(lp.x.begin(), lp.x.begin() + static_cast<std::ptrdiff_t>(atoms));
    double total = 0.0;
    for (double& v : x) {
      v = std::max(v, 0.0);
      total += v;
    }
    for (double& v : x) v /= total;
    result.witness = ProbTable::dichotomous(system.variables, std::move(x));
    return result;
  }

  result.status = FeasibilityStatus::infeasible;
  double scale = 0.0;
  for (std::size_t r = 0; r < total_cells; ++r) scale = std::max(scale, std::abs(lp.y[r]));
  if (scale == 0.0) scale = 1.0;
  InfeasibilityCertificate cert;
  row = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& table = system.constraints[c];
    for (std::size_t k = 0; k < cells[c].size(); ++k) {
      const std::size_t width = table.support().size();
      OutcomeTuple tuple(width);
      for (std::size_t i = 0; i < width; ++i) tuple[i] = ((k >> (width - 1 - i)) & 1U) ? -1 : +1;
      cert.terms.push_back(CertificateTerm{c, std::move(tuple), lp.y[row + k] / scale});
    }
    row += cells[c].size();
  }
  const auto [bound, value] = evaluate_certificate(system, cert);
  cert.bound = bound;
  cert.value = value;
  result.slack = value - bound;
  result.certificate = std::move(cert);
  return result;
}

double statistical_cell_tolerance(std::span<const ProbTable> tables, double k) {
  if (!(k >= 0.0)) throw Error(ErrorCode::InvalidArgument, "k must be >= 0");
  std::size_t n_min = 0;
  for (const auto& t : tables) {
    if (!t.sample_size() || *t.sample_size() == 0) {
      throw Error(ErrorCode::InvalidArgument, "statistical tolerance needs empirical tables");
    }
    n_min = n_min == 0 ? *t.sample_size() : std::min(n_min, *t.sample_size());
  }
  if (n_min == 0) return 0.0;
  return k * 0.5 / std::sqrt(static_cast<double>(n_min));
}

std::pair<double, double> evaluate_certificate(const MarginalConstraintSystem& system,
                                               const InfeasibilityCertificate& certificate) {
  const std::size_t n_vars = system.variables.size();
  const std::size_t atoms = std::size_t{1} << n_vars;
  std::vector<double> per_atom(atoms, 0.0);
  double value = 0.0;
  double l1 = 0.0;
  for (const auto& term : certificate.terms) {
    const auto& table = system.constraints.at(term.constraint);
    const auto pos = support_positions(system.variables, table.support());
    for (std::size_t j = 0; j < atoms; ++j) {
      bool match = true;
      for (std::size_t k = 0; k < pos.size() && match; ++k) {
        match = atom_value(j, pos[k], n_vars) == term.cell[k];
      }
      if (match) per_atom[j] += term.coefficient;
    }
    value += term.coefficient * table.prob(term.cell);
    l1 += std::abs(term.coefficient);
  }
  value -= system.cell_tolerance * l1;
  const double bound = *std::max_element(per_atom.begin(), per_atom.end());
  return {bound, value};
}

ProbTable zero_mean_pair_table(const std::string& a, const std::string& b, double c) {
  if (!(std::abs(c) <= 1.0)) throw Error(ErrorCode::InvalidArgument, "correlation outside [-1, 1]");
  const double same = (1.0 + c) / 4.0;
  const double diff = (1.0 - c) / 4.0;
  return ProbTable::dichotomous({a, b}, {same, diff, diff, same});
}

FeasibilityResult triple_jpd_feasible(const TripleInput& input) {
  for (const auto& id : {input.roles.x1, input.roles.x2, input.roles.x3}) {
    const auto m = input.correlations.mean(id);
    if (m && std::abs(*m) > input.zero_mean_tolerance) {
      throw Error(ErrorCode::ZeroMeanViolated, "mean of '" + id + "' is not zero");
    }
  }
  MarginalConstraintSystem sys;
  sys.variables = {input.roles.x1, input.roles.x2, input.roles.x3};
  const auto t = input.terms();
  const auto p = input.pairs();
  for (std::size_t i = 0; i < 3; ++i) {
    sys.constraints.push_back(zero_mean_pair_table(p[i].first, p[i].second, t[i]));
  }
  return jpd_feasible(sys);
}

FeasibilityResult chsh_jpd_feasible(const ChshInput& input) {
  MarginalConstraintSystem sys;
  sys.variables = {input.roles.a1, input.roles.a2, input.roles.b1, input.roles.b2};
  const auto t = input.terms();
  const auto p = input.pairs();
  for (std::size_t i = 0; i < 4; ++i) {
    sys.constraints.push_back(zero_mean_pair_table(p[i].first, p[i].second, t[i]));
  }
  return jpd_feasible(sys);
}

bool fine_equivalence_check(const ChshInput& input) {
  const bool feasible = chsh_jpd_feasible(input).status == FeasibilityStatus::feasible;
  const bool violates = chsh_max(input) > 2.0 + kFeasibilityTolerance;
  return feasible != violates;
}

// ---------------------------------------------------------------------------

ExactFeasibility jpd_feasible_exact(const std::vector<std::string>& variables,
                                    const std::vector<ExactConstraint>& constraints) {
  check_variables(variables);
  const std::size_t n_vars = variables.size();
  const std::size_t atoms = std::size_t{1} << n_vars;

  std::vector<std::vector<std::size_t>> maps;
  std::size_t total_cells = 0;
  for (const auto& c : constraints) {
    const auto pos = support_positions(variables, c.support);
    if (c.probs.size() != (std::size_t{1} << pos.size())) {
      throw Error(ErrorCode::InvalidTable, "exact constraint has the wrong number of cells");
    }
    Rational sum(0);
    for (const auto& p : c.probs) {
      if (p < 0) throw Error(ErrorCode::InvalidTable, "negative exact probability");
      sum += p;
    }
    if (sum != 1) throw Error(ErrorCode::InvalidTable, "exact constraint is not normalized");
    maps.push_back(atom_to_cell(n_vars, pos));
    total_cells += c.probs.size();
  }

  // Exact no-signaling pre-check on every shared variable subset.
  for (std::size_t x = 0; x < constraints.size(); ++x) {
    for (std::size_t y = x + 1; y < constraints.size(); ++y) {
      std::vector<std::size_t> shared;
      for (std::size_t v = 0; v < n_vars; ++v) {
        const auto& sx = constraints[x].support;
        const auto& sy = constraints[y].support;
        if (std::find(sx.begin(), sx.end(), variables[v]) != sx.end() &&
            std::find(sy.begin(), sy.end(), variables[v]) != sy.end()) {
          shared.push_back(v);
        }
      }
      if (shared.empty()) continue;
      // Marginals through the atom maps: accumulate each cell once via its
      // lowest atom representative.
      const auto shared_map = atom_to_cell(n_vars, shared);
      std::vector<Rational> mx(std::size_t{1} << shared.size()), my(mx.size());
      std::vector<bool> seen_x(constraints[x].probs.size()), seen_y(constraints[y].probs.size());
      for (std::size_t j = 0; j < atoms; ++j) {
        if (!seen_x[maps[x][j]]) {
          seen_x[maps[x][j]] = true;
          mx[shared_map[j]] += constraints[x].probs[maps[x][j]];
        }
        if (!seen_y[maps[y][j]]) {
          seen_y[maps[y][j]] = true;
          my[shared_map[j]] += constraints[y].probs[maps[y][j]];
        }
      }
      if (mx != my) {
        throw Error(ErrorCode::InconsistentConstraints,
                    "exact constraints " + std::to_string(x) + " and " + std::to_string(y) +
                        " disagree on a shared marginal");
      }
    }
  }

  DenseMatrix<Rational> a(total_cells + 1, atoms);
  std::vector<Rational> b(total_cells + 1);
  std::size_t row = 0;
  for (std::size_t c = 0; c < constraints.size(); ++c) {
    for (std::size_t k = 0; k < constraints[c].probs.size(); ++k) b[row + k] = constraints[c].probs[k];
    for (std::size_t j = 0; j < atoms; ++j) a(row + maps[c][j], j) = 1;
    row += constraints[c].probs.size();
  }
  for (std::size_t j = 0; j < atoms; ++j) a(total_cells, j) = 1;
  b[total_cells] = 1;

  const auto lp = solve_phase_one(a, b, Rational(0));
  ExactFeasibility out;
  out.residual = lp.residual;
  if (lp.residual == 0) {
    out.status = FeasibilityStatus::feasible;
    out.witness = lp.x;
  }
  return out;
}

ExactConstraint zero_mean_pair_exact(const std::string& a, const std::string& b,
                                     const Rational& c) {
  if (c > 1 || c < -1) throw Error(ErrorCode::InvalidArgument, "correlation outside [-1, 1]");
  const Rational same = (1 + c) / 4;
  const Rational diff = (1 - c) / 4;
  return ExactConstraint{{a, b}, {same, diff, diff, same}};
}

ExactFeasibility chsh_jpd_feasible_exact(const std::array<Rational, 4>& correlations) {
  const ChshRoles r;
  return jpd_feasible_exact({r.a1, r.a2, r.b1, r.b2},
                            {zero_mean_pair_exact(r.a1, r.b1, correlations[0]),
                             zero_mean_pair_exact(r.a1, r.b2, correlations[1]),
                             zero_mean_pair_exact(r.a2, r.b1, correlations[2]),
                             zero_mean_pair_exact(r.a2, r.b2, correlations[3])});
}

}  // namespace contexcert
