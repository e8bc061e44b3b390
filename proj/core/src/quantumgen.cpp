#include "contexcert/quantumgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "contexcert/error.hpp"

namespace contexcert {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kTraceTolerance = 1e-12;
constexpr double kEigenTolerance = 1e-10;
constexpr double kProjectorTolerance = 1e-10;

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix embed_qubit_operator(const ComplexMatrix& op, int qubit, int n_qubits) {
  if (n_qubits < 1 || qubit < 0 || qubit >= n_qubits || (1 << n_qubits) > kMaxHilbertDimension) {
    throw Error(ErrorCode::InvalidObservable, "qubit index or register size out of range");
  }
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < n_qubits; ++q) {
    out = kron(out, q == qubit ? op : ComplexMatrix::Identity(2, 2));
  }
  return out;
}

std::map<Outcome, ComplexMatrix> spin_projectors(const std::array<double, 3>& n, int qubit,
                                                 int n_qubits) {
  using C = std::complex<double>;
  ComplexMatrix sigma(2, 2);
  // n.x X + n.y Y + n.z Z
  sigma << C(n[2], 0), C(n[0], -n[1]), C(n[0], n[1]), C(-n[2], 0);
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  return {{+1, embed_qubit_operator(0.5 * (id + sigma), qubit, n_qubits)},
          {-1, embed_qubit_operator(0.5 * (id - sigma), qubit, n_qubits)}};
}

double gaussian(Rng& rng) {
  // Box-Muller, written out so the stream is implementation independent.
  double u1 = rng.uniform01();
  while (u1 <= 0.0) u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::array<double, 3> uniform_on_sphere(Rng& rng) {
  const double z = 2.0 * rng.uniform01() - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng.uniform01();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string join(const std::vector<std::string>& ids, char sep) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += sep;
    out += id;
  }
  return out;
}

std::vector<Outcome> outcome_order(const ProjectiveObservable& obs) {
  std::vector<Outcome> out;
  for (const auto& [v, _] : obs.projectors()) out.push_back(v);
  std::sort(out.rbegin(), out.rend());  // +1 before -1
  return out;
}

// Scenario holding every observable named in `settings`, with each setting
// declared as a compatible set.
Scenario scenario_for(const std::vector<std::vector<std::string>>& settings,
                      const std::map<std::string, std::vector<Outcome>>& alphabets) {
  std::vector<Observable> observables;
  std::set<std::string> seen;
  std::vector<std::vector<std::string>> compatible;
  for (const auto& s : settings) {
    for (const auto& id : s) {
      if (seen.insert(id).second) observables.push_back(Observable{id, alphabets.at(id)});
    }
    if (std::find(compatible.begin(), compatible.end(), s) == compatible.end() && s.size() > 1) {
      compatible.push_back(s);
    }
  }
  return Scenario(std::move(observables), std::move(compatible));
}

}  // namespace

// ---------------------------------------------------------------------------

DensityState::DensityState(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1 ||
      matrix_.rows() > kMaxHilbertDimension) {
    throw Error(ErrorCode::InvalidState, "state must be square with dimension 1..16");
  }
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance) {
    throw Error(ErrorCode::InvalidState, "state is not Hermitian");
  }
  if (std::abs(matrix_.trace() - std::complex<double>(1.0, 0.0)) > kTraceTolerance) {
    throw Error(ErrorCode::InvalidState, "state trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(matrix_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kEigenTolerance) {
    throw Error(ErrorCode::InvalidState, "state is not positive semidefinite");
  }
}

DensityState DensityState::singlet() {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);   // |01>
  psi(2) = -1.0 / std::sqrt(2.0);  // |10>
  return pure(psi);
}

DensityState DensityState::maximally_mixed(int dim) {
  if (dim < 1 || dim > kMaxHilbertDimension) throw Error(ErrorCode::InvalidState, "bad dimension");
  return DensityState(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityState DensityState::pure(const Eigen::VectorXcd& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidState, "zero state vector");
  const Eigen::VectorXcd v = psi / norm;
  ComplexMatrix rho = v * v.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityState(rho);
}

DensityState DensityState::random(Rng& rng, int dim) {
  if (dim < 1 || dim > kMaxHilbertDimension) throw Error(ErrorCode::InvalidState, "bad dimension");
  ComplexMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double re = gaussian(rng);
      const double im = gaussian(rng);
      g(i, j) = {re, im};
    }
  }
  ComplexMatrix rho = g * g.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return DensityState(rho);
}

// ---------------------------------------------------------------------------

ProjectiveObservable::ProjectiveObservable(std::string id,
                                           std::map<Outcome, ComplexMatrix> projectors)
    : id_(std::move(id)), projectors_(std::move(projectors)) {
  if (id_.empty()) throw Error(ErrorCode::InvalidObservable, "observable needs an id");
  if (projectors_.empty()) throw Error(ErrorCode::InvalidObservable, "no projectors");
  const auto dim = projectors_.begin()->second.rows();
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (auto it = projectors_.begin(); it != projectors_.end(); ++it) {
    const auto& p = it->second;
    if (p.rows() != dim || p.cols() != dim) {
      throw Error(ErrorCode::InvalidObservable, "projector dimensions differ");
    }
    if ((p * p - p).cwiseAbs().maxCoeff() > kProjectorTolerance ||
        (p - p.adjoint()).cwiseAbs().maxCoeff() > kProjectorTolerance) {
      throw Error(ErrorCode::InvalidObservable, "'" + id_ + "' has a non-projector for outcome " +
                                                    std::to_string(it->first));
    }
    for (auto jt = std::next(it); jt != projectors_.end(); ++jt) {
      if ((p * jt->second).cwiseAbs().maxCoeff() > kProjectorTolerance) {
        throw Error(ErrorCode::InvalidObservable, "'" + id_ + "' projectors are not orthogonal");
      }
    }
    sum += p;
  }
  if ((sum - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > kProjectorTolerance) {
    throw Error(ErrorCode::InvalidObservable, "'" + id_ + "' projectors do not sum to identity");
  }
}

ProjectiveObservable ProjectiveObservable::planar_spin(std::string id, double angle, int qubit,
                                                       int n_qubits) {
  return ProjectiveObservable(std::move(id),
                              spin_projectors({std::sin(angle), 0.0, std::cos(angle)}, qubit, n_qubits));
}

ProjectiveObservable ProjectiveObservable::bloch_spin(std::string id,
                                                      const std::array<double, 3>& axis, int qubit,
                                                      int n_qubits) {
  const double norm = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidObservable, "zero Bloch vector");
  return ProjectiveObservable(
      std::move(id), spin_projectors({axis[0] / norm, axis[1] / norm, axis[2] / norm}, qubit, n_qubits));
}

int ProjectiveObservable::dim() const {
  return static_cast<int>(projectors_.begin()->second.rows());
}

// ---------------------------------------------------------------------------

ProbTable born_table(const DensityState& state, std::span<const ProjectiveObservable> observables) {
  if (observables.empty()) throw Error(ErrorCode::InvalidArgument, "no observables");
  for (const auto& obs : observables) {
    if (obs.dim() != state.dim()) {
      throw Error(ErrorCode::InvalidObservable, "'" + obs.id() + "' acts on the wrong dimension");
    }
  }
  for (std::size_t i = 0; i < observables.size(); ++i) {
    for (std::size_t j = i + 1; j < observables.size(); ++j) {
      for (const auto& [_, p] : observables[i].projectors()) {
        for (const auto& [__, q] : observables[j].projectors()) {
          if ((p * q - q * p).cwiseAbs().maxCoeff() > kProjectorTolerance) {
            throw Error(ErrorCode::NonCommuting, "'" + observables[i].id() + "' and '" +
                                                     observables[j].id() +
                                                     "' are not jointly measurable");
          }
        }
      }
    }
  }

  std::vector<std::string> support;
  std::vector<std::vector<Outcome>> alphabets;
  for (const auto& obs : observables) {
    support.push_back(obs.id());
    alphabets.push_back(outcome_order(obs));
  }
  std::size_t cells = 1;
  for (const auto& a : alphabets) cells *= a.size();

  std::vector<double> probs(cells);
  double total = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t rest = c;
    std::vector<Outcome> tuple(observables.size());
    for (std::size_t k = observables.size(); k-- > 0;) {
      tuple[k] = alphabets[k][rest % alphabets[k].size()];
      rest /= alphabets[k].size();
    }
    ComplexMatrix prod = state.matrix();
    for (std::size_t k = 0; k < observables.size(); ++k) {
      prod = prod * observables[k].projectors().at(tuple[k]);
    }
    const double p = prod.trace().real();
    if (p < -kProjectorTolerance) throw Error(ErrorCode::InvalidState, "negative Born probability");
    probs[c] = std::max(p, 0.0);
    total += probs[c];
  }
  if (std::abs(total - 1.0) > kProjectorTolerance) {
    throw Error(ErrorCode::InvalidState, "Born probabilities do not sum to 1");
  }
  for (double& p : probs) p /= total;
  return ProbTable(std::move(support), std::move(alphabets), std::move(probs));
}

double singlet_correlation(double angle_a, double angle_b) { return -std::cos(angle_a - angle_b); }

Dataset sample_quantum_dataset(const DensityState& state, std::span<const QuantumSetting> settings,
                               std::uint64_t seed) {
  std::vector<std::vector<std::string>> ids;
  std::map<std::string, std::vector<Outcome>> alphabets;
  for (const auto& s : settings) {
    std::vector<std::string> setting_ids;
    for (const auto& o : s.observables) {
      setting_ids.push_back(o.id());
      alphabets.emplace(o.id(), outcome_order(o));
    }
    ids.push_back(std::move(setting_ids));
  }
  Scenario scenario = scenario_for(ids, alphabets);

  std::vector<OutcomeRecord> records;
  Meta meta{{"generator", "quantum"},
            {"prng", std::string(Rng::kRngName)},
            {"seed", std::to_string(seed)},
            {"state_dim", std::to_string(state.dim())}};
  {
    std::string rho;
    for (int i = 0; i < state.dim(); ++i) {
      for (int j = 0; j < state.dim(); ++j) {
        if (!rho.empty()) rho += ';';
        rho += format_double(state.matrix()(i, j).real()) + "," +
               format_double(state.matrix()(i, j).imag());
      }
    }
    meta["state"] = rho;
  }
  std::string described;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    if (!described.empty()) described += ';';
    described += join(ids[i], '+') + ":" + std::to_string(settings[i].count);
    if (settings[i].count == 0) continue;
    const auto table = born_table(state, settings[i].observables);
    Rng rng(derive_subseed(seed, i));
    for (std::size_t r = 0; r < settings[i].count; ++r) {
      const auto cell = rng.categorical(table.probs());
      records.push_back(OutcomeRecord{ids[i], table.cell(cell)});
    }
  }
  meta["settings"] = described;
  return Dataset(std::move(scenario), std::move(records), std::move(meta));
}

// ---------------------------------------------------------------------------

LhvModel sphere_lhv_model(const std::map<std::string, std::array<double, 3>>& axes) {
  LhvModel model;
  model.name = "sphere";
  for (const auto& [id, axis] : axes) {
    model.observables.push_back(id);
    model.parameters["axis." + id] =
        format_double(axis[0]) + "," + format_double(axis[1]) + "," + format_double(axis[2]);
  }
  model.sample_lambda = [](Rng& rng) {
    const auto v = uniform_on_sphere(rng);
    return std::vector<double>{v[0], v[1], v[2]};
  };
  model.response = [axes](const std::string& id, std::span<const double> lambda) -> Outcome {
    const auto& n = axes.at(id);
    const double dot = n[0] * lambda[0] + n[1] * lambda[1] + n[2] * lambda[2];
    return dot >= 0.0 ? +1 : -1;
  };
  return model;
}

LhvModel random_sphere_lhv_model(const std::vector<std::string>& observables, Rng& rng) {
  std::map<std::string, std::array<double, 3>> axes;
  for (const auto& id : observables) axes[id] = uniform_on_sphere(rng);
  return sphere_lhv_model(axes);
}

LhvModel constant_lhv_model(const std::vector<std::string>& observables, Outcome value) {
  LhvModel model;
  model.name = "constant";
  model.observables = observables;
  model.parameters["value"] = std::to_string(value);
  model.sample_lambda = [](Rng&) { return std::vector<double>{}; };
  model.response = [value](const std::string&, std::span<const double>) { return value; };
  return model;
}

LhvModel shared_coin_lhv_model(const std::vector<std::string>& observables) {
  LhvModel model;
  model.name = "shared_coin";
  model.observables = observables;
  model.sample_lambda = [](Rng& rng) {
    return std::vector<double>{rng.uniform01() < 0.5 ? 1.0 : -1.0};
  };
  model.response = [](const std::string&, std::span<const double> lambda) -> Outcome {
    return lambda[0] > 0.0 ? +1 : -1;
  };
  return model;
}

Dataset sample_lhv_dataset(const LhvModel& model, std::span<const LhvSetting> settings,
                           std::uint64_t seed) {
  std::vector<std::vector<std::string>> ids;
  std::map<std::string, std::vector<Outcome>> alphabets;
  for (const auto& s : settings) {
    for (const auto& id : s.observables) {
      if (std::find(model.observables.begin(), model.observables.end(), id) ==
          model.observables.end()) {
        throw Error(ErrorCode::ObservableNotFound, "model has no response for '" + id + "'");
      }
      alphabets.emplace(id, kDichotomousAlphabet);
    }
    ids.push_back(s.observables);
  }
  Scenario scenario = scenario_for(ids, alphabets);

  Meta meta{{"generator", "lhv"},
            {"model", model.name},
            {"prng", std::string(Rng::kRngName)},
            {"seed", std::to_string(seed)}};
  for (const auto& [k, v] : model.parameters) meta["model." + k] = v;

  std::vector<OutcomeRecord> records;
  std::string described;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    if (!described.empty()) described += ';';
    described += join(ids[i], '+') + ":" + std::to_string(settings[i].count);
    Rng rng(derive_subseed(seed, i));
    for (std::size_t r = 0; r < settings[i].count; ++r) {
      const auto lambda = model.sample_lambda(rng);
      OutcomeRecord rec{ids[i], {}};
      rec.outcomes.reserve(ids[i].size());
      for (const auto& id : ids[i]) rec.outcomes.push_back(model.response(id, lambda));
      records.push_back(std::move(rec));
    }
  }
  meta["settings"] = described;
  return Dataset(std::move(scenario), std::move(records), std::move(meta));
}

Dataset sample_singlet_chsh(const std::array<double, 4>& angles, std::size_t count_per_pair,
                            std::uint64_t seed) {
  const auto a1 = ProjectiveObservable::planar_spin("A1", angles[0], 0, 2);
  const auto a2 = ProjectiveObservable::planar_spin("A2", angles[1], 0, 2);
  const auto b1 = ProjectiveObservable::planar_spin("B1", angles[2], 1, 2);
  const auto b2 = ProjectiveObservable::planar_spin("B2", angles[3], 1, 2);
  const std::vector<QuantumSetting> settings{{{a1, b1}, count_per_pair},
                                             {{a1, b2}, count_per_pair},
                                             {{a2, b1}, count_per_pair},
                                             {{a2, b2}, count_per_pair}};
  auto ds = sample_quantum_dataset(DensityState::singlet(), settings, seed);
  Meta meta = ds.meta();
  meta["generator"] = "singlet";
  meta["angles"] = format_double(angles[0]) + "," + format_double(angles[1]) + "," +
                   format_double(angles[2]) + "," + format_double(angles[3]);
  return Dataset(ds.scenario(), ds.records(), std::move(meta));
}

}  // namespace contexcert
