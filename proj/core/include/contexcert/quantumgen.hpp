#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "contexcert/rng.hpp"
#include "contexcert/scenario.hpp"

namespace contexcert {

using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxHilbertDimension = 16;

// Density operator: Hermitian, positive semidefinite, unit trace.
class DensityState {
 public:
  explicit DensityState(ComplexMatrix matrix);

  static DensityState singlet();
  static DensityState maximally_mixed(int dim);
  static DensityState pure(const Eigen::VectorXcd& psi);
  // Random mixed state: G G^dagger / Tr with G complex Gaussian (Box-Muller).
  static DensityState random(Rng& rng, int dim);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }

 private:
  ComplexMatrix matrix_;
};

// Projective ±1 observable given by its spectral projectors.
class ProjectiveObservable {
 public:
  ProjectiveObservable(std::string id, std::map<Outcome, ComplexMatrix> projectors);

  // Spin along `angle` in the x-z plane (cos(angle) Z + sin(angle) X) on
  // qubit `qubit` of an n-qubit register (qubit 0 is the leftmost factor).
  static ProjectiveObservable planar_spin(std::string id, double angle, int qubit = 0,
                                          int n_qubits = 1);
  // Spin along a unit Bloch vector (normalized internally).
  static ProjectiveObservable bloch_spin(std::string id, const std::array<double, 3>& axis,
                                         int qubit = 0, int n_qubits = 1);

  const std::string& id() const { return id_; }
  const std::map<Outcome, ComplexMatrix>& projectors() const { return projectors_; }
  int dim() const;

 private:
  std::string id_;
  std::map<Outcome, ComplexMatrix> projectors_;
};

// Born-rule joint table Tr(rho P1 ... Pn) for pairwise-commuting observables.
// Cells follow each observable's outcome order (+1 first for ±1).
ProbTable born_table(const DensityState& state, std::span<const ProjectiveObservable> observables);

// Singlet correlation for planar spin measurements: -cos(a - b).
double singlet_correlation(double angle_a, double angle_b);

struct QuantumSetting {
  std::vector<ProjectiveObservable> observables;
  std::size_t count = 0;
};

// Draws `count` i.i.d. tuples per setting from the Born table by inverse CDF
// over the cell order. Setting i uses Rng(derive_subseed(seed, i)).
Dataset sample_quantum_dataset(const DensityState& state, std::span<const QuantumSetting> settings,
                               std::uint64_t seed);

// Local hidden-variable model: one shared lambda per record, deterministic
// context-free responses.
struct LhvModel {
  std::string name;
  std::vector<std::string> observables;
  std::function<std::vector<double>(Rng&)> sample_lambda;
  std::function<Outcome(const std::string&, std::span<const double>)> response;
  // Free-form parameters recorded in dataset metadata.
  std::map<std::string, std::string> parameters;
};

// lambda uniform on S^2, response sign(lambda . axis) (ties to +1).
LhvModel sphere_lhv_model(const std::map<std::string, std::array<double, 3>>& axes);
// Sphere model with independent uniformly random axes per observable.
LhvModel random_sphere_lhv_model(const std::vector<std::string>& observables, Rng& rng);
// Every observable always answers `value`.
LhvModel constant_lhv_model(const std::vector<std::string>& observables, Outcome value = +1);
// lambda a fair ±1 coin; every observable answers lambda.
LhvModel shared_coin_lhv_model(const std::vector<std::string>& observables);

struct LhvSetting {
  std::vector<std::string> observables;
  std::size_t count = 0;
};

Dataset sample_lhv_dataset(const LhvModel& model, std::span<const LhvSetting> settings,
                           std::uint64_t seed);

// Four-setting CHSH dataset from the singlet at angles (A1, A2, B1, B2).
Dataset sample_singlet_chsh(const std::array<double, 4>& angles, std::size_t count_per_pair,
                            std::uint64_t seed);

}  // namespace contexcert
