#pragma once

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace contexcert {

using Rational = boost::multiprecision::cpp_rational;

// Dense row-major matrix, just enough for building LP tableaux.
template <class Scalar>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Scalar& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Scalar& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

template <class Scalar>
struct PhaseOneResult {
  // Sum of artificials at the phase-one optimum; zero iff Ax = b, x >= 0 is
  // feasible.
  Scalar residual{};
  // Basic solution reached by phase one (structural columns only).
  std::vector<Scalar> x;
  // Row multipliers y in the orientation of the input rows. At the optimum
  // y^T A_j <= 0 for every column j and y^T b = residual, so a positive
  // residual makes y a Farkas certificate of infeasibility.
  std::vector<Scalar> y;
  std::size_t pivots = 0;
};

// Phase-one primal simplex on { x >= 0 : A x = b } with one artificial per
// row and Bland's rule for both entering and leaving choices. `pivot_eps`
// is the zero threshold for reduced costs and pivot elements; pass zero for
// exact arithmetic.
template <class Scalar>
PhaseOneResult<Scalar> solve_phase_one(const DenseMatrix<Scalar>& a, const std::vector<Scalar>& b,
                                       const Scalar& pivot_eps);

extern template PhaseOneResult<double> solve_phase_one<double>(const DenseMatrix<double>&,
                                                               const std::vector<double>&,
                                                               const double&);
extern template PhaseOneResult<Rational> solve_phase_one<Rational>(const DenseMatrix<Rational>&,
                                                                   const std::vector<Rational>&,
                                                                   const Rational&);

}  // namespace contexcert
