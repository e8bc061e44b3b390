#include "contexcert/simplex.hpp"

#include <string>

#include "contexcert/error.hpp"

namespace contexcert {

template <class Scalar>
PhaseOneResult<Scalar> solve_phase_one(const DenseMatrix<Scalar>& a, const std::vector<Scalar>& b,
                                       const Scalar& pivot_eps) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw Error(ErrorCode::InvalidArgument, "rhs length does not match rows");

  // Tableau columns: n structural, m artificial, 1 rhs. Row m holds the
  // reduced costs of the phase-one objective (sum of artificials) and minus
  // the current objective value in the rhs slot.
  const std::size_t width = n + m + 1;
  const std::size_t rhs = n + m;
  DenseMatrix<Scalar> t(m + 1, width);
  std::vector<int> row_sign(m, 1);
  std::vector<std::size_t> basis(m);

  for (std::size_t i = 0; i < m; ++i) {
    row_sign[i] = b[i] < Scalar(0) ? -1 : 1;
    const Scalar s(row_sign[i]);
    for (std::size_t j = 0; j < n; ++j) t(i, j) = s * a(i, j);
    t(i, n + i) = Scalar(1);
    t(i, rhs) = s * b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) {
    Scalar d(0);
    for (std::size_t i = 0; i < m; ++i) d -= t(i, j);
    t(m, j) = d;
  }
  {
    Scalar w(0);
    for (std::size_t i = 0; i < m; ++i) w += t(i, rhs);
    t(m, rhs) = -w;
  }

  const Scalar neg_eps = -pivot_eps;
  const std::size_t max_pivots = 100 * (n + m) + 1000;
  PhaseOneResult<Scalar> result;

  for (;;) {
    // Bland: lowest-index improving column.
    std::size_t enter = width;
    for (std::size_t j = 0; j < rhs; ++j) {
      if (t(m, j) < neg_eps) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    Scalar best_ratio(0);
    for (std::size_t i = 0; i < m; ++i) {
      if (!(t(i, enter) > pivot_eps)) continue;
      Scalar ratio = t(i, rhs) / t(i, enter);
      if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    // Phase one is bounded below by zero, so an improving column always has
    // a positive entry.
    if (leave == m) break;

    const Scalar pivot = t(leave, enter);
    for (std::size_t j = 0; j < width; ++j) t(leave, j) /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const Scalar factor = t(i, enter);
      if (factor == Scalar(0)) continue;
      for (std::size_t j = 0; j < width; ++j) {
        if (t(leave, j) != Scalar(0)) t(i, j) -= factor * t(leave, j);
      }
      // rounding can push a basic value just below zero
      if (i < m && t(i, rhs) < Scalar(0) && t(i, rhs) > neg_eps) t(i, rhs) = Scalar(0);
    }
    basis[leave] = enter;
    if (++result.pivots > max_pivots) {
      throw Error(ErrorCode::InvalidArgument,
                  "simplex exceeded " + std::to_string(max_pivots) + " pivots");
    }
  }

  result.residual = -t(m, rhs);
  result.x.assign(n, Scalar(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) result.x[basis[i]] = t(i, rhs);
  }
  // Reduced cost of artificial i is 1 - y_i in the sign-normalized rows.
  result.y.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    result.y[i] = Scalar(row_sign[i]) * (Scalar(1) - t(m, n + i));
  }
  return result;
}

template PhaseOneResult<double> solve_phase_one<double>(const DenseMatrix<double>&,
                                                        const std::vector<double>&,
                                                        const double&);
template PhaseOneResult<Rational> solve_phase_one<Rational>(const DenseMatrix<Rational>&,
                                                            const std::vector<Rational>&,
                                                            const Rational&);

}  // namespace contexcert
