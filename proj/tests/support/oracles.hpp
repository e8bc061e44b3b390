#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's estimators; each value is derived from first principles.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

// Deterministic ±1 assignment of n variables, bit (n-1-k) set meaning -1.
inline int atom_value(std::size_t atom, std::size_t k, std::size_t n) {
  return ((atom >> (n - 1 - k)) & 1U) ? -1 : +1;
}

// Brute-force marginal of a JPD over n ±1 variables onto positions `keep`;
// output cells ordered +1 first, last coordinate fastest.
inline std::vector<double> brute_marginal(const std::vector<double>& jpd, std::size_t n,
                                          const std::vector<std::size_t>& keep) {
  std::vector<double> out(std::size_t{1} << keep.size(), 0.0);
  for (std::size_t atom = 0; atom < jpd.size(); ++atom) {
    std::size_t cell = 0;
    for (std::size_t k : keep) cell = cell * 2 + (atom_value(atom, k, n) == +1 ? 0 : 1);
    out[cell] += jpd[atom];
  }
  return out;
}

// sum of a*b*p(a,b) over a 4-cell table in (++, +-, -+, --) order.
inline double pair_correlation(const std::array<double, 4>& p) { return p[0] - p[1] - p[2] + p[3]; }

// Tetrahedron of zero-mean triple correlations (x12, x23, x13) realizable by a
// JPD: the convex hull of the four deterministic correlation vertices.
// Membership via barycentric coordinates (tolerance tol on each weight).
inline bool in_correlation_tetrahedron(double x12, double x23, double x13, double tol = 1e-12) {
  // vertices: (+++), (++-), (+-+), (-++) assignments of (X1,X2,X3)
  const double v[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, -1, 1}, {-1, 1, -1}};
  // Solve sum w_i v_i = x, sum w_i = 1. The vertex matrix is a scaled
  // Hadamard-type matrix, so the weights are (1 + v_i . x)/4.
  for (const auto& vi : v) {
    const double w = (1.0 + vi[0] * x12 + vi[1] * x23 + vi[2] * x13) / 4.0;
    if (w < -tol) return false;
  }
  return true;
}

// Largest |CHSH| over all sign placements, written out by hand.
inline double chsh_max(double c11, double c12, double c21, double c22) {
  const double v[4] = {-c11 + c12 + c21 + c22, c11 - c12 + c21 + c22, c11 + c12 - c21 + c22,
                       c11 + c12 + c21 - c22};
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

using Rational = boost::multiprecision::cpp_rational;

inline bool chsh_within_two_exact(const std::array<Rational, 4>& c) {
  const Rational v[4] = {-c[0] + c[1] + c[2] + c[3], c[0] - c[1] + c[2] + c[3],
                         c[0] + c[1] - c[2] + c[3], c[0] + c[1] + c[2] - c[3]};
  for (const auto& x : v) {
    if (x > 2 || x < -2) return false;
  }
  return true;
}

inline bool is_prime(std::size_t n) {
  if (n < 2) return false;
  for (std::size_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

// Singlet joint probabilities for spins along planar angles a and b:
// p(x, y) = (1 - x y cos(a - b)) / 4.
inline std::array<double, 4> singlet_pair(double a, double b) {
  const double c = std::cos(a - b);
  return {(1 - c) / 4, (1 + c) / 4, (1 + c) / 4, (1 - c) / 4};
}

// Two-qubit singlet density matrix written out entrywise in the
// |00>,|01>,|10>,|11> basis.
inline std::array<std::array<double, 4>, 4> singlet_rho() {
  return {{{0, 0, 0, 0}, {0, 0.5, -0.5, 0}, {0, -0.5, 0.5, 0}, {0, 0, 0, 0}}};
}

// Anti-correlation-branch original Bell statistic for singlet angles with
// A2 = B1 = 0: -cos(a1) - cos(b2) - cos(a1 - b2).
inline double bell_original_singlet(double a1, double b2) {
  return -std::cos(a1) - std::cos(b2) - std::cos(a1 - b2);
}

}  // namespace oracle
