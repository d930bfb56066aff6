// Test-only helpers: random instance generators and independent oracles
// (dense least-squares assembly, finite differences). These intentionally
// avoid the library's pseudoinverse and tree-evaluation code paths so the
// tests check against independently computed values.
#pragma once

#include <random>

#include <Eigen/Dense>

#include "rmp/algebra.hpp"

namespace oracles {

using rmp::Mat;
using rmp::Vec;

inline Vec random_vec(std::mt19937_64& rng, Eigen::Index k, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec v(k);
  for (Eigen::Index i = 0; i < k; ++i) v(i) = dist(rng);
  return v;
}

inline Mat random_mat(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = dist(rng);
  return m;
}

/// PSD Gram matrix, rank-deficient when rows < k.
inline Mat random_psd(std::mt19937_64& rng, Eigen::Index k, Eigen::Index rows = -1) {
  if (rows < 0) {
    std::uniform_int_distribution<int> pick(1, static_cast<int>(k) + 2);
    rows = pick(rng);
  }
  const Mat m = random_mat(rng, rows, k);
  return ((m.transpose() * m + (m.transpose() * m).transpose()) * 0.5).eval();
}

/// SPD Gram matrix with the spectrum bounded away from zero.
inline Mat random_spd(std::mt19937_64& rng, Eigen::Index k) {
  const Mat m = random_mat(rng, k + 2, k);
  const Mat g = m.transpose() * m + 0.09 * Mat::Identity(k, k);
  return ((g + g.transpose()) * 0.5).eval();
}

inline Mat random_full_row_rank(std::mt19937_64& rng, Eigen::Index k, Eigen::Index d) {
  for (;;) {
    const Mat j = random_mat(rng, k, d);
    Eigen::JacobiSVD<Mat> svd(j);
    if (svd.singularValues()(k - 1) > 0.05 * svd.singularValues()(0)) return j;
  }
}

inline rmp::RmpEval random_rmp(std::mt19937_64& rng, Eigen::Index k, bool spd = false) {
  return rmp::RmpEval{random_vec(rng, k), spd ? random_spd(rng, k) : random_psd(rng, k)};
}

/// Minimum-norm least-squares solution of the stacked quadratic objective
/// sum_i 0.5 ||f_i - J_i x||^2_{A_i}, assembled densely and solved with
/// Eigen's rank-revealing decomposition (not the library's pseudoinverse).
struct DenseQuadratic {
  Mat normal;
  Vec rhs;

  DenseQuadratic(Eigen::Index dim) : normal(Mat::Zero(dim, dim)), rhs(Vec::Zero(dim)) {}

  void add_term(const Mat& jacobian, const Mat& metric, const Vec& desired) {
    normal += jacobian.transpose() * metric * jacobian;
    rhs += jacobian.transpose() * (metric * desired);
  }

  Vec solve() const { return normal.completeOrthogonalDecomposition().solve(rhs); }

  double metric_norm(const Vec& delta) const {
    return std::sqrt(std::max(0.0, delta.dot(normal * delta)));
  }
};

/// Moore-Penrose pseudoinverse via Eigen's rank-revealing QR path, used as a
/// cross-check against the SVD-based implementation.
inline Mat cod_pinv(const Mat& m) { return m.completeOrthogonalDecomposition().pseudoInverse(); }

template <typename A, typename B>
double max_abs_diff(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace oracles
