#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace rmp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline bool all_finite(const Mat& m) { return m.allFinite(); }
inline bool all_finite(const Vec& v) { return v.allFinite(); }

/// Relative truncation tolerance used by the generalized inverse when the
/// caller does not supply one: 1e-10 * max(rows, cols). The absolute cutoff
/// is this value times the largest singular value.
inline double default_rel_tol(const Mat& m) {
  return 1e-10 * static_cast<double>(std::max(m.rows(), m.cols()));
}

/// Thin SVD restricted to the numerical range: only singular values above
/// rel_tol * sigma_max are kept, so the factors span rank(m) dimensions.
struct SvdFactors {
  Mat left;             // m x k, orthonormal columns
  Vec singular_values;  // k, strictly positive, descending
  Mat right;            // n x k, orthonormal columns

  Eigen::Index rank() const { return singular_values.size(); }
};

inline SvdFactors truncated_svd(const Mat& m, double rel_tol) {
  if (!all_finite(m)) throw std::invalid_argument("truncated_svd: non-finite entries");
  if (rel_tol <= 0.0) throw std::invalid_argument("truncated_svd: rel_tol must be positive");

  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? rel_tol * sv(0) : 0.0;

  Eigen::Index k = 0;
  while (k < sv.size() && sv(k) > cutoff) ++k;

  SvdFactors out;
  out.left = svd.matrixU().leftCols(k);
  out.singular_values = sv.head(k);
  out.right = svd.matrixV().leftCols(k);
  return out;
}

inline SvdFactors truncated_svd(const Mat& m) { return truncated_svd(m, default_rel_tol(m)); }

/// SVD-based generalized inverse with small singular values truncated.
inline Mat generalized_inverse(const Mat& m, double rel_tol) {
  SvdFactors f = truncated_svd(m, rel_tol);
  if (f.rank() == 0) return Mat::Zero(m.cols(), m.rows());
  return f.right * f.singular_values.cwiseInverse().asDiagonal() * f.left.transpose();
}

inline Mat generalized_inverse(const Mat& m) {
  return generalized_inverse(m, default_rel_tol(m));
}

/// The two projectors induced by the generalized inverse. Following the
/// convention used throughout this library, col_projector = m^+ m (n x n)
/// and row_projector = m m^+ (m x m). Both are idempotent and symmetric.
struct ProjectorPair {
  Mat col_projector;
  Mat row_projector;
};

inline ProjectorPair projector_checks(const Mat& m, double rel_tol) {
  const Mat pinv = generalized_inverse(m, rel_tol);
  return ProjectorPair{pinv * m, m * pinv};
}

inline ProjectorPair projector_checks(const Mat& m) {
  return projector_checks(m, default_rel_tol(m));
}

/// (a + a^T) / 2. Metrics are re-symmetrized after arithmetic so round-off
/// drift never accumulates into the PSD checks downstream.
inline Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

/// True iff m is symmetric within tol and its eigenvalues are all >= -tol.
inline bool is_psd(const Mat& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("is_psd: matrix must be square");
  if (!all_finite(m)) return false;
  if (m.size() == 0) return true;
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol) return false;
  Eigen::SelfAdjointEigenSolver<Mat> eig(symmetrize(m), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace rmp
