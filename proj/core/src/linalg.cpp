#include "hen/linalg.hpp"

#include "hen/error.hpp"

#include <algorithm>
#include <limits>

namespace hen {

namespace {

Eigen::BDCSVD<Matrix> run_svd(const Matrix& m, unsigned int options) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "SVD input contains NaN or Inf");
  Eigen::BDCSVD<Matrix> svd(m, options);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorCode::SvdFailure, "singular value decomposition did not converge");
  }
  return svd;
}

}  // namespace

double default_rank_tol(Eigen::Index rows, Eigen::Index cols) noexcept {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

Vector singular_values(const Matrix& m) { return run_svd(m, 0).singularValues(); }

Eigen::Index numerical_rank(const Matrix& m, double tol_factor) {
  if (m.size() == 0) return 0;
  const Vector sv = singular_values(m);
  const double cutoff = tol_factor * sv[0];
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff && sv[i] > 0.0) ++rank;
  }
  return rank;
}

Matrix pseudoinverse(const Matrix& m, double tol_factor) {
  if (tol_factor < 0.0) throw Error(ErrorCode::InvalidArgument, "tol_factor must be >= 0");
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  const auto svd = run_svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double cutoff = tol_factor * sv[0];
  Vector inv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff && sv[i] > 0.0) inv[i] = 1.0 / sv[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace hen
