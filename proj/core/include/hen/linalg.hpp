#pragma once

#include "hen/hopfield.hpp"

namespace hen {

/// Conventional numerical-rank cutoff factor: max(rows, cols) * machine epsilon.
double default_rank_tol(Eigen::Index rows, Eigen::Index cols) noexcept;

/// Singular values in descending order.
Vector singular_values(const Matrix& m);

/// Count of singular values strictly greater than tol_factor * sigma_max.
/// A zero matrix has rank 0.
Eigen::Index numerical_rank(const Matrix& m, double tol_factor);

/// SVD-based Moore-Penrose pseudoinverse. Singular values at or below
/// tol_factor * sigma_max are treated as zero.
Matrix pseudoinverse(const Matrix& m, double tol_factor);

}  // namespace hen
