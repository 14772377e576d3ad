#pragma once

#include "hen/hopfield.hpp"

#include <cstdint>
#include <optional>

namespace hen {

/// Radial exponential kernel exp(-(||x - y|| / r)^alpha).
struct KernelParams {
  double alpha = 2.0;
  double r = 1.0;
  /// Relative singular-value cutoff for the pseudoinverse. Unset means
  /// max(N, K) * machine epsilon for the bank it is applied to.
  std::optional<double> pinv_tol_factor;

  void validate() const;
};

struct KernelMatrix {
  Matrix values;  // N x N, symmetric, unit diagonal
  std::uint64_t source_bank_id = 0;
};

double exp_kernel(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                  const KernelParams& params);

KernelMatrix kernel_matrix(const MemoryBank& bank, const KernelParams& params);

/// k_s(n) = exp_kernel(xi_n, s) for every bank row.
Vector kernel_column(const StateVector& state, const MemoryBank& bank, const KernelParams& params);

/// Xi^T K^+ k_s.
StateVector kmn_update(const StateVector& state, const MemoryBank& bank, const Matrix& kmat_pinv,
                       const KernelParams& params);

/// Iterates kmn_update until the step norm is <= tol (tol == 0 runs all
/// max_iters). No energy is tracked. matched_index uses `match_kind`.
RetrievalResult kmn_retrieve(const StateVector& query, const MemoryBank& bank,
                             const KernelParams& params, int max_iters, double tol,
                             Similarity match_kind = Similarity::DotProduct);

/// Kernel memory bound to one bank: the kernel matrix and its pseudoinverse
/// are computed once at construction and shared by all retrievals.
class KernelMemory {
 public:
  KernelMemory(MemoryBank bank, KernelParams params);

  const MemoryBank& bank() const noexcept { return bank_; }
  const KernelParams& params() const noexcept { return params_; }
  const KernelMatrix& kernel() const noexcept { return kernel_; }
  const Matrix& pinv() const noexcept { return pinv_; }

  StateVector update(const StateVector& state) const;
  RetrievalResult retrieve(const StateVector& query, int max_iters, double tol,
                           Similarity match_kind = Similarity::DotProduct) const;

 private:
  MemoryBank bank_;
  KernelParams params_;
  KernelMatrix kernel_;
  Matrix pinv_;
};

}  // namespace hen
