#include "hen/kernel_memory.hpp"

#include "hen/error.hpp"
#include "hen/linalg.hpp"

#include <cmath>
#include <limits>

namespace hen {

void KernelParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidArgument, "kernel alpha must be positive");
  }
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorCode::InvalidArgument, "kernel scale r must be positive");
  }
  if (pinv_tol_factor && !(*pinv_tol_factor >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "pinv_tol_factor must be >= 0");
  }
}

double exp_kernel(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                  const KernelParams& params) {
  params.validate();
  if (x.size() != y.size()) {
    throw Error(ErrorCode::DimensionMismatch, "kernel arguments differ in length");
  }
  const double scaled = (x - y).norm() / params.r;
  return std::exp(-std::pow(scaled, params.alpha));
}

KernelMatrix kernel_matrix(const MemoryBank& bank, const KernelParams& params) {
  params.validate();
  const Eigen::Index n = bank.count();
  KernelMatrix km{Matrix(n, n), bank.id()};
  for (Eigen::Index i = 0; i < n; ++i) {
    km.values(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = exp_kernel(bank.row(i).transpose(), bank.row(j).transpose(), params);
      km.values(i, j) = v;
      km.values(j, i) = v;
    }
  }
  return km;
}

Vector kernel_column(const StateVector& state, const MemoryBank& bank, const KernelParams& params) {
  if (state.size() != bank.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "state length differs from bank dimension");
  }
  Vector k(bank.count());
  for (Eigen::Index n = 0; n < bank.count(); ++n) {
    k[n] = exp_kernel(bank.row(n).transpose(), state, params);
  }
  return k;
}

StateVector kmn_update(const StateVector& state, const MemoryBank& bank, const Matrix& kmat_pinv,
                       const KernelParams& params) {
  params.validate();
  if (kmat_pinv.rows() != bank.count() || kmat_pinv.cols() != bank.count()) {
    throw Error(ErrorCode::DimensionMismatch, "pseudoinverse must be N x N for the bank");
  }
  return bank.patterns().transpose() * (kmat_pinv * kernel_column(state, bank, params));
}

namespace {

Matrix kernel_pinv(const MemoryBank& bank, const KernelMatrix& km, const KernelParams& params) {
  const double tol = params.pinv_tol_factor.value_or(default_rank_tol(bank.count(), bank.dim()));
  return pseudoinverse(km.values, tol);
}

RetrievalResult iterate(const StateVector& query, const MemoryBank& bank, const Matrix& pinv,
                        const KernelParams& params, int max_iters, double tol,
                        Similarity match_kind) {
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be >= 0");
  RetrievalResult result;
  StateVector state = query;
  double last_step = std::numeric_limits<double>::infinity();
  for (int t = 0; t < max_iters; ++t) {
    StateVector next = kmn_update(state, bank, pinv, params);
    last_step = (next - state).norm();
    state = std::move(next);
    ++result.iterations_run;
    if (tol > 0.0 && last_step <= tol) break;
  }
  result.converged = last_step <= tol;
  result.matched_index = best_match(state, bank, match_kind);
  result.final_state = std::move(state);
  return result;
}

}  // namespace

RetrievalResult kmn_retrieve(const StateVector& query, const MemoryBank& bank,
                             const KernelParams& params, int max_iters, double tol,
                             Similarity match_kind) {
  const KernelMatrix km = kernel_matrix(bank, params);
  return iterate(query, bank, kernel_pinv(bank, km, params), params, max_iters, tol, match_kind);
}

KernelMemory::KernelMemory(MemoryBank bank, KernelParams params)
    : bank_(std::move(bank)), params_(std::move(params)), kernel_(kernel_matrix(bank_, params_)) {
  pinv_ = kernel_pinv(bank_, kernel_, params_);
}

StateVector KernelMemory::update(const StateVector& state) const {
  return kmn_update(state, bank_, pinv_, params_);
}

RetrievalResult KernelMemory::retrieve(const StateVector& query, int max_iters, double tol,
                                       Similarity match_kind) const {
  return iterate(query, bank_, pinv_, params_, max_iters, tol, match_kind);
}

}  // namespace hen
