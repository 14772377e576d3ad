#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hen {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Retrieval state s^(t). Length must equal the bank's pattern dimension.
using StateVector = Eigen::VectorXd;

/// Stored pattern matrix: row n is memory n, and row order is the memory
/// identity used by every metric downstream. Immutable after construction.
class MemoryBank {
 public:
  explicit MemoryBank(Matrix patterns);

  const Matrix& patterns() const noexcept { return patterns_; }
  Eigen::Index count() const noexcept { return patterns_.rows(); }
  Eigen::Index dim() const noexcept { return patterns_.cols(); }
  auto row(Eigen::Index n) const { return patterns_.row(n); }

  /// Content hash of the pattern bytes; ties cached derived data (kernel
  /// matrices) to the bank they were computed from.
  std::uint64_t id() const noexcept { return id_; }

 private:
  Matrix patterns_;
  std::uint64_t id_;
};

enum class Similarity { DotProduct, NegSquaredL2 };

struct EnergyParams {
  double beta = 150.0;
  Similarity similarity = Similarity::DotProduct;
  int max_iters = 100;
  double convergence_tol = 1e-10;

  void validate() const;
};

struct TransformerParams {
  Matrix w_q;  // D x K
  Matrix w_k;  // D x K
  Matrix w_v;  // D_v x K
  double d_k = 1.0;

  void validate(Eigen::Index input_dim) const;
};

struct RetrievalResult {
  StateVector final_state;
  int iterations_run = 0;
  std::vector<double> energy_trajectory;
  bool converged = false;
  std::optional<Eigen::Index> matched_index;
};

/// sim(xi_n, s) for every bank row.
Vector similarities(const StateVector& state, const MemoryBank& bank, Similarity kind);

/// Index of the most similar bank row; ties resolve to the lowest index.
Eigen::Index best_match(const StateVector& state, const MemoryBank& bank, Similarity kind);

/// Log-sum-exp energy -(1/beta) log sum_n exp(beta xi_n.s) + s.s/2.
/// Defined for DotProduct similarity only.
double lse_energy(const StateVector& state, const MemoryBank& bank, const EnergyParams& params);

/// Softmax over beta * sim(xi_n, s), max-shifted.
Vector softmax_weights(const StateVector& state, const MemoryBank& bank,
                       const EnergyParams& params);

/// One Hopfield step: sum_n w_n xi_n.
StateVector update_step(const StateVector& state, const MemoryBank& bank,
                        const EnergyParams& params);

RetrievalResult retrieve(const StateVector& query, const MemoryBank& bank,
                         const EnergyParams& params);

/// Retrieves every row of `queries` independently. `threads` == 0 picks the
/// hardware concurrency. Output order matches query order and is independent
/// of the thread count.
std::vector<RetrievalResult> retrieve_batch(const Matrix& queries, const MemoryBank& bank,
                                            const EnergyParams& params, unsigned threads = 0);

/// Attention-form update: values^T softmax(keys query / sqrt(d_k)), with
/// keys = bank W_K^T, query = W_Q s, values = bank W_V^T.
StateVector transformer_update(const StateVector& state, const MemoryBank& bank,
                               const TransformerParams& tp);

}  // namespace hen
