#include "hen/hopfield.hpp"

#include "hen/error.hpp"
#include "parallel.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

namespace hen {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void require_dim(const StateVector& state, const MemoryBank& bank) {
  if (state.size() != bank.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "state length " + std::to_string(state.size()) + " != bank dim " +
                    std::to_string(bank.dim()));
  }
}

Vector softmax_of(const Vector& logits) {
  const double shift = logits.maxCoeff();
  Vector w = (logits.array() - shift).exp().matrix();
  w /= w.sum();
  return w;
}

}  // namespace

MemoryBank::MemoryBank(Matrix patterns) : patterns_(std::move(patterns)) {
  if (patterns_.rows() < 1 || patterns_.cols() < 1) {
    throw Error(ErrorCode::InvalidArgument, "memory bank needs at least one row and column");
  }
  if (!patterns_.allFinite()) {
    throw Error(ErrorCode::NonFinite, "memory bank contains NaN or Inf");
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int64_t shape[2] = {patterns_.rows(), patterns_.cols()};
  h = fnv1a(shape, sizeof(shape), h);
  h = fnv1a(patterns_.data(), sizeof(double) * static_cast<std::size_t>(patterns_.size()), h);
  id_ = h;
}

void EnergyParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::InvalidArgument, "beta must be positive and finite");
  }
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  if (!(convergence_tol >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "convergence_tol must be >= 0");
  }
}

void TransformerParams::validate(Eigen::Index input_dim) const {
  if (w_q.cols() != input_dim || w_k.cols() != input_dim || w_v.cols() != input_dim) {
    throw Error(ErrorCode::DimensionMismatch, "W_Q, W_K, W_V must all take the bank dimension");
  }
  if (w_q.rows() != w_k.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "W_Q and W_K must share an output dimension");
  }
  const double scale = 1.0 / std::sqrt(d_k);
  if (!(d_k > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::InvalidArgument, "1/sqrt(d_k) must be finite and positive");
  }
}

Vector similarities(const StateVector& state, const MemoryBank& bank, Similarity kind) {
  require_dim(state, bank);
  if (kind == Similarity::DotProduct) return bank.patterns() * state;
  return -(bank.patterns().rowwise() - state.transpose()).rowwise().squaredNorm();
}

Eigen::Index best_match(const StateVector& state, const MemoryBank& bank, Similarity kind) {
  const Vector sims = similarities(state, bank, kind);
  Eigen::Index best = 0;
  for (Eigen::Index n = 1; n < sims.size(); ++n) {
    if (sims[n] > sims[best]) best = n;
  }
  return best;
}

double lse_energy(const StateVector& state, const MemoryBank& bank, const EnergyParams& params) {
  params.validate();
  if (params.similarity != Similarity::DotProduct) {
    throw Error(ErrorCode::InvalidArgument, "log-sum-exp energy is defined for DotProduct only");
  }
  const Vector scaled = params.beta * similarities(state, bank, Similarity::DotProduct);
  const double shift = scaled.maxCoeff();
  const double lse = shift + std::log((scaled.array() - shift).exp().sum());
  return -lse / params.beta + 0.5 * state.squaredNorm();
}

Vector softmax_weights(const StateVector& state, const MemoryBank& bank,
                       const EnergyParams& params) {
  params.validate();
  return softmax_of(params.beta * similarities(state, bank, params.similarity));
}

StateVector update_step(const StateVector& state, const MemoryBank& bank,
                        const EnergyParams& params) {
  return bank.patterns().transpose() * softmax_weights(state, bank, params);
}

RetrievalResult retrieve(const StateVector& query, const MemoryBank& bank,
                         const EnergyParams& params) {
  params.validate();
  require_dim(query, bank);
  const bool track_energy = params.similarity == Similarity::DotProduct;

  RetrievalResult result;
  StateVector state = query;
  double last_step = std::numeric_limits<double>::infinity();
  for (int t = 0; t < params.max_iters; ++t) {
    StateVector next = update_step(state, bank, params);
    last_step = (next - state).norm();
    state = std::move(next);
    ++result.iterations_run;
    if (track_energy) result.energy_trajectory.push_back(lse_energy(state, bank, params));
    // tol == 0 disables early exit: the loop runs the full max_iters.
    if (params.convergence_tol > 0.0 && last_step <= params.convergence_tol) break;
  }
  result.converged = last_step <= params.convergence_tol;
  result.matched_index = best_match(state, bank, params.similarity);
  result.final_state = std::move(state);
  return result;
}

std::vector<RetrievalResult> retrieve_batch(const Matrix& queries, const MemoryBank& bank,
                                            const EnergyParams& params, unsigned threads) {
  params.validate();
  std::vector<RetrievalResult> results(static_cast<std::size_t>(queries.rows()));
  detail::parallel_for(results.size(), threads, [&](std::size_t i) {
    results[i] = retrieve(queries.row(static_cast<Eigen::Index>(i)).transpose(), bank, params);
  });
  return results;
}

StateVector transformer_update(const StateVector& state, const MemoryBank& bank,
                               const TransformerParams& tp) {
  tp.validate(bank.dim());
  require_dim(state, bank);
  const Matrix keys = bank.patterns() * tp.w_k.transpose();
  const Matrix values = bank.patterns() * tp.w_v.transpose();
  const Vector query = tp.w_q * state;
  const double scale = 1.0 / std::sqrt(tp.d_k);
  return values.transpose() * softmax_of(scale * (keys * query));
}

}  // namespace hen
