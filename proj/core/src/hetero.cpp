#include "hen/hetero.hpp"

#include "hen/error.hpp"

#include <limits>
#include <set>
#include <string>

namespace hen {

void HeteroLayout::validate() const {
  if (image_dim < 1 || text_dim < 1) {
    throw Error(ErrorCode::InvalidArgument, "hetero segments must both be non-empty");
  }
}

MemoryBank build_hetero_bank(std::span<const HeteroRecord> records, const HeteroLayout& layout,
                             bool normalize) {
  layout.validate();
  const auto img = static_cast<Eigen::Index>(layout.image_dim);
  const auto txt = static_cast<Eigen::Index>(layout.text_dim);
  Matrix rows(static_cast<Eigen::Index>(records.size()), img + txt);
  std::set<std::uint32_t> seen;
  for (std::size_t n = 0; n < records.size(); ++n) {
    const HeteroRecord& rec = records[n];
    if (rec.image_latent.size() != img || rec.text_latent.size() != txt) {
      throw Error(ErrorCode::DimensionMismatch,
                  "record " + std::to_string(rec.id) + " does not match the hetero layout");
    }
    if (!seen.insert(rec.id).second) {
      throw Error(ErrorCode::DuplicateId, "record id " + std::to_string(rec.id) + " repeated");
    }
    const auto r = static_cast<Eigen::Index>(n);
    rows.row(r).head(img) = (normalize ? spherical_normalize(rec.image_latent) : rec.image_latent).transpose();
    rows.row(r).tail(txt) = (normalize ? spherical_normalize(rec.text_latent) : rec.text_latent).transpose();
  }
  return MemoryBank(std::move(rows));
}

StateVector make_text_query(const Vector& text_latent, const HeteroLayout& layout) {
  layout.validate();
  if (static_cast<std::size_t>(text_latent.size()) != layout.text_dim) {
    throw Error(ErrorCode::DimensionMismatch, "text latent does not match the layout");
  }
  StateVector q = StateVector::Zero(static_cast<Eigen::Index>(layout.total()));
  q.tail(static_cast<Eigen::Index>(layout.text_dim)) = text_latent;
  return q;
}

namespace {

RetrievalResult retrieve_clamped(const StateVector& query, const MemoryBank& bank,
                                 const HeteroLayout& layout, const EnergyParams& params) {
  const auto txt = static_cast<Eigen::Index>(layout.text_dim);
  RetrievalResult result;
  StateVector state = query;
  double last_step = std::numeric_limits<double>::infinity();
  for (int t = 0; t < params.max_iters; ++t) {
    StateVector next = update_step(state, bank, params);
    next.tail(txt) = query.tail(txt);
    last_step = (next - state).norm();
    state = std::move(next);
    ++result.iterations_run;
    if (params.similarity == Similarity::DotProduct) {
      result.energy_trajectory.push_back(lse_energy(state, bank, params));
    }
    if (params.convergence_tol > 0.0 && last_step <= params.convergence_tol) break;
  }
  result.converged = last_step <= params.convergence_tol;
  result.matched_index = best_match(state, bank, params.similarity);
  result.final_state = std::move(state);
  return result;
}

}  // namespace

HeteroRetrieval hetero_retrieve(const StateVector& query, const MemoryBank& bank,
                                const HeteroLayout& layout, const EnergyParams& params,
                                const Codec& image_codec, const HeteroOptions& options) {
  layout.validate();
  params.validate();
  if (static_cast<std::size_t>(bank.dim()) != layout.total()) {
    throw Error(ErrorCode::DimensionMismatch, "bank width does not match the hetero layout");
  }
  if (image_codec.latent_dim() != layout.image_dim) {
    throw Error(ErrorCode::DimensionMismatch, "image codec latent_dim differs from image_dim");
  }
  HeteroRetrieval out;
  out.result = options.clamp_text ? retrieve_clamped(query, bank, layout, params)
                                  : retrieve(query, bank, params);
  out.image_latent = out.result.final_state.head(static_cast<Eigen::Index>(layout.image_dim));
  out.image = image_codec.decode(out.image_latent);
  return out;
}

}  // namespace hen
