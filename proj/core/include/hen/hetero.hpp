#pragma once

#include "hen/codec.hpp"
#include "hen/hopfield.hpp"

#include <cstdint>
#include <span>

namespace hen {

/// Memory rows are [image latent; text latent] in that order.
struct HeteroLayout {
  std::size_t image_dim = 0;
  std::size_t text_dim = 0;

  std::size_t total() const noexcept { return image_dim + text_dim; }
  void validate() const;
};

struct HeteroRecord {
  std::uint32_t id = 0;
  Vector image_latent;
  Vector text_latent;
};

/// With `normalize`, each segment is spherically normalised on its own
/// before concatenation. Records sharing a text latent are allowed.
MemoryBank build_hetero_bank(std::span<const HeteroRecord> records, const HeteroLayout& layout,
                             bool normalize = true);

/// [0; text_latent].
StateVector make_text_query(const Vector& text_latent, const HeteroLayout& layout);

struct HeteroOptions {
  /// Re-impose the query's text segment after every step. Off by default:
  /// the update acts on the full concatenated state.
  bool clamp_text = false;
};

struct HeteroRetrieval {
  Vector image;         // image_codec.decode(image_latent)
  Vector image_latent;  // image segment of the final state
  RetrievalResult result;
};

HeteroRetrieval hetero_retrieve(const StateVector& query, const MemoryBank& bank,
                                const HeteroLayout& layout, const EnergyParams& params,
                                const Codec& image_codec, const HeteroOptions& options = {});

}  // namespace hen
