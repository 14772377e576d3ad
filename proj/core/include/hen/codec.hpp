#pragma once

#include "hen/henb.hpp"
#include "hen/hopfield.hpp"
#include "hen/image.hpp"
#include "hen/pixel_text.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace hen {

enum class CodecKind { Identity, SphericalNorm, RandomProjection, Precomputed, PixelText };

std::string_view to_string(CodecKind kind) noexcept;
CodecKind parse_codec_kind(std::string_view name);

/// Constrains projection rows to be orthogonal to every image that is
/// constant on each tile x tile block of one channel, so per-tile means
/// (including the global mean and any tile-aligned occlusion) vanish.
struct TileGrid {
  ImageShape shape;
  int tile = 0;
};

/// Scale a vector to unit l2 norm; the zero vector stays zero.
Vector spherical_normalize(const Vector& v);

/// Encoder/decoder pair mapping input patterns to latent patterns.
/// Immutable after construction and cheap to copy.
class Codec {
 public:
  static Codec identity(std::size_t dim);
  static Codec spherical_norm(std::size_t dim);
  /// Seeded projection with orthonormal rows, latent_dim <= input_dim.
  /// Encode is Q x followed by spherical normalisation; decode is Q^T z.
  static Codec random_projection(std::size_t input_dim, std::size_t latent_dim, std::uint64_t seed,
                                 std::optional<TileGrid> grid = std::nullopt);
  /// Lookup codec over externally produced embeddings. Decode is cosine
  /// nearest neighbour over the table latents, returning the paired original.
  static Codec precomputed(EmbeddingTable table);
  static Codec pixel_text(int block_side = kDefaultBlockSide);

  CodecKind kind() const noexcept { return kind_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t latent_dim() const noexcept { return latent_dim_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }
  /// latent_dim x input_dim; only for RandomProjection.
  const Matrix& projection() const;
  const EmbeddingTable& table() const;
  int block_side() const noexcept { return block_side_; }
  std::string name() const;

  Vector encode(const Vector& pattern) const;
  Vector decode(const Vector& latent) const;

  /// PixelText only: SHA-256 bit block flattened to {0, 1} values.
  Vector encode_text(std::string_view text) const;

  /// Precomputed only: ID of the table entry nearest `latent` by cosine.
  std::uint32_t nearest_id(const Vector& latent) const;

 private:
  Codec(CodecKind kind, std::size_t input_dim, std::size_t latent_dim)
      : kind_(kind), input_dim_(input_dim), latent_dim_(latent_dim) {}

  CodecKind kind_;
  std::size_t input_dim_;
  std::size_t latent_dim_;
  std::optional<std::uint64_t> seed_;
  std::optional<TileGrid> grid_;
  int block_side_ = 0;
  std::shared_ptr<const Matrix> projection_;
  std::shared_ptr<const EmbeddingTable> table_;
  // Table latents as rows (unit-normalised) and their IDs, for decode.
  std::shared_ptr<const Matrix> table_latents_;
  std::shared_ptr<const std::vector<std::uint32_t>> table_ids_;
};

/// Random matrix with orthonormal rows (latent_dim x input_dim) drawn from
/// a Gaussian seeded by `seed` and orthonormalised by Householder QR.
Matrix make_orthonormal_projection(std::size_t input_dim, std::size_t latent_dim,
                                   std::uint64_t seed, const std::optional<TileGrid>& grid);

}  // namespace hen
