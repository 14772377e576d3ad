#include "hen/codec.hpp"

#include "hen/error.hpp"

#include <random>
#include <string>

namespace hen {

namespace {

void require_length(const Vector& v, std::size_t expected, const char* what) {
  if (static_cast<std::size_t>(v.size()) != expected) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has length " +
                                                  std::to_string(v.size()) + ", expected " +
                                                  std::to_string(expected));
  }
}

void remove_tile_means(Matrix& g, const TileGrid& grid) {
  const auto& s = grid.shape;
  for (Eigen::Index col = 0; col < g.cols(); ++col) {
    for (int ty = 0; ty < s.height; ty += grid.tile) {
      for (int tx = 0; tx < s.width; tx += grid.tile) {
        for (int c = 0; c < s.channels; ++c) {
          double sum = 0.0;
          for (int y = ty; y < ty + grid.tile; ++y)
            for (int x = tx; x < tx + grid.tile; ++x) sum += g((y * s.width + x) * s.channels + c, col);
          const double mean = sum / (grid.tile * grid.tile);
          for (int y = ty; y < ty + grid.tile; ++y)
            for (int x = tx; x < tx + grid.tile; ++x) g((y * s.width + x) * s.channels + c, col) -= mean;
        }
      }
    }
  }
}

}  // namespace

std::string_view to_string(CodecKind kind) noexcept {
  switch (kind) {
    case CodecKind::Identity: return "identity";
    case CodecKind::SphericalNorm: return "spherical";
    case CodecKind::RandomProjection: return "projection";
    case CodecKind::Precomputed: return "precomputed";
    case CodecKind::PixelText: return "pixel-text";
  }
  return "identity";
}

CodecKind parse_codec_kind(std::string_view name) {
  if (name == "identity" || name == "Identity") return CodecKind::Identity;
  if (name == "spherical" || name == "SphericalNorm") return CodecKind::SphericalNorm;
  if (name == "projection" || name == "RandomProjection") return CodecKind::RandomProjection;
  if (name == "precomputed" || name == "Precomputed") return CodecKind::Precomputed;
  if (name == "pixel-text" || name == "PixelText") return CodecKind::PixelText;
  throw Error(ErrorCode::InvalidConfig, "unknown codec '" + std::string(name) + "'");
}

Vector spherical_normalize(const Vector& v) {
  const double n = v.norm();
  if (n == 0.0) return Vector::Zero(v.size());
  return v / n;
}

Matrix make_orthonormal_projection(std::size_t input_dim, std::size_t latent_dim,
                                   std::uint64_t seed, const std::optional<TileGrid>& grid) {
  if (latent_dim == 0 || latent_dim > input_dim) {
    throw Error(ErrorCode::InvalidArgument, "projection needs 0 < latent_dim <= input_dim");
  }
  if (grid) {
    const auto& s = grid->shape;
    if (s.size() != input_dim) {
      throw Error(ErrorCode::DimensionMismatch, "tile grid shape does not match input_dim");
    }
    if (grid->tile < 1 || s.height % grid->tile != 0 || s.width % grid->tile != 0) {
      throw Error(ErrorCode::InvalidArgument, "tile side must divide image height and width");
    }
    const std::size_t constrained = static_cast<std::size_t>(s.height / grid->tile) *
                                    static_cast<std::size_t>(s.width / grid->tile) *
                                    static_cast<std::size_t>(s.channels);
    if (latent_dim > input_dim - constrained) {
      throw Error(ErrorCode::InvalidArgument,
                  "latent_dim exceeds the tile-mean-free subspace dimension " +
                      std::to_string(input_dim - constrained));
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto rows = static_cast<Eigen::Index>(input_dim);
  const auto cols = static_cast<Eigen::Index>(latent_dim);
  Matrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) g(r, c) = normal(rng);
  if (grid) remove_tile_means(g, *grid);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  return q.transpose();
}

Codec Codec::identity(std::size_t dim) { return Codec(CodecKind::Identity, dim, dim); }

Codec Codec::spherical_norm(std::size_t dim) { return Codec(CodecKind::SphericalNorm, dim, dim); }

Codec Codec::random_projection(std::size_t input_dim, std::size_t latent_dim, std::uint64_t seed,
                               std::optional<TileGrid> grid) {
  Codec codec(CodecKind::RandomProjection, input_dim, latent_dim);
  codec.seed_ = seed;
  codec.projection_ =
      std::make_shared<const Matrix>(make_orthonormal_projection(input_dim, latent_dim, seed, grid));
  codec.grid_ = grid;
  return codec;
}

Codec Codec::precomputed(EmbeddingTable table) {
  if (table.empty()) throw Error(ErrorCode::EmptyTable, "precomputed codec needs a non-empty table");
  Codec codec(CodecKind::Precomputed, table.input_dim(), table.latent_dim());
  Matrix latents(static_cast<Eigen::Index>(table.size()), static_cast<Eigen::Index>(table.latent_dim()));
  std::vector<std::uint32_t> ids;
  ids.reserve(table.size());
  Eigen::Index row = 0;
  for (const auto& [id, entry] : table.entries()) {
    latents.row(row++) = spherical_normalize(entry.latent).transpose();
    ids.push_back(id);
  }
  codec.table_latents_ = std::make_shared<const Matrix>(std::move(latents));
  codec.table_ids_ = std::make_shared<const std::vector<std::uint32_t>>(std::move(ids));
  codec.table_ = std::make_shared<const EmbeddingTable>(std::move(table));
  return codec;
}

Codec Codec::pixel_text(int block_side) {
  if (block_side < 16) throw Error(ErrorCode::BlockTooSmall, "pixel-text blocks need side >= 16");
  const auto cells = static_cast<std::size_t>(block_side) * static_cast<std::size_t>(block_side);
  Codec codec(CodecKind::PixelText, cells, cells);
  codec.block_side_ = block_side;
  return codec;
}

const Matrix& Codec::projection() const {
  if (!projection_) throw Error(ErrorCode::InvalidArgument, "codec has no projection matrix");
  return *projection_;
}

const EmbeddingTable& Codec::table() const {
  if (!table_) throw Error(ErrorCode::EmptyTable, "codec has no embedding table");
  return *table_;
}

std::string Codec::name() const {
  std::string n(to_string(kind_));
  if (kind_ == CodecKind::RandomProjection) n += "-" + std::to_string(latent_dim_);
  return n;
}

Vector Codec::encode(const Vector& pattern) const {
  require_length(pattern, input_dim_, "pattern");
  switch (kind_) {
    case CodecKind::Identity:
    case CodecKind::PixelText:
      return pattern;
    case CodecKind::SphericalNorm:
      return spherical_normalize(pattern);
    case CodecKind::RandomProjection:
      return spherical_normalize(*projection_ * pattern);
    case CodecKind::Precomputed:
      for (const auto& [id, entry] : table_->entries()) {
        if (entry.original == pattern) return entry.latent;
      }
      throw Error(ErrorCode::LookupMiss, "pattern not present in the embedding table");
  }
  return pattern;
}

Vector Codec::decode(const Vector& latent) const {
  require_length(latent, latent_dim_, "latent");
  switch (kind_) {
    case CodecKind::Identity:
    case CodecKind::SphericalNorm:
    case CodecKind::PixelText:
      return latent;
    case CodecKind::RandomProjection:
      return projection_->transpose() * latent;
    case CodecKind::Precomputed:
      return table_->at(nearest_id(latent)).original;
  }
  return latent;
}

Vector Codec::encode_text(std::string_view text) const {
  if (kind_ != CodecKind::PixelText) {
    throw Error(ErrorCode::InvalidArgument, "encode_text needs a pixel-text codec");
  }
  const BinaryBlock block = pixelize_text(text, block_side_);
  Vector v(static_cast<Eigen::Index>(block.cells.size()));
  for (std::size_t i = 0; i < block.cells.size(); ++i) v[static_cast<Eigen::Index>(i)] = block.cells[i];
  return v;
}

std::uint32_t Codec::nearest_id(const Vector& latent) const {
  if (kind_ != CodecKind::Precomputed) {
    throw Error(ErrorCode::InvalidArgument, "nearest_id needs a precomputed codec");
  }
  require_length(latent, latent_dim_, "latent");
  const Vector cos = *table_latents_ * spherical_normalize(latent);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < cos.size(); ++i) {
    if (cos[i] > cos[best]) best = i;
  }
  return (*table_ids_)[static_cast<std::size_t>(best)];
}

}  // namespace hen
