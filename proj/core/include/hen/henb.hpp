#pragma once

// HENB embedding container (binary, little-endian):
//
//   offset  size  field
//   0       4     magic "HENB"
//   4       2     format version (u16) = 1
//   6       2     flags (u16) = 0
//   8       4     record count N (u32)
//   12      4     latent_dim (u32)
//   16      4     input_dim (u32)
//   20      ...   N records: id (u32), latent_dim x f32, input_dim x f32

#include "hen/hopfield.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace hen {

inline constexpr std::uint16_t kHenbVersion = 1;
inline constexpr std::size_t kHenbHeaderBytes = 20;

struct EmbeddingEntry {
  Vector latent;
  Vector original;
};

/// Pattern ID -> (latent, original). Ordered by ID.
class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t latent_dim, std::size_t input_dim, std::string source = {});

  /// Throws DuplicateId or DimensionMismatch.
  void insert(std::uint32_t id, Vector latent, Vector original);

  const std::map<std::uint32_t, EmbeddingEntry>& entries() const noexcept { return entries_; }
  const EmbeddingEntry& at(std::uint32_t id) const;
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t latent_dim() const noexcept { return latent_dim_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::size_t latent_dim_;
  std::size_t input_dim_;
  std::string source_;
  std::map<std::uint32_t, EmbeddingEntry> entries_;
};

struct ExpectedDims {
  std::optional<std::size_t> latent_dim;
  std::optional<std::size_t> input_dim;
};

/// Parses a HENB stream. Errors: BadMagic, UnsupportedVersion, Truncated,
/// TrailingBytes, DimensionMismatch, DuplicateId.
EmbeddingTable read_henb(std::istream& in, const ExpectedDims& expected = {},
                         std::string source = {});
EmbeddingTable load_embedding_table(const std::filesystem::path& path,
                                    const ExpectedDims& expected = {});

/// Values are narrowed to f32. Records are written in ascending ID order.
void write_henb(std::ostream& out, const EmbeddingTable& table);
void save_embedding_table(const std::filesystem::path& path, const EmbeddingTable& table);

}  // namespace hen
