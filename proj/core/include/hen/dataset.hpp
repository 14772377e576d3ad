#pragma once

#include "hen/hopfield.hpp"
#include "hen/image.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hen {

struct DatasetItem {
  std::uint32_t id = 0;
  Image image;  // values in [0, 1]
  std::optional<std::string> caption;
};

/// Uniformly shaped images with dense IDs 0..N-1.
struct Dataset {
  ImageShape shape;
  std::vector<DatasetItem> items;

  std::size_t size() const noexcept { return items.size(); }
  /// N x (H*W*C), one flattened image per row.
  Matrix as_matrix() const;
  /// First `count` items, IDs unchanged.
  Dataset prefix(std::size_t count) const;
};

/// Reads a binary (P6) PPM, 8- or 16-bit. Values are scaled to [0, 1].
Image read_ppm(const std::filesystem::path& path);
/// Writes an 8-bit P6 PPM; values are clamped to [0, 1] and rounded.
void write_ppm(const std::filesystem::path& path, const Image& image);

inline constexpr const char* kCaptionsFile = "captions.tsv";

/// Loads every *.ppm and *.henb under `path` (or the single file `path`) in
/// lexicographic filename order, resampling images to `shape`. HENB records
/// contribute their original vectors, which must already have `shape`.
/// Captions come from captions.tsv ("id<TAB>caption" per line) when present.
Dataset load_dataset(const std::filesystem::path& path, ImageShape shape);

}  // namespace hen
