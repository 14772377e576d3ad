#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace hen {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::string_view bytes);

/// Square binary image, row-major, cells in {0, 1}.
struct BinaryBlock {
  int side = 0;
  std::vector<std::uint8_t> cells;

  std::uint8_t at(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * static_cast<std::size_t>(side) +
                 static_cast<std::size_t>(col)];
  }
};

inline constexpr int kDefaultBlockSide = 16;

/// Lays the 256 SHA-256 digest bits of `text` row-major, most significant
/// bit of each byte first, into the first 256 cells; the rest stay zero.
/// Throws BlockTooSmall when block_side^2 < 256.
BinaryBlock pixelize_text(std::string_view text, int block_side = kDefaultBlockSide);

}  // namespace hen
