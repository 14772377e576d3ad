#include "hen/pixel_text.hpp"

#include "hen/error.hpp"

#include <openssl/evp.h>

#include <memory>
#include <string>

namespace hen {

Sha256Digest sha256(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  Sha256Digest digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1 || len != digest.size()) {
    throw Error(ErrorCode::InvalidArgument, "SHA-256 computation failed");
  }
  return digest;
}

BinaryBlock pixelize_text(std::string_view text, int block_side) {
  if (block_side < 16) {
    throw Error(ErrorCode::BlockTooSmall,
                "block side " + std::to_string(block_side) + " holds fewer than 256 cells");
  }
  BinaryBlock block{block_side,
                    std::vector<std::uint8_t>(static_cast<std::size_t>(block_side) *
                                              static_cast<std::size_t>(block_side))};
  const Sha256Digest digest = sha256(text);
  for (std::size_t bit = 0; bit < 256; ++bit) {
    block.cells[bit] = (digest[bit / 8] >> (7 - bit % 8)) & 1u;
  }
  return block;
}

}  // namespace hen
