#include "hen/henb.hpp"

#include "hen/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <vector>

namespace hen {

namespace {

constexpr std::array<char, 4> kMagic = {'H', 'E', 'N', 'B'};

class ByteReader {
 public:
  explicit ByteReader(std::vector<unsigned char> bytes) : bytes_(std::move(bytes)) {}

  bool has(std::size_t n) const { return bytes_.size() - pos_ >= n; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  const unsigned char* peek() const { return bytes_.data() + pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
};

void put_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_vector(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v[i])));
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t latent_dim, std::size_t input_dim, std::string source)
    : latent_dim_(latent_dim), input_dim_(input_dim), source_(std::move(source)) {
  if (latent_dim_ == 0 || input_dim_ == 0) {
    throw Error(ErrorCode::DimensionMismatch, "embedding dimensions must be positive");
  }
}

void EmbeddingTable::insert(std::uint32_t id, Vector latent, Vector original) {
  if (static_cast<std::size_t>(latent.size()) != latent_dim_ ||
      static_cast<std::size_t>(original.size()) != input_dim_) {
    throw Error(ErrorCode::DimensionMismatch, "entry " + std::to_string(id) + " has wrong length");
  }
  if (!entries_.try_emplace(id, EmbeddingEntry{std::move(latent), std::move(original)}).second) {
    throw Error(ErrorCode::DuplicateId, "id " + std::to_string(id) + " appears twice");
  }
}

const EmbeddingEntry& EmbeddingTable::at(std::uint32_t id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw Error(ErrorCode::LookupMiss, "no entry with id " + std::to_string(id));
  return it->second;
}

EmbeddingTable read_henb(std::istream& in, const ExpectedDims& expected, std::string source) {
  ByteReader r(std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {}));
  if (!r.has(4) || !std::equal(kMagic.begin(), kMagic.end(), r.peek(),
                               [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; })) {
    throw Error(ErrorCode::BadMagic, "missing HENB magic");
  }
  r.skip(4);
  if (!r.has(kHenbHeaderBytes - 4)) throw Error(ErrorCode::Truncated, "header shorter than 20 bytes");
  const std::uint16_t version = r.u16();
  const std::uint16_t flags = r.u16();
  if (version != kHenbVersion || flags != 0) {
    throw Error(ErrorCode::UnsupportedVersion,
                "version " + std::to_string(version) + " flags " + std::to_string(flags));
  }
  const std::uint32_t count = r.u32();
  const std::uint32_t latent_dim = r.u32();
  const std::uint32_t input_dim = r.u32();
  if (latent_dim == 0 || input_dim == 0) {
    throw Error(ErrorCode::DimensionMismatch, "declared dimensions must be positive");
  }
  if ((expected.latent_dim && *expected.latent_dim != latent_dim) ||
      (expected.input_dim && *expected.input_dim != input_dim)) {
    throw Error(ErrorCode::DimensionMismatch,
                "file declares latent_dim " + std::to_string(latent_dim) + ", input_dim " +
                    std::to_string(input_dim));
  }
  const std::size_t record_bytes = 4 * (1 + std::size_t{latent_dim} + std::size_t{input_dim});
  EmbeddingTable table(latent_dim, input_dim, std::move(source));
  for (std::uint32_t n = 0; n < count; ++n) {
    if (!r.has(record_bytes)) {
      throw Error(ErrorCode::Truncated, "declared " + std::to_string(count) + " records, payload ends in record " +
                                            std::to_string(n));
    }
    const std::uint32_t id = r.u32();
    Vector latent(latent_dim);
    for (std::uint32_t k = 0; k < latent_dim; ++k) latent[k] = r.f32();
    Vector original(input_dim);
    for (std::uint32_t k = 0; k < input_dim; ++k) original[k] = r.f32();
    table.insert(id, std::move(latent), std::move(original));
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::TrailingBytes, std::to_string(r.remaining()) + " bytes after last record");
  }
  return table;
}

EmbeddingTable load_embedding_table(const std::filesystem::path& path, const ExpectedDims& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_henb(in, expected, path.string());
}

void write_henb(std::ostream& out, const EmbeddingTable& table) {
  out.write(kMagic.data(), 4);
  put_u16(out, kHenbVersion);
  put_u16(out, 0);
  put_u32(out, static_cast<std::uint32_t>(table.size()));
  put_u32(out, static_cast<std::uint32_t>(table.latent_dim()));
  put_u32(out, static_cast<std::uint32_t>(table.input_dim()));
  for (const auto& [id, entry] : table.entries()) {
    put_u32(out, id);
    put_vector(out, entry.latent);
    put_vector(out, entry.original);
  }
}

void save_embedding_table(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_henb(out, table);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace hen
