#include "rcph/embedding_io.hpp"

#include <fstream>
#include <iterator>

#include "rcph/byte_io.hpp"

namespace rcph {

namespace {
constexpr std::string_view kMagic = "DEMB";
constexpr std::uint16_t kVersion = 1;
}  // namespace

namespace bytes {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw DataError("write to '" + path + "' failed");
}

}  // namespace bytes

std::vector<DiscreteEmbedding> EmbeddingSet::embeddings() const {
  std::vector<DiscreteEmbedding> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.bits);
  return out;
}

std::vector<std::uint8_t> encode_embeddings(const EmbeddingSet& set) {
  bytes::Writer w;
  w.raw(kMagic);
  w.u16(kVersion);
  w.u32(set.n);
  w.u32(static_cast<std::uint32_t>(set.records.size()));
  for (const auto& r : set.records) {
    if (r.bits.size() != set.n) {
      throw std::invalid_argument("embedding of length " + std::to_string(r.bits.size()) +
                                  " in a set with n=" + std::to_string(set.n));
    }
    w.u32(r.label);
    w.raw(r.bits.to_bytes());
  }
  return std::move(w).take();
}

EmbeddingSet decode_embeddings(std::span<const std::uint8_t> data) {
  bytes::Reader r(data, "embedding file");
  r.expect_magic(kMagic);
  if (auto v = r.u16(); v != kVersion) {
    throw DataError("embedding file: unsupported version " + std::to_string(v));
  }
  EmbeddingSet set;
  set.n = r.u32();
  if (set.n == 0) throw DataError("embedding file: n must be positive");
  const std::uint32_t count = r.u32();
  const std::size_t record_bytes = 4 + (std::size_t{set.n} + 7) / 8;
  if (r.remaining() != record_bytes * count) {
    throw DataError("embedding file: expected " + std::to_string(count) + " records of " +
                    std::to_string(record_bytes) + " bytes, found " +
                    std::to_string(r.remaining()) + " bytes");
  }
  set.records.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    LabeledEmbedding e;
    e.label = r.u32();
    e.bits = BitVector::from_bytes(r.raw((std::size_t{set.n} + 7) / 8), set.n);
    set.records.push_back(std::move(e));
  }
  r.expect_end();
  return set;
}

void write_embeddings(const std::string& path, const EmbeddingSet& set) {
  bytes::write_file(path, encode_embeddings(set));
}

EmbeddingSet read_embeddings(const std::string& path) {
  return decode_embeddings(bytes::read_file(path));
}

}  // namespace rcph
