#include "rcph/index_io.hpp"

#include <algorithm>
#include <cstring>

#include "rcph/byte_io.hpp"

namespace rcph {

namespace {
constexpr std::string_view kMagic = "RCPH";
constexpr std::uint16_t kVersion = 1;
}  // namespace

std::vector<std::uint8_t> encode_index(const PreprocessedIndex& index) {
  const RcphParams& params = index.params();
  bytes::Writer w;
  w.raw(kMagic);
  w.u16(kVersion);
  w.u32(params.n);
  w.u32(params.k);
  w.u32(params.m);
  w.u32(params.p.num);
  w.u32(params.p.den);
  w.u64(index.seed());
  w.raw(index.system_key());
  for (const auto& c : index.combinations()) {
    w.u32(static_cast<std::uint32_t>(c.size()));
    for (auto j : c.indices()) w.u32(j);
  }
  for (const auto& table : index.tables()) {
    std::vector<std::pair<std::uint32_t, const Digest*>> entries;
    entries.reserve(table.size());
    for (const auto& [digest, cls] : table) entries.emplace_back(cls, &digest);
    std::sort(entries.begin(), entries.end());
    for (const auto& [cls, digest] : entries) {
      w.raw(digest->bytes);
      w.u32(cls);
    }
  }
  for (auto label : index.labels()) w.u32(label);
  return std::move(w).take();
}

PreprocessedIndex decode_index(std::span<const std::uint8_t> data) {
  bytes::Reader r(data, "index file");
  r.expect_magic(kMagic);
  if (auto v = r.u16(); v != kVersion) throw DataError("index file: unsupported version " + std::to_string(v));
  RcphParams params;
  params.n = r.u32();
  params.k = r.u32();
  params.m = r.u32();
  const std::uint32_t num = r.u32();
  const std::uint32_t den = r.u32();
  if (den == 0) throw DataError("index file: zero denominator for p");
  params.p = Rational::make(num, den);
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("index file: ") + e.what());
  }
  const std::uint64_t seed = r.u64();
  SystemKey key{};
  auto key_bytes = r.raw(key.size());
  std::copy(key_bytes.begin(), key_bytes.end(), key.begin());

  // Each combination needs at least 4 + 4*size bytes; reject absurd m early.
  const std::uint64_t min_bytes = std::uint64_t{params.m} * (4 + 4ULL * params.projection_size() + 36ULL * params.k);
  if (min_bytes > r.remaining()) throw DataError("index file: truncated input");

  std::vector<CoordinateCombination> combinations;
  combinations.reserve(params.m);
  for (std::uint32_t i = 0; i < params.m; ++i) {
    const std::uint32_t len = r.u32();
    if (len != params.projection_size()) throw DataError("index file: combination length mismatch");
    std::vector<std::uint32_t> idx(len);
    for (auto& j : idx) j = r.u32();
    try {
      combinations.emplace_back(std::move(idx), params.n);
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("index file: ") + e.what());
    }
  }
  std::vector<DigestTable> tables(params.m);
  for (auto& table : tables) {
    table.reserve(params.k);
    for (std::uint32_t j = 0; j < params.k; ++j) {
      Digest d;
      auto raw = r.raw(d.bytes.size());
      std::copy(raw.begin(), raw.end(), d.bytes.begin());
      const std::uint32_t cls = r.u32();
      if (!table.emplace(d, cls).second) throw DataError("index file: duplicate digest within a table");
    }
  }
  std::vector<std::uint32_t> labels(params.k);
  for (auto& label : labels) label = r.u32();
  r.expect_end();
  return PreprocessedIndex::from_parts(params, seed, key, std::move(combinations), std::move(tables),
                                       std::move(labels));
}

void write_index(const std::string& path, const PreprocessedIndex& index) {
  bytes::write_file(path, encode_index(index));
}

PreprocessedIndex read_index(const std::string& path) { return decode_index(bytes::read_file(path)); }

}  // namespace rcph
