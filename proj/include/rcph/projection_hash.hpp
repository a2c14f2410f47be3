#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rcph/core_model.hpp"

namespace rcph {

/// 256-bit output of the one-way hash.
struct Digest {
  std::array<std::uint8_t, 32> bytes{};

  std::string hex() const;
  static Digest from_hex(const std::string& hex);

  friend bool operator==(const Digest&, const Digest&) = default;
  friend auto operator<=>(const Digest&, const Digest&) = default;
};

struct DigestHasher {
  std::size_t operator()(const Digest& d) const noexcept {
    std::size_t h;
    std::memcpy(&h, d.bytes.data(), sizeof h);
    return h;
  }
};

using SystemKey = std::array<std::uint8_t, 32>;

/// Selects h_i from the keyed family: the same system key with a distinct
/// iteration index per RCPH iteration.
struct HashFamilyKey {
  SystemKey system_key{};
  std::uint32_t iteration_index = 0;
};

/// Sorted, duplicate-free coordinate subset of [0, n).
class CoordinateCombination {
 public:
  CoordinateCombination() = default;
  /// Throws std::invalid_argument unless indices are strictly increasing and < n.
  CoordinateCombination(std::vector<std::uint32_t> indices, std::uint32_t n);

  std::span<const std::uint32_t> indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }

  friend bool operator==(const CoordinateCombination&, const CoordinateCombination&) = default;

 private:
  std::vector<std::uint32_t> indices_;
};

/// Deterministic generator used for every seeded draw in the library.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; derives independent-looking seeds from counters.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform size-subset of [0, n) without replacement (Floyd's sampling).
/// Throws std::invalid_argument unless 1 <= size <= n.
CoordinateCombination draw_combination(Rng& rng, std::uint32_t n, std::uint32_t size);

/// Bit t of the result is v[c.indices()[t]].
BitVector project(const BitVector& v, const CoordinateCombination& c);

/// Plain SHA-256.
Digest one_way_hash(std::span<const std::uint8_t> data);

/// h(v): hash of the canonical packed bytes of v.
Digest hash_embedding(const BitVector& v);

/// h(d) applied to a digest; chain_hash(hash_embedding(v)) is h^2(v).
Digest chain_hash(const Digest& d);

/// h_i(bits) = SHA-256(tag || system_key || iteration_index || bit length || packed bits).
Digest family_hash(const HashFamilyKey& key, const BitVector& projected_bits);

}  // namespace rcph
