#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rcph/core_model.hpp"

namespace rcph::testing {

inline BitVector bits_from_string(const std::string& s) {
  BitVector v(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) v.set(j, s[j] == '1');
  return v;
}

inline BitVector random_bits(std::mt19937_64& rng, std::size_t n) {
  BitVector v(n);
  for (std::size_t j = 0; j < n; ++j) v.set(j, (rng() & 1U) != 0);
  return v;
}

inline std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// The three-query, ten-class example matrix shipped under data/.
inline std::vector<DistanceRecord> example_rows() {
  return {
      {{7, 35, 50, 28, 34, 45, 28, 31, 49, 37}, 0},
      {{36, 50, 47, 15, 37, 48, 25, 46, 36, 42}, 3},
      {{36, 25, 30, 38, 26, 39, 21, 30, 32, 26}, 2},
  };
}

}  // namespace rcph::testing

#include <span>
#include <unordered_set>

namespace rcph::testing {

/// Finds needle (>= 64 bits) as a contiguous run anywhere in the byte buffer,
/// reading the buffer's bits both LSB-first and MSB-first within each byte.
class BitWindowScanner {
 public:
  explicit BitWindowScanner(std::span<const std::uint8_t> haystack) {
    for (bool msb_first : {false, true}) {
      BitVector bits(haystack.size() * 8);
      for (std::size_t b = 0; b < haystack.size(); ++b) {
        for (std::size_t t = 0; t < 8; ++t) {
          const bool bit = (haystack[b] >> (msb_first ? 7 - t : t)) & 1U;
          bits.set(8 * b + t, bit);
        }
      }
      streams_.push_back(std::move(bits));
    }
    for (std::size_t s = 0; s < streams_.size(); ++s) {
      const BitVector& bits = streams_[s];
      if (bits.size() < 64) continue;
      for (std::size_t off = 0; off + 64 <= bits.size(); ++off) prefixes_.insert(window64(bits, off));
    }
  }

  bool contains(const BitVector& needle) const {
    if (needle.size() < 64) throw std::invalid_argument("needle must have at least 64 bits");
    const std::uint64_t head = window64(needle, 0);
    if (!prefixes_.contains(head)) return false;
    for (const BitVector& bits : streams_) {
      for (std::size_t off = 0; off + needle.size() <= bits.size(); ++off) {
        if (window64(bits, off) != head) continue;
        bool all = true;
        for (std::size_t t = 64; t < needle.size() && all; ++t) all = bits.test(off + t) == needle.test(t);
        if (all) return true;
      }
    }
    return false;
  }

 private:
  static std::uint64_t window64(const BitVector& bits, std::size_t off) {
    std::uint64_t w = 0;
    for (std::size_t t = 0; t < 64; ++t) w |= std::uint64_t{bits.test(off + t)} << t;
    return w;
  }

  std::vector<BitVector> streams_;
  std::unordered_set<std::uint64_t> prefixes_;
};

/// Every contiguous run of `length` bits from v.
inline std::vector<BitVector> bit_windows(const BitVector& v, std::size_t length) {
  std::vector<BitVector> out;
  for (std::size_t off = 0; off + length <= v.size(); ++off) {
    BitVector w(length);
    for (std::size_t t = 0; t < length; ++t) w.set(t, v.test(off + t));
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace rcph::testing
