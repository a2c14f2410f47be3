#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rcph {

inline constexpr std::uint32_t kDefaultDimension = 1024;

/// Raised when input data (files, matrices, embeddings) is malformed or
/// inconsistent. Argument-contract violations use std::invalid_argument.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-length packed bit vector.
///
/// Canonical byte layout: bit j lives in byte j/8 at position j%8
/// (little-endian within bytes). Internally the bits are kept in 64-bit
/// words with the same little-endian ordering; padding bits past size()
/// are always zero.
class BitVector {
 public:
  BitVector() = default;
  /// All-zero vector of n bits.
  explicit BitVector(std::size_t n);

  static BitVector from_bools(std::span<const bool> bits);
  /// Adopts ceil(n/64) words; padding bits past n must be zero.
  static BitVector from_words(std::vector<std::uint64_t> words, std::size_t n);
  /// Throws DataError if bytes.size() != ceil(n/8) or any padding bit is set.
  static BitVector from_bytes(std::span<const std::uint8_t> bytes, std::size_t n);

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool test(std::size_t j) const noexcept { return (words_[j >> 6] >> (j & 63)) & 1U; }
  void set(std::size_t j, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (j & 63);
    if (value) {
      words_[j >> 6] |= mask;
    } else {
      words_[j >> 6] &= ~mask;
    }
  }
  void flip(std::size_t j) noexcept { words_[j >> 6] ^= std::uint64_t{1} << (j & 63); }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  std::vector<bool> to_bools() const;
  std::vector<std::uint8_t> to_bytes() const;
  std::size_t popcount() const noexcept;

  BitVector operator^(const BitVector& other) const;
  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// A rounded network output f(x) in {0,1}^n.
using DiscreteEmbedding = BitVector;

DiscreteEmbedding pack_bits(std::span<const bool> bits);
std::vector<bool> unpack_bits(const DiscreteEmbedding& v);

/// Throws std::invalid_argument on dimension mismatch.
std::size_t hamming_distance(const BitVector& a, const BitVector& b);

/// Exact non-negative rational, always stored reduced.
struct Rational {
  std::uint32_t num = 1;
  std::uint32_t den = 1;

  static Rational make(std::uint64_t num, std::uint64_t den);
  /// Parses a plain decimal such as "0.5", "0.125" or "1" exactly.
  static Rational parse_decimal(const std::string& text);

  double to_double() const noexcept { return static_cast<double>(num) / den; }
  std::string to_string() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b) noexcept {
    return std::uint64_t{a.num} * b.den < std::uint64_t{b.num} * a.den;
  }
};

/// Parameters of one RCPH deployment.
struct RcphParams {
  Rational p;                          // portion of coordinates per projection
  std::uint32_t m = 1;                 // maximum iterations
  std::uint32_t n = kDefaultDimension; // feature-space size
  std::uint32_t k = 1;                 // number of classes

  /// floor(p * n), computed exactly.
  std::uint32_t projection_size() const noexcept {
    return static_cast<std::uint32_t>(std::uint64_t{p.num} * n / p.den);
  }
  /// Throws std::invalid_argument unless 0 < p <= 1, floor(p n) >= 1, m, k >= 1.
  void validate() const;
};

/// One query's distances to all k anchors (a row of a distance matrix).
struct DistanceRecord {
  std::vector<std::uint32_t> distances;
  std::optional<std::uint32_t> correct_index;

  std::size_t k() const noexcept { return distances.size(); }
  /// Throws std::invalid_argument if a distance exceeds n or correct_index is out of range.
  void validate(std::uint32_t n) const;
};

DistanceRecord distance_record(const DiscreteEmbedding& query,
                               std::span<const DiscreteEmbedding> anchors,
                               std::optional<std::uint32_t> correct_index = std::nullopt);

struct Match {
  std::uint32_t class_index;
  std::uint32_t iterations_used;
  friend bool operator==(const Match&, const Match&) = default;
};

struct Abstain {
  std::uint32_t iterations_used;
  friend bool operator==(const Abstain&, const Abstain&) = default;
};

using MatchOutcome = std::variant<Match, Abstain>;

inline std::uint32_t iterations_used(const MatchOutcome& outcome) {
  return std::visit([](const auto& o) { return o.iterations_used; }, outcome);
}

}  // namespace rcph
