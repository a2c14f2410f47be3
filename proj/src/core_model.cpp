#include "rcph/core_model.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <limits>
#include <numeric>

namespace rcph {

namespace {

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

}  // namespace

BitVector::BitVector(std::size_t n) : size_(n), words_(word_count(n), 0) {}

BitVector BitVector::from_bools(std::span<const bool> bits) {
  BitVector v(bits.size());
  for (std::size_t j = 0; j < bits.size(); ++j) {
    if (bits[j]) v.set(j, true);
  }
  return v;
}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes, std::size_t n) {
  if (bytes.size() != (n + 7) / 8) {
    throw DataError("packed bit vector has " + std::to_string(bytes.size()) +
                    " bytes, expected " + std::to_string((n + 7) / 8));
  }
  BitVector v(n);
  for (std::size_t b = 0; b < bytes.size(); ++b) {
    v.words_[b / 8] |= std::uint64_t{bytes[b]} << (8 * (b % 8));
  }
  if (n % 64 != 0 && !v.words_.empty()) {
    const std::uint64_t pad = ~((std::uint64_t{1} << (n % 64)) - 1);
    if (v.words_.back() & pad) throw DataError("non-zero padding bits in packed bit vector");
  }
  return v;
}

BitVector BitVector::from_words(std::vector<std::uint64_t> words, std::size_t n) {
  if (words.size() != word_count(n)) throw std::invalid_argument("word count does not match bit length");
  if (n % 64 != 0 && (words.back() >> (n % 64)) != 0) {
    throw std::invalid_argument("non-zero padding bits in word array");
  }
  BitVector v;
  v.size_ = n;
  v.words_ = std::move(words);
  return v;
}

std::vector<bool> BitVector::to_bools() const {
  std::vector<bool> out(size_);
  for (std::size_t j = 0; j < size_; ++j) out[j] = test(j);
  return out;
}

std::vector<std::uint8_t> BitVector::to_bytes() const {
  std::vector<std::uint8_t> out((size_ + 7) / 8);
  for (std::size_t b = 0; b < out.size(); ++b) {
    out[b] = static_cast<std::uint8_t>(words_[b / 8] >> (8 * (b % 8)));
  }
  return out;
}

std::size_t BitVector::popcount() const noexcept {
  std::size_t count = 0;
  for (auto w : words_) count += static_cast<std::size_t>(std::popcount(w));
  return count;
}

BitVector BitVector::operator^(const BitVector& other) const {
  if (size_ != other.size_) {
    throw std::invalid_argument("bit vector length mismatch: " + std::to_string(size_) +
                                " vs " + std::to_string(other.size_));
  }
  BitVector out(size_);
  for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] = words_[i] ^ other.words_[i];
  return out;
}

DiscreteEmbedding pack_bits(std::span<const bool> bits) {
  if (bits.empty()) throw std::invalid_argument("cannot pack an empty bit sequence");
  return BitVector::from_bools(bits);
}

std::vector<bool> unpack_bits(const DiscreteEmbedding& v) { return v.to_bools(); }

std::size_t hamming_distance(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("hamming_distance: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                ")");
  }
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t d = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return d;
}

Rational Rational::make(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  const std::uint64_t g = std::gcd(num, den);
  num /= g == 0 ? 1 : g;
  den /= g == 0 ? 1 : g;
  if (num > std::numeric_limits<std::uint32_t>::max() ||
      den > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("rational does not fit in 32-bit terms");
  }
  return Rational{static_cast<std::uint32_t>(num), static_cast<std::uint32_t>(den)};
}

Rational Rational::parse_decimal(const std::string& text) {
  std::uint64_t whole = 0;
  std::uint64_t frac = 0;
  std::uint64_t scale = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char ch : text) {
    if (ch == '.' && !seen_dot) {
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(ch))) {
      throw std::invalid_argument("not a plain decimal number: '" + text + "'");
    }
    seen_digit = true;
    const auto digit = static_cast<std::uint64_t>(ch - '0');
    if (seen_dot) {
      if (scale >= 1'000'000'000) throw std::invalid_argument("too many decimals in '" + text + "'");
      frac = frac * 10 + digit;
      scale *= 10;
    } else {
      whole = whole * 10 + digit;
      if (whole > 1'000'000) throw std::invalid_argument("decimal out of range: '" + text + "'");
    }
  }
  if (!seen_digit) throw std::invalid_argument("not a plain decimal number: '" + text + "'");
  return make(whole * scale + frac, scale);
}

std::string Rational::to_string() const {
  // Exact decimal when the denominator only has factors 2 and 5.
  std::uint64_t d = den;
  int twos = 0;
  int fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return std::to_string(num) + "/" + std::to_string(den);
  const int digits = std::max(twos, fives);
  std::uint64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const std::uint64_t scaled = std::uint64_t{num} * (scale / den);
  std::string out = std::to_string(scaled / scale);
  if (digits > 0) {
    std::string frac = std::to_string(scaled % scale);
    out += "." + std::string(static_cast<std::size_t>(digits) - frac.size(), '0') + frac;
  }
  return out;
}

void RcphParams::validate() const {
  if (p.num == 0 || p.den == 0 || p.num > p.den) {
    throw std::invalid_argument("p must satisfy 0 < p <= 1, got " + p.to_string());
  }
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (projection_size() < 1) {
    throw std::invalid_argument("floor(p*n) must be at least 1 (p=" + p.to_string() +
                                ", n=" + std::to_string(n) + ")");
  }
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (k < 1) throw std::invalid_argument("k must be at least 1");
}

void DistanceRecord::validate(std::uint32_t n) const {
  if (distances.empty()) throw std::invalid_argument("distance record has no anchors");
  for (auto d : distances) {
    if (d > n) {
      throw std::invalid_argument("distance " + std::to_string(d) + " exceeds n=" + std::to_string(n));
    }
  }
  if (correct_index && *correct_index >= distances.size()) {
    throw std::invalid_argument("correct index " + std::to_string(*correct_index) +
                                " out of range for k=" + std::to_string(distances.size()));
  }
}

DistanceRecord distance_record(const DiscreteEmbedding& query,
                               std::span<const DiscreteEmbedding> anchors,
                               std::optional<std::uint32_t> correct_index) {
  if (correct_index && *correct_index >= anchors.size()) {
    throw std::invalid_argument("correct index out of range");
  }
  DistanceRecord record;
  record.correct_index = correct_index;
  record.distances.reserve(anchors.size());
  for (const auto& a : anchors) {
    record.distances.push_back(static_cast<std::uint32_t>(hamming_distance(query, a)));
  }
  return record;
}

}  // namespace rcph
