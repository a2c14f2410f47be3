#include "rcph/projection_hash.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <memory>
#include <stdexcept>


namespace rcph {

namespace {

constexpr std::string_view kFamilyTag = "RCPH/h_i/v1";

// One reusable digest context per thread; the one-shot SHA256() call looks up
// the algorithm on every invocation, which dominates for short inputs.
class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_) throw std::bad_alloc();
  }
  void begin() {
    if (EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 init failed");
  }
  void update(const void* data, std::size_t size) {
    if (EVP_DigestUpdate(ctx_.get(), data, size) != 1) throw std::runtime_error("SHA-256 update failed");
  }
  Digest finish() {
    Digest d;
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), d.bytes.data(), &len) != 1 || len != d.bytes.size()) {
      throw std::runtime_error("SHA-256 final failed");
    }
    return d;
  }

 private:
  struct Free {
    void operator()(EVP_MD_CTX* c) const noexcept { EVP_MD_CTX_free(c); }
  };
  std::unique_ptr<EVP_MD_CTX, Free> ctx_;
};

Sha256& thread_sha() {
  thread_local Sha256 sha;
  return sha;
}

// Uniform integer in [0, range) by Lemire's multiply-and-reject method.
std::uint32_t bounded(Rng& rng, std::uint32_t range) {
  std::uint64_t x = rng() >> 32;
  std::uint64_t product = x * range;
  auto low = static_cast<std::uint32_t>(product);
  if (low < range) {
    const std::uint32_t threshold = static_cast<std::uint32_t>(-range) % range;
    while (low < threshold) {
      x = rng() >> 32;
      product = x * range;
      low = static_cast<std::uint32_t>(product);
    }
  }
  return static_cast<std::uint32_t>(product >> 32);
}

void update_u32(Sha256& sha, std::uint32_t v) {
  const std::uint8_t le[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                              static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
  sha.update(le, sizeof le);
}

}  // namespace

std::string Digest::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

Digest Digest::from_hex(const std::string& hex) {
  if (hex.size() != 64) throw std::invalid_argument("digest hex must be 64 characters");
  auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw std::invalid_argument("invalid hex digit");
  };
  Digest d;
  for (std::size_t i = 0; i < 32; ++i) {
    d.bytes[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return d;
}

CoordinateCombination::CoordinateCombination(std::vector<std::uint32_t> indices, std::uint32_t n)
    : indices_(std::move(indices)) {
  for (std::size_t t = 0; t < indices_.size(); ++t) {
    if (indices_[t] >= n) throw std::invalid_argument("combination index out of range");
    if (t > 0 && indices_[t] <= indices_[t - 1]) {
      throw std::invalid_argument("combination indices must be strictly increasing");
    }
  }
}

CoordinateCombination draw_combination(Rng& rng, std::uint32_t n, std::uint32_t size) {
  if (size == 0 || size > n) {
    throw std::invalid_argument("combination size " + std::to_string(size) +
                                " must lie in [1, " + std::to_string(n) + "]");
  }
  BitVector chosen(n);
  for (std::uint32_t j = n - size; j < n; ++j) {
    const std::uint32_t t = bounded(rng, j + 1);
    chosen.set(chosen.test(t) ? j : t, true);
  }
  std::vector<std::uint32_t> indices;
  indices.reserve(size);
  const auto words = chosen.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (std::uint64_t bits = words[w]; bits != 0; bits &= bits - 1) {
      indices.push_back(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
    }
  }
  return CoordinateCombination(std::move(indices), n);
}

BitVector project(const BitVector& v, const CoordinateCombination& c) {
  const auto idx = c.indices();
  if (!idx.empty() && idx.back() >= v.size()) {
    throw std::invalid_argument("projection index " + std::to_string(idx.back()) +
                                " out of range for n=" + std::to_string(v.size()));
  }
  const auto src = v.words();
  std::vector<std::uint64_t> words((idx.size() + 63) / 64, 0);
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::size_t end = std::min(idx.size(), 64 * (w + 1));
    std::uint64_t acc = 0;
    for (std::size_t t = 64 * w; t < end; ++t) {
      acc |= ((src[idx[t] >> 6] >> (idx[t] & 63)) & 1U) << (t & 63);
    }
    words[w] = acc;
  }
  return BitVector::from_words(std::move(words), idx.size());
}

Digest one_way_hash(std::span<const std::uint8_t> data) {
  Sha256& sha = thread_sha();
  sha.begin();
  sha.update(data.data(), data.size());
  return sha.finish();
}

Digest hash_embedding(const BitVector& v) { return one_way_hash(v.to_bytes()); }

Digest chain_hash(const Digest& d) { return one_way_hash(d.bytes); }

Digest family_hash(const HashFamilyKey& key, const BitVector& projected_bits) {
  Sha256& sha = thread_sha();
  sha.begin();
  sha.update(kFamilyTag.data(), kFamilyTag.size());
  sha.update(key.system_key.data(), key.system_key.size());
  update_u32(sha, key.iteration_index);
  update_u32(sha, static_cast<std::uint32_t>(projected_bits.size()));
  const std::size_t packed = (projected_bits.size() + 7) / 8;
  if constexpr (std::endian::native == std::endian::little) {
    // The word array already is the canonical byte layout on little-endian hosts.
    sha.update(projected_bits.words().data(), packed);
  } else {
    const auto bytes = projected_bits.to_bytes();
    sha.update(bytes.data(), bytes.size());
  }
  return sha.finish();
}

}  // namespace rcph
