#pragma once

#include <openssl/bn.h>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rcph {

/// Owning wrapper over an OpenSSL BIGNUM with value semantics.
class BigInt {
 public:
  BigInt();
  explicit BigInt(std::uint64_t value);
  BigInt(const BigInt& other);
  BigInt& operator=(const BigInt& other);
  BigInt(BigInt&&) noexcept = default;
  BigInt& operator=(BigInt&&) noexcept = default;
  ~BigInt() = default;

  static BigInt from_bytes_be(std::span<const std::uint8_t> bytes);
  static BigInt from_hex(const std::string& hex);
  /// Uniform in [0, bound) from the OpenSSL CSPRNG.
  static BigInt random_below(const BigInt& bound);

  /// Minimal big-endian encoding (empty for zero).
  std::vector<std::uint8_t> to_bytes_be() const;
  std::string to_hex() const;
  bool is_zero() const;
  bool is_one() const;
  int num_bits() const;

  BigInt mod(const BigInt& modulus) const;
  BigInt mod_add(const BigInt& other, const BigInt& modulus) const;
  BigInt mod_mul(const BigInt& other, const BigInt& modulus) const;
  BigInt mod_exp(const BigInt& exponent, const BigInt& modulus) const;
  /// Kronecker symbol (this | modulus).
  int kronecker(const BigInt& modulus) const;

  friend bool operator==(const BigInt& a, const BigInt& b);
  friend bool operator<(const BigInt& a, const BigInt& b);

  const BIGNUM* get() const noexcept { return bn_.get(); }
  BIGNUM* get_mut() noexcept { return bn_.get(); }

 private:
  struct Free {
    void operator()(BIGNUM* p) const noexcept { BN_clear_free(p); }
  };
  explicit BigInt(BIGNUM* owned) : bn_(owned) {}
  std::unique_ptr<BIGNUM, Free> bn_;
};

}  // namespace rcph
