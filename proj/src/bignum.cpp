#include "rcph/bignum.hpp"

#include <openssl/crypto.h>

#include <stdexcept>

namespace rcph {

namespace {

struct CtxFree {
  void operator()(BN_CTX* c) const noexcept { BN_CTX_free(c); }
};

BN_CTX* thread_ctx() {
  thread_local std::unique_ptr<BN_CTX, CtxFree> ctx(BN_CTX_new());
  if (!ctx) throw std::runtime_error("BN_CTX_new failed");
  return ctx.get();
}

BIGNUM* fresh() {
  BIGNUM* bn = BN_new();
  if (bn == nullptr) throw std::bad_alloc();
  return bn;
}

void check(int ok, const char* what) {
  if (ok != 1) throw std::runtime_error(std::string("OpenSSL bignum failure: ") + what);
}

}  // namespace

BigInt::BigInt() : bn_(fresh()) {}

BigInt::BigInt(std::uint64_t value) : bn_(fresh()) {
  // BN_set_word takes BN_ULONG, which is 64-bit on the supported targets.
  check(BN_set_word(bn_.get(), static_cast<BN_ULONG>(value)), "BN_set_word");
}

BigInt::BigInt(const BigInt& other) : bn_(BN_dup(other.bn_.get())) {
  if (!bn_) throw std::bad_alloc();
}

BigInt& BigInt::operator=(const BigInt& other) {
  if (this != &other) {
    if (BN_copy(bn_.get(), other.bn_.get()) == nullptr) throw std::bad_alloc();
  }
  return *this;
}

BigInt BigInt::from_bytes_be(std::span<const std::uint8_t> bytes) {
  BIGNUM* bn = BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr);
  if (bn == nullptr) throw std::bad_alloc();
  return BigInt(bn);
}

BigInt BigInt::from_hex(const std::string& hex) {
  BIGNUM* bn = nullptr;
  if (BN_hex2bn(&bn, hex.c_str()) == 0) throw std::invalid_argument("invalid hex big integer");
  return BigInt(bn);
}

BigInt BigInt::random_below(const BigInt& bound) {
  BigInt out;
  check(BN_rand_range(out.bn_.get(), bound.bn_.get()), "BN_rand_range");
  return out;
}

std::vector<std::uint8_t> BigInt::to_bytes_be() const {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(BN_num_bytes(bn_.get())));
  BN_bn2bin(bn_.get(), out.data());
  return out;
}

std::string BigInt::to_hex() const {
  char* s = BN_bn2hex(bn_.get());
  if (s == nullptr) throw std::bad_alloc();
  std::string out(s);
  OPENSSL_free(s);
  return out;
}

bool BigInt::is_zero() const { return BN_is_zero(bn_.get()) == 1; }
bool BigInt::is_one() const { return BN_is_one(bn_.get()) == 1; }
int BigInt::num_bits() const { return BN_num_bits(bn_.get()); }

BigInt BigInt::mod(const BigInt& modulus) const {
  BigInt out;
  check(BN_nnmod(out.bn_.get(), bn_.get(), modulus.bn_.get(), thread_ctx()), "BN_nnmod");
  return out;
}

BigInt BigInt::mod_add(const BigInt& other, const BigInt& modulus) const {
  BigInt out;
  check(BN_mod_add(out.bn_.get(), bn_.get(), other.bn_.get(), modulus.bn_.get(), thread_ctx()), "BN_mod_add");
  return out;
}

BigInt BigInt::mod_mul(const BigInt& other, const BigInt& modulus) const {
  BigInt out;
  check(BN_mod_mul(out.bn_.get(), bn_.get(), other.bn_.get(), modulus.bn_.get(), thread_ctx()), "BN_mod_mul");
  return out;
}

BigInt BigInt::mod_exp(const BigInt& exponent, const BigInt& modulus) const {
  BigInt out;
  check(BN_mod_exp(out.bn_.get(), bn_.get(), exponent.bn_.get(), modulus.bn_.get(), thread_ctx()), "BN_mod_exp");
  return out;
}

int BigInt::kronecker(const BigInt& modulus) const {
  const int k = BN_kronecker(bn_.get(), modulus.bn_.get(), thread_ctx());
  if (k == -2) throw std::runtime_error("OpenSSL bignum failure: BN_kronecker");
  return k;
}

bool operator==(const BigInt& a, const BigInt& b) { return BN_cmp(a.bn_.get(), b.bn_.get()) == 0; }
bool operator<(const BigInt& a, const BigInt& b) { return BN_cmp(a.bn_.get(), b.bn_.get()) < 0; }

}  // namespace rcph
