#include "rcph/zkp.hpp"

#include <openssl/rand.h>

#include <stdexcept>

namespace rcph {

const GroupParams& GroupParams::standard() {
  static const GroupParams group = [] {
    GroupParams g;
    if (BN_get_rfc3526_prime_2048(g.modulus.get_mut()) == nullptr) {
      throw std::runtime_error("cannot load RFC 3526 2048-bit prime");
    }
    // q = (P - 1) / 2: P is odd, so a right shift suffices.
    BN_rshift1(g.order.get_mut(), g.modulus.get());
    g.generator = BigInt(2);
    return g;
  }();
  return group;
}

bool GroupParams::is_subgroup_element(const BigInt& x) const {
  if (x.is_zero() || x.is_one() || !(x < modulus)) return false;
  return x.kronecker(modulus) == 1;
}

Credentials derive_credentials(const DiscreteEmbedding& v) {
  Credentials c;
  c.secret = hash_embedding(v);
  c.public_id = chain_hash(c.secret);
  return c;
}

BigInt secret_exponent(const Digest& secret, const GroupParams& group) {
  return BigInt::from_bytes_be(secret.bytes).mod(group.order);
}

BigInt make_verifier(const Digest& secret, const GroupParams& group) {
  return group.generator.mod_exp(secret_exponent(secret, group), group.modulus);
}

Challenge random_challenge() {
  Challenge e{};
  if (RAND_bytes(e.data(), static_cast<int>(e.size())) != 1) throw std::runtime_error("RAND_bytes failed");
  return e;
}

ProverSession::ProverSession(const Digest& secret, const GroupParams& group)
    : group_(&group), secret_(secret_exponent(secret, group)) {
  BigInt r = BigInt::random_below(group.order);
  while (r.is_zero()) r = BigInt::random_below(group.order);
  commitment_ = group.generator.mod_exp(r, group.modulus);
  nonce_ = std::move(r);
}

BigInt ProverSession::respond(const Challenge& challenge) {
  if (!nonce_) throw std::logic_error("prover session already answered a challenge");
  const BigInt e = BigInt::from_bytes_be(challenge);
  BigInt z = nonce_->mod_add(e.mod_mul(secret_, group_->order), group_->order);
  nonce_.reset();
  return z;
}

bool verify(const UserRecord& record, const ProofTranscript& transcript, const GroupParams& group) {
  if (!group.is_subgroup_element(record.verifier)) return false;
  if (!group.is_subgroup_element(transcript.commitment)) return false;
  if (!(transcript.response < group.order)) return false;
  const BigInt e = BigInt::from_bytes_be(transcript.challenge);
  const BigInt lhs = group.generator.mod_exp(transcript.response, group.modulus);
  const BigInt rhs = transcript.commitment.mod_mul(record.verifier.mod_exp(e, group.modulus), group.modulus);
  return lhs == rhs;
}

VerifierSession::VerifierSession(UserRecord record, BigInt commitment, const GroupParams& group)
    : record_(std::move(record)), commitment_(std::move(commitment)), group_(&group),
      challenge_(random_challenge()) {
  if (!group.is_subgroup_element(commitment_)) {
    throw std::invalid_argument("commitment is not an element of the order-q subgroup");
  }
}

bool VerifierSession::finish(const BigInt& response) {
  if (used_) return false;
  used_ = true;
  return verify(record_, ProofTranscript{commitment_, challenge_, response}, *group_);
}

}  // namespace rcph
