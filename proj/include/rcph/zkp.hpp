#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "rcph/bignum.hpp"
#include "rcph/core_model.hpp"
#include "rcph/projection_hash.hpp"

namespace rcph {

/// Safe-prime group: P = 2q + 1, g generating the order-q subgroup.
struct GroupParams {
  BigInt modulus;    // P
  BigInt order;      // q = (P - 1) / 2
  BigInt generator;  // g

  /// The 2048-bit MODP group (RFC 3526 group 14) with g = 2.
  static const GroupParams& standard();

  /// Membership in the order-q subgroup, excluding the identity:
  /// 1 < x < P and (x | P) = 1, which for a safe prime is x^q = 1.
  bool is_subgroup_element(const BigInt& x) const;
};

/// Secret h(v) and public identity h(h(v)) derived from an embedding.
struct Credentials {
  Digest public_id;
  Digest secret;
};

Credentials derive_credentials(const DiscreteEmbedding& v);

/// Secret digest interpreted as a big-endian integer, reduced mod q.
BigInt secret_exponent(const Digest& secret, const GroupParams& group);

/// V = g^s mod P.
BigInt make_verifier(const Digest& secret, const GroupParams& group);

/// What the server stores per user: no secret, no embedding.
struct UserRecord {
  Digest public_id;
  BigInt verifier;
};

inline constexpr std::size_t kChallengeBytes = 16;
using Challenge = std::array<std::uint8_t, kChallengeBytes>;

Challenge random_challenge();

struct ProofTranscript {
  BigInt commitment;  // t = g^r
  Challenge challenge{};
  BigInt response;    // z = r + e s mod q
};

/// Prover side of the three-move proof of knowledge of log_g V.
/// A fresh nonce r is drawn from the CSPRNG for every session; respond() may be
/// called once.
class ProverSession {
 public:
  ProverSession(const Digest& secret, const GroupParams& group);

  const BigInt& commitment() const noexcept { return commitment_; }
  BigInt respond(const Challenge& challenge);

 private:
  const GroupParams* group_;
  BigInt secret_;
  std::optional<BigInt> nonce_;
  BigInt commitment_;
};

/// Accepts iff g^z == t * V^e (mod P), t and V are subgroup elements and
/// 0 <= z < q.
bool verify(const UserRecord& record, const ProofTranscript& transcript, const GroupParams& group);

/// Verifier side of one login: the challenge is fixed at construction and
/// the session accepts at most one response.
class VerifierSession {
 public:
  /// Throws std::invalid_argument if the commitment is not a subgroup element.
  VerifierSession(UserRecord record, BigInt commitment, const GroupParams& group);

  const Challenge& challenge() const noexcept { return challenge_; }
  /// A second call always returns false.
  bool finish(const BigInt& response);

 private:
  UserRecord record_;
  BigInt commitment_;
  const GroupParams* group_;
  Challenge challenge_;
  bool used_ = false;
};

}  // namespace rcph
