#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rcph/core_model.hpp"
#include "rcph/projection_hash.hpp"

namespace rcph {

/// Redraws allowed per iteration index before preprocessing gives up.
inline constexpr int kCollisionRetryCap = 64;

/// Thrown when some iteration cannot separate two anchors within the retry cap,
/// which in practice means identical (or nearly identical) anchors.
class DegenerateAnchorsError : public DataError {
 public:
  using DataError::DataError;
};

using DigestTable = std::unordered_map<Digest, std::uint32_t, DigestHasher>;

/// Everything a deployed RCPH matcher stores: parameters, public combinations,
/// the hash-family key and per-iteration digest tables. Never holds anchor bits
/// or unhashed projections. Immutable once built.
class PreprocessedIndex {
 public:
  /// Validating constructor used by deserialization; throws DataError when the
  /// parts violate the index invariants.
  static PreprocessedIndex from_parts(RcphParams params, std::uint64_t seed, SystemKey system_key,
                                      std::vector<CoordinateCombination> combinations,
                                      std::vector<DigestTable> tables,
                                      std::vector<std::uint32_t> labels);

  const RcphParams& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const SystemKey& system_key() const noexcept { return system_key_; }
  std::span<const CoordinateCombination> combinations() const noexcept { return combinations_; }
  std::span<const DigestTable> tables() const noexcept { return tables_; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }
  /// Combination redraws performed while building (0 for loaded indexes).
  std::uint64_t regenerations() const noexcept { return regenerations_; }

  friend PreprocessedIndex preprocess(std::span<const DiscreteEmbedding> anchors,
                                      const RcphParams& params, std::uint64_t seed,
                                      std::span<const std::uint32_t> labels);

 private:
  PreprocessedIndex() = default;

  RcphParams params_;
  std::uint64_t seed_ = 0;
  SystemKey system_key_{};
  std::vector<CoordinateCombination> combinations_;
  std::vector<DigestTable> tables_;
  std::vector<std::uint32_t> labels_;
  std::uint64_t regenerations_ = 0;
};

/// Builds the index for k = anchors.size() anchors. params.k must equal the
/// anchor count. Labels default to 0..k-1. Deterministic in (anchors, params, seed);
/// each iteration's combination stream depends only on (seed, iteration), so
/// the first m' iterations of an index with m > m' coincide with the m' index.
PreprocessedIndex preprocess(std::span<const DiscreteEmbedding> anchors, const RcphParams& params,
                             std::uint64_t seed, std::span<const std::uint32_t> labels = {});

/// Runs RCPH: first digest hit wins, Abstain after m misses.
MatchOutcome query(const PreprocessedIndex& index, const DiscreteEmbedding& x);

struct Salt {
  BitVector bits;
  std::string owner;
};

Salt generate_salt(std::string owner, std::uint32_t n, Rng& rng);

/// Coordinate-wise addition mod 2; an involution.
DiscreteEmbedding apply_salt(const DiscreteEmbedding& v, const Salt& s);

/// Public per-user salts.
using SaltRegistry = std::map<std::string, Salt>;

/// ID + biometric verification: each user gets a single-anchor index over
/// their salted embedding, and a probe is salted with the claimed user's salt
/// before running RCPH against that one anchor.
///
/// Queries are safe to run concurrently; enroll needs exclusive access.
class SaltedVerifier {
 public:
  /// params.k is ignored (always 1 per user).
  SaltedVerifier(RcphParams params, std::uint64_t seed);

  /// Throws std::invalid_argument on duplicate user_id or wrong dimension.
  void enroll(const std::string& user_id, const DiscreteEmbedding& v, Rng& salt_rng);
  /// Throws std::out_of_range for an unknown user_id.
  MatchOutcome query(const std::string& user_id, const DiscreteEmbedding& probe) const;

  const SaltRegistry& salt_registry() const noexcept { return salts_; }
  const PreprocessedIndex& index_for(const std::string& user_id) const;

 private:
  RcphParams params_;
  std::uint64_t seed_;
  SaltRegistry salts_;
  std::map<std::string, PreprocessedIndex> indexes_;
};

}  // namespace rcph
