#include "rcph/rcph_engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace rcph {

namespace {

constexpr std::uint64_t kKeyStream = 0x6b65792d73747265ULL;

// Each (seed, stream) pair gets its own generator, so iteration i never
// depends on how many draws earlier iterations consumed.
Rng iteration_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(stream ^ 0x5851f42d4c957f2dULL)));
}

SystemKey derive_system_key(std::uint64_t seed) {
  Rng rng = iteration_rng(seed, kKeyStream);
  SystemKey key{};
  for (std::size_t i = 0; i < key.size(); i += 8) {
    const std::uint64_t word = rng();
    for (std::size_t b = 0; b < 8; ++b) key[i + b] = static_cast<std::uint8_t>(word >> (8 * b));
  }
  return key;
}

std::vector<std::uint32_t> default_labels(std::size_t k) {
  std::vector<std::uint32_t> labels(k);
  for (std::size_t i = 0; i < k; ++i) labels[i] = static_cast<std::uint32_t>(i);
  return labels;
}

}  // namespace

PreprocessedIndex PreprocessedIndex::from_parts(RcphParams params, std::uint64_t seed,
                                                SystemKey system_key,
                                                std::vector<CoordinateCombination> combinations,
                                                std::vector<DigestTable> tables,
                                                std::vector<std::uint32_t> labels) {
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("index parameters: ") + e.what());
  }
  if (combinations.size() != params.m || tables.size() != params.m) {
    throw DataError("index must hold exactly m combinations and m tables");
  }
  if (labels.size() != params.k) throw DataError("index label table must have k entries");
  const std::uint32_t size = params.projection_size();
  for (std::size_t i = 0; i < params.m; ++i) {
    if (combinations[i].size() != size) throw DataError("combination has wrong size");
    if (!combinations[i].indices().empty() && combinations[i].indices().back() >= params.n) {
      throw DataError("combination index out of range");
    }
    if (tables[i].size() != params.k) throw DataError("digest table must have k distinct entries");
    std::vector<bool> seen(params.k, false);
    for (const auto& [digest, cls] : tables[i]) {
      if (cls >= params.k || seen[cls]) throw DataError("digest table class indices must be a permutation of 0..k-1");
      seen[cls] = true;
    }
  }
  PreprocessedIndex index;
  index.params_ = params;
  index.seed_ = seed;
  index.system_key_ = system_key;
  index.combinations_ = std::move(combinations);
  index.tables_ = std::move(tables);
  index.labels_ = std::move(labels);
  return index;
}

PreprocessedIndex preprocess(std::span<const DiscreteEmbedding> anchors, const RcphParams& params,
                             std::uint64_t seed, std::span<const std::uint32_t> labels) {
  params.validate();
  if (anchors.empty()) throw std::invalid_argument("preprocess needs at least one anchor");
  if (anchors.size() != params.k) {
    throw std::invalid_argument("params.k=" + std::to_string(params.k) + " but " +
                                std::to_string(anchors.size()) + " anchors given");
  }
  for (const auto& a : anchors) {
    if (a.size() != params.n) {
      throw std::invalid_argument("anchor dimension " + std::to_string(a.size()) +
                                  " does not match n=" + std::to_string(params.n));
    }
  }
  if (!labels.empty() && labels.size() != anchors.size()) {
    throw std::invalid_argument("label count must match anchor count");
  }

  PreprocessedIndex index;
  index.params_ = params;
  index.seed_ = seed;
  index.system_key_ = derive_system_key(seed);
  index.labels_ = labels.empty() ? default_labels(anchors.size())
                                 : std::vector<std::uint32_t>(labels.begin(), labels.end());
  index.combinations_.reserve(params.m);
  index.tables_.reserve(params.m);

  const std::uint32_t size = params.projection_size();
  for (std::uint32_t i = 0; i < params.m; ++i) {
    Rng rng = iteration_rng(seed, i);
    const HashFamilyKey key{index.system_key_, i};
    bool separated = false;
    for (int attempt = 0; attempt < kCollisionRetryCap && !separated; ++attempt) {
      if (attempt > 0) ++index.regenerations_;
      CoordinateCombination c = draw_combination(rng, params.n, size);
      DigestTable table;
      table.reserve(anchors.size());
      separated = true;
      for (std::uint32_t j = 0; j < anchors.size(); ++j) {
        if (!table.emplace(family_hash(key, project(anchors[j], c)), j).second) {
          separated = false;
          break;
        }
      }
      if (separated) {
        index.combinations_.push_back(std::move(c));
        index.tables_.push_back(std::move(table));
      }
    }
    if (!separated) {
      throw DegenerateAnchorsError("iteration " + std::to_string(i) + ": anchors still collide after " +
                                   std::to_string(kCollisionRetryCap) +
                                   " combination draws (identical or near-identical anchors)");
    }
  }
  return index;
}

MatchOutcome query(const PreprocessedIndex& index, const DiscreteEmbedding& x) {
  const RcphParams& params = index.params();
  if (x.size() != params.n) {
    throw std::invalid_argument("query dimension " + std::to_string(x.size()) +
                                " does not match n=" + std::to_string(params.n));
  }
  const auto combinations = index.combinations();
  const auto tables = index.tables();
  for (std::uint32_t i = 0; i < params.m; ++i) {
    const Digest d = family_hash({index.system_key(), i}, project(x, combinations[i]));
    if (auto it = tables[i].find(d); it != tables[i].end()) return Match{it->second, i + 1};
  }
  return Abstain{params.m};
}

Salt generate_salt(std::string owner, std::uint32_t n, Rng& rng) {
  Salt s{BitVector(n), std::move(owner)};
  std::bernoulli_distribution coin(0.5);
  for (std::uint32_t j = 0; j < n; ++j) {
    if (coin(rng)) s.bits.set(j, true);
  }
  return s;
}

DiscreteEmbedding apply_salt(const DiscreteEmbedding& v, const Salt& s) {
  if (v.size() != s.bits.size()) {
    throw std::invalid_argument("salt length " + std::to_string(s.bits.size()) +
                                " does not match embedding length " + std::to_string(v.size()));
  }
  return v ^ s.bits;
}

SaltedVerifier::SaltedVerifier(RcphParams params, std::uint64_t seed) : params_(params), seed_(seed) {
  params_.k = 1;
  params_.validate();
}

void SaltedVerifier::enroll(const std::string& user_id, const DiscreteEmbedding& v, Rng& salt_rng) {
  if (salts_.contains(user_id)) throw std::invalid_argument("user '" + user_id + "' is already enrolled");
  if (v.size() != params_.n) throw std::invalid_argument("embedding dimension does not match n");
  Salt salt = generate_salt(user_id, params_.n, salt_rng);
  const DiscreteEmbedding salted = apply_salt(v, salt);
  // Per-user index seed: mix the base seed with the user id's digest.
  const Digest id_digest = one_way_hash(std::span(reinterpret_cast<const std::uint8_t*>(user_id.data()), user_id.size()));
  std::uint64_t user_seed = seed_;
  for (std::size_t b = 0; b < 8; ++b) user_seed ^= std::uint64_t{id_digest.bytes[b]} << (8 * b);
  indexes_.emplace(user_id, preprocess(std::span(&salted, 1), params_, user_seed));
  salts_.emplace(user_id, std::move(salt));
}

MatchOutcome SaltedVerifier::query(const std::string& user_id, const DiscreteEmbedding& probe) const {
  const auto salt = salts_.find(user_id);
  if (salt == salts_.end()) throw std::out_of_range("unknown user '" + user_id + "'");
  return rcph::query(indexes_.at(user_id), apply_salt(probe, salt->second));
}

const PreprocessedIndex& SaltedVerifier::index_for(const std::string& user_id) const {
  const auto it = indexes_.find(user_id);
  if (it == indexes_.end()) throw std::out_of_range("unknown user '" + user_id + "'");
  return it->second;
}

}  // namespace rcph
