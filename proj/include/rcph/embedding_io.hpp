#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcph/core_model.hpp"

namespace rcph {

struct LabeledEmbedding {
  std::uint32_t label = 0;
  DiscreteEmbedding bits;
  friend bool operator==(const LabeledEmbedding&, const LabeledEmbedding&) = default;
};

/// Contents of a "DEMB" embedding file: every record has the same dimension n.
struct EmbeddingSet {
  std::uint32_t n = kDefaultDimension;
  std::vector<LabeledEmbedding> records;

  std::vector<DiscreteEmbedding> embeddings() const;
};

// Layout: "DEMB", version u16 = 1, n u32, record_count u32, then per record
// label u32 followed by ceil(n/8) packed bytes. Little-endian throughout.
std::vector<std::uint8_t> encode_embeddings(const EmbeddingSet& set);
EmbeddingSet decode_embeddings(std::span<const std::uint8_t> data);

void write_embeddings(const std::string& path, const EmbeddingSet& set);
EmbeddingSet read_embeddings(const std::string& path);

}  // namespace rcph
