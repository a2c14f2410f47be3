#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcph/rcph_engine.hpp"

namespace rcph {

// Layout: "RCPH", version u16 = 1, n u32, k u32, m u32, p as num u32 / den u32,
// seed u64, system key 32 bytes, m combination blocks (length u32 + sorted u32
// indices), m table blocks (k entries of 32-byte digest + u32 class index,
// sorted by class index), label table (k u32). Little-endian throughout.
std::vector<std::uint8_t> encode_index(const PreprocessedIndex& index);
PreprocessedIndex decode_index(std::span<const std::uint8_t> data);

void write_index(const std::string& path, const PreprocessedIndex& index);
PreprocessedIndex read_index(const std::string& path);

}  // namespace rcph
