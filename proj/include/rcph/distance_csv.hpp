#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rcph/core_model.hpp"

namespace rcph {

// One row per query: k integer distances followed by the correct class index
// (-1 when unknown). Blank lines and lines starting with '#' are ignored.
std::vector<DistanceRecord> parse_distance_csv(std::istream& in);
std::vector<DistanceRecord> read_distance_csv(const std::string& path);

void write_distance_csv(std::ostream& out, std::span<const DistanceRecord> records);

}  // namespace rcph
