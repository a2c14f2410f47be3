#include "rcph/distance_csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace rcph {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

long long parse_int(std::string_view field, std::size_t line_no) {
  field = trim(field);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw DataError("distance matrix line " + std::to_string(line_no) + ": '" + std::string(field) +
                    "' is not an integer");
  }
  return value;
}

}  // namespace

std::vector<DistanceRecord> parse_distance_csv(std::istream& in) {
  std::vector<DistanceRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty() || row.front() == '#') continue;

    std::vector<long long> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      fields.push_back(parse_int(row.substr(start, comma - start), line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 2) {
      throw DataError("distance matrix line " + std::to_string(line_no) +
                      ": need at least one distance and a correct-index column");
    }
    DistanceRecord rec;
    for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
      if (fields[i] < 0 || fields[i] > 0xFFFFFFFFLL) {
        throw DataError("distance matrix line " + std::to_string(line_no) + ": negative distance");
      }
      rec.distances.push_back(static_cast<std::uint32_t>(fields[i]));
    }
    const long long idx = fields.back();
    if (idx >= 0) {
      if (static_cast<std::size_t>(idx) >= rec.distances.size()) {
        throw DataError("distance matrix line " + std::to_string(line_no) + ": correct index out of range");
      }
      rec.correct_index = static_cast<std::uint32_t>(idx);
    } else if (idx != -1) {
      throw DataError("distance matrix line " + std::to_string(line_no) + ": correct index must be >= -1");
    }
    if (!records.empty() && records.front().k() != rec.k()) {
      throw DataError("distance matrix line " + std::to_string(line_no) + ": row has " +
                      std::to_string(rec.k()) + " distances, expected " + std::to_string(records.front().k()));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<DistanceRecord> read_distance_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return parse_distance_csv(in);
}

void write_distance_csv(std::ostream& out, std::span<const DistanceRecord> records) {
  for (const auto& r : records) {
    for (auto d : r.distances) out << d << ',';
    out << (r.correct_index ? static_cast<long long>(*r.correct_index) : -1LL) << '\n';
  }
}

}  // namespace rcph
