#pragma once

// Reference computations written independently of the library: direct subset
// enumeration, log-gamma binomials and explicit geometric sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "rcph/core_model.hpp"

namespace rcph::oracle {

struct Fraction {
  std::uint64_t num;
  std::uint64_t den;
};

/// Fraction of s-subsets of [0, n) disjoint from the first d coordinates,
/// counted by enumerating every subset as a bitmask.
inline Fraction enumerate_avoiding(unsigned n, unsigned d, unsigned s) {
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  const std::uint32_t blocked = (1U << d) - 1U;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (static_cast<unsigned>(__builtin_popcount(mask)) != s) continue;
    ++total;
    if ((mask & blocked) == 0) ++hits;
  }
  const std::uint64_t g = std::gcd(hits, total);
  return {hits / g, total / g};
}

inline long double log_binomial(long double n, long double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

/// C(n-d, s) / C(n, s) through log-gamma.
inline double avoid_probability(unsigned n, unsigned d, unsigned s) {
  if (d + s > n) return 0.0;
  return static_cast<double>(std::exp(log_binomial(n - d, s) - log_binomial(n, s)));
}

struct RowBounds {
  double accuracy;
  double fail;
  double complexity;
};

/// Accuracy, fail and complexity bounds for one record, summing the geometric
/// series term by term.
inline RowBounds row_bounds(const DistanceRecord& r, unsigned n, unsigned s, unsigned m) {
  std::vector<double> q;
  for (auto d : r.distances) q.push_back(avoid_probability(n, d, s));
  const double correct = q[*r.correct_index];
  double wrong = 0;
  double all = 0;
  double best = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    all += q[i];
    best = std::max(best, q[i]);
    if (i != *r.correct_index) wrong += q[i];
  }
  wrong = std::min(wrong, 1.0);
  const long double stay = 1.0L - std::min(all, 1.0);
  long double series = 0;
  long double term = 1;
  for (unsigned i = 0; i < m; ++i) {
    series += term;
    term *= stay;
  }
  const double g = static_cast<double>(series);
  RowBounds out;
  out.accuracy = std::clamp(std::max(0.0, correct - wrong) * g, 0.0, 1.0);
  out.fail = std::clamp(wrong * g, 0.0, 1.0);
  out.complexity = best > 0 ? std::min(1.0 / best, static_cast<double>(m)) : m;
  return out;
}

}  // namespace rcph::oracle
