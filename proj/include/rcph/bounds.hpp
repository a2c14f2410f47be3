#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rcph/core_model.hpp"

namespace rcph {

/// Single-iteration probability that a random size-s subset of [0, n) avoids
/// d fixed coordinates: C(n-d, s) / C(n, s), via the telescoping product
/// prod_{j<d} (n-s-j)/(n-j). Zero once d > n-s, and for results below the
/// smallest normal double.
/// Throws std::invalid_argument unless d <= n and 1 <= s <= n.
double hyper_ratio(std::uint32_t n, std::uint32_t d, std::uint32_t s);

struct ExactRatio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  friend bool operator==(const ExactRatio&, const ExactRatio&) = default;
};

/// Reduced-fraction form of hyper_ratio for small n (n <= 60).
ExactRatio hyper_ratio_exact(std::uint32_t n, std::uint32_t d, std::uint32_t s);

/// Per-iteration event probabilities for one query.
struct EventProbabilities {
  double pr_correct = 0;               // correct anchor matches
  double pr_wrong_lower = 0;           // max over wrong anchors
  double pr_wrong_upper = 0;           // union bound over wrong anchors
  double pr_nomatch_lower = 0;         // max(0, 1 - sum over all anchors)
  double pr_nomatch_upper = 0;         // 1 - max over all anchors
  double pr_single_correct_lower = 0;  // max(0, pr_correct - pr_wrong_upper)
  double lambda = 0;                   // max over all anchors
  double match_mass = 0;               // min(1, sum over all anchors) = 1 - pr_nomatch_lower
};

struct PerformanceBounds {
  double accuracy_lower = 0;
  double fail_upper = 0;
  double expected_iterations_upper = 0;
};

/// Requires record.correct_index and record.k() == params.k.
EventProbabilities event_probs(const DistanceRecord& record, const RcphParams& params);

/// (1 - q^m) / (1 - q) written in terms of the per-iteration match mass
/// x = 1 - q, evaluated as -expm1(m log1p(-x)) / x. Equals m at x = 0.
double geometric_multiplier(double match_mass, std::uint32_t m);

/// Accuracy lower bound, fail upper bound and expected-iteration upper bound
/// for one query. Both probability bounds share the multiplier evaluated at
/// the no-match lower bound.
PerformanceBounds performance_bounds(const DistanceRecord& record, const RcphParams& params);

/// Arithmetic mean of the per-record bounds. Records must share k.
PerformanceBounds aggregate(std::span<const DistanceRecord> records, const RcphParams& params);

/// {0.01, 0.02, ..., 0.50}.
std::vector<Rational> default_p_grid();

struct BestP {
  Rational p;
  PerformanceBounds bounds;
};

/// Grid point maximizing mean accuracy_lower; ties go to the larger p.
BestP best_p(std::span<const DistanceRecord> records, std::uint32_t m, std::uint32_t n,
             std::span<const Rational> p_grid);

}  // namespace rcph
