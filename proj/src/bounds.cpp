#include "rcph/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace rcph {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void check_ratio_args(std::uint32_t n, std::uint32_t d, std::uint32_t s) {
  if (d > n) throw std::invalid_argument("hyper_ratio: distance " + std::to_string(d) + " exceeds n=" + std::to_string(n));
  if (s < 1 || s > n) throw std::invalid_argument("hyper_ratio: projection size must lie in [1, n]");
}

}  // namespace

double hyper_ratio(std::uint32_t n, std::uint32_t d, std::uint32_t s) {
  check_ratio_args(n, d, s);
  if (d > n - s) return 0.0;
  long double ratio = 1.0L;
  for (std::uint32_t j = 0; j < d; ++j) {
    ratio *= static_cast<long double>(n - s - j) / static_cast<long double>(n - j);
  }
  // Subnormal doubles cannot keep strictly decreasing in d; flush them to zero.
  if (ratio < static_cast<long double>(std::numeric_limits<double>::min())) return 0.0;
  return static_cast<double>(ratio);
}

ExactRatio hyper_ratio_exact(std::uint32_t n, std::uint32_t d, std::uint32_t s) {
  check_ratio_args(n, d, s);
  if (n > 60) throw std::invalid_argument("hyper_ratio_exact supports n <= 60");
  if (d > n - s) return {0, 1};
  std::uint64_t num = 1;
  std::uint64_t den = 1;
  for (std::uint32_t j = 0; j < d; ++j) {
    std::uint64_t a = n - s - j;
    std::uint64_t b = n - j;
    const std::uint64_t g1 = std::gcd(a, den);
    const std::uint64_t g2 = std::gcd(b, num);
    a /= g1;
    den /= g1;
    b /= g2;
    num /= g2;
    num *= a;
    den *= b;
  }
  const std::uint64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

EventProbabilities event_probs(const DistanceRecord& record, const RcphParams& params) {
  params.validate();
  record.validate(params.n);
  if (!record.correct_index) throw std::invalid_argument("event_probs needs a record with a correct index");
  if (record.k() != params.k) {
    throw std::invalid_argument("record has " + std::to_string(record.k()) + " distances but k=" +
                                std::to_string(params.k));
  }
  const std::uint32_t s = params.projection_size();
  const std::uint32_t y = *record.correct_index;

  EventProbabilities ev;
  double total = 0.0;
  double wrong_sum = 0.0;
  for (std::uint32_t i = 0; i < record.k(); ++i) {
    const double r = hyper_ratio(params.n, record.distances[i], s);
    total += r;
    ev.lambda = std::max(ev.lambda, r);
    if (i == y) {
      ev.pr_correct = r;
    } else {
      wrong_sum += r;
      ev.pr_wrong_lower = std::max(ev.pr_wrong_lower, r);
    }
  }
  ev.pr_wrong_upper = clamp01(wrong_sum);
  ev.match_mass = clamp01(total);
  ev.pr_nomatch_lower = 1.0 - ev.match_mass;
  ev.pr_nomatch_upper = 1.0 - ev.lambda;
  ev.pr_single_correct_lower = clamp01(ev.pr_correct - ev.pr_wrong_upper);
  return ev;
}

double geometric_multiplier(double match_mass, std::uint32_t m) {
  if (match_mass <= 0.0) return static_cast<double>(m);
  if (match_mass >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(m) * std::log1p(-match_mass)) / match_mass;
}

PerformanceBounds performance_bounds(const DistanceRecord& record, const RcphParams& params) {
  const EventProbabilities ev = event_probs(record, params);
  const double g = geometric_multiplier(ev.match_mass, params.m);
  PerformanceBounds b;
  b.accuracy_lower = clamp01(ev.pr_single_correct_lower * g);
  b.fail_upper = clamp01(ev.pr_wrong_upper * g);
  const double m = static_cast<double>(params.m);
  b.expected_iterations_upper = ev.lambda > 0.0 ? std::min(1.0 / ev.lambda, m) : m;
  return b;
}

PerformanceBounds aggregate(std::span<const DistanceRecord> records, const RcphParams& params) {
  if (records.empty()) throw std::invalid_argument("aggregate needs at least one record");
  PerformanceBounds mean;
  for (const auto& r : records) {
    const PerformanceBounds b = performance_bounds(r, params);
    mean.accuracy_lower += b.accuracy_lower;
    mean.fail_upper += b.fail_upper;
    mean.expected_iterations_upper += b.expected_iterations_upper;
  }
  const double count = static_cast<double>(records.size());
  mean.accuracy_lower /= count;
  mean.fail_upper /= count;
  mean.expected_iterations_upper /= count;
  return mean;
}

std::vector<Rational> default_p_grid() {
  std::vector<Rational> grid;
  for (std::uint32_t i = 1; i <= 50; ++i) grid.push_back(Rational::make(i, 100));
  return grid;
}

BestP best_p(std::span<const DistanceRecord> records, std::uint32_t m, std::uint32_t n,
             std::span<const Rational> p_grid) {
  if (records.empty()) throw std::invalid_argument("best_p needs at least one record");
  if (p_grid.empty()) throw std::invalid_argument("best_p needs a non-empty p grid");
  const auto k = static_cast<std::uint32_t>(records.front().k());
  std::optional<BestP> best;
  for (const Rational& p : p_grid) {
    const RcphParams params{p, m, n, k};
    const PerformanceBounds b = aggregate(records, params);
    if (!best || b.accuracy_lower > best->bounds.accuracy_lower ||
        (b.accuracy_lower == best->bounds.accuracy_lower && best->p < p)) {
      best = BestP{p, b};
    }
  }
  return *best;
}

}  // namespace rcph
