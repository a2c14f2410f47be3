#include "rcph/sim_lab.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "rcph/projection_hash.hpp"
#include "rcph/rcph_engine.hpp"

namespace rcph {

namespace {

struct Tally {
  std::uint64_t correct = 0;
  std::uint64_t wrong = 0;
  std::uint64_t abstain = 0;
  std::uint64_t iterations = 0;
  long double iterations_sq = 0;

  void merge(const Tally& o) {
    correct += o.correct;
    wrong += o.wrong;
    abstain += o.abstain;
    iterations += o.iterations;
    iterations_sq += o.iterations_sq;
  }
};

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(splitmix64(seed) ^ (trial * 0xd1b54a32d192ed03ULL));
}

SyntheticFixture synth_fixture(const DistanceRecord& record, std::uint32_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("fixture dimension must be positive");
  if (!record.correct_index) throw std::invalid_argument("fixture needs a record with a correct index");
  record.validate(n);

  Rng rng(seed);
  SyntheticFixture fx;
  fx.seed = seed;
  fx.record = record;
  fx.query = BitVector(n);
  std::bernoulli_distribution coin(0.5);
  for (std::uint32_t j = 0; j < n; ++j) {
    if (coin(rng)) fx.query.set(j, true);
  }
  fx.anchors.reserve(record.k());
  for (std::uint32_t d : record.distances) {
    BitVector anchor = fx.query;
    if (d > 0) {
      const CoordinateCombination flips = draw_combination(rng, n, d);
      for (std::uint32_t j : flips.indices()) anchor.flip(j);
    }
    fx.anchors.push_back(std::move(anchor));
  }
  return fx;
}

EmbeddingSet fixture_to_embeddings(const SyntheticFixture& fixture) {
  EmbeddingSet set;
  set.n = static_cast<std::uint32_t>(fixture.query.size());
  for (std::uint32_t i = 0; i < fixture.anchors.size(); ++i) set.records.push_back({i, fixture.anchors[i]});
  set.records.push_back({fixture.record.correct_index.value_or(0), fixture.query});
  return set;
}

SyntheticFixture fixture_from_embeddings(const EmbeddingSet& set) {
  if (set.records.size() < 2) throw DataError("fixture file needs at least one anchor and a query");
  SyntheticFixture fx;
  for (std::size_t i = 0; i + 1 < set.records.size(); ++i) {
    if (set.records[i].label != i) throw DataError("fixture anchors must be labeled 0..k-1 in order");
    fx.anchors.push_back(set.records[i].bits);
  }
  fx.query = set.records.back().bits;
  const std::uint32_t correct = set.records.back().label;
  if (correct >= fx.anchors.size()) throw DataError("fixture query label is not a valid class index");
  fx.record = distance_record(fx.query, fx.anchors, correct);
  return fx;
}

EmpiricalStats monte_carlo(const SyntheticFixture& fixture, const RcphParams& params,
                           std::uint64_t trials, std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw std::invalid_argument("monte_carlo needs at least one trial");
  if (!fixture.record.correct_index) throw std::invalid_argument("fixture has no correct index");
  RcphParams p = params;
  p.k = static_cast<std::uint32_t>(fixture.anchors.size());
  p.validate();
  const std::uint32_t correct_index = *fixture.record.correct_index;

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));

  auto run_range = [&](std::uint64_t begin, std::uint64_t end, Tally& tally) {
    for (std::uint64_t t = begin; t < end; ++t) {
      const PreprocessedIndex index = preprocess(fixture.anchors, p, trial_seed(seed, t));
      const MatchOutcome outcome = query(index, fixture.query);
      const std::uint32_t used = iterations_used(outcome);
      tally.iterations += used;
      tally.iterations_sq += static_cast<long double>(used) * used;
      if (const auto* match = std::get_if<Match>(&outcome)) {
        (match->class_index == correct_index ? tally.correct : tally.wrong) += 1;
      } else {
        tally.abstain += 1;
      }
    }
  };

  std::vector<Tally> tallies(threads);
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t begin = trials * w / threads;
      const std::uint64_t end = trials * (w + 1) / threads;
      workers.emplace_back([&, w, begin, end] {
        try {
          run_range(begin, end, tallies[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Tally total;
  for (const auto& t : tallies) total.merge(t);

  EmpiricalStats stats;
  const double n = static_cast<double>(trials);
  stats.trials = trials;
  stats.correct = total.correct;
  stats.wrong = total.wrong;
  stats.abstain = total.abstain;
  stats.correct_rate = static_cast<double>(total.correct) / n;
  stats.wrong_rate = static_cast<double>(total.wrong) / n;
  stats.abstain_rate = static_cast<double>(total.abstain) / n;
  auto se = [n](double r) { return std::sqrt(r * (1.0 - r) / n); };
  stats.correct_se = se(stats.correct_rate);
  stats.wrong_se = se(stats.wrong_rate);
  stats.abstain_se = se(stats.abstain_rate);
  stats.mean_iterations = static_cast<double>(total.iterations) / n;
  if (trials > 1) {
    const long double mean = static_cast<long double>(total.iterations) / trials;
    const long double var = (total.iterations_sq - trials * mean * mean) / (trials - 1);
    stats.iterations_se = std::sqrt(static_cast<double>(std::max(var, 0.0L)) / n);
  }
  return stats;
}

std::vector<SweepRow> sweep(std::span<const DistanceRecord> records, std::uint32_t n,
                            std::span<const Rational> p_grid, std::span<const std::uint32_t> m_grid) {
  if (records.empty()) throw std::invalid_argument("sweep needs at least one record");
  if (p_grid.empty() || m_grid.empty()) throw std::invalid_argument("sweep needs non-empty p and m grids");
  const auto k = static_cast<std::uint32_t>(records.front().k());
  std::vector<SweepRow> rows;
  rows.reserve(p_grid.size() * m_grid.size());
  for (const Rational& p : p_grid) {
    for (std::uint32_t m : m_grid) {
      rows.push_back({p, m, aggregate(records, RcphParams{p, m, n, k})});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "p,m,accuracy,fail,complexity\n";
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.p.to_string() << ',' << r.m << ',' << r.bounds.accuracy_lower << ',' << r.bounds.fail_upper
        << ',' << r.bounds.expected_iterations_upper << '\n';
  }
  out.flags(old_flags);
  out.precision(old_precision);
}

}  // namespace rcph
