#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rcph/bounds.hpp"
#include "rcph/core_model.hpp"
#include "rcph/embedding_io.hpp"

namespace rcph {

/// Concrete vectors realizing one distance row exactly.
struct SyntheticFixture {
  std::vector<DiscreteEmbedding> anchors;
  DiscreteEmbedding query;
  DistanceRecord record;
  std::uint64_t seed = 0;
};

/// Uniform random query; anchor i flips exactly record.distances[i] distinct,
/// uniformly chosen coordinates of the query (independently per anchor).
SyntheticFixture synth_fixture(const DistanceRecord& record, std::uint32_t n, std::uint64_t seed);

/// Fixture files are DEMB sets: anchors 0..k-1 labeled by class index, then the
/// query labeled with the correct index.
EmbeddingSet fixture_to_embeddings(const SyntheticFixture& fixture);
SyntheticFixture fixture_from_embeddings(const EmbeddingSet& set);

struct EmpiricalStats {
  std::uint64_t trials = 0;
  std::uint64_t correct = 0;
  std::uint64_t wrong = 0;
  std::uint64_t abstain = 0;
  double correct_rate = 0;
  double wrong_rate = 0;
  double abstain_rate = 0;
  double mean_iterations = 0;
  // Binomial standard errors of the rates; standard error of the mean for iterations.
  double correct_se = 0;
  double wrong_se = 0;
  double abstain_se = 0;
  double iterations_se = 0;

  friend bool operator==(const EmpiricalStats&, const EmpiricalStats&) = default;
};

/// Independent preprocess + query per trial; trial t uses a seed derived from
/// (seed, t) only, so results do not depend on the thread count.
/// threads == 0 picks std::thread::hardware_concurrency().
EmpiricalStats monte_carlo(const SyntheticFixture& fixture, const RcphParams& params,
                           std::uint64_t trials, std::uint64_t seed, unsigned threads = 0);

/// Seed of trial t under the splittable counter scheme.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

struct SweepRow {
  Rational p;
  std::uint32_t m = 0;
  PerformanceBounds bounds;
};

/// One row per (p, m), p-major, each the aggregate over records.
std::vector<SweepRow> sweep(std::span<const DistanceRecord> records, std::uint32_t n,
                            std::span<const Rational> p_grid, std::span<const std::uint32_t> m_grid);

/// CSV with header p,m,accuracy,fail,complexity.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace rcph
