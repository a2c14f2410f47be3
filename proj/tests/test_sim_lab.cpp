#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracle.hpp"
#include "rcph/sim_lab.hpp"
#include "test_support.hpp"

using namespace rcph;
using rcph::testing::example_rows;

TEST_CASE("synthetic fixtures realize the requested distances") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    for (const auto& row : example_rows()) {
      const auto fx = synth_fixture(row, 1024, seed);
      REQUIRE(fx.anchors.size() == row.k());
      CHECK(fx.query.size() == 1024);
      CHECK(distance_record(fx.query, fx.anchors, row.correct_index).distances == row.distances);
      CHECK(fx.record.distances == row.distances);
    }
  }
  const auto zero = synth_fixture(DistanceRecord{{0}, 0}, 32, 4);
  CHECK(zero.anchors[0] == zero.query);
  const auto full = synth_fixture(DistanceRecord{{32}, 0}, 32, 4);
  CHECK((full.anchors[0] ^ full.query).popcount() == 32);

  const auto a = synth_fixture(example_rows()[1], 256, 9);
  const auto b = synth_fixture(example_rows()[1], 256, 9);
  CHECK(a.query == b.query);
  CHECK(a.anchors == b.anchors);
  CHECK_THROWS_AS(synth_fixture(DistanceRecord{{33}, 0}, 32, 1), std::invalid_argument);
}

TEST_CASE("fixture files round trip") {
  const auto fx = synth_fixture(example_rows()[2], 1024, 11);
  const auto back = fixture_from_embeddings(decode_embeddings(encode_embeddings(fixture_to_embeddings(fx))));
  CHECK(back.anchors == fx.anchors);
  CHECK(back.query == fx.query);
  CHECK(back.record.distances == fx.record.distances);
  CHECK(back.record.correct_index == fx.record.correct_index);

  EmbeddingSet lone;
  lone.n = 8;
  lone.records.push_back({0, BitVector(8)});
  CHECK_THROWS_AS(fixture_from_embeddings(lone), DataError);
}

TEST_CASE("monte carlo on degenerate cases") {
  // Query equals anchor 0 and p = 1: every trial matches on the first iteration.
  const auto fx = synth_fixture(DistanceRecord{{0, 5}, 0}, 64, 1);
  const auto stats = monte_carlo(fx, RcphParams{Rational{1, 1}, 10, 64, 2}, 200, 2, 1);
  CHECK(stats.trials == 200);
  CHECK(stats.correct == 200);
  CHECK(stats.mean_iterations == 1.0);
  CHECK(stats.correct_se == 0.0);

  // Query far from both anchors at p = 1: always abstains after m iterations.
  const auto far = synth_fixture(DistanceRecord{{3, 5}, 0}, 64, 1);
  const auto none = monte_carlo(far, RcphParams{Rational{1, 1}, 7, 64, 2}, 50, 2, 1);
  CHECK(none.abstain == 50);
  CHECK(none.mean_iterations == 7.0);
}

TEST_CASE("monte carlo single-iteration rate at n = 8") {
  const auto fx = synth_fixture(DistanceRecord{{1}, 0}, 8, 3);
  const auto stats = monte_carlo(fx, RcphParams{Rational{1, 2}, 1, 8, 1}, 20000, 4, 1);
  CHECK(stats.correct + stats.wrong + stats.abstain == stats.trials);
  CHECK(stats.wrong == 0);
  CHECK(std::abs(stats.correct_rate - 0.5) <= 3 * std::sqrt(0.25 / 20000));
  CHECK(stats.correct_se == doctest::Approx(std::sqrt(stats.correct_rate * (1 - stats.correct_rate) / 20000)));
}

TEST_CASE("monte carlo does not depend on the thread count") {
  const auto fx = synth_fixture(example_rows()[0], 256, 5);
  const RcphParams params{Rational{1, 2}, 20, 256, 10};
  const auto one = monte_carlo(fx, params, 300, 77, 1);
  const auto three = monte_carlo(fx, params, 300, 77, 3);
  CHECK(one == three);
  CHECK(monte_carlo(fx, params, 300, 78, 2) != one);
  CHECK(trial_seed(77, 0) != trial_seed(77, 1));
  CHECK(trial_seed(77, 5) == trial_seed(77, 5));
}

TEST_CASE("empirical rates sit inside the analytic bounds") {
  const DistanceRecord row{{3, 12, 14}, 0};
  const RcphParams params{Rational{1, 4}, 40, 128, 3};
  const auto fx = synth_fixture(row, 128, 6);
  const auto stats = monte_carlo(fx, params, 3000, 7, 1);
  const auto b = performance_bounds(row, params);
  CHECK(stats.correct_rate >= b.accuracy_lower - 3 * stats.correct_se - 1e-12);
  CHECK(stats.wrong_rate <= b.fail_upper + 3 * stats.wrong_se + 1e-12);
  CHECK(stats.mean_iterations <= b.expected_iterations_upper + 3 * stats.iterations_se);
}

TEST_CASE("sweep grid") {
  const auto rows = example_rows();
  const std::vector<Rational> ps{Rational{1, 4}, Rational{1, 2}};
  const std::vector<std::uint32_t> ms{10000, 100000};
  const auto out = sweep(rows, 1024, ps, ms);
  REQUIRE(out.size() == 4);
  CHECK(out[0].p == Rational{1, 4});
  CHECK(out[1].m == 100000);
  for (const auto& row : out) {
    const auto agg = aggregate(rows, RcphParams{row.p, row.m, 1024, 10});
    CHECK(row.bounds.accuracy_lower == agg.accuracy_lower);
    CHECK(row.bounds.fail_upper == agg.fail_upper);
    CHECK(row.bounds.expected_iterations_upper == agg.expected_iterations_upper);
  }
  // Within a p, both probability columns grow with m.
  CHECK(out[3].bounds.accuracy_lower >= out[2].bounds.accuracy_lower);
  CHECK(out[3].bounds.fail_upper >= out[2].bounds.fail_upper);

  double mean = 0;
  for (const auto& r : rows) mean += oracle::row_bounds(r, 1024, 512, 10000).accuracy / 3;
  CHECK(out[2].bounds.accuracy_lower == doctest::Approx(mean).epsilon(1e-7));

  std::ostringstream csv;
  write_sweep_csv(csv, out);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "p,m,accuracy,fail,complexity");
  std::getline(lines, line);
  CHECK(line.rfind("0.25,10000,", 0) == 0);
  int count = 1;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 4);
}
