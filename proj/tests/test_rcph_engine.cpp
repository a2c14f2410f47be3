#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rcph/index_io.hpp"
#include "rcph/rcph_engine.hpp"
#include "test_support.hpp"

using namespace rcph;
using rcph::testing::BitWindowScanner;
using rcph::testing::bit_windows;
using rcph::testing::bits_from_string;
using rcph::testing::random_bits;

namespace {

RcphParams params_of(const char* p, std::uint32_t m, std::uint32_t n, std::uint32_t k) {
  return RcphParams{Rational::parse_decimal(p), m, n, k};
}

}  // namespace

TEST_CASE("preprocess with a single anchor") {
  std::mt19937_64 gen(1);
  const std::vector<BitVector> anchors{random_bits(gen, 64)};
  const auto index = preprocess(anchors, params_of("0.5", 20, 64, 1), 3);
  CHECK(index.combinations().size() == 20);
  for (const auto& t : index.tables()) CHECK(t.size() == 1);
  CHECK(index.regenerations() == 0);
  CHECK(std::vector<std::uint32_t>(index.labels().begin(), index.labels().end()) == std::vector<std::uint32_t>{0});
}

TEST_CASE("complementary anchors never collide") {
  const std::vector<BitVector> anchors{bits_from_string("00000000"), bits_from_string("11111111")};
  const auto index = preprocess(anchors, params_of("0.5", 16, 8, 2), 42);
  CHECK(index.regenerations() == 0);
  for (const auto& t : index.tables()) CHECK(t.size() == 2);
}

TEST_CASE("identical anchors fail after the retry cap") {
  std::mt19937_64 gen(2);
  const BitVector a = random_bits(gen, 32);
  const std::vector<BitVector> anchors{a, random_bits(gen, 32), a};
  CHECK_THROWS_AS(preprocess(anchors, params_of("0.5", 4, 32, 3), 1), DegenerateAnchorsError);
}

TEST_CASE("near-identical anchors trigger regeneration but succeed") {
  // Distance 1 at p = 0.5, n = 8: half of all combinations collide.
  BitVector a = bits_from_string("10101010");
  BitVector b = a;
  b.flip(3);
  const std::vector<BitVector> anchors{a, b};
  const auto index = preprocess(anchors, params_of("0.5", 200, 8, 2), 9);
  CHECK(index.regenerations() > 0);
  for (std::size_t i = 0; i < index.combinations().size(); ++i) {
    const auto idx = index.combinations()[i].indices();
    CHECK(std::find(idx.begin(), idx.end(), 3U) != idx.end());
    CHECK(index.tables()[i].size() == 2);
  }
}

TEST_CASE("preprocess argument errors") {
  std::mt19937_64 gen(3);
  const std::vector<BitVector> anchors{random_bits(gen, 16), random_bits(gen, 16)};
  CHECK_THROWS_AS(preprocess(anchors, params_of("0.5", 4, 16, 3), 1), std::invalid_argument);
  CHECK_THROWS_AS(preprocess(anchors, params_of("0.5", 4, 32, 2), 1), std::invalid_argument);
  CHECK_THROWS_AS(preprocess(anchors, params_of("0.01", 4, 16, 2), 1), std::invalid_argument);
  CHECK_THROWS_AS(preprocess({}, params_of("0.5", 4, 16, 1), 1), std::invalid_argument);
}

TEST_CASE("query finds an exact anchor on the first iteration") {
  std::mt19937_64 gen(4);
  std::vector<BitVector> anchors;
  for (int i = 0; i < 10; ++i) anchors.push_back(random_bits(gen, 1024));
  const auto index = preprocess(anchors, params_of("0.5", 50, 1024, 10), 5);
  for (std::uint32_t j = 0; j < anchors.size(); ++j) {
    CHECK(query(index, anchors[j]) == MatchOutcome{Match{j, 1}});
  }
  CHECK_THROWS_AS(query(index, BitVector(1000)), std::invalid_argument);
}

TEST_CASE("full projection abstains on any non-anchor") {
  std::mt19937_64 gen(6);
  std::vector<BitVector> anchors;
  for (int i = 0; i < 4; ++i) anchors.push_back(random_bits(gen, 64));
  const auto index = preprocess(anchors, params_of("1", 30, 64, 4), 7);
  BitVector x = anchors[2];
  x.flip(17);
  CHECK(query(index, x) == MatchOutcome{Abstain{30}});
}

TEST_CASE("single-iteration match rate at distance one is 35/70") {
  // Exhaustive count: 35 of the 70 4-subsets of 8 avoid the flipped bit.
  const BitVector a = bits_from_string("01100101");
  BitVector x = a;
  x.flip(6);
  const std::vector<BitVector> anchors{a};
  constexpr int kTrials = 20000;
  int matches = 0;
  for (int t = 0; t < kTrials; ++t) {
    if (std::holds_alternative<Match>(query(preprocess(anchors, params_of("0.5", 1, 8, 1), 1000 + t), x))) ++matches;
  }
  const double rate = static_cast<double>(matches) / kTrials;
  CHECK(std::abs(rate - 0.5) <= 3 * std::sqrt(0.25 / kTrials));
}

TEST_CASE("determinism and index file round trip") {
  std::mt19937_64 gen(8);
  std::vector<BitVector> anchors;
  for (int i = 0; i < 5; ++i) anchors.push_back(random_bits(gen, 100));
  const std::vector<std::uint32_t> labels{10, 20, 30, 40, 50};
  const auto a = preprocess(anchors, params_of("0.3", 25, 100, 5), 99, labels);
  const auto b = preprocess(anchors, params_of("0.3", 25, 100, 5), 99, labels);
  const auto bytes = encode_index(a);
  CHECK(bytes == encode_index(b));
  CHECK(bytes != encode_index(preprocess(anchors, params_of("0.3", 25, 100, 5), 100, labels)));

  const auto loaded = decode_index(bytes);
  CHECK(encode_index(loaded) == bytes);
  CHECK(loaded.params().p == Rational{3, 10});
  CHECK(loaded.labels()[3] == 40);

  for (int t = 0; t < 30; ++t) {
    BitVector probe = anchors[static_cast<std::size_t>(t % 5)];
    for (int f = 0; f < t; ++f) probe.flip(gen() % 100);
    CHECK(query(a, probe) == query(loaded, probe));
  }
}

TEST_CASE("corrupt index files are rejected") {
  std::mt19937_64 gen(10);
  const std::vector<BitVector> anchors{random_bits(gen, 32), random_bits(gen, 32)};
  const auto bytes = encode_index(preprocess(anchors, params_of("0.5", 3, 32, 2), 1));

  auto truncated = bytes;
  truncated.resize(bytes.size() - 1);
  CHECK_THROWS_AS(decode_index(truncated), DataError);

  auto extra = bytes;
  extra.push_back(0);
  CHECK_THROWS_AS(decode_index(extra), DataError);

  auto bad_p = bytes;
  bad_p[18] = 0;  // p numerator low byte
  CHECK_THROWS_AS(decode_index(bad_p), DataError);

  // Make two digests in the first table equal.
  auto dup = bytes;
  const std::size_t header = 4 + 2 + 5 * 4 + 8 + 32;
  const std::size_t tables = header + 3 * (4 + 16 * 4);
  std::copy(dup.begin() + static_cast<long>(tables), dup.begin() + static_cast<long>(tables + 32),
            dup.begin() + static_cast<long>(tables + 36));
  CHECK_THROWS_AS(decode_index(dup), DataError);
}

TEST_CASE("outcome trichotomy and monotonicity in m") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 40; ++trial) {
    const std::uint32_t n = 64;
    std::vector<BitVector> anchors;
    for (int i = 0; i < 3; ++i) anchors.push_back(random_bits(gen, n));
    BitVector probe = anchors[gen() % 3];
    const int flips = static_cast<int>(gen() % 12);
    for (int f = 0; f < flips; ++f) probe.flip(gen() % n);
    const std::uint64_t seed = gen();
    const auto small = query(preprocess(anchors, params_of("0.25", 8, n, 3), seed), probe);
    const auto large = query(preprocess(anchors, params_of("0.25", 32, n, 3), seed), probe);
    if (const auto* m = std::get_if<Match>(&small)) {
      CHECK(m->class_index < 3);
      CHECK(m->iterations_used <= 8);
      CHECK(large == small);
    } else {
      CHECK(std::get<Abstain>(small).iterations_used == 8);
    }
    CHECK(iterations_used(large) <= 32);
    if (std::holds_alternative<Abstain>(large)) CHECK(iterations_used(large) == 32);
  }
}

TEST_CASE("serialized index holds no anchor bits or projections") {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<BitVector> anchors;
    for (int i = 0; i < 4; ++i) anchors.push_back(random_bits(gen, 128));
    const auto index = preprocess(anchors, params_of("0.5", 8, 128, 4), gen());
    const BitWindowScanner scanner(encode_index(index));
    for (const auto& a : anchors) {
      for (const auto& w : bit_windows(a, 64)) CHECK_FALSE(scanner.contains(w));
      for (const auto& c : index.combinations()) CHECK_FALSE(scanner.contains(project(a, c)));
    }
  }
}

TEST_CASE("BitWindowScanner finds planted runs") {
  std::mt19937_64 gen(14);
  const BitVector a = random_bits(gen, 128);
  auto buffer = a.to_bytes();
  buffer.insert(buffer.begin(), 3, 0xAB);
  CHECK(BitWindowScanner(buffer).contains(a));
  CHECK(BitWindowScanner(buffer).contains(bit_windows(a, 64)[64]));
}

TEST_CASE("apply_salt") {
  std::mt19937_64 gen(15);
  const BitVector v = random_bits(gen, 256);
  CHECK(apply_salt(v, Salt{BitVector(256), "zero"}) == v);
  CHECK(apply_salt(v, Salt{v, "self"}) == BitVector(256));
  Rng rng(16);
  for (int i = 0; i < 100; ++i) {
    const Salt s = generate_salt("u", 256, rng);
    const BitVector w = random_bits(gen, 256);
    CHECK(apply_salt(apply_salt(w, s), s) == w);
  }
  CHECK_THROWS_AS(apply_salt(v, Salt{BitVector(255), "short"}), std::invalid_argument);
}

TEST_CASE("salted verification") {
  std::mt19937_64 gen(17);
  Rng salt_rng(18);
  SaltedVerifier verifier(params_of("0.5", 10000, 1024, 1), 19);
  const BitVector alice = random_bits(gen, 1024);
  const BitVector bob = random_bits(gen, 1024);
  verifier.enroll("alice", alice, salt_rng);
  verifier.enroll("bob", bob, salt_rng);

  CHECK(verifier.query("alice", alice) == MatchOutcome{Match{0, 1}});
  CHECK(verifier.salt_registry().at("alice").bits != verifier.salt_registry().at("bob").bits);
  CHECK_THROWS_AS(verifier.enroll("alice", alice, salt_rng), std::invalid_argument);
  CHECK_THROWS_AS(verifier.query("carol", alice), std::out_of_range);

  // Probes within distance 7 of the enrolled embedding match essentially always.
  for (int t = 0; t < 50; ++t) {
    BitVector probe = alice;
    Rng flips(static_cast<std::uint64_t>(t));
    const auto c = draw_combination(flips, 1024, 7);
    for (auto j : c.indices()) probe.flip(j);
    CHECK(std::holds_alternative<Match>(verifier.query("alice", probe)));
  }

  // A small stored index contains neither the salted nor the unsalted anchor.
  SaltedVerifier small(params_of("0.5", 20, 1024, 1), 23);
  small.enroll("alice", alice, salt_rng);
  const BitWindowScanner scanner(encode_index(small.index_for("alice")));
  CHECK_FALSE(scanner.contains(alice));
  CHECK_FALSE(scanner.contains(apply_salt(alice, small.salt_registry().at("alice"))));
}

TEST_CASE("salted verification rejects an unrelated embedding at small p") {
  std::mt19937_64 gen(20);
  Rng salt_rng(21);
  SaltedVerifier verifier(params_of("0.1", 10000, 1024, 1), 22);
  const BitVector alice = random_bits(gen, 1024);
  verifier.enroll("alice", alice, salt_rng);
  for (int t = 0; t < 3; ++t) {
    CHECK(verifier.query("alice", random_bits(gen, 1024)) == MatchOutcome{Abstain{10000}});
  }
}
