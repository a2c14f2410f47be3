#include <array>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "rcph/embedding_io.hpp"
#include "test_support.hpp"

using namespace rcph;
using rcph::testing::random_bits;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + RCPH_CLI_PATH + " " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), got);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rcph_cli_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

const std::string kMatrix = std::string(RCPH_DATA_DIR) + "/example_distance_matrix.csv";

}  // namespace

TEST_CASE("analyze prints the example table") {
  const auto r = run("analyze --dist-matrix " + kMatrix + " --p 0.5 --m 10000");
  CHECK(r.exit_code == 0);
  const auto out = lines(r.out);
  REQUIRE(out.size() == 5);
  CHECK(out[0] == "row,accuracy,fail,complexity");
  CHECK(out[1] == "1,0.999999,0.000001,130.67");
  CHECK(out[2] == "2,0.240233,0.000193,10000.00");
  CHECK(out[3] == "3,0.000000,0.004302,10000.00");
  CHECK(out[4].rfind("mean,", 0) == 0);
}

TEST_CASE("best-p and sweep") {
  const auto best = run("best-p --dist-matrix " + kMatrix + " --m 10000");
  CHECK(best.exit_code == 0);
  REQUIRE(lines(best.out).size() == 2);
  CHECK(lines(best.out)[1].rfind("0.38,", 0) == 0);

  const auto sw = run("sweep --dist-matrix " + kMatrix + " --p-grid 0.1:0.5:0.2 --m-grid 10,100 --out -");
  CHECK(sw.exit_code == 0);
  const auto out = lines(sw.out);
  REQUIRE(out.size() == 7);
  CHECK(out[0] == "p,m,accuracy,fail,complexity");
  CHECK(out[1].rfind("0.1,10,", 0) == 0);
  CHECK(out[6].rfind("0.5,100,", 0) == 0);
}

TEST_CASE("synth and simulate") {
  const std::string fixture = scratch("fixture.demb");
  CHECK(run("synth --dist-matrix " + kMatrix + " --out " + fixture + " --seed 5").exit_code == 0);
  const auto set = read_embeddings(fixture);
  CHECK(set.records.size() == 11);
  const auto sim = run("simulate --fixture " + fixture + " --p 0.5 --m 20 --trials 50 --seed 1");
  CHECK(sim.exit_code == 0);
  const auto out = lines(sim.out);
  REQUIRE(out.size() == 2);
  CHECK(out[1].rfind("50,", 0) == 0);
  // Same seed, same numbers.
  CHECK(run("simulate --fixture " + fixture + " --p 0.5 --m 20 --trials 50 --seed 1").out == sim.out);
}

TEST_CASE("enroll and query") {
  std::mt19937_64 gen(3);
  EmbeddingSet anchors;
  anchors.n = 256;
  for (std::uint32_t label : {7U, 11U, 13U}) anchors.records.push_back({label, random_bits(gen, 256)});
  const std::string anchor_path = scratch("anchors.demb");
  const std::string index_path = scratch("index.rcph");
  const std::string probe_path = scratch("probes.demb");
  write_embeddings(anchor_path, anchors);

  EmbeddingSet probes;
  probes.n = 256;
  probes.records.push_back({0, anchors.records[1].bits});
  probes.records.push_back({0, random_bits(gen, 256)});
  write_embeddings(probe_path, probes);

  CHECK(run("enroll --anchors " + anchor_path + " --p 0.3 --m 200 --out " + index_path).exit_code == 0);
  const auto q = run("query --index " + index_path + " --probe " + probe_path);
  CHECK(q.exit_code == 0);
  const auto out = lines(q.out);
  REQUIRE(out.size() == 3);
  CHECK(out[0] == "probe,outcome,label,iterations");
  CHECK(out[1] == "0,match,11,1");
  CHECK(out[2] == "1,abstain,,200");
}

TEST_CASE("seed sources") {
  const std::string a = scratch("seed_a.demb");
  const std::string b = scratch("seed_b.demb");
  const std::string c = scratch("seed_c.demb");
  CHECK(run("synth --dist-matrix " + kMatrix + " --out " + a, "RCPH_SEED=9").exit_code == 0);
  CHECK(run("synth --dist-matrix " + kMatrix + " --out " + b + " --seed 9").exit_code == 0);
  CHECK(run("synth --dist-matrix " + kMatrix + " --out " + c).exit_code == 0);
  CHECK(encode_embeddings(read_embeddings(a)) == encode_embeddings(read_embeddings(b)));
  CHECK(encode_embeddings(read_embeddings(a)) != encode_embeddings(read_embeddings(c)));
  CHECK(run("synth --dist-matrix " + kMatrix + " --out " + a, "RCPH_SEED=abc").exit_code == 1);
}

TEST_CASE("exit codes") {
  CHECK(run("").exit_code == 1);
  CHECK(run("analyze --p 0.5 --m 10").exit_code == 1);
  CHECK(run("analyze --dist-matrix " + kMatrix + " --p 1.5 --m 10").exit_code == 1);
  CHECK(run("analyze --dist-matrix /nonexistent.csv --p 0.5 --m 10").exit_code == 2);
  const std::string bad = scratch("bad.csv");
  {
    std::FILE* f = std::fopen(bad.c_str(), "w");
    std::fputs("1,2,x,0\n", f);
    std::fclose(f);
  }
  CHECK(run("analyze --dist-matrix " + bad + " --p 0.5 --m 10").exit_code == 2);
  CHECK(run("query --index " + bad + " --probe " + bad).exit_code == 2);
}
