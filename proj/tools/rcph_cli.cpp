// rcph: batch front end for analysis, simulation, enrollment/query and the
// authentication service.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <csignal>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <fstream>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rcph/auth_client.hpp"
#include "rcph/auth_server.hpp"
#include "rcph/bounds.hpp"
#include "rcph/distance_csv.hpp"
#include "rcph/embedding_io.hpp"
#include "rcph/index_io.hpp"
#include "rcph/rcph_engine.hpp"
#include "rcph/sim_lab.hpp"
#include "rcph/user_store.hpp"
#include "rcph/zkp.hpp"

namespace {

using namespace rcph;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RCPH_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const std::uint64_t seed = std::stoull(env, &used);
      if (used == std::string(env).size()) return seed;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("RCPH_SEED is not an unsigned integer: '") + env + "'");
  }
  return 42;
}

Rational parse_p(const std::string& text) {
  try {
    const Rational p = Rational::parse_decimal(text);
    if (p.num == 0 || p.num > p.den) throw UsageError("--p must satisfy 0 < p <= 1, got " + text);
    return p;
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--p: ") + e.what());
  }
}

// "a:b:step" with exact decimal arithmetic; includes b when it lies on the grid.
std::vector<Rational> parse_p_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) throw UsageError("--p-grid must look like a:b:step, got '" + text + "'");
  Rational lo;
  Rational hi;
  Rational step;
  try {
    lo = Rational::parse_decimal(parts[0]);
    hi = Rational::parse_decimal(parts[1]);
    step = Rational::parse_decimal(parts[2]);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--p-grid: ") + e.what());
  }
  if (step.num == 0) throw UsageError("--p-grid step must be positive");
  if (lo.num == 0 || hi < lo || Rational{1, 1} < hi) throw UsageError("--p-grid needs 0 < a <= b <= 1");
  std::vector<Rational> grid;
  const std::uint64_t den = std::uint64_t{lo.den} * hi.den * step.den;
  const std::uint64_t a = std::uint64_t{lo.num} * hi.den * step.den;
  const std::uint64_t b = std::uint64_t{hi.num} * lo.den * step.den;
  const std::uint64_t s = std::uint64_t{step.num} * lo.den * hi.den;
  for (std::uint64_t x = a; x <= b; x += s) {
    grid.push_back(Rational::make(x, den));
    if (grid.size() > 100000) throw UsageError("--p-grid has too many points");
  }
  return grid;
}

std::vector<std::uint32_t> parse_m_grid(const std::string& text) {
  std::vector<std::uint32_t> grid;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(part, &used);
      if (used != part.size() || v == 0 || v > 0xFFFFFFFFUL) throw std::invalid_argument(part);
      grid.push_back(static_cast<std::uint32_t>(v));
    } catch (const std::exception&) {
      throw UsageError("--m-grid entries must be positive integers, got '" + part + "'");
    }
  }
  if (grid.empty()) throw UsageError("--m-grid is empty");
  return grid;
}

void print_bounds_row(std::ostream& out, const std::string& label, const PerformanceBounds& b) {
  out << label << ',' << std::fixed << std::setprecision(6) << b.accuracy_lower << ',' << b.fail_upper << ','
      << std::setprecision(2) << b.expected_iterations_upper << '\n';
}

std::vector<DistanceRecord> load_labeled_records(const std::string& path, std::uint32_t n) {
  auto records = read_distance_csv(path);
  if (records.empty()) throw DataError("distance matrix '" + path + "' has no rows");
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].correct_index) {
      throw DataError("distance matrix row " + std::to_string(i + 1) + " has no correct index");
    }
    try {
      records[i].validate(n);
    } catch (const std::invalid_argument& e) {
      throw DataError("distance matrix row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return records;
}

volatile std::sig_atomic_t g_stop_requested = 0;
extern "C" void on_signal(int) { g_stop_requested = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random coordinate projection hashing toolkit"};
  app.require_subcommand(1);

  std::string dist_matrix;
  std::string p_text;
  std::string p_grid_text;
  std::string m_grid_text;
  std::string out_path;
  std::string fixture_path;
  std::string anchors_path;
  std::string index_path;
  std::string probe_path;
  std::string listen;
  std::string store_path;
  std::string connect;
  std::string embedding_path;
  std::uint32_t m = 0;
  std::uint32_t n = kDefaultDimension;
  std::uint64_t trials = 0;
  std::uint64_t seed_flag = 0;
  std::uint32_t row = 0;
  std::uint32_t record_index = 0;
  unsigned threads = 0;
  int timeout_ms = 5000;

  auto add_seed = [&](CLI::App* cmd) { return cmd->add_option("--seed", seed_flag, "RNG seed (default 42, or RCPH_SEED)"); };

  auto* analyze = app.add_subcommand("analyze", "Per-row and aggregate accuracy / fail / complexity bounds");
  analyze->add_option("--dist-matrix", dist_matrix, "Distance-matrix CSV")->required();
  analyze->add_option("--p", p_text, "Portion of coordinates per projection")->required();
  analyze->add_option("--m", m, "Maximum iterations")->required()->check(CLI::PositiveNumber);
  analyze->add_option("--n", n, "Embedding dimension")->check(CLI::PositiveNumber);

  auto* sweep_cmd = app.add_subcommand("sweep", "Aggregate bounds over a (p, m) grid, written as CSV");
  sweep_cmd->add_option("--dist-matrix", dist_matrix, "Distance-matrix CSV")->required();
  sweep_cmd->add_option("--p-grid", p_grid_text, "a:b:step")->required();
  sweep_cmd->add_option("--m-grid", m_grid_text, "Comma-separated m values")->required();
  sweep_cmd->add_option("--out", out_path, "Output CSV (- for stdout)")->required();
  sweep_cmd->add_option("--n", n, "Embedding dimension")->check(CLI::PositiveNumber);

  auto* synth = app.add_subcommand("synth", "Build a synthetic fixture realizing one distance row");
  synth->add_option("--dist-matrix", dist_matrix, "Distance-matrix CSV")->required();
  synth->add_option("--n", n, "Embedding dimension")->check(CLI::PositiveNumber);
  synth->add_option("--row", row, "Zero-based row of the matrix to realize");
  synth->add_option("--out", out_path, "Output embedding file")->required();
  auto* synth_seed = add_seed(synth);

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo RCPH runs on a fixture");
  simulate->add_option("--fixture", fixture_path, "Fixture embedding file")->required();
  simulate->add_option("--p", p_text, "Portion of coordinates per projection")->required();
  simulate->add_option("--m", m, "Maximum iterations")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--trials", trials, "Number of trials")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--threads", threads, "Worker threads (0 = all cores)");
  auto* simulate_seed = add_seed(simulate);

  auto* enroll = app.add_subcommand("enroll", "Preprocess anchors into an index file");
  enroll->add_option("--anchors", anchors_path, "Anchor embedding file (one record per class)")->required();
  enroll->add_option("--p", p_text, "Portion of coordinates per projection")->required();
  enroll->add_option("--m", m, "Maximum iterations")->required()->check(CLI::PositiveNumber);
  enroll->add_option("--out", out_path, "Output index file")->required();
  auto* enroll_seed = add_seed(enroll);

  auto* query_cmd = app.add_subcommand("query", "Match probe embeddings against an index");
  query_cmd->add_option("--index", index_path, "Index file")->required();
  query_cmd->add_option("--probe", probe_path, "Probe embedding file")->required();

  auto* serve = app.add_subcommand("serve", "Run the registration / login service");
  serve->add_option("--listen", listen, "HOST:PORT")->required();
  serve->add_option("--store", store_path, "User record file")->required();
  serve->add_option("--timeout-ms", timeout_ms, "Per-session receive timeout")->check(CLI::PositiveNumber);

  auto* best = app.add_subcommand("best-p", "Grid p maximizing the aggregate accuracy bound");
  best->add_option("--dist-matrix", dist_matrix, "Distance-matrix CSV")->required();
  best->add_option("--m", m, "Maximum iterations")->required()->check(CLI::PositiveNumber);
  best->add_option("--p-grid", p_grid_text, "a:b:step (default 0.01:0.5:0.01)");
  best->add_option("--n", n, "Embedding dimension")->check(CLI::PositiveNumber);

  auto* reg = app.add_subcommand("register", "Register the credentials derived from an embedding");
  auto* login = app.add_subcommand("login", "Log in with the credentials derived from an embedding");
  for (auto* cmd : {reg, login}) {
    cmd->add_option("--connect", connect, "HOST:PORT")->required();
    cmd->add_option("--embedding", embedding_path, "Embedding file")->required();
    cmd->add_option("--record", record_index, "Zero-based record within the file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::uint64_t seed = default_seed();
    for (auto* opt : {synth_seed, simulate_seed, enroll_seed}) {
      if (opt->count() > 0) seed = seed_flag;
    }

    if (analyze->parsed()) {
      const Rational p = parse_p(p_text);
      const auto records = load_labeled_records(dist_matrix, n);
      const RcphParams params{p, m, n, static_cast<std::uint32_t>(records.front().k())};
      params.validate();
      std::cout << "row,accuracy,fail,complexity\n";
      for (std::size_t i = 0; i < records.size(); ++i) {
        print_bounds_row(std::cout, std::to_string(i + 1), performance_bounds(records[i], params));
      }
      print_bounds_row(std::cout, "mean", aggregate(records, params));
      return kExitOk;
    }

    if (sweep_cmd->parsed()) {
      const auto p_grid = parse_p_grid(p_grid_text);
      const auto m_grid = parse_m_grid(m_grid_text);
      const auto records = load_labeled_records(dist_matrix, n);
      const auto rows = sweep(records, n, p_grid, m_grid);
      if (out_path == "-") {
        write_sweep_csv(std::cout, rows);
      } else {
        std::ofstream out(out_path);
        if (!out) throw DataError("cannot open '" + out_path + "' for writing");
        write_sweep_csv(out, rows);
        std::cout << "wrote " << rows.size() << " rows to " << out_path << '\n';
      }
      return kExitOk;
    }

    if (synth->parsed()) {
      const auto records = load_labeled_records(dist_matrix, n);
      if (row >= records.size()) throw UsageError("--row " + std::to_string(row) + " is past the last row");
      const SyntheticFixture fx = synth_fixture(records[row], n, seed);
      write_embeddings(out_path, fixture_to_embeddings(fx));
      std::cout << "wrote fixture (k=" << fx.anchors.size() << ", n=" << n << ", seed=" << seed << ") to "
                << out_path << '\n';
      return kExitOk;
    }

    if (simulate->parsed()) {
      const Rational p = parse_p(p_text);
      const SyntheticFixture fx = fixture_from_embeddings(read_embeddings(fixture_path));
      const RcphParams params{p, m, static_cast<std::uint32_t>(fx.query.size()),
                              static_cast<std::uint32_t>(fx.anchors.size())};
      params.validate();
      const EmpiricalStats stats = monte_carlo(fx, params, trials, seed, threads);
      const PerformanceBounds bounds = performance_bounds(fx.record, params);
      std::cout << std::setprecision(8)
                << "trials,correct_rate,correct_se,wrong_rate,wrong_se,abstain_rate,mean_iterations,"
                   "iterations_se,accuracy_lower,fail_upper,complexity_upper\n"
                << stats.trials << ',' << stats.correct_rate << ',' << stats.correct_se << ',' << stats.wrong_rate
                << ',' << stats.wrong_se << ',' << stats.abstain_rate << ',' << stats.mean_iterations << ','
                << stats.iterations_se << ',' << bounds.accuracy_lower << ',' << bounds.fail_upper << ','
                << bounds.expected_iterations_upper << '\n';
      return kExitOk;
    }

    if (enroll->parsed()) {
      const Rational p = parse_p(p_text);
      const EmbeddingSet set = read_embeddings(anchors_path);
      if (set.records.empty()) throw DataError("anchor file has no records");
      const RcphParams params{p, m, set.n, static_cast<std::uint32_t>(set.records.size())};
      params.validate();
      std::vector<std::uint32_t> labels;
      for (const auto& r : set.records) labels.push_back(r.label);
      const PreprocessedIndex index = preprocess(set.embeddings(), params, seed, labels);
      write_index(out_path, index);
      std::cout << "enrolled " << params.k << " anchors (n=" << params.n << ", p=" << p.to_string()
                << ", m=" << m << ", regenerations=" << index.regenerations() << ") into " << out_path << '\n';
      return kExitOk;
    }

    if (query_cmd->parsed()) {
      const PreprocessedIndex index = read_index(index_path);
      const EmbeddingSet probes = read_embeddings(probe_path);
      if (probes.n != index.params().n) throw DataError("probe dimension does not match the index");
      std::cout << "probe,outcome,label,iterations\n";
      for (std::size_t i = 0; i < probes.records.size(); ++i) {
        const MatchOutcome outcome = query(index, probes.records[i].bits);
        if (const auto* match = std::get_if<Match>(&outcome)) {
          std::cout << i << ",match," << index.labels()[match->class_index] << ',' << match->iterations_used << '\n';
        } else {
          std::cout << i << ",abstain,," << iterations_used(outcome) << '\n';
        }
      }
      return kExitOk;
    }

    if (best->parsed()) {
      const auto grid = p_grid_text.empty() ? default_p_grid() : parse_p_grid(p_grid_text);
      const auto records = load_labeled_records(dist_matrix, n);
      const BestP result = best_p(records, m, n, grid);
      std::cout << "p,accuracy,fail,complexity\n";
      print_bounds_row(std::cout, result.p.to_string(), result.bounds);
      return kExitOk;
    }

    if (serve->parsed()) {
      const auto [host, port] = parse_listen_address(listen);
      UserStore store(store_path);
      AuthServer server(store, GroupParams::standard(),
                        ServerOptions{std::chrono::milliseconds(timeout_ms), 64});
      server.start(host, port);
      std::cout << "listening on " << host << ':' << server.port() << " with " << store.size()
                << " registered users" << std::endl;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      while (!g_stop_requested) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
      return kExitOk;
    }

    if (reg->parsed() || login->parsed()) {
      const auto [host, port] = parse_listen_address(connect);
      const EmbeddingSet set = read_embeddings(embedding_path);
      if (record_index >= set.records.size()) throw UsageError("--record is past the last record");
      const Credentials creds = derive_credentials(set.records[record_index].bits);
      AuthClient client(host, port);
      if (reg->parsed()) {
        const auto result = client.register_user(creds.public_id, make_verifier(creds.secret, GroupParams::standard()));
        std::cout << (result.ok ? "REGISTER_OK " : "ERROR ") << creds.public_id.hex()
                  << (result.error ? " " + result.error->message : "") << '\n';
        return result.ok ? kExitOk : kExitData;
      }
      const auto result = client.login(creds.public_id, creds.secret);
      switch (result.status) {
        case LoginOutcome::Status::kOk:
          std::cout << "LOGIN_OK " << creds.public_id.hex() << '\n';
          return kExitOk;
        case LoginOutcome::Status::kFail:
          std::cout << "LOGIN_FAIL\n";
          return kExitData;
        case LoginOutcome::Status::kError:
          std::cout << "ERROR " << (result.error ? result.error->message : "") << '\n';
          return kExitData;
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
