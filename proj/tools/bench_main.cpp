// Monte-Carlo sweep runner: SER vs. noise, SER vs. sparsity, SER vs. FLOPs.
//
//   bench --config sweep.json [--algorithms IKS,AMP] [--trials N] [--seed S]
//         [--out results.csv] [--raw trials.csv] [--workers N]
//   bench --list-algorithms
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "turbocs/bench.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

std::vector<turbocs::Algorithm> parse_algorithm_list(const std::string& list) {
  std::vector<turbocs::Algorithm> out;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (!name.empty()) out.push_back(turbocs::parse_algorithm(name));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace turbocs;

  CLI::App app{"Iterative compressed-sensing recovery benchmark"};
  std::string config_path;
  std::string algorithms;
  std::string out_path;
  std::string raw_path;
  std::optional<Index> trials;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  bool list = false;

  app.add_option("--config", config_path, "Sweep configuration (JSON)");
  app.add_option("--algorithms", algorithms, "Comma-separated subset, e.g. IKS,AMP");
  app.add_option("--trials", trials, "Trials per grid point");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out_path, "Output CSV (default: config 'out', else stdout)");
  app.add_option("--raw", raw_path, "Also write per-trial records to this CSV");
  app.add_option("--workers", workers, "Concurrent trials");
  app.add_flag("--list-algorithms", list, "Print the algorithm names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (list) {
    for (Algorithm a : kAllAlgorithms) std::cout << to_string(a) << '\n';
    return 0;
  }
  if (config_path.empty()) {
    std::cerr << "error: --config is required\n";
    return kExitConfig;
  }

  bench::SweepConfig config;
  try {
    config = bench::load_sweep_config(config_path);
    if (!algorithms.empty()) config.algorithms = parse_algorithm_list(algorithms);
    if (trials) config.trials = *trials;
    if (seed) config.master_seed = *seed;
    if (workers) config.workers = *workers;
    if (!out_path.empty()) config.output = out_path;
    config.validate();
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  // Open outputs before the (long) run so unwritable paths fail fast.
  std::ofstream out_file;
  if (!config.output.empty()) {
    out_file.open(config.output);
    if (!out_file) {
      std::cerr << "error: cannot write '" << config.output << "'\n";
      return kExitIo;
    }
  }
  std::ofstream raw_file;
  if (!raw_path.empty()) {
    raw_file.open(raw_path);
    if (!raw_file) {
      std::cerr << "error: cannot write '" << raw_path << "'\n";
      return kExitIo;
    }
  }

  std::vector<bench::TrialRecord> raw;
  std::vector<bench::ResultRow> rows;
  try {
    rows = bench::run_sweep(config, raw_path.empty() ? nullptr : &raw);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::ostream& out = config.output.empty() ? std::cout : out_file;
  bench::write_csv(out, rows);
  if (!raw_path.empty()) bench::write_raw_csv(raw_file, raw);
  out.flush();
  raw_file.flush();
  if (!out || (!raw_path.empty() && !raw_file)) {
    std::cerr << "error: write failed\n";
    return kExitIo;
  }
  return 0;
}
