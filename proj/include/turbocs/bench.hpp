#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "turbocs/algorithms.hpp"

namespace turbocs::bench {

enum class SweepKind { Noise, Sparsity, FlopsTrace };

std::string_view to_string(SweepKind kind);
SweepKind parse_sweep_kind(std::string_view name);

struct SweepConfig {
  Index L = 258;
  Index K = 129;
  std::vector<double> nonzero_symbols = {-1.0, 1.0};
  SweepKind kind = SweepKind::Noise;
  // dB values of 10·log10(1/σ_N²) for noise and flops-trace sweeps, s values for sparsity.
  std::vector<double> grid;
  Index s = 12;                // fixed for noise and flops-trace sweeps
  double inv_noise_db = 17.0;  // fixed for sparsity sweeps
  std::vector<Algorithm> algorithms;
  Index trials = 500;
  std::uint64_t master_seed = 1;
  std::string output;
  int max_iterations = 20;
  double convergence_tol = 1e-8;
  VarianceMode variance_mode = VarianceMode::AU;
  double alpha_factor = 0.5;
  LambdaSource lambda_source = LambdaSource::Statistical;
  unsigned workers = 1;

  // Throws ConfigError with a readable message.
  void validate() const;
};

// Parses the JSON config format; unknown keys are rejected.
SweepConfig parse_sweep_config(std::string_view text);
SweepConfig load_sweep_config(const std::string& path);

struct ResultRow {
  Algorithm algorithm;
  SweepKind kind;
  double sweep_value;
  std::optional<int> iteration;  // flops-trace rows only
  Index trials;
  double ser_mean;
  double ser_stderr;
  double iters_mean;
  double flops_mean;
};

// Per-trial outcome; trace rows carry one entry per iteration index.
struct TrialRecord {
  Algorithm algorithm;
  SweepKind kind;
  double sweep_value;
  std::optional<int> iteration;
  Index trial;
  double ser;
  int iterations;
  double flops;
};

// Deterministic child seed for (master, grid index, trial index):
// splitmix64 chained over the three words.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t grid_index,
                         std::uint64_t trial_index);

// Runs every configured algorithm on the same fresh instance per (grid point,
// trial) and aggregates in trial order. Noise and sparsity kinds yield one row
// per (algorithm, grid point); flops-trace yields one row per iteration index
// with the convergence rule disabled. Raw per-trial records are appended to
// `raw` when given.
std::vector<ResultRow> run_sweep(const SweepConfig& config,
                                 std::vector<TrialRecord>* raw = nullptr);

// run_sweep for a flops-trace config.
std::vector<ResultRow> flops_trace(const SweepConfig& config,
                                   std::vector<TrialRecord>* raw = nullptr);

// Mean, standard error and the other summary columns of one group of trials.
ResultRow aggregate(const std::vector<TrialRecord>& group);

// Groups raw records by (algorithm, sweep value, iteration) in first-seen order.
std::vector<ResultRow> reaggregate(const std::vector<TrialRecord>& raw);

inline constexpr std::string_view kCsvHeader =
    "algorithm,sweep_kind,sweep_value,iteration,trials,ser_mean,ser_stderr,iters_mean,"
    "flops_mean";
inline constexpr std::string_view kRawCsvHeader =
    "algorithm,sweep_kind,sweep_value,iteration,trial,ser,iterations,flops";

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_raw_csv(std::ostream& out, const std::vector<TrialRecord>& raw);
std::vector<TrialRecord> read_raw_csv(std::istream& in);

// Shortest round-trip decimal representation.
std::string format_number(double value);

}  // namespace turbocs::bench
