#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "turbocs/bench.hpp"

using namespace turbocs;
using namespace turbocs::bench;

namespace {

SweepConfig small(SweepKind kind, std::vector<double> grid, std::vector<Algorithm> algs) {
  SweepConfig c;
  c.L = 32;
  c.K = 16;
  c.s = 2;
  c.kind = kind;
  c.grid = std::move(grid);
  c.algorithms = std::move(algs);
  c.trials = 20;
  c.master_seed = 9;
  return c;
}

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_csv(out, rows);
  return out.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const SweepConfig c = parse_sweep_config(R"({
    "L": 64, "K": 32, "sweep": "sparsity", "grid": [2, 4], "inv_noise_db": 15,
    "algorithms": ["IKS", "amp"], "trials": 7, "seed": 3, "variance_mode": "UA"
  })");
  CHECK(c.L == 64);
  CHECK(c.K == 32);
  CHECK(c.kind == SweepKind::Sparsity);
  CHECK(c.grid == std::vector<double>{2, 4});
  CHECK(c.inv_noise_db == 15.0);
  CHECK(c.algorithms == std::vector<Algorithm>{Algorithm::IKS, Algorithm::AMP});
  CHECK(c.trials == 7);
  CHECK(c.master_seed == 3);
  CHECK(c.variance_mode == VarianceMode::UA);
  CHECK_NOTHROW(c.validate());

  const SweepConfig t = parse_sweep_config(R"({"sweep": "flops-trace", "inv_noise_db": 14})");
  CHECK(t.grid == std::vector<double>{14.0});
  CHECK(t.L == 258);
  CHECK(t.K == 129);
  CHECK(t.s == 12);
  CHECK(t.lambda_source == LambdaSource::Statistical);
  const SweepConfig e =
      parse_sweep_config(R"({"sweep": "noise", "grid": [17], "lambda_source": "estimate"})");
  CHECK(e.lambda_source == LambdaSource::MatrixEstimate);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_sweep_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_config("[1]"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_config(R"({"grid": [1]})"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_config(R"({"sweep": "noise", "colour": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_config(R"({"sweep": "noise", "trials": "many"})"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_config(R"({"sweep": "fast"})"), ConfigError);
  CHECK_THROWS_AS(parse_sweep_config(R"({"sweep": "noise", "lambda_source": "exact"})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_sweep_config(R"({"sweep": "noise", "algorithms": ["OMP"]})"),
                  ConfigError);
  CHECK_THROWS_AS(load_sweep_config("/nonexistent/sweep.json"), std::ios_base::failure);

  SweepConfig c = small(SweepKind::Noise, {17}, {Algorithm::IKS});
  CHECK_NOTHROW(c.validate());
  c.grid.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small(SweepKind::Noise, {17}, {Algorithm::IKS});
  c.K = c.L;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small(SweepKind::Noise, {17}, {Algorithm::IKS});
  c.trials = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small(SweepKind::Sparsity, {2.5}, {Algorithm::IKS});
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = small(SweepKind::Sparsity, {40}, {Algorithm::IKS});
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("child seeds are distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t g = 0; g < 50; ++g) {
    for (std::uint64_t t = 0; t < 200; ++t) seen.insert(child_seed(1, g, t));
  }
  CHECK(seen.size() == 50 * 200);
  CHECK(child_seed(1, 0, 0) != child_seed(2, 0, 0));
  CHECK(child_seed(1, 2, 3) == child_seed(1, 2, 3));
}

TEST_CASE("single point produces a single row") {
  SweepConfig c = small(SweepKind::Noise, {17}, {Algorithm::IKS});
  c.trials = 1;
  const std::vector<ResultRow> rows = run_sweep(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].trials == 1);
  CHECK(rows[0].ser_stderr == 0.0);
  CHECK(!rows[0].iteration.has_value());
}

TEST_CASE("sweeps are deterministic and independent of the worker count") {
  SweepConfig c = small(SweepKind::Noise, {10, 20}, {Algorithm::ISF, Algorithm::IKS});
  const std::string first = csv(run_sweep(c));
  CHECK(first == csv(run_sweep(c)));
  c.workers = 3;
  CHECK(first == csv(run_sweep(c)));
  c.master_seed = 10;
  CHECK(first != csv(run_sweep(c)));
}

TEST_CASE("every algorithm sees the same instance in a trial") {
  const SweepConfig both = small(SweepKind::Noise, {12}, {Algorithm::ISF, Algorithm::AMP});
  const SweepConfig alone = small(SweepKind::Noise, {12}, {Algorithm::AMP});
  std::vector<TrialRecord> raw_both, raw_alone;
  run_sweep(both, &raw_both);
  run_sweep(alone, &raw_alone);
  std::vector<double> amp_both;
  for (const TrialRecord& r : raw_both) {
    if (r.algorithm == Algorithm::AMP) amp_both.push_back(r.ser);
  }
  REQUIRE(amp_both.size() == raw_alone.size());
  for (std::size_t i = 0; i < amp_both.size(); ++i) CHECK(amp_both[i] == raw_alone[i].ser);
}

TEST_CASE("csv layout") {
  const SweepConfig c = small(SweepKind::Sparsity, {1, 2}, {Algorithm::IHT});
  const std::string text = csv(run_sweep(c));
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == kCsvHeader);
  std::getline(in, line);
  CHECK(line.rfind("IHT,sparsity,1,,20,", 0) == 0);
}

TEST_CASE("aggregation") {
  std::vector<TrialRecord> g;
  for (int i = 0; i < 4; ++i) {
    g.push_back({Algorithm::AMP, SweepKind::Noise, 17.0, std::nullopt, i, 0.1 * i, 3 + i,
                 100.0 * (i + 1)});
  }
  const ResultRow r = aggregate(g);
  CHECK(r.trials == 4);
  CHECK(r.ser_mean == doctest::Approx(0.15));
  // sample sd of {0, .1, .2, .3} is 0.1290994; divided by √4
  CHECK(r.ser_stderr == doctest::Approx(0.0645497224367903));
  CHECK(r.iters_mean == doctest::Approx(4.5));
  CHECK(r.flops_mean == doctest::Approx(250.0));
  CHECK_THROWS(aggregate({}));
}

TEST_CASE("raw records re-aggregate to the summary exactly") {
  for (SweepKind kind : {SweepKind::Noise, SweepKind::FlopsTrace}) {
    SweepConfig c = small(kind, {14, 18}, {Algorithm::AMP, Algorithm::IKS});
    c.max_iterations = 5;
    std::vector<TrialRecord> raw;
    const std::vector<ResultRow> rows = run_sweep(c, &raw);
    std::ostringstream raw_text;
    write_raw_csv(raw_text, raw);
    std::istringstream back(raw_text.str());
    const std::vector<TrialRecord> parsed = read_raw_csv(back);
    CHECK(csv(reaggregate(parsed)) == csv(rows));
  }
  std::istringstream bad("nonsense\n");
  CHECK_THROWS(read_raw_csv(bad));
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, 12345678.9, -2.5e-7}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(17.0) == "17");
  CHECK(format_number(0.25) == "0.25");
}

TEST_CASE("flops trace") {
  SweepConfig c = small(SweepKind::FlopsTrace, {17}, {Algorithm::ISF, Algorithm::TMS});
  c.max_iterations = 8;
  const std::vector<ResultRow> rows = flops_trace(c);
  REQUIRE(rows.size() == 16);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(rows[i].iteration.has_value());
    CHECK(*rows[i].iteration == static_cast<int>(i % 8) + 1);
    if (i % 8 != 0) CHECK(rows[i].flops_mean > rows[i - 1].flops_mean);
  }
  CHECK_THROWS_AS(flops_trace(small(SweepKind::Noise, {17}, {Algorithm::ISF})), ConfigError);
}

TEST_CASE("last trace row matches the noise sweep") {
  SweepConfig trace = small(SweepKind::FlopsTrace, {16}, {Algorithm::IKS});
  trace.L = 128;
  trace.K = 64;
  trace.s = 6;
  trace.trials = 200;
  SweepConfig noise = trace;
  noise.kind = SweepKind::Noise;
  const ResultRow last = flops_trace(trace).back();
  const ResultRow sweep = run_sweep(noise).front();
  CHECK(*last.iteration == 20);
  const double se = std::hypot(last.ser_stderr, sweep.ser_stderr);
  CHECK(std::abs(last.ser_mean - sweep.ser_mean) <= 2.0 * se + 1e-12);
}

TEST_CASE("IKS error rate does not increase with SNR") {
  SweepConfig c;
  c.kind = SweepKind::Noise;
  c.grid = {14, 17, 20};
  c.algorithms = {Algorithm::IKS};
  c.trials = 500;
  const std::vector<ResultRow> rows = run_sweep(c);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double se = std::hypot(rows[i].ser_stderr, rows[i - 1].ser_stderr);
    CHECK(rows[i].ser_mean <= rows[i - 1].ser_mean + 2.0 * se);
  }
}
