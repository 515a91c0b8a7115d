#include "turbocs/bench.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace turbocs::bench {

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::Noise: return "noise";
    case SweepKind::Sparsity: return "sparsity";
    case SweepKind::FlopsTrace: return "flops-trace";
  }
  return "unknown";
}

SweepKind parse_sweep_kind(std::string_view name) {
  if (name == "noise") return SweepKind::Noise;
  if (name == "sparsity") return SweepKind::Sparsity;
  if (name == "flops-trace") return SweepKind::FlopsTrace;
  throw ConfigError("unknown sweep kind '" + std::string(name) +
                    "' (expected noise, sparsity or flops-trace)");
}

void SweepConfig::validate() const {
  if (K < 1 || K >= L) {
    throw ConfigError("need 1 <= K < L, got K=" + std::to_string(K) + ", L=" + std::to_string(L));
  }
  if (grid.empty()) throw ConfigError("grid must not be empty");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (algorithms.empty()) throw ConfigError("no algorithms selected");
  if (nonzero_symbols.empty()) throw ConfigError("symbols must not be empty");
  if (workers < 1) throw ConfigError("workers must be at least 1");

  std::vector<Index> sparsities;
  if (kind == SweepKind::Sparsity) {
    for (double v : grid) {
      if (v != std::floor(v) || v < 0.0 || v > static_cast<double>(L)) {
        throw ConfigError("sparsity grid value " + format_number(v) +
                          " is not an integer in [0, L]");
      }
      sparsities.push_back(static_cast<Index>(v));
    }
    if (!std::isfinite(inv_noise_db)) throw ConfigError("inv_noise_db must be finite");
  } else {
    for (double v : grid) {
      if (!std::isfinite(v)) throw ConfigError("noise grid values must be finite");
    }
    if (s < 0 || s > L) throw ConfigError("s must lie in [0, L]");
    sparsities.push_back(s);
  }
  for (Algorithm a : algorithms) {
    if (a == Algorithm::IST) {
      for (Index sp : sparsities) {
        if (sp >= L) throw ConfigError("IST needs s < L");
      }
    }
  }
  RecoveryConfig rc;
  rc.max_iterations = max_iterations;
  rc.convergence_tol = convergence_tol;
  rc.alpha_factor = alpha_factor;
  rc.validate();
}

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "L",        "K",      "symbols", "sweep",          "grid",
      "s",        "inv_noise_db",      "algorithms",     "trials",
      "seed",     "out",    "max_iterations",            "convergence_tol",
      "variance_mode",      "alpha_factor",              "lambda_source",
      "workers"};
  return keys;
}

template <typename T>
T get_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

SweepConfig parse_sweep_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : j.items()) {
    if (known_keys().count(item.key()) == 0) {
      throw ConfigError("unknown config key '" + item.key() + "'");
    }
  }

  SweepConfig c;
  c.L = get_field<Index>(j, "L", c.L);
  c.K = get_field<Index>(j, "K", c.K);
  c.nonzero_symbols = get_field<std::vector<double>>(j, "symbols", c.nonzero_symbols);
  if (!j.contains("sweep")) throw ConfigError("config key 'sweep' is required");
  c.kind = parse_sweep_kind(get_field<std::string>(j, "sweep", ""));
  c.s = get_field<Index>(j, "s", c.s);
  c.inv_noise_db = get_field<double>(j, "inv_noise_db", c.inv_noise_db);
  c.grid = get_field<std::vector<double>>(j, "grid", {});
  if (c.grid.empty() && c.kind == SweepKind::FlopsTrace) c.grid = {c.inv_noise_db};
  for (const std::string& name :
       get_field<std::vector<std::string>>(j, "algorithms", {"IKS"})) {
    c.algorithms.push_back(parse_algorithm(name));
  }
  c.trials = get_field<Index>(j, "trials", c.trials);
  c.master_seed = get_field<std::uint64_t>(j, "seed", c.master_seed);
  c.output = get_field<std::string>(j, "out", c.output);
  c.max_iterations = get_field<int>(j, "max_iterations", c.max_iterations);
  c.convergence_tol = get_field<double>(j, "convergence_tol", c.convergence_tol);
  c.variance_mode = parse_variance_mode(get_field<std::string>(j, "variance_mode", "AU"));
  c.alpha_factor = get_field<double>(j, "alpha_factor", c.alpha_factor);
  c.lambda_source =
      parse_lambda_source(get_field<std::string>(j, "lambda_source", "statistical"));
  c.workers = get_field<unsigned>(j, "workers", c.workers);
  return c;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_sweep_config(text.str());
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t child_seed(std::uint64_t master, std::uint64_t grid_index,
                         std::uint64_t trial_index) {
  return splitmix64(splitmix64(splitmix64(master) ^ grid_index) ^ trial_index);
}

namespace {

struct GridPoint {
  double value;
  Index s;
  double sigma_n_sq;
};

GridPoint grid_point(const SweepConfig& c, std::size_t g) {
  const double v = c.grid[g];
  if (c.kind == SweepKind::Sparsity) {
    return {v, static_cast<Index>(v), noise_variance_from_db(c.inv_noise_db)};
  }
  return {v, c.s, noise_variance_from_db(v)};
}

// All records of one (grid point, trial) job, algorithm-major.
std::vector<TrialRecord> run_trial(const SweepConfig& c, std::size_t g, Index trial) {
  const GridPoint gp = grid_point(c, g);
  const Prior prior = Prior::uniform_nonzero(c.nonzero_symbols, static_cast<std::size_t>(c.L),
                                             static_cast<std::size_t>(gp.s));
  Rng rng(child_seed(c.master_seed, g, static_cast<std::uint64_t>(trial)));
  const ProblemInstance instance = make_instance(c.K, prior, gp.sigma_n_sq, rng);

  const bool trace = c.kind == SweepKind::FlopsTrace;
  std::vector<TrialRecord> out;
  for (Algorithm alg : c.algorithms) {
    RecoveryConfig rc;
    rc.algorithm = alg;
    rc.max_iterations = c.max_iterations;
    rc.convergence_tol = c.convergence_tol;
    rc.stop_on_convergence = !trace;
    rc.variance_mode = c.variance_mode;
    rc.alpha_factor = c.alpha_factor;
    rc.lambda_source = c.lambda_source;
    const RecoveryResult result = recover(instance, rc);

    if (!trace) {
      out.push_back({alg, c.kind, gp.value, std::nullopt, trial,
                     ser(result.x_hat_quantized, instance.x_true), result.iterations_run,
                     static_cast<double>(result.trace.back().cumulative_flops)});
      continue;
    }
    // A run that ended early (collapsed posterior) keeps its last estimate.
    for (int t = 0; t < c.max_iterations; ++t) {
      const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(t),
                                                    result.trace.size() - 1);
      const IterationRecord& rec = result.trace[idx];
      out.push_back({alg, c.kind, gp.value, t + 1, trial,
                     ser(quantize_final(rec.x_hat, prior), instance.x_true),
                     result.iterations_run, static_cast<double>(rec.cumulative_flops)});
    }
  }
  return out;
}

}  // namespace

ResultRow aggregate(const std::vector<TrialRecord>& group) {
  if (group.empty()) throw std::invalid_argument("aggregate: empty group");
  const double n = static_cast<double>(group.size());
  double ser_sum = 0.0;
  double iter_sum = 0.0;
  double flop_sum = 0.0;
  for (const TrialRecord& r : group) {
    ser_sum += r.ser;
    iter_sum += r.iterations;
    flop_sum += r.flops;
  }
  const double mean = ser_sum / n;
  double sq = 0.0;
  for (const TrialRecord& r : group) sq += (r.ser - mean) * (r.ser - mean);
  const double stderr_ = group.size() > 1 ? std::sqrt(sq / (n - 1.0) / n) : 0.0;
  const TrialRecord& head = group.front();
  return ResultRow{head.algorithm, head.kind, head.sweep_value, head.iteration,
                   static_cast<Index>(group.size()), mean, stderr_, iter_sum / n,
                   flop_sum / n};
}

std::vector<ResultRow> reaggregate(const std::vector<TrialRecord>& raw) {
  using Key = std::tuple<int, double, int>;
  std::map<Key, std::size_t> slot;
  std::vector<std::vector<TrialRecord>> groups;
  for (const TrialRecord& r : raw) {
    const Key key{static_cast<int>(r.algorithm), r.sweep_value, r.iteration.value_or(0)};
    auto [it, inserted] = slot.emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(r);
  }
  std::vector<ResultRow> rows;
  rows.reserve(groups.size());
  for (const auto& g : groups) rows.push_back(aggregate(g));
  return rows;
}

std::vector<ResultRow> run_sweep(const SweepConfig& config, std::vector<TrialRecord>* raw) {
  config.validate();
  const std::size_t n_grid = config.grid.size();
  const std::size_t n_trials = static_cast<std::size_t>(config.trials);
  const std::size_t n_jobs = n_grid * n_trials;

  std::vector<std::vector<TrialRecord>> results(n_jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      try {
        results[job] = run_trial(config, job / n_trials, static_cast<Index>(job % n_trials));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_jobs;
      }
    }
  };
  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::size_t>(config.workers, std::max<std::size_t>(n_jobs, 1)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Reduce in (grid, algorithm, iteration, trial) order regardless of completion order.
  std::vector<TrialRecord> ordered;
  ordered.reserve(n_jobs * config.algorithms.size());
  for (std::size_t g = 0; g < n_grid; ++g) {
    const std::size_t per_trial = results[g * n_trials].size();
    for (std::size_t k = 0; k < per_trial; ++k) {
      for (std::size_t t = 0; t < n_trials; ++t) ordered.push_back(results[g * n_trials + t][k]);
    }
  }
  if (raw != nullptr) raw->insert(raw->end(), ordered.begin(), ordered.end());
  return reaggregate(ordered);
}

std::vector<ResultRow> flops_trace(const SweepConfig& config, std::vector<TrialRecord>* raw) {
  if (config.kind != SweepKind::FlopsTrace) {
    throw ConfigError("flops_trace: sweep kind must be flops-trace");
  }
  return run_sweep(config, raw);
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

std::string iteration_field(const std::optional<int>& it) {
  return it ? std::to_string(*it) : std::string();
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    out << to_string(r.algorithm) << ',' << to_string(r.kind) << ','
        << format_number(r.sweep_value) << ',' << iteration_field(r.iteration) << ','
        << r.trials << ',' << format_number(r.ser_mean) << ',' << format_number(r.ser_stderr)
        << ',' << format_number(r.iters_mean) << ',' << format_number(r.flops_mean) << '\n';
  }
}

void write_raw_csv(std::ostream& out, const std::vector<TrialRecord>& raw) {
  out << kRawCsvHeader << '\n';
  for (const TrialRecord& r : raw) {
    out << to_string(r.algorithm) << ',' << to_string(r.kind) << ','
        << format_number(r.sweep_value) << ',' << iteration_field(r.iteration) << ','
        << r.trial << ',' << format_number(r.ser) << ',' << r.iterations << ','
        << format_number(r.flops) << '\n';
  }
}

namespace {

template <typename T>
T parse_field(const std::string& field, const char* what) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::runtime_error(std::string("raw csv: bad ") + what + " '" + field + "'");
  }
  return value;
}

}  // namespace

std::vector<TrialRecord> read_raw_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRawCsvHeader) {
    throw std::runtime_error("raw csv: unexpected header");
  }
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 8) throw std::runtime_error("raw csv: expected 8 fields in '" + line + "'");
    TrialRecord r{parse_algorithm(f[0]),
                  parse_sweep_kind(f[1]),
                  parse_field<double>(f[2], "sweep value"),
                  f[3].empty() ? std::nullopt
                               : std::optional<int>(parse_field<int>(f[3], "iteration")),
                  parse_field<Index>(f[4], "trial"),
                  parse_field<double>(f[5], "ser"),
                  parse_field<int>(f[6], "iterations"),
                  parse_field<double>(f[7], "flops")};
    out.push_back(r);
  }
  return out;
}

}  // namespace turbocs::bench
