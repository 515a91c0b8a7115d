#include "turbocs/algorithms.hpp"

#include <algorithm>
#include <string>

#include "turbocs/denoiser.hpp"

namespace turbocs {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::IHT: return "IHT";
    case Algorithm::IST: return "IST";
    case Algorithm::ISF: return "ISF";
    case Algorithm::AMP: return "AMP";
    case Algorithm::TMS: return "TMS";
    case Algorithm::IMS: return "IMS";
    case Algorithm::IKS: return "IKS";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Algorithm a : kAllAlgorithms) {
    if (upper == to_string(a)) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

void RecoveryConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
  if (!(convergence_tol > 0.0)) throw ConfigError("convergence_tol must be positive");
  if (!(alpha_factor > 0.0 && alpha_factor < 1.0)) {
    throw ConfigError("alpha_factor must lie in (0, 1)");
  }
}

double initial_signal_variance(const Prior& prior) {
  double second_moment = 0.0;
  for (const Atom& a : prior.atoms()) second_moment += a.prob * a.value * a.value;
  return second_moment;
}

namespace {

void validate_instance(const ProblemInstance& in) {
  const Index K = in.A.rows();
  const Index L = in.A.cols();
  if (in.x_true.size() != L || in.y.size() != K ||
      static_cast<Index>(in.prior.dimension()) != L) {
    throw DimensionError("instance: A is " + detail::shape(K, L) + ", x has " +
                         std::to_string(in.x_true.size()) + " entries, y has " +
                         std::to_string(in.y.size()) + ", prior dimension " +
                         std::to_string(in.prior.dimension()));
  }
  if (in.sigma_n_sq < 0.0) throw DomainError("instance: negative noise variance");
}

// Iteration bookkeeping shared by every loop: cumulative FLOPs, trace and the
// stopping rule on the feedback estimate.
class LoopState {
 public:
  LoopState(const ProblemInstance& instance, const RecoveryConfig& config)
      : instance_(instance), config_(config) {
    config_.validate();
    validate_instance(instance_);
  }

  int max_iterations() const { return config_.max_iterations; }

  // Appends the iteration; returns true when the loop should stop.
  bool finish_iteration(CounterScope& scope, const Vector& x_prev, IterationRecord record,
                        const Vector& residual) {
    const double change = squared_distance(record.x_hat, x_prev);
    cumulative_ += scope.count();
    record.cumulative_flops = cumulative_;
    record.residual_norm = residual.norm();
    trace_.push_back(std::move(record));
    if (config_.stop_on_convergence && change < config_.convergence_tol) {
      reason_ = StopReason::Converged;
      return true;
    }
    return false;
  }

  void collapse() { reason_ = StopReason::VarianceCollapsed; }

  RecoveryResult result(Vector x_hat) && {
    RecoveryResult out;
    out.x_hat_quantized = quantize_final(x_hat, instance_.prior);
    out.x_hat = std::move(x_hat);
    out.iterations_run = static_cast<int>(trace_.size());
    out.trace = std::move(trace_);
    out.stop_reason = reason_;
    return out;
  }

 private:
  const ProblemInstance& instance_;
  RecoveryConfig config_;
  IterationTrace trace_;
  std::uint64_t cumulative_ = 0;
  StopReason reason_ = StopReason::MaxIterations;
};

// x̂ + H·r
Vector estimate_step(const Matrix& h, const Vector& x_hat, const Vector& r) {
  Vector x_tilde = mat_vec(h, r);
  x_tilde += x_hat;
  flops::charge(static_cast<std::uint64_t>(x_hat.size()));
  return x_tilde;
}

// y − A·x̂
Vector residual(const ProblemInstance& in, const Vector& x_hat) {
  Vector r = in.y - mat_vec(in.A, x_hat);
  flops::charge(static_cast<std::uint64_t>(r.size()));
  return r;
}

template <typename Threshold>
RecoveryResult run_thresholding(const ProblemInstance& in, const RecoveryConfig& config,
                                Threshold&& threshold) {
  LoopState state(in, config);
  const LinearEstimator mf = matched_filter(in.A);
  const Index s = static_cast<Index>(in.prior.sparsity());

  Vector x_hat = Vector::Zero(in.A.cols());
  Vector r = in.y;
  for (int t = 0; t < state.max_iterations(); ++t) {
    CounterScope scope;
    const Vector x_prev = x_hat;
    Vector x_tilde = estimate_step(mf.H, x_hat, r);
    x_hat = threshold(x_tilde, s);
    r = residual(in, x_hat);

    IterationRecord rec;
    rec.x_hat = x_hat;
    rec.x_tilde = std::move(x_tilde);
    if (state.finish_iteration(scope, x_prev, std::move(rec), r)) break;
  }
  return std::move(state).result(std::move(x_hat));
}

}  // namespace

RecoveryResult run_iht(const ProblemInstance& instance, const RecoveryConfig& config) {
  return run_thresholding(instance, config, hard_threshold_keep_s);
}

RecoveryResult run_ist(const ProblemInstance& instance, const RecoveryConfig& config) {
  return run_thresholding(instance, config, soft_threshold_keep_s);
}

RecoveryResult run_soft_feedback(const ProblemInstance& in, const RecoveryConfig& config,
                                 const EstimationPolicy& policy) {
  LoopState state(in, config);
  const Prior& prior = in.prior;

  Vector x_hat = Vector::Zero(in.A.cols());
  Vector r = in.y;
  double sigma_s_sq = std::max(initial_signal_variance(prior), kVarianceFloor);

  for (int t = 0; t < state.max_iterations(); ++t) {
    CounterScope scope;
    const Vector x_prev = x_hat;

    // Step E
    const EstimationStep step = policy(sigma_s_sq);
    Vector x_tilde = estimate_step(step.estimator->H, x_hat, r);
    const double sigma_e_sq = std::max(step.sigma_e_sq, kVarianceFloor);

    // Step S
    SoftOutput soft = soft_output(x_tilde, sigma_e_sq, prior);
    bool collapsed = false;
    if (soft.var_avg < kVarianceFloor) {
      x_hat = std::move(soft.x_hat_b);
      sigma_s_sq = kVarianceFloor;
      collapsed = true;
    } else if (soft.var_avg >= sigma_e_sq) {
      // No information gained: pass the biased values through.
      x_hat = std::move(soft.x_hat_b);
      sigma_s_sq = soft.var_avg;
    } else {
      auto [x_ext, var_ext] = unbias(soft.x_hat_b, x_tilde, soft.var_avg, sigma_e_sq);
      x_hat = std::move(x_ext);
      sigma_s_sq = std::max(var_ext, kVarianceFloor);
    }
    r = residual(in, x_hat);

    IterationRecord rec;
    rec.x_hat = x_hat;
    rec.x_tilde = std::move(x_tilde);
    rec.sigma_e_sq = sigma_e_sq;
    rec.sigma_s_sq = sigma_s_sq;
    const bool stop = state.finish_iteration(scope, x_prev, std::move(rec), r);
    if (collapsed) {
      state.collapse();
      break;
    }
    if (stop) break;
  }
  return std::move(state).result(std::move(x_hat));
}

RecoveryResult run_isf(const ProblemInstance& in, const RecoveryConfig& config) {
  auto mf = std::make_shared<const LinearEstimator>(matched_filter(in.A));
  const Index K = in.A.rows();
  const Index L = in.A.cols();
  const double sigma_n_sq = in.sigma_n_sq;
  return run_soft_feedback(in, config, [&](double sigma_s_sq) {
    flops::charge(3);
    return EstimationStep{mf, mf_variance(sigma_s_sq, sigma_n_sq, K, L)};
  });
}

RecoveryResult run_tms(const ProblemInstance& in, const RecoveryConfig& config) {
  const VarianceMode mode = config.variance_mode;
  return run_soft_feedback(in, config, [&](double sigma_s_sq) {
    auto est = std::make_shared<const LinearEstimator>(mmse(in.A, in.sigma_n_sq, sigma_s_sq));
    const double sigma_e_sq = mmse_error_variance(est->k_diag, sigma_s_sq, mode);
    return EstimationStep{std::move(est), sigma_e_sq};
  });
}

IksSetup iks_setup(const ProblemInstance& in, double alpha_factor, LambdaSource lambda_source) {
  validate_instance(in);
  if (!(alpha_factor > 0.0 && alpha_factor < 1.0)) {
    throw ConfigError("alpha_factor must lie in (0, 1)");
  }
  const double sigma_s_sq = std::max(initial_signal_variance(in.prior), kVarianceFloor);
  const double lambda = lambda_max_for(in.A, lambda_source);
  const double limit = alpha_max(lambda, sigma_s_sq, in.sigma_n_sq);
  if (!(limit > 0.0)) throw StabilityError("iks: non-positive stability limit");
  const double alpha = alpha_factor * limit;
  auto est = std::make_shared<const LinearEstimator>(
      krylov_first_order(in.A, sigma_s_sq, in.sigma_n_sq, alpha, lambda));
  return IksSetup{lambda, sigma_s_sq, alpha, std::move(est)};
}

RecoveryResult run_iks(const ProblemInstance& in, const RecoveryConfig& config) {
  IksSetup setup;
  {
    // Precomputation happens once per sensing matrix and is not charged.
    CounterScope setup_scope(detached);
    setup = iks_setup(in, config.alpha_factor, config.lambda_source);
  }
  const auto est = setup.estimator;
  const double sigma_n_sq = in.sigma_n_sq;
  return run_soft_feedback(in, config, [&](double sigma_s_sq) {
    flops::charge(3);
    return EstimationStep{est, est->error_variance(sigma_s_sq, sigma_n_sq)};
  });
}

RecoveryResult run_amp(const ProblemInstance& in, const RecoveryConfig& config) {
  LoopState state(in, config);
  const LinearEstimator mf = matched_filter(in.A);
  const double K = static_cast<double>(in.A.rows());
  const double L = static_cast<double>(in.A.cols());

  Vector x_hat_b = Vector::Zero(in.A.cols());
  Vector r = in.y;
  for (int t = 0; t < state.max_iterations(); ++t) {
    CounterScope scope;
    const Vector x_prev = x_hat_b;

    const double sigma_e_sq = std::max(squared_norm(r) / K, kVarianceFloor);
    flops::charge(1);
    Vector x_tilde = estimate_step(mf.H, x_hat_b, r);

    SoftOutput soft = soft_output(x_tilde, sigma_e_sq, in.prior);
    x_hat_b = std::move(soft.x_hat_b);
    // b = (1/K)·Σ T'(x̃_l) = (L/K)·σ_{S,B}²/σ_E²
    const double onsager = L / K * soft.var_avg / sigma_e_sq;
    flops::charge(3);
    Vector r_next = in.y - mat_vec(in.A, x_hat_b) + onsager * r;
    flops::charge(3 * static_cast<std::uint64_t>(r.size()));
    r = std::move(r_next);

    IterationRecord rec;
    rec.x_hat = x_hat_b;
    rec.x_tilde = std::move(x_tilde);
    rec.sigma_e_sq = sigma_e_sq;
    rec.sigma_s_sq = soft.var_avg;
    rec.onsager = onsager;
    const bool stop = state.finish_iteration(scope, x_prev, std::move(rec), r);
    if (soft.var_avg < kVarianceFloor) {
      state.collapse();
      break;
    }
    if (stop) break;
  }
  return std::move(state).result(std::move(x_hat_b));
}

RecoveryResult run_ims(const ProblemInstance& in, const RecoveryConfig& config) {
  LoopState state(in, config);
  const Index L = in.A.cols();
  const double ceiling = std::max(initial_signal_variance(in.prior), kVarianceFloor);

  Vector x_hat = Vector::Zero(L);
  Vector r = in.y;
  Vector sigma_s_sq = Vector::Constant(L, ceiling);

  for (int t = 0; t < state.max_iterations(); ++t) {
    CounterScope scope;
    const Vector x_prev = x_hat;

    const LinearEstimator est = mmse(in.A, in.sigma_n_sq, sigma_s_sq);
    Vector x_tilde = estimate_step(est.H, x_hat, r);
    Vector sigma_e_sq = error_var_individual(est.k_diag, sigma_s_sq).unbiased;
    sigma_e_sq = sigma_e_sq.cwiseMax(kVarianceFloor);

    // Soft values and their individual reliabilities are fed back as the next
    // prior mean and Φ_ss diagonal; bias removal happens in Step E via diag(1/K_ll).
    SoftOutput soft = soft_output(x_tilde, sigma_e_sq, in.prior);
    const bool collapsed = soft.var_avg < kVarianceFloor;
    x_hat = std::move(soft.x_hat_b);
    sigma_s_sq = soft.var_per_element.cwiseMax(kVarianceFloor).cwiseMin(ceiling);
    flops::charge(static_cast<std::uint64_t>(L));
    r = residual(in, x_hat);

    IterationRecord rec;
    rec.x_hat = x_hat;
    rec.x_tilde = std::move(x_tilde);
    rec.sigma_e_sq = sigma_e_sq.mean();
    rec.sigma_s_sq = sigma_s_sq.mean();
    const bool stop = state.finish_iteration(scope, x_prev, std::move(rec), r);
    if (collapsed) {
      state.collapse();
      break;
    }
    if (stop) break;
  }
  return std::move(state).result(std::move(x_hat));
}

RecoveryResult recover(const ProblemInstance& instance, const RecoveryConfig& config) {
  switch (config.algorithm) {
    case Algorithm::IHT: return run_iht(instance, config);
    case Algorithm::IST: return run_ist(instance, config);
    case Algorithm::ISF: return run_isf(instance, config);
    case Algorithm::AMP: return run_amp(instance, config);
    case Algorithm::TMS: return run_tms(instance, config);
    case Algorithm::IMS: return run_ims(instance, config);
    case Algorithm::IKS: return run_iks(instance, config);
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace turbocs
