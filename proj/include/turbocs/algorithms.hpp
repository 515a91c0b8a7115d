#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "turbocs/estimators.hpp"
#include "turbocs/model.hpp"

namespace turbocs {

enum class Algorithm { IHT, IST, ISF, AMP, TMS, IMS, IKS };

inline constexpr std::array<Algorithm, 7> kAllAlgorithms = {
    Algorithm::IHT, Algorithm::IST, Algorithm::ISF, Algorithm::AMP,
    Algorithm::TMS, Algorithm::IMS, Algorithm::IKS};

std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct RecoveryConfig {
  Algorithm algorithm = Algorithm::IKS;
  int max_iterations = 20;
  // Stop once ‖x̂(t) − x̂(t−1)‖² falls below this.
  double convergence_tol = 1e-8;
  // When false every run performs max_iterations iterations (per-iteration traces).
  bool stop_on_convergence = true;
  VarianceMode variance_mode = VarianceMode::AU;  // TMS only
  double alpha_factor = 0.5;                      // IKS: α = alpha_factor·α_max
  LambdaSource lambda_source = LambdaSource::Statistical;  // IKS: λ_max behind α_max

  void validate() const;
};

struct IterationRecord {
  Vector x_hat;    // feedback estimate leaving the iteration
  Vector x_tilde;  // Step-E output
  std::optional<double> sigma_e_sq;
  std::optional<double> sigma_s_sq;
  std::optional<double> onsager;  // AMP only
  std::uint64_t cumulative_flops = 0;
  double residual_norm = 0.0;
};

using IterationTrace = std::vector<IterationRecord>;

enum class StopReason { MaxIterations, Converged, VarianceCollapsed };

struct RecoveryResult {
  Vector x_hat;
  Vector x_hat_quantized;
  int iterations_run = 0;
  IterationTrace trace;
  StopReason stop_reason = StopReason::MaxIterations;
};

// Step E for one iteration, given the current signal variance σ_S².
struct EstimationStep {
  std::shared_ptr<const LinearEstimator> estimator;
  double sigma_e_sq;
};

using EstimationPolicy = std::function<EstimationStep(double sigma_s_sq)>;

// Turbo loop with soft feedback and extrinsic (unbiased) values:
//   x̃ = x̂ + H·r, σ_E² from the policy, x̂_B = T(x̃), Eq.-7 unbiasing, r = y − A·x̂.
// ISF, TMS and IKS are this loop with different policies. Policy work is
// charged to the iteration it runs in.
RecoveryResult run_soft_feedback(const ProblemInstance& instance, const RecoveryConfig& config,
                                 const EstimationPolicy& policy);

RecoveryResult run_iht(const ProblemInstance& instance, const RecoveryConfig& config);
RecoveryResult run_ist(const ProblemInstance& instance, const RecoveryConfig& config);
RecoveryResult run_isf(const ProblemInstance& instance, const RecoveryConfig& config);
RecoveryResult run_amp(const ProblemInstance& instance, const RecoveryConfig& config);
RecoveryResult run_tms(const ProblemInstance& instance, const RecoveryConfig& config);
RecoveryResult run_ims(const ProblemInstance& instance, const RecoveryConfig& config);
RecoveryResult run_iks(const ProblemInstance& instance, const RecoveryConfig& config);

// Dispatches on config.algorithm.
RecoveryResult recover(const ProblemInstance& instance, const RecoveryConfig& config);

// One-time IKS precomputation (not part of the per-iteration cost).
struct IksSetup {
  double lambda_max;
  double sigma_s_sq;
  double alpha;
  std::shared_ptr<const LinearEstimator> estimator;
};

IksSetup iks_setup(const ProblemInstance& instance, double alpha_factor,
                   LambdaSource lambda_source = LambdaSource::Statistical);

// Initial signal variance E{x²} under the prior (s/L for unit-magnitude symbols).
double initial_signal_variance(const Prior& prior);

}  // namespace turbocs
