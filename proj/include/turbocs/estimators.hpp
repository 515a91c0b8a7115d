#pragma once

#include <string_view>
#include <utility>

#include "turbocs/numerics.hpp"

namespace turbocs {

enum class EstimatorKind { MatchedFilter, Mmse, Krylov0, Krylov1 };

// Order of averaging and unbiasing when reducing per-element MMSE error
// variances to one scalar: AU uses the arithmetic mean of K_ll, UA the harmonic.
enum class VarianceMode { AU, UA };

// Where the λ_max(AAᵀ) used to pick α comes from: the Gaussian-ensemble edge
// (√L + √K)²/K, or the per-matrix row-sum bound.
enum class LambdaSource { Statistical, MatrixEstimate };

std::string_view to_string(EstimatorKind kind);
std::string_view to_string(VarianceMode mode);
VarianceMode parse_variance_mode(std::string_view name);
std::string_view to_string(LambdaSource source);
LambdaSource parse_lambda_source(std::string_view name);

// Immutable Step-E front end: x̃ = x̂ + H·(y − A·x̂).
struct LinearEstimator {
  EstimatorKind kind;
  Matrix H;       // L×K, unbiased: diag(H·A) = 1
  Vector k_diag;  // diagonal of the biased cascade H_B·A
  double mu_s = 0.0;
  double mu_n = 0.0;

  // H_B = diag(k_diag)·H.
  Matrix biased() const;

  // Average error variance σ_S²·μ_S + σ_N²·μ_N of the estimate.
  double error_variance(double sigma_s_sq, double sigma_n_sq) const {
    return sigma_s_sq * mu_s + sigma_n_sq * mu_n;
  }
};

// H = C·Aᵀ with c_l = 1/‖a_l‖². μ_S = L/K and μ_N = 1 reproduce mf_variance.
LinearEstimator matched_filter(const Matrix& a);

// (L/K)·σ_S² + σ_N², the matched-filter error variance for normalized Gaussian A.
double mf_variance(double sigma_s_sq, double sigma_n_sq, Index rows, Index cols);

// Unbiased LMMSE estimator. Scalar σ_S²: H_B = Aᵀ(AAᵀ + σ_N²/σ_S²·I)⁻¹.
// Per-element σ_S,l²: H_B = Φ·Aᵀ·(A·Φ·Aᵀ + σ_N²·I)⁻¹ with Φ = diag(σ_S,l²).
// H = diag(1/K_ll)·H_B.
LinearEstimator mmse(const Matrix& a, double sigma_n_sq, double sigma_s_sq);
LinearEstimator mmse(const Matrix& a, double sigma_n_sq, const Vector& sigma_s_sq);

struct ErrorVariances {
  Vector biased;    // σ_S²·(1 − K_ll)
  Vector unbiased;  // σ_S²·(1 − K_ll)/K_ll
};

ErrorVariances error_var_individual(const Vector& k_diag, double sigma_s_sq);
ErrorVariances error_var_individual(const Vector& k_diag, const Vector& sigma_s_sq);

// σ_S²·(1/M_H(K_ll) − 1): unbias each element, then average.
double variance_ua(const Vector& k_diag, double sigma_s_sq);

// σ_S²·(1/M_A(K_ll) − 1): average the biased variance, then unbias.
double variance_au(const Vector& k_diag, double sigma_s_sq);

double mmse_error_variance(const Vector& k_diag, double sigma_s_sq, VarianceMode mode);

// Row-sum bound max_l Σ_k |(AAᵀ)_lk| ≥ λ_max(AAᵀ).
double lambda_max_estimate(const Matrix& a);

// (√L + √K)²/K: the largest eigenvalue of AAᵀ for a column-normalized K×L
// Gaussian matrix in the large-system limit.
double lambda_max_statistical(Index rows, Index cols);

double lambda_max_for(const Matrix& a, LambdaSource source);

// 2/(σ_S²·λ_max + σ_N²): Neumann series stability limit for α.
double alpha_max(double lambda_max, double sigma_s_sq, double sigma_n_sq);

// H_B = α·σ_S²·Aᵀ, unbiased by c_l = 1/(α·σ_S²·‖a_l‖²).
LinearEstimator krylov_zeroth_order(const Matrix& a, double sigma_s_sq, double sigma_n_sq,
                                    double alpha);
LinearEstimator krylov_zeroth_order(const Matrix& a, double sigma_s_sq, double sigma_n_sq,
                                    double alpha, double lambda_max);

// H_B = γ·Aᵀ(I − β·AAᵀ), β = σ_S²/(2/α − σ_N²), γ = α·σ_S²·(2 − α·σ_N²), then
// unbiased; μ_S, μ_N are computed for the unbiased H. α is checked against the
// stability limit for the given λ_max (default: lambda_max_estimate(A)).
LinearEstimator krylov_first_order(const Matrix& a, double sigma_s_sq, double sigma_n_sq,
                                   double alpha);
LinearEstimator krylov_first_order(const Matrix& a, double sigma_s_sq, double sigma_n_sq,
                                   double alpha, double lambda_max);

struct ErrorCoefficients {
  double mu_s;
  double mu_n;
};

// μ_S = tr(H·A·Aᵀ·Hᵀ − Aᵀ·Hᵀ − H·A + I)/L and μ_N = tr(H·Hᵀ)/L, i.e. the
// average error variance of x̃ = H·y is σ_S²·μ_S + σ_N²·μ_N for white x and n.
ErrorCoefficients krylov_error_coeffs(const Matrix& h, const Matrix& a);

}  // namespace turbocs
