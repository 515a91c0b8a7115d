#pragma once

#include <utility>

#include "turbocs/model.hpp"
#include "turbocs/numerics.hpp"

namespace turbocs {

// Variances below this are treated as zero by the recovery loops.
inline constexpr double kVarianceFloor = 1e-15;

struct PosteriorMoments {
  double mean;
  double variance;
};

// Posterior mean and variance of x given x̃ = x + N(0, sigma_e_sq), x ~ prior.
// Weights are formed in the log domain with the largest exponent subtracted.
// For a symmetric prior the evaluation is done at |x̃| so odd/even symmetry is exact.
PosteriorMoments posterior_moments(double x_tilde, double sigma_e_sq, const Prior& prior);

// E{x | x̃}: the MMSE soft value.
double soft_value(double x_tilde, double sigma_e_sq, const Prior& prior);

// E{(x - T(x̃))² | x̃} = σ_E² · T'(x̃).
double soft_variance(double x_tilde, double sigma_e_sq, const Prior& prior);

struct SoftOutput {
  Vector x_hat_b;          // biased soft values T(x̃_l)
  Vector var_per_element;  // σ_T²(x̃_l)
  double var_avg;          // arithmetic mean of var_per_element
};

// Element-wise soft values with a common estimation variance.
SoftOutput soft_output(const Vector& x_tilde, double sigma_e_sq, const Prior& prior);

// Element-wise soft values with individual estimation variances.
SoftOutput soft_output(const Vector& x_tilde, const Vector& sigma_e_sq, const Prior& prior);

// Removes the input's contribution from an MMSE output (extrinsic value):
//   σ² = (1/var_b − 1/var_prior_side)⁻¹,  x̂ = σ²·(x̂_B/var_b − x̃/var_prior_side).
// Requires 0 < var_b < var_prior_side; otherwise throws NoInformationError.
std::pair<Vector, double> unbias(const Vector& x_hat_b, const Vector& x_tilde, double var_b,
                                 double var_prior_side);

// Algebraic inverse of unbias: recombines the extrinsic estimate with x̃.
std::pair<Vector, double> rebias(const Vector& x_hat, const Vector& x_tilde, double var,
                                 double var_prior_side);

// Keeps the s largest magnitudes unchanged (ties: lowest index), zeroes the rest.
Vector hard_threshold_keep_s(const Vector& x_tilde, Index s);

// Shrinks by τ = the (s+1)-th largest magnitude; at most s entries survive.
Vector soft_threshold_keep_s(const Vector& x_tilde, Index s);

}  // namespace turbocs
