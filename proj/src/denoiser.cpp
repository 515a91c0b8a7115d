#include "turbocs/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace turbocs {

namespace {

// Per active atom: exponent (4), exp and shift (11), mean accumulation (3),
// centered second moment (4). Per call: 1/(2σ²) (2) and two normalizations (2).
constexpr std::uint64_t kFlopsPerAtom = 22;
constexpr std::uint64_t kFlopsPerCall = 4;

void require_positive_variance(double sigma_e_sq) {
  if (!(sigma_e_sq > 0.0)) {
    throw DomainError("denoiser: estimation variance must be positive, got " +
                      std::to_string(sigma_e_sq));
  }
}

std::uint64_t active_atoms(const Prior& prior) {
  std::uint64_t n = 0;
  for (const Atom& a : prior.atoms()) n += (a.prob > 0.0) ? 1 : 0;
  return n;
}

PosteriorMoments moments_unchecked(double x_tilde, double sigma_e_sq, const Prior& prior) {
  const auto& atoms = prior.atoms();
  const double inv_two_var = 1.0 / (2.0 * sigma_e_sq);

  double max_exp = -std::numeric_limits<double>::infinity();
  thread_local std::vector<double> log_w;
  log_w.assign(atoms.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms[j].prob <= 0.0) continue;
    const double d = x_tilde - atoms[j].value;
    log_w[j] = std::log(atoms[j].prob) - d * d * inv_two_var;
    max_exp = std::max(max_exp, log_w[j]);
  }

  double sum_w = 0.0;
  double sum_wx = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms[j].prob <= 0.0) continue;
    log_w[j] = std::exp(log_w[j] - max_exp);
    sum_w += log_w[j];
    sum_wx += log_w[j] * atoms[j].value;
  }
  const double mean = sum_wx / sum_w;

  double sum_wd2 = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (atoms[j].prob <= 0.0) continue;
    const double d = atoms[j].value - mean;
    sum_wd2 += log_w[j] * d * d;
  }
  return {mean, sum_wd2 / sum_w};
}

}  // namespace

PosteriorMoments posterior_moments(double x_tilde, double sigma_e_sq, const Prior& prior) {
  require_positive_variance(sigma_e_sq);
  if (prior.is_symmetric() && x_tilde < 0.0) {
    const PosteriorMoments m = moments_unchecked(-x_tilde, sigma_e_sq, prior);
    return {-m.mean, m.variance};
  }
  return moments_unchecked(x_tilde, sigma_e_sq, prior);
}

double soft_value(double x_tilde, double sigma_e_sq, const Prior& prior) {
  return posterior_moments(x_tilde, sigma_e_sq, prior).mean;
}

double soft_variance(double x_tilde, double sigma_e_sq, const Prior& prior) {
  return posterior_moments(x_tilde, sigma_e_sq, prior).variance;
}

SoftOutput soft_output(const Vector& x_tilde, double sigma_e_sq, const Prior& prior) {
  require_positive_variance(sigma_e_sq);
  const Index n = x_tilde.size();
  SoftOutput out{Vector(n), Vector(n), 0.0};
  for (Index l = 0; l < n; ++l) {
    const PosteriorMoments m = posterior_moments(x_tilde(l), sigma_e_sq, prior);
    out.x_hat_b(l) = m.mean;
    out.var_per_element(l) = m.variance;
  }
  out.var_avg = n > 0 ? out.var_per_element.mean() : 0.0;
  flops::charge(static_cast<std::uint64_t>(n) *
                    (kFlopsPerAtom * active_atoms(prior) + kFlopsPerCall) +
                static_cast<std::uint64_t>(n));
  return out;
}

SoftOutput soft_output(const Vector& x_tilde, const Vector& sigma_e_sq, const Prior& prior) {
  if (x_tilde.size() != sigma_e_sq.size()) {
    throw DimensionError("soft_output: " + std::to_string(x_tilde.size()) + " estimates but " +
                         std::to_string(sigma_e_sq.size()) + " variances");
  }
  const Index n = x_tilde.size();
  SoftOutput out{Vector(n), Vector(n), 0.0};
  for (Index l = 0; l < n; ++l) {
    const PosteriorMoments m = posterior_moments(x_tilde(l), sigma_e_sq(l), prior);
    out.x_hat_b(l) = m.mean;
    out.var_per_element(l) = m.variance;
  }
  out.var_avg = n > 0 ? out.var_per_element.mean() : 0.0;
  flops::charge(static_cast<std::uint64_t>(n) *
                    (kFlopsPerAtom * active_atoms(prior) + kFlopsPerCall) +
                static_cast<std::uint64_t>(n));
  return out;
}

std::pair<Vector, double> unbias(const Vector& x_hat_b, const Vector& x_tilde, double var_b,
                                 double var_prior_side) {
  if (x_hat_b.size() != x_tilde.size()) {
    throw DimensionError("unbias: lengths " + std::to_string(x_hat_b.size()) + " and " +
                         std::to_string(x_tilde.size()));
  }
  if (!(var_b > 0.0)) throw DomainError("unbias: biased variance must be positive");
  if (!(var_b < var_prior_side)) {
    throw NoInformationError("unbias: biased variance " + std::to_string(var_b) +
                             " is not below " + std::to_string(var_prior_side));
  }
  const double var = 1.0 / (1.0 / var_b - 1.0 / var_prior_side);
  const double wb = var / var_b;
  const double we = var / var_prior_side;
  flops::charge(3 * static_cast<std::uint64_t>(x_tilde.size()) + 6);
  Vector x = wb * x_hat_b - we * x_tilde;
  return {std::move(x), var};
}

std::pair<Vector, double> rebias(const Vector& x_hat, const Vector& x_tilde, double var,
                                 double var_prior_side) {
  if (x_hat.size() != x_tilde.size()) {
    throw DimensionError("rebias: lengths " + std::to_string(x_hat.size()) + " and " +
                         std::to_string(x_tilde.size()));
  }
  if (!(var > 0.0) || !(var_prior_side > 0.0)) {
    throw DomainError("rebias: variances must be positive");
  }
  const double var_b = 1.0 / (1.0 / var + 1.0 / var_prior_side);
  Vector x = (var_b / var) * x_hat + (var_b / var_prior_side) * x_tilde;
  return {std::move(x), var_b};
}

namespace {

// Indices ordered by decreasing magnitude, ties by increasing index.
std::vector<Index> magnitude_order(const Vector& v) {
  std::vector<Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(v(a)) > std::abs(v(b)); });
  return order;
}

}  // namespace

Vector hard_threshold_keep_s(const Vector& x_tilde, Index s) {
  if (s < 0 || s > x_tilde.size()) {
    throw DomainError("hard_threshold_keep_s: s=" + std::to_string(s) + " for length " +
                      std::to_string(x_tilde.size()));
  }
  const std::vector<Index> order = magnitude_order(x_tilde);
  Vector out = Vector::Zero(x_tilde.size());
  for (Index i = 0; i < s; ++i) {
    const Index l = order[static_cast<std::size_t>(i)];
    out(l) = x_tilde(l);
  }
  return out;
}

Vector soft_threshold_keep_s(const Vector& x_tilde, Index s) {
  if (s < 0 || s >= x_tilde.size()) {
    throw DomainError("soft_threshold_keep_s: need s < length, got s=" + std::to_string(s) +
                      " for length " + std::to_string(x_tilde.size()));
  }
  const std::vector<Index> order = magnitude_order(x_tilde);
  const double tau = std::abs(x_tilde(order[static_cast<std::size_t>(s)]));
  Vector out(x_tilde.size());
  for (Index l = 0; l < x_tilde.size(); ++l) {
    const double shrunk = std::abs(x_tilde(l)) - tau;
    out(l) = shrunk > 0.0 ? std::copysign(shrunk, x_tilde(l)) : 0.0;
  }
  flops::charge(2 * static_cast<std::uint64_t>(x_tilde.size()));
  return out;
}

}  // namespace turbocs
