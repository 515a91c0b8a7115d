#include "turbocs/estimators.hpp"

#include <cmath>
#include <string>

namespace turbocs {

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MatchedFilter: return "matched-filter";
    case EstimatorKind::Mmse: return "mmse";
    case EstimatorKind::Krylov0: return "krylov0";
    case EstimatorKind::Krylov1: return "krylov1";
  }
  return "unknown";
}

std::string_view to_string(VarianceMode mode) { return mode == VarianceMode::AU ? "AU" : "UA"; }

VarianceMode parse_variance_mode(std::string_view name) {
  if (name == "AU" || name == "au") return VarianceMode::AU;
  if (name == "UA" || name == "ua") return VarianceMode::UA;
  throw ConfigError("unknown variance mode '" + std::string(name) + "' (expected AU or UA)");
}

std::string_view to_string(LambdaSource source) {
  return source == LambdaSource::Statistical ? "statistical" : "estimate";
}

LambdaSource parse_lambda_source(std::string_view name) {
  if (name == "statistical") return LambdaSource::Statistical;
  if (name == "estimate") return LambdaSource::MatrixEstimate;
  throw ConfigError("unknown lambda source '" + std::string(name) +
                    "' (expected statistical or estimate)");
}

Matrix LinearEstimator::biased() const { return k_diag.asDiagonal() * H; }

namespace {

// K_ll = (H_B·A)_ll without forming the product. Charges 2·K·L.
Vector cascade_diagonal(const Matrix& h_biased, const Matrix& a) {
  flops::charge(2 * static_cast<std::uint64_t>(a.rows() * a.cols()));
  return (h_biased.array() * a.transpose().array()).rowwise().sum();
}

// Scales row l by 1/k_l. Charges L + L·K.
Matrix unbias_rows(const Matrix& h_biased, const Vector& k_diag) {
  for (Index l = 0; l < k_diag.size(); ++l) {
    if (!(k_diag(l) > 0.0)) {
      throw DegenerateMatrixError("estimator: cascade diagonal entry " + std::to_string(l) +
                                  " is not positive");
    }
  }
  flops::charge(static_cast<std::uint64_t>(h_biased.rows()) *
                (1 + static_cast<std::uint64_t>(h_biased.cols())));
  return k_diag.cwiseInverse().asDiagonal() * h_biased;
}

}  // namespace

LinearEstimator matched_filter(const Matrix& a) {
  const Vector col_sq = a.colwise().squaredNorm().transpose();
  for (Index l = 0; l < col_sq.size(); ++l) {
    if (col_sq(l) == 0.0) {
      throw DegenerateMatrixError("matched_filter: column " + std::to_string(l) + " is zero");
    }
  }
  LinearEstimator est{EstimatorKind::MatchedFilter,
                      col_sq.cwiseInverse().asDiagonal() * a.transpose(),
                      Vector::Ones(a.cols()),
                      static_cast<double>(a.cols()) / static_cast<double>(a.rows()), 1.0};
  return est;
}

double mf_variance(double sigma_s_sq, double sigma_n_sq, Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw DomainError("mf_variance: dimensions must be positive");
  return static_cast<double>(cols) / static_cast<double>(rows) * sigma_s_sq + sigma_n_sq;
}

LinearEstimator mmse(const Matrix& a, double sigma_n_sq, double sigma_s_sq) {
  return mmse(a, sigma_n_sq, Vector::Constant(a.cols(), sigma_s_sq));
}

LinearEstimator mmse(const Matrix& a, double sigma_n_sq, const Vector& sigma_s_sq) {
  if (sigma_s_sq.size() != a.cols()) {
    throw DimensionError("mmse: " + std::to_string(sigma_s_sq.size()) +
                         " signal variances for " + std::to_string(a.cols()) + " columns");
  }
  if (!(sigma_n_sq > 0.0)) throw DomainError("mmse: noise variance must be positive");
  if (!(sigma_s_sq.minCoeff() > 0.0)) {
    throw DomainError("mmse: signal variances must be positive");
  }

  // H_B = Φ·Aᵀ·G⁻¹ = (G⁻¹·A·Φ)ᵀ with G = A·Φ·Aᵀ + σ_N²·I symmetric.
  flops::charge(static_cast<std::uint64_t>(a.rows() * a.cols()));
  const Matrix a_phi = a * sigma_s_sq.asDiagonal();
  Matrix gram = mat_mat(a_phi, a.transpose());
  gram.diagonal().array() += sigma_n_sq;
  flops::charge(static_cast<std::uint64_t>(a.rows()));
  const Matrix h_biased = solve_spd(gram, a_phi).transpose();

  Vector k_diag = cascade_diagonal(h_biased, a);
  Matrix h = unbias_rows(h_biased, k_diag);
  return LinearEstimator{EstimatorKind::Mmse, std::move(h), std::move(k_diag), 0.0, 0.0};
}

namespace {

void require_k_domain(const Vector& k_diag, const char* op) {
  if (k_diag.size() == 0) throw DomainError(std::string(op) + ": empty cascade diagonal");
  if (!(k_diag.minCoeff() > 0.0)) {
    throw DomainError(std::string(op) + ": cascade diagonal entries must be positive");
  }
}

}  // namespace

ErrorVariances error_var_individual(const Vector& k_diag, double sigma_s_sq) {
  return error_var_individual(k_diag, Vector::Constant(k_diag.size(), sigma_s_sq));
}

ErrorVariances error_var_individual(const Vector& k_diag, const Vector& sigma_s_sq) {
  require_k_domain(k_diag, "error_var_individual");
  if (sigma_s_sq.size() != k_diag.size()) {
    throw DimensionError("error_var_individual: inconsistent lengths");
  }
  flops::charge(4 * static_cast<std::uint64_t>(k_diag.size()));
  const Vector one_minus_k = (1.0 - k_diag.array()).matrix();
  Vector biased = sigma_s_sq.cwiseProduct(one_minus_k);
  Vector unbiased = biased.cwiseQuotient(k_diag);
  return {std::move(biased), std::move(unbiased)};
}

double variance_ua(const Vector& k_diag, double sigma_s_sq) {
  require_k_domain(k_diag, "variance_ua");
  flops::charge(2 * static_cast<std::uint64_t>(k_diag.size()) + 3);
  // 1/M_H = mean(1/K_ll)
  return sigma_s_sq * (k_diag.cwiseInverse().mean() - 1.0);
}

double variance_au(const Vector& k_diag, double sigma_s_sq) {
  require_k_domain(k_diag, "variance_au");
  flops::charge(static_cast<std::uint64_t>(k_diag.size()) + 4);
  return sigma_s_sq * (1.0 / k_diag.mean() - 1.0);
}

double mmse_error_variance(const Vector& k_diag, double sigma_s_sq, VarianceMode mode) {
  return mode == VarianceMode::AU ? variance_au(k_diag, sigma_s_sq)
                                  : variance_ua(k_diag, sigma_s_sq);
}

double lambda_max_estimate(const Matrix& a) {
  const Matrix gram = a * a.transpose();
  return gram.cwiseAbs().rowwise().sum().maxCoeff();
}

double lambda_max_statistical(Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw DomainError("lambda_max_statistical: dimensions must be positive");
  const double root = std::sqrt(static_cast<double>(cols)) + std::sqrt(static_cast<double>(rows));
  return root * root / static_cast<double>(rows);
}

double lambda_max_for(const Matrix& a, LambdaSource source) {
  return source == LambdaSource::Statistical ? lambda_max_statistical(a.rows(), a.cols())
                                             : lambda_max_estimate(a);
}

double alpha_max(double lambda_max, double sigma_s_sq, double sigma_n_sq) {
  return 2.0 / (sigma_s_sq * lambda_max + sigma_n_sq);
}

namespace {

void require_stable_alpha(double lambda_max, double sigma_s_sq, double sigma_n_sq,
                          double alpha) {
  if (!(sigma_s_sq > 0.0) || sigma_n_sq < 0.0) {
    throw DomainError("krylov: need σ_S² > 0 and σ_N² >= 0");
  }
  if (!(lambda_max > 0.0)) throw DomainError("krylov: λ_max must be positive");
  const double limit = alpha_max(lambda_max, sigma_s_sq, sigma_n_sq);
  if (!(alpha > 0.0 && alpha < limit)) {
    throw StabilityError("krylov: alpha=" + std::to_string(alpha) + " outside (0, " +
                         std::to_string(limit) + ")");
  }
}

}  // namespace

LinearEstimator krylov_zeroth_order(const Matrix& a, double sigma_s_sq, double sigma_n_sq,
                                    double alpha) {
  return krylov_zeroth_order(a, sigma_s_sq, sigma_n_sq, alpha, lambda_max_estimate(a));
}

LinearEstimator krylov_zeroth_order(const Matrix& a, double sigma_s_sq, double sigma_n_sq,
                                    double alpha, double lambda_max) {
  require_stable_alpha(lambda_max, sigma_s_sq, sigma_n_sq, alpha);
  const Matrix h_biased = (alpha * sigma_s_sq) * a.transpose();
  Vector k_diag = cascade_diagonal(h_biased, a);
  Matrix h = unbias_rows(h_biased, k_diag);
  const ErrorCoefficients mu = krylov_error_coeffs(h, a);
  return LinearEstimator{EstimatorKind::Krylov0, std::move(h), std::move(k_diag), mu.mu_s,
                         mu.mu_n};
}

LinearEstimator krylov_first_order(const Matrix& a, double sigma_s_sq, double sigma_n_sq,
                                   double alpha) {
  return krylov_first_order(a, sigma_s_sq, sigma_n_sq, alpha, lambda_max_estimate(a));
}

LinearEstimator krylov_first_order(const Matrix& a, double sigma_s_sq, double sigma_n_sq,
                                   double alpha, double lambda_max) {
  require_stable_alpha(lambda_max, sigma_s_sq, sigma_n_sq, alpha);
  const double beta = sigma_s_sq / (2.0 / alpha - sigma_n_sq);
  const double gamma = alpha * sigma_s_sq * (2.0 - alpha * sigma_n_sq);

  Matrix shaping = -beta * mat_mat(a, a.transpose());
  shaping.diagonal().array() += 1.0;
  const Matrix h_biased = gamma * mat_mat(a.transpose(), shaping);

  Vector k_diag = cascade_diagonal(h_biased, a);
  Matrix h = unbias_rows(h_biased, k_diag);
  const ErrorCoefficients mu = krylov_error_coeffs(h, a);
  return LinearEstimator{EstimatorKind::Krylov1, std::move(h), std::move(k_diag), mu.mu_s,
                         mu.mu_n};
}

ErrorCoefficients krylov_error_coeffs(const Matrix& h, const Matrix& a) {
  if (h.rows() != a.cols() || h.cols() != a.rows()) {
    throw DimensionError("krylov_error_coeffs: H " + detail::shape(h.rows(), h.cols()) +
                         " does not match A " + detail::shape(a.rows(), a.cols()));
  }
  // tr(M_S) = ‖H·A − I‖²_F, tr(M_N) = ‖H‖²_F.
  const double L = static_cast<double>(a.cols());
  Matrix cascade = mat_mat(h, a);
  cascade.diagonal().array() -= 1.0;
  return {cascade.squaredNorm() / L, h.squaredNorm() / L};
}

}  // namespace turbocs
