#include "turbocs/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace turbocs {

namespace {

constexpr double kProbTol = 1e-12;

}  // namespace

Prior::Prior(std::vector<Atom> atoms, std::size_t sparsity, std::size_t dimension)
    : atoms_(std::move(atoms)), sparsity_(sparsity), dimension_(dimension) {
  if (dimension_ == 0) throw ConfigError("Prior: dimension must be positive");
  if (sparsity_ > dimension_) {
    throw ConfigError("Prior: sparsity " + std::to_string(sparsity_) + " exceeds dimension " +
                      std::to_string(dimension_));
  }
  if (atoms_.empty()) throw ConfigError("Prior: no atoms");

  const double L = static_cast<double>(dimension_);
  const double s = static_cast<double>(sparsity_);
  double total = 0.0;
  double nonzero_total = 0.0;
  std::size_t zero_atoms = 0;
  double zero_prob = 0.0;
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.value) || !(a.prob >= 0.0)) {
      throw ConfigError("Prior: atoms need finite values and non-negative probabilities");
    }
    total += a.prob;
    if (a.value == 0.0) {
      ++zero_atoms;
      zero_prob = a.prob;
    } else {
      nonzero_total += a.prob;
    }
  }
  if (std::abs(total - 1.0) > kProbTol) throw ConfigError("Prior: probabilities must sum to 1");
  if (zero_atoms != 1) throw ConfigError("Prior: exactly one atom must be zero");
  if (std::abs(zero_prob - (L - s) / L) > kProbTol) {
    throw ConfigError("Prior: zero atom must have probability (L - s) / L");
  }
  if (std::abs(nonzero_total - s / L) > kProbTol) {
    throw ConfigError("Prior: nonzero atoms must carry probability s / L");
  }
  if (sparsity_ > 0 && atoms_.size() < 2) {
    throw ConfigError("Prior: sparse signals need at least one nonzero atom");
  }

  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });

  for (const Atom& a : atoms_) mean_ += a.prob * a.value;
  for (const Atom& a : atoms_) variance_ += a.prob * (a.value - mean_) * (a.value - mean_);

  symmetric_ = true;
  for (std::size_t i = 0, j = atoms_.size() - 1; i < j; ++i, --j) {
    if (atoms_[i].value != -atoms_[j].value || atoms_[i].prob != atoms_[j].prob) {
      symmetric_ = false;
      break;
    }
  }
  if (atoms_.size() % 2 == 0) symmetric_ = false;
}

Prior Prior::ternary(std::size_t dimension, std::size_t sparsity) {
  return uniform_nonzero({-1.0, 1.0}, dimension, sparsity);
}

Prior Prior::uniform_nonzero(const std::vector<double>& symbols, std::size_t dimension,
                             std::size_t sparsity) {
  if (dimension == 0) throw ConfigError("Prior: dimension must be positive");
  if (symbols.empty()) throw ConfigError("Prior: no nonzero symbols given");
  const double L = static_cast<double>(dimension);
  const double s = static_cast<double>(sparsity);
  const double p = s / L / static_cast<double>(symbols.size());
  std::vector<Atom> atoms;
  atoms.push_back({0.0, (L - s) / L});
  for (double v : symbols) {
    if (v == 0.0) throw ConfigError("Prior: nonzero symbol list contains 0");
    atoms.push_back({v, p});
  }
  return Prior(std::move(atoms), sparsity, dimension);
}

std::vector<Atom> Prior::nonzero_atoms() const {
  std::vector<Atom> out;
  for (const Atom& a : atoms_) {
    if (a.value != 0.0) out.push_back(a);
  }
  return out;
}

double noise_variance_from_db(double inv_noise_db) { return std::pow(10.0, -inv_noise_db / 10.0); }

double inv_noise_db_from_variance(double sigma_n_sq) { return -10.0 * std::log10(sigma_n_sq); }

Matrix gen_gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) a(i, j) = normal(rng);
  }
  return a;
}

void normalize_columns(Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    if (norm == 0.0) {
      throw DegenerateMatrixError("normalize_columns: column " + std::to_string(j) + " is zero");
    }
    a.col(j) /= norm;
  }
}

Matrix gen_sensing_matrix(Index rows, Index cols, Rng& rng) {
  if (rows < 1 || rows >= cols) {
    throw ConfigError("gen_sensing_matrix: need 1 <= K < L, got K=" + std::to_string(rows) +
                      ", L=" + std::to_string(cols));
  }
  Matrix a = gen_gaussian_matrix(rows, cols, rng);
  normalize_columns(a);
  return a;
}

Vector gen_signal(const Prior& prior, Rng& rng) {
  const std::size_t L = prior.dimension();
  const std::size_t s = prior.sparsity();
  if (s > L) throw ConfigError("gen_signal: sparsity exceeds dimension");

  Vector x = Vector::Zero(static_cast<Index>(L));
  if (s == 0) return x;

  // Partial Fisher-Yates: the first s slots become the support.
  std::vector<Index> idx(L);
  std::iota(idx.begin(), idx.end(), Index{0});
  for (std::size_t i = 0; i < s; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, L - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }

  const std::vector<Atom> nz = prior.nonzero_atoms();
  std::vector<double> weights;
  weights.reserve(nz.size());
  for (const Atom& a : nz) weights.push_back(a.prob);
  std::discrete_distribution<std::size_t> symbol(weights.begin(), weights.end());
  for (std::size_t i = 0; i < s; ++i) x(idx[i]) = nz[symbol(rng)].value;
  return x;
}

Vector observe(const Matrix& a, const Vector& x, double sigma_n_sq, Rng& rng) {
  if (sigma_n_sq < 0.0) throw DomainError("observe: negative noise variance");
  Vector y = mat_vec(a, x);
  if (sigma_n_sq > 0.0) {
    std::normal_distribution<double> noise(0.0, std::sqrt(sigma_n_sq));
    for (Index k = 0; k < y.size(); ++k) y(k) += noise(rng);
  }
  return y;
}

ProblemInstance make_instance(Index rows, const Prior& prior, double sigma_n_sq, Rng& rng) {
  Matrix a = gen_sensing_matrix(rows, static_cast<Index>(prior.dimension()), rng);
  Vector x = gen_signal(prior, rng);
  Vector y = observe(a, x, sigma_n_sq, rng);
  return ProblemInstance{std::move(a), std::move(x), std::move(y), sigma_n_sq, prior};
}

Vector quantize_final(const Vector& x_hat, const Prior& prior) {
  const Index L = x_hat.size();
  const Index s = std::min<Index>(static_cast<Index>(prior.sparsity()), L);
  std::vector<Index> order(static_cast<std::size_t>(L));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(x_hat(a)) > std::abs(x_hat(b));
  });

  // Atoms are sorted ascending, so a strict comparison keeps the smaller value on ties.
  const std::vector<Atom> nz = prior.nonzero_atoms();
  Vector out = Vector::Zero(L);
  if (nz.empty()) return out;
  for (Index i = 0; i < s; ++i) {
    const Index l = order[static_cast<std::size_t>(i)];
    double best = nz.front().value;
    double best_dist = std::abs(x_hat(l) - best);
    for (const Atom& a : nz) {
      const double d = std::abs(x_hat(l) - a.value);
      if (d < best_dist) {
        best = a.value;
        best_dist = d;
      }
    }
    out(l) = best;
  }
  return out;
}

double ser(const Vector& x_hat_q, const Vector& x_true) {
  if (x_hat_q.size() != x_true.size()) {
    throw DimensionError("ser: lengths " + std::to_string(x_hat_q.size()) + " and " +
                         std::to_string(x_true.size()));
  }
  if (x_true.size() == 0) return 0.0;
  Index errors = 0;
  for (Index i = 0; i < x_true.size(); ++i) errors += (x_hat_q(i) != x_true(i)) ? 1 : 0;
  return static_cast<double>(errors) / static_cast<double>(x_true.size());
}

}  // namespace turbocs
