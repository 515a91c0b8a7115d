#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "turbocs/numerics.hpp"

namespace turbocs {

using Rng = std::mt19937_64;

struct Atom {
  double value;
  double prob;
};

// Finite atomic density over the signal alphabet, tied to a known sparsity s
// out of L entries. The zero atom carries probability (L - s) / L.
class Prior {
 public:
  Prior(std::vector<Atom> atoms, std::size_t sparsity, std::size_t dimension);

  // {-1, 0, +1} with P(±1) = s / (2L).
  static Prior ternary(std::size_t dimension, std::size_t sparsity);

  // Zero plus the given nonzero symbols, equiprobable on the support.
  static Prior uniform_nonzero(const std::vector<double>& symbols, std::size_t dimension,
                               std::size_t sparsity);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::vector<Atom> nonzero_atoms() const;
  std::size_t sparsity() const noexcept { return sparsity_; }
  std::size_t dimension() const noexcept { return dimension_; }

  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }

  // True when the atoms are mirror images with equal probabilities.
  bool is_symmetric() const noexcept { return symmetric_; }

 private:
  std::vector<Atom> atoms_;
  std::size_t sparsity_;
  std::size_t dimension_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  bool symmetric_ = false;
};

// One draw of y = A·x + n.
struct ProblemInstance {
  Matrix A;
  Vector x_true;
  Vector y;
  double sigma_n_sq;
  Prior prior;
};

// 10·log10(1/σ_N²) ↔ σ_N².
double noise_variance_from_db(double inv_noise_db);
double inv_noise_db_from_variance(double sigma_n_sq);

// K×L i.i.d. standard normal entries, drawn row by row.
Matrix gen_gaussian_matrix(Index rows, Index cols, Rng& rng);

// Scales every column to unit ℓ2 norm. Throws DegenerateMatrixError on a zero column.
void normalize_columns(Matrix& a);

// Column-normalized Gaussian sensing matrix; requires 1 <= K < L.
Matrix gen_sensing_matrix(Index rows, Index cols, Rng& rng);

// Exactly s nonzeros on a uniformly drawn support, symbols drawn from the
// renormalized nonzero atoms.
Vector gen_signal(const Prior& prior, Rng& rng);

// A·x plus i.i.d. N(0, sigma_n_sq) noise.
Vector observe(const Matrix& a, const Vector& x, double sigma_n_sq, Rng& rng);

ProblemInstance make_instance(Index rows, const Prior& prior, double sigma_n_sq, Rng& rng);

// Keeps the s largest magnitudes (ties: lowest index) and maps each to the
// nearest nonzero atom (ties: smaller value); zeroes the rest.
Vector quantize_final(const Vector& x_hat, const Prior& prior);

// Fraction of positions where the two vectors differ.
double ser(const Vector& x_hat_q, const Vector& x_true);

}  // namespace turbocs
