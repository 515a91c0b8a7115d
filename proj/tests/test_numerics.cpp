#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "turbocs/numerics.hpp"

using namespace turbocs;

TEST_CASE("kernels charge the documented counts") {
  std::mt19937_64 rng(3);
  const Matrix a = oracle::random_gaussian(5, 7, rng);
  const Vector v = oracle::random_gaussian(7, 1, rng);
  const Vector w = oracle::random_gaussian(5, 1, rng);
  const Matrix b = oracle::random_gaussian(7, 4, rng);

  CHECK(counter_scope([&] { (void)mat_vec(a, v); }) == 2 * 5 * 7);
  CHECK(counter_scope([&] { (void)mat_tvec(a, w); }) == 2 * 5 * 7);
  CHECK(counter_scope([&] { (void)mat_mat(a, b); }) == 2 * 5 * 7 * 4);
  CHECK(counter_scope([&] { (void)squared_norm(v); }) == 14);
  CHECK(counter_scope([&] { (void)squared_distance(v, v); }) == 21);

  const Matrix m = oracle::random_spd(6, 10.0, rng);
  const Matrix rhs = oracle::random_gaussian(6, 3, rng);
  CHECK(counter_scope([&] { (void)solve_spd(m, rhs); }) == 72 + 216);
}

TEST_CASE("kernel results match plain Eigen") {
  std::mt19937_64 rng(4);
  const Matrix a = oracle::random_gaussian(9, 4, rng);
  const Vector v = oracle::random_gaussian(4, 1, rng);
  const Vector w = oracle::random_gaussian(9, 1, rng);
  CHECK((mat_vec(a, v) - a * v).norm() == doctest::Approx(0.0));
  CHECK((mat_tvec(a, w) - a.transpose() * w).norm() == doctest::Approx(0.0));
  CHECK(squared_norm(v) == doctest::Approx(v.squaredNorm()));
}

TEST_CASE("solve_spd agrees with an LU solve") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix m = oracle::random_spd(12, 1e4, rng);
    const Matrix b = oracle::random_gaussian(12, 5, rng);
    const Matrix x = solve_spd(m, b);
    const Matrix ref = m.partialPivLu().solve(b);
    CHECK((x - ref).norm() / ref.norm() < 1e-10);
  }
}

TEST_CASE("solve_spd rejects bad input") {
  Matrix m = Matrix::Identity(3, 3);
  const Matrix b = Matrix::Ones(3, 1);
  CHECK_THROWS_AS(solve_spd(m, Matrix::Ones(4, 1)), DimensionError);
  CHECK_THROWS_AS(solve_spd(Matrix::Ones(3, 2), b), DimensionError);
  m(0, 1) = 0.5;
  CHECK_THROWS_AS(solve_spd(m, b), DomainError);
  Matrix singular = Matrix::Zero(3, 3);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(solve_spd(singular, b), DegenerateMatrixError);
  Matrix indefinite = Matrix::Identity(3, 3);
  indefinite(2, 2) = -1.0;
  CHECK_THROWS_AS(solve_spd(indefinite, b), DegenerateMatrixError);
}

TEST_CASE("shape mismatches throw") {
  const Matrix a = Matrix::Ones(2, 3);
  CHECK_THROWS_AS(mat_vec(a, Vector::Ones(2)), DimensionError);
  CHECK_THROWS_AS(mat_tvec(a, Vector::Ones(3)), DimensionError);
  CHECK_THROWS_AS(mat_mat(a, a), DimensionError);
  CHECK_THROWS_AS(squared_distance(Vector::Ones(2), Vector::Ones(3)), DimensionError);
}

TEST_CASE("kernels work for float") {
  const MatrixX<float> a = MatrixX<float>::Identity(3, 3) * 2.0f;
  const VectorX<float> v = VectorX<float>::Ones(3);
  CHECK(mat_vec(a, v).sum() == doctest::Approx(6.0f));
  CHECK(solve_spd(a, v).sum() == doctest::Approx(1.5f));
}

TEST_CASE("nested scopes are additive") {
  CounterScope outer;
  flops::charge(5);
  {
    CounterScope inner;
    flops::charge(7);
    CHECK(inner.count() == 7);
  }
  CHECK(outer.count() == 12);
  {
    CounterScope setup(detached);
    flops::charge(100);
    CHECK(setup.count() == 100);
  }
  CHECK(outer.count() == 12);
}

TEST_CASE("charging outside any scope is a no-op") {
  CHECK(flops::active() == nullptr);
  flops::charge(3);
  CHECK(flops::active() == nullptr);
}

TEST_CASE("counter_scope returns the result and its cost") {
  const auto [value, cost] = counter_scope([] {
    flops::charge(4);
    return 42;
  });
  CHECK(value == 42);
  CHECK(cost == 4);
}
