#include <doctest.h>

#include <cmath>
#include <set>

#include "turbocs/model.hpp"

using namespace turbocs;

TEST_CASE("ternary prior") {
  const Prior p = Prior::ternary(258, 12);
  REQUIRE(p.atoms().size() == 3);
  CHECK(p.atoms()[0].value == -1.0);
  CHECK(p.atoms()[1].value == 0.0);
  CHECK(p.atoms()[2].value == 1.0);
  CHECK(p.atoms()[0].prob == doctest::Approx(6.0 / 258));
  CHECK(p.atoms()[1].prob == doctest::Approx(246.0 / 258));
  CHECK(p.mean() == 0.0);
  CHECK(p.variance() == doctest::Approx(12.0 / 258));
  CHECK(p.is_symmetric());
  CHECK(p.nonzero_atoms().size() == 2);
}

TEST_CASE("prior validation") {
  CHECK_THROWS_AS(Prior({{0.0, 0.5}, {1.0, 0.4}}, 1, 2), ConfigError);               // sum
  CHECK_THROWS_AS(Prior({{-1.0, 0.25}, {1.0, 0.75}}, 1, 4), ConfigError);            // no zero
  CHECK_THROWS_AS(Prior({{0.0, 0.5}, {1.0, 0.5}}, 1, 4), ConfigError);               // wrong zero mass
  CHECK_THROWS_AS(Prior::ternary(4, 5), ConfigError);
  CHECK_NOTHROW(Prior({{0.0, 0.75}, {2.0, 0.25}}, 1, 4));
  CHECK_FALSE(Prior({{0.0, 0.75}, {2.0, 0.25}}, 1, 4).is_symmetric());
  CHECK_FALSE(Prior::uniform_nonzero({-1.0, 2.0}, 8, 2).is_symmetric());
}

TEST_CASE("noise level conversion") {
  CHECK(noise_variance_from_db(17.0) == doctest::Approx(std::pow(10.0, -1.7)));
  CHECK(noise_variance_from_db(0.0) == 1.0);
  CHECK(inv_noise_db_from_variance(0.01) == doctest::Approx(20.0));
}

TEST_CASE("sensing matrix") {
  Rng rng(11);
  const Matrix a = gen_sensing_matrix(129, 258, rng);
  CHECK(a.rows() == 129);
  CHECK(a.cols() == 258);
  for (Index j = 0; j < a.cols(); ++j) CHECK(std::abs(a.col(j).norm() - 1.0) <= 1e-12);

  Rng again(11);
  CHECK(gen_sensing_matrix(129, 258, again) == a);

  CHECK_THROWS_AS(gen_sensing_matrix(8, 8, rng), ConfigError);
  CHECK_THROWS_AS(gen_sensing_matrix(0, 8, rng), ConfigError);
}

TEST_CASE("raw Gaussian entries have zero mean") {
  Rng rng(12);
  const Matrix g = gen_gaussian_matrix(1000, 1000, rng);
  CHECK(std::abs(g.mean()) <= 5e-3);
  Matrix z = Matrix::Ones(2, 2);
  z.col(1).setZero();
  CHECK_THROWS_AS(normalize_columns(z), DegenerateMatrixError);
}

TEST_CASE("signal generation") {
  const Prior p = Prior::ternary(258, 12);
  Rng rng(13);
  long plus = 0;
  long total = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vector x = gen_signal(p, rng);
    REQUIRE(x.size() == 258);
    Index nnz = 0;
    for (Index l = 0; l < x.size(); ++l) {
      if (x(l) == 0.0) continue;
      ++nnz;
      REQUIRE((x(l) == 1.0 || x(l) == -1.0));
      plus += x(l) > 0 ? 1 : 0;
      ++total;
    }
    REQUIRE(nnz == 12);
  }
  CHECK(std::abs(static_cast<double>(plus) / total - 0.5) <= 0.02);

  const Prior empty = Prior::ternary(10, 0);
  CHECK(gen_signal(empty, rng).isZero());
}

TEST_CASE("support is uniform") {
  const Prior p = Prior::ternary(8, 2);
  Rng rng(14);
  Vector hits = Vector::Zero(8);
  for (int i = 0; i < 40000; ++i) hits += gen_signal(p, rng).cwiseAbs();
  // expected 10000 per position, binomial sd ≈ 87
  for (Index l = 0; l < 8; ++l) CHECK(std::abs(hits(l) - 10000.0) < 450.0);
}

TEST_CASE("observation") {
  Rng rng(15);
  const Matrix a = gen_sensing_matrix(6, 10, rng);
  const Vector x = gen_signal(Prior::ternary(10, 3), rng);
  CHECK(observe(a, x, 0.0, rng) == a * x);

  Rng r1(16), r2(16);
  CHECK(observe(a, x, 0.3, r1) == observe(a, x, 0.3, r2));

  const Matrix wide = Matrix::Zero(100000, 1);
  const Vector y = observe(wide, Vector::Zero(1), 0.05, rng);
  const double var = (y.array() - y.mean()).square().sum() / (y.size() - 1);
  CHECK(std::abs(var / 0.05 - 1.0) <= 0.03);

  CHECK_THROWS_AS(observe(a, x, -1.0, rng), DomainError);
}

TEST_CASE("instances satisfy the model invariants") {
  const Prior p = Prior::ternary(40, 5);
  Rng rng(17);
  const ProblemInstance in = make_instance(20, p, 0.01, rng);
  CHECK(in.A.rows() == 20);
  CHECK(in.y.size() == 20);
  CHECK((in.x_true.array() != 0.0).count() == 5);
  for (Index j = 0; j < in.A.cols(); ++j) CHECK(std::abs(in.A.col(j).norm() - 1.0) <= 1e-12);
}

TEST_CASE("quantize_final") {
  const Prior p = Prior::ternary(4, 2);
  Vector v(4);
  v << 0.9, -0.8, 0.1, 0.05;
  Vector expect(4);
  expect << 1, -1, 0, 0;
  CHECK(quantize_final(v, p) == expect);

  Vector fixed(4);
  fixed << 0, -1, 0, 1;
  CHECK(quantize_final(fixed, p) == fixed);

  expect << -1, -1, 0, 0;
  CHECK(quantize_final(Vector::Zero(4), p) == expect);

  Vector ties(4);
  ties << 0.2, -0.5, 0.5, 0.1;
  expect << 0, -1, 1, 0;
  CHECK(quantize_final(ties, p) == expect);
}

TEST_CASE("quantize_final output lies in the alphabet with s nonzeros") {
  const Prior p = Prior::ternary(30, 4);
  Rng rng(18);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 200; ++rep) {
    Vector v(30);
    for (Index l = 0; l < 30; ++l) v(l) = normal(rng);
    const Vector q = quantize_final(v, p);
    CHECK((q.array() != 0.0).count() == 4);
    for (Index l = 0; l < 30; ++l) CHECK((q(l) == 0.0 || std::abs(q(l)) == 1.0));
  }
}

TEST_CASE("quantize_final with a wider alphabet") {
  const Prior p = Prior::uniform_nonzero({-3.0, -1.0, 1.0, 3.0}, 5, 2);
  Vector v(5);
  v << 2.0, 0.1, -2.6, 0.0, 0.2;
  Vector expect(5);
  expect << 1, 0, -3, 0, 0;  // 2.0 is equidistant from 1 and 3
  CHECK(quantize_final(v, p) == expect);
}

TEST_CASE("symbol error rate") {
  Vector a(4), b(4);
  a << 1, 0, 0, 0;
  b << 0, 0, 0, 1;
  CHECK(ser(a, a) == 0.0);
  CHECK(ser(a, b) == 0.5);
  CHECK(ser(b, a) == 0.5);
  CHECK(ser(a, -a + Vector::Constant(4, 3.0)) == 1.0);

  Vector pa(4), pb(4);
  pa << a(3), a(0), a(2), a(1);
  pb << b(3), b(0), b(2), b(1);
  CHECK(ser(pa, pb) == ser(a, b));
  CHECK_THROWS_AS(ser(a, Vector::Zero(3)), DimensionError);
}
