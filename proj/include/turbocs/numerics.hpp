#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "turbocs/errors.hpp"

namespace turbocs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Cost model: add, subtract, multiply, divide and sqrt cost one FLOP each;
// an exp evaluation costs kExpFlops.
inline constexpr std::uint64_t kExpFlops = 10;

class FlopCounter {
 public:
  std::uint64_t count() const noexcept { return count_; }
  void add(std::uint64_t n) noexcept { count_ += n; }
  void reset() noexcept { count_ = 0; }

 private:
  std::uint64_t count_ = 0;
};

namespace flops {

// Innermost counter installed on this thread, or nullptr outside any scope.
FlopCounter* active() noexcept;

// Charges n FLOPs to the innermost scope. Outside of any scope this is a no-op.
void charge(std::uint64_t n) noexcept;

}  // namespace flops

struct DetachedScope {};
inline constexpr DetachedScope detached{};

// RAII scope installing a fresh counter on the current thread. On destruction
// the scope's total is added to the enclosing scope, so nesting is additive.
// A detached scope swallows its count instead (one-time setup work).
class CounterScope {
 public:
  CounterScope() noexcept;
  explicit CounterScope(DetachedScope) noexcept;
  ~CounterScope();
  CounterScope(const CounterScope&) = delete;
  CounterScope& operator=(const CounterScope&) = delete;

  std::uint64_t count() const noexcept { return counter_.count(); }

 private:
  FlopCounter counter_;
  FlopCounter* parent_;
  bool propagate_ = true;
};

// Runs f under a fresh counter. Returns the FLOPs consumed for void f,
// otherwise the pair (result, flops).
template <typename F>
auto counter_scope(F&& f) {
  using R = std::invoke_result_t<F>;
  CounterScope scope;
  if constexpr (std::is_void_v<R>) {
    std::forward<F>(f)();
    return scope.count();
  } else {
    R result = std::forward<F>(f)();
    return std::pair<R, std::uint64_t>(std::move(result), scope.count());
  }
}

namespace detail {

inline std::string shape(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace detail

// M·v. Charges 2·rows·cols.
template <typename DerivedM, typename DerivedV>
VectorX<typename DerivedM::Scalar> mat_vec(const Eigen::MatrixBase<DerivedM>& m,
                                           const Eigen::MatrixBase<DerivedV>& v) {
  if (m.cols() != v.size()) {
    throw DimensionError("mat_vec: matrix " + detail::shape(m.rows(), m.cols()) +
                         " times vector of length " + std::to_string(v.size()));
  }
  flops::charge(2 * static_cast<std::uint64_t>(m.rows() * m.cols()));
  return m * v;
}

// Mᵀ·v without forming the transpose. Charges 2·rows·cols.
template <typename DerivedM, typename DerivedV>
VectorX<typename DerivedM::Scalar> mat_tvec(const Eigen::MatrixBase<DerivedM>& m,
                                            const Eigen::MatrixBase<DerivedV>& v) {
  if (m.rows() != v.size()) {
    throw DimensionError("mat_tvec: transpose of " + detail::shape(m.rows(), m.cols()) +
                         " times vector of length " + std::to_string(v.size()));
  }
  flops::charge(2 * static_cast<std::uint64_t>(m.rows() * m.cols()));
  return m.transpose() * v;
}

// Ma·Mb. Charges 2·Ma.rows·Ma.cols·Mb.cols.
template <typename DerivedA, typename DerivedB>
MatrixX<typename DerivedA::Scalar> mat_mat(const Eigen::MatrixBase<DerivedA>& a,
                                           const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("mat_mat: " + detail::shape(a.rows(), a.cols()) + " times " +
                         detail::shape(b.rows(), b.cols()));
  }
  flops::charge(2 * static_cast<std::uint64_t>(a.rows() * a.cols() * b.cols()));
  MatrixX<typename DerivedA::Scalar> out = a * b;
  return out;
}

// Solves M·X = B for symmetric positive definite M via a Cholesky factor; the
// inverse is never formed. Charges n³/3 + 2·n²·B.cols.
template <typename DerivedM, typename DerivedB>
MatrixX<typename DerivedM::Scalar> solve_spd(const Eigen::MatrixBase<DerivedM>& m,
                                             const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedM::Scalar;
  if (m.rows() != m.cols()) {
    throw DimensionError("solve_spd: matrix " + detail::shape(m.rows(), m.cols()) +
                         " is not square");
  }
  if (b.rows() != m.rows()) {
    throw DimensionError("solve_spd: matrix " + detail::shape(m.rows(), m.cols()) +
                         " with right-hand side " + detail::shape(b.rows(), b.cols()));
  }
  const Scalar asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= Scalar(1e-10))) {
    throw DomainError("solve_spd: matrix is not symmetric (max |M - M^T| = " +
                      std::to_string(static_cast<double>(asym)) + ")");
  }
  const double n = static_cast<double>(m.rows());
  flops::charge(static_cast<std::uint64_t>(
      std::llround(n * n * n / 3.0 + 2.0 * n * n * static_cast<double>(b.cols()))));

  Eigen::LLT<MatrixX<Scalar>> llt(m);
  if (llt.info() != Eigen::Success) {
    throw DegenerateMatrixError("solve_spd: matrix is not positive definite");
  }
  MatrixX<Scalar> x = llt.solve(b);
  return x;
}

// ‖v‖². Charges 2·n.
template <typename Derived>
typename Derived::Scalar squared_norm(const Eigen::MatrixBase<Derived>& v) {
  flops::charge(2 * static_cast<std::uint64_t>(v.size()));
  return v.squaredNorm();
}

// ‖a − b‖². Charges 3·n.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar squared_distance(const Eigen::MatrixBase<DerivedA>& a,
                                           const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) {
    throw DimensionError("squared_distance: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  flops::charge(3 * static_cast<std::uint64_t>(a.size()));
  return (a - b).squaredNorm();
}

}  // namespace turbocs
