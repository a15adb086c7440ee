#pragma once

#include <functional>
#include <memory>
#include <utility>

#include "helmfov/common.hpp"
#include "helmfov/sparse.hpp"

namespace helmfov {

/// Square operator given by its action and (optionally) the action of its
/// adjoint. Copies share the underlying callables.
template <typename Scalar>
class BasicLinearOperator {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Action = std::function<Vector(const Vector&)>;

  BasicLinearOperator() = default;
  BasicLinearOperator(Index n, Action apply, Action apply_adjoint = {})
      : n_(n), apply_(std::move(apply)), adjoint_(std::move(apply_adjoint)) {}

  Index size() const { return n_; }
  bool has_adjoint() const { return static_cast<bool>(adjoint_); }

  Vector apply(const Vector& x) const {
    require_size(x.size(), n_, "LinearOperator::apply");
    return apply_(x);
  }
  Vector apply_adjoint(const Vector& x) const {
    if (!adjoint_) throw std::logic_error("LinearOperator: adjoint not available");
    require_size(x.size(), n_, "LinearOperator::apply_adjoint");
    return adjoint_(x);
  }
  Vector operator()(const Vector& x) const { return apply(x); }

  BasicLinearOperator adjoint() const { return BasicLinearOperator(n_, adjoint_, apply_); }

  static BasicLinearOperator identity(Index n) {
    auto id = [](const Vector& x) { return x; };
    return BasicLinearOperator(n, id, id);
  }

  template <typename T>
  static BasicLinearOperator from_matrix(std::shared_ptr<const CsrMatrix<T>> a) {
    if (a->rows() != a->cols()) throw DimensionError("LinearOperator: matrix not square");
    return BasicLinearOperator(
        a->rows(), [a](const Vector& x) -> Vector { return a->multiply(x); },
        [a](const Vector& x) -> Vector { return a->multiply_adjoint(x); });
  }

  static BasicLinearOperator from_dense(
      const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) {
    if (a.rows() != a.cols()) throw DimensionError("LinearOperator: matrix not square");
    auto m = std::make_shared<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>(a);
    return BasicLinearOperator(
        a.rows(), [m](const Vector& x) -> Vector { return (*m) * x; },
        [m](const Vector& x) -> Vector { return m->adjoint() * x; });
  }

 private:
  Index n_ = 0;
  Action apply_;
  Action adjoint_;
};

using LinearOperator = BasicLinearOperator<Complex>;
using RealLinearOperator = BasicLinearOperator<double>;

/// a * b; the adjoint is b^* a^* when both factors provide one.
template <typename S>
BasicLinearOperator<S> compose(const BasicLinearOperator<S>& a, const BasicLinearOperator<S>& b) {
  if (a.size() != b.size()) throw DimensionError("compose: sizes differ");
  using V = typename BasicLinearOperator<S>::Vector;
  typename BasicLinearOperator<S>::Action adj;
  if (a.has_adjoint() && b.has_adjoint()) {
    adj = [a, b](const V& x) -> V { return b.apply_adjoint(a.apply_adjoint(x)); };
  }
  return BasicLinearOperator<S>(
      a.size(), [a, b](const V& x) -> V { return a.apply(b.apply(x)); }, adj);
}

/// alpha * a.
inline LinearOperator scaled(Complex alpha, const LinearOperator& a) {
  LinearOperator::Action adj;
  if (a.has_adjoint()) {
    adj = [alpha, a](const CVector& x) -> CVector { return std::conj(alpha) * a.apply_adjoint(x); };
  }
  return LinearOperator(
      a.size(), [alpha, a](const CVector& x) -> CVector { return alpha * a.apply(x); }, adj);
}

/// 0.5 * (a + a^*), itself Hermitian.
inline LinearOperator hermitian_part(const LinearOperator& a) {
  if (!a.has_adjoint()) throw std::logic_error("hermitian_part: adjoint required");
  auto h = [a](const CVector& x) -> CVector { return 0.5 * (a.apply(x) + a.apply_adjoint(x)); };
  return LinearOperator(a.size(), h, h);
}

/// Dense matrix of an operator, column by column (small problems only).
inline CMatrix to_dense(const LinearOperator& a) {
  CMatrix m(a.size(), a.size());
  for (Index j = 0; j < a.size(); ++j) m.col(j) = a.apply(CVector::Unit(a.size(), j));
  return m;
}

}  // namespace helmfov
