#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace helmfov {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Operand sizes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization met a pivot that is zero to working precision.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An inner iterative solve that must succeed did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CG saw non-positive curvature; the operator or preconditioner is not SPD.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_size(Index got, Index expected, const char* what) {
  if (got != expected) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(got));
  }
}

/// Splits a complex vector and applies a real linear map to both parts.
template <typename RealMap>
CVector apply_componentwise(const CVector& x, RealMap&& map) {
  const RVector re = map(RVector(x.real()));
  const RVector im = map(RVector(x.imag()));
  CVector y(re.size());
  y.real() = re;
  y.imag() = im;
  return y;
}

}  // namespace helmfov
