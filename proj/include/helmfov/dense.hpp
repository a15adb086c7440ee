#pragma once

#include <Eigen/LU>

#include "helmfov/common.hpp"

namespace helmfov {

enum class SolveMode { normal, conj_transpose };

/// Partial-pivoting LU of a dense complex square matrix.
class DenseLU {
 public:
  DenseLU() = default;
  /// Throws SingularMatrixError when a pivot is zero to working precision.
  explicit DenseLU(const CMatrix& a);

  Index size() const { return n_; }
  CVector solve(const CVector& b, SolveMode mode = SolveMode::normal) const;
  /// Max-norm of P*A - L*U relative to max|A|.
  double reconstruction_error(const CMatrix& a) const;

 private:
  Index n_ = 0;
  Eigen::PartialPivLU<CMatrix> lu_;
};

DenseLU lu_factor(const CMatrix& a);
CVector lu_solve(const DenseLU& lu, const CVector& b, SolveMode mode = SolveMode::normal);

/// Eigenvalues of a Hermitian matrix, ascending. Rejects inputs that are not
/// Hermitian to 1e-12 relative to their largest entry.
RVector dense_eig_hermitian(const CMatrix& a);

/// Eigenpairs of a Hermitian matrix (ascending; eigenvectors in columns).
struct HermitianEigenpairs {
  RVector values;
  CMatrix vectors;
};
HermitianEigenpairs dense_eigensystem_hermitian(const CMatrix& a);

/// 0.5 * (A + A^*).
CMatrix hermitian_part(const CMatrix& a);

}  // namespace helmfov
