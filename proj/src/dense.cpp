#include "helmfov/dense.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace helmfov {

DenseLU::DenseLU(const CMatrix& a) : n_(a.rows()) {
  if (a.rows() != a.cols()) throw DimensionError("DenseLU: matrix is not square");
  if (n_ == 0) return;
  lu_.compute(a);
  const double scale = a.cwiseAbs().maxCoeff();
  const double threshold =
      std::numeric_limits<double>::epsilon() * static_cast<double>(n_) * scale;
  const auto& packed = lu_.matrixLU();
  for (Index i = 0; i < n_; ++i) {
    if (!(std::abs(packed(i, i)) > threshold)) {
      throw SingularMatrixError("DenseLU: pivot " + std::to_string(i) +
                                " is zero to working precision");
    }
  }
}

CVector DenseLU::solve(const CVector& b, SolveMode mode) const {
  require_size(b.size(), n_, "DenseLU::solve");
  if (n_ == 0) return b;
  if (mode == SolveMode::normal) return lu_.solve(b);
  return lu_.adjoint().solve(b);
}

double DenseLU::reconstruction_error(const CMatrix& a) const {
  if (n_ == 0) return 0.0;
  const CMatrix& packed = lu_.matrixLU();
  const CMatrix l = CMatrix(packed.triangularView<Eigen::UnitLower>());
  const CMatrix u = CMatrix(packed.triangularView<Eigen::Upper>());
  const CMatrix pa = lu_.permutationP() * a;
  return (pa - l * u).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), 1e-300);
}

DenseLU lu_factor(const CMatrix& a) { return DenseLU(a); }

CVector lu_solve(const DenseLU& lu, const CVector& b, SolveMode mode) { return lu.solve(b, mode); }

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

namespace {
void require_hermitian(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("dense_eig_hermitian: matrix is not square");
  if (a.size() == 0) return;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw std::invalid_argument("dense_eig_hermitian: input is not Hermitian");
  }
}
}  // namespace

RVector dense_eig_hermitian(const CMatrix& a) {
  require_hermitian(a);
  if (a.size() == 0) return RVector();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

HermitianEigenpairs dense_eigensystem_hermitian(const CMatrix& a) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace helmfov
