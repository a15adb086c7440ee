#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "helmfov/assembly.hpp"
#include "helmfov/dense.hpp"
#include "helmfov/linear_operator.hpp"
#include "helmfov/multigrid.hpp"

namespace helmfov {

/// Which right preconditioner to build; parsed from "laplace", "mg:N" or
/// "twolevel:L".
struct PrecondSpec {
  enum class Kind { exact_laplace, mg_laplace, two_level };

  Kind kind = Kind::exact_laplace;
  int cycles = 1;        // mg_laplace
  int coarse_level = 1;  // two_level

  static PrecondSpec exact_laplace();
  static PrecondSpec mg_laplace(int cycles);
  static PrecondSpec two_level(int coarse_level);
  /// Throws std::invalid_argument on malformed strings.
  static PrecondSpec parse(std::string_view text);

  /// Checks cycles >= 1 and 1 <= coarse_level < fine_level.
  void validate(int fine_level) const;
  std::string to_string() const;
};

/// Mesh hierarchy from level 1 up to the fine level, the multigrid built on
/// it, the exact Laplace solver and the fine Helmholtz problem.
struct Discretization {
  std::shared_ptr<const MeshHierarchy> meshes;
  std::shared_ptr<const MgHierarchy> mg;
  std::shared_ptr<const LaplaceSolver> laplace;
  std::shared_ptr<const HelmholtzProblem> problem;

  int dim() const { return meshes->dim(); }
  int fine_level() const { return meshes->finest(); }
  Index size() const { return problem->size(); }
  const MeshLevel& fine_mesh() const { return meshes->level(meshes->finest()); }
};

struct DiscretizationOptions {
  MeshOptions mesh;
  MgOptions mg;
  LaplaceSolverOptions laplace;
};

Discretization discretize(int dim, int level, double kappa2, const LossProfile& loss,
                          const DiscretizationOptions& options = {});

/// Same meshes, multigrid and Laplace solver with a new (kappa2, loss).
Discretization with_coefficients(const Discretization& base, double kappa2,
                                 const LossProfile& loss);

/// A and its conjugate transpose.
LinearOperator system_operator(const HelmholtzProblem& problem);
/// M (real symmetric) acting on complex vectors.
LinearOperator mass_operator(const HelmholtzProblem& problem);

/// K^{-1} M; adjoint M K^{-1}.
LinearOperator exact_laplace_preconditioner(const Discretization& disc);
/// K~^{-N} M with N V-cycles; adjoint M K~^{-N}.
LinearOperator mg_laplace_preconditioner(const Discretization& disc, int cycles);
/// A (K~^{-N} - K^{-1}) M; adjoint M (K~^{-N} - K^{-1}) A^*.
LinearOperator perturbation_operator(const Discretization& disc, int cycles);

/// Factorization of the coarse system matrix with plain and adjoint solves.
/// Small systems use DenseLU, larger ones a sparse LU.
class CoarseSolver {
 public:
  explicit CoarseSolver(const SparseComplexMatrix& a, Index dense_threshold = 1500);
  ~CoarseSolver();
  CoarseSolver(const CoarseSolver&) = delete;
  CoarseSolver& operator=(const CoarseSolver&) = delete;

  Index size() const { return n_; }
  bool is_dense() const { return dense_ != nullptr; }
  CVector solve(const CVector& b, SolveMode mode = SolveMode::normal) const;

 private:
  struct SparseImpl;
  Index n_ = 0;
  std::unique_ptr<DenseLU> dense_;
  std::unique_ptr<SparseImpl> sparse_;
};

/// Pieces of the two-level preconditioner
///   B2 = R A_H^{-1} R^T M + K^{-1} (I - A R A_H^{-1} R^T) M
/// with A_H assembled directly on the coarse mesh and R the composite
/// prolongation. coarse_level == fine level is allowed (R = I).
class TwoLevelOperators {
 public:
  TwoLevelOperators(const Discretization& disc, int coarse_level);

  int coarse_level() const { return coarse_level_; }
  const HelmholtzProblem& coarse_problem() const { return coarse_; }
  const SparseRealMatrix& prolongation() const { return r_; }

  /// R A_H^{-1} R^T v.
  CVector coarse_correction(const CVector& v) const;
  /// R A_H^{-*} R^T v.
  CVector coarse_correction_adjoint(const CVector& v) const;

  CVector apply(const CVector& x) const;
  CVector apply_adjoint(const CVector& x) const;
  /// K^{-1} (I - A R A_H^{-1} R^T) M x.
  CVector residual_correction(const CVector& x) const;
  /// R A_H^{-*} R^T A^* x, the matrix of the a-orthogonal projection onto V_H.
  CVector projection(const CVector& x) const;

  LinearOperator as_operator() const;

 private:
  const Discretization disc_;
  int coarse_level_;
  HelmholtzProblem coarse_;
  SparseRealMatrix r_;
  std::shared_ptr<const CoarseSolver> solver_;
};

/// B2 as a LinearOperator; keeps its TwoLevelOperators alive.
LinearOperator two_level_preconditioner(const Discretization& disc, int coarse_level);

LinearOperator make_preconditioner(const Discretization& disc, const PrecondSpec& spec);

/// A B.
LinearOperator preconditioned_operator(const Discretization& disc, const LinearOperator& precond);

}  // namespace helmfov
