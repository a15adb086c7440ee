#pragma once

#include <memory>
#include <vector>

#include <Eigen/Cholesky>

#include "helmfov/krylov.hpp"
#include "helmfov/mesh.hpp"

namespace helmfov {

struct MgOptions {
  /// Richardson damping is damping_factor / lambda_max(K_l).
  double damping_factor = 2.0 / 3.0;
  int power_iterations = 30;
  /// Coarsest multigrid level, clamped to the mesh hierarchy.
  int coarsest_level = 2;
};

/// Geometric V(1,1)-cycle for the P1 stiffness matrices of a mesh hierarchy.
///
/// Each level smooths with one damped Richardson step before and after the
/// coarse correction; restriction is the transposed prolongation and the
/// coarsest level is solved exactly. The cycle is symmetric, so N cycles from
/// a zero guess define a symmetric positive definite approximate inverse.
class MgHierarchy {
 public:
  MgHierarchy(std::shared_ptr<const MeshHierarchy> mesh, MgOptions options = {});

  int num_levels() const { return static_cast<int>(stiffness_.size()); }
  int finest_level() const { return mesh_->finest(); }
  int coarsest_level() const { return coarsest_; }
  Index size() const { return stiffness_.back().rows(); }
  const MeshHierarchy& mesh() const { return *mesh_; }
  /// Stiffness matrix of mesh level `level`.
  const SparseRealMatrix& stiffness(int level) const;
  double damping(int level) const;
  double lambda_max_estimate(int level) const;
  const MgOptions& options() const { return options_; }

  /// One V-cycle on the finest level starting from x0.
  RVector vcycle(const RVector& b, const RVector& x0) const;
  /// N V-cycles from a zero guess.
  RVector apply_n_cycles(const RVector& b, int cycles) const;
  CVector apply_n_cycles(const CVector& b, int cycles) const;
  /// Same operator as a RealLinearOperator.
  RealLinearOperator as_operator(int cycles) const;

 private:
  RVector cycle(std::size_t index, const RVector& b, RVector x) const;
  std::size_t slot(int level) const;

  std::shared_ptr<const MeshHierarchy> mesh_;
  MgOptions options_;
  int coarsest_ = 1;
  std::vector<SparseRealMatrix> stiffness_;
  std::vector<double> lambda_max_;
  std::vector<double> damping_;
  Eigen::LLT<RMatrix> coarse_solver_;
};

/// Measured per-cycle error reduction of the V-cycle.
struct ErrorReductionEstimate {
  double gamma0 = 0.0;  // mass-matrix norm (L2 proxy)
  double gamma1 = 0.0;  // stiffness norm (H1 proxy)
  int coarsest_level = 0;
  int finest_level = 0;
  int samples = 0;
};

/// Runs the error propagation E = I - K~^{-1} K on `samples` random vectors
/// for `power_steps` steps and reports the worst asymptotic per-step
/// contraction in the K- and M-norms.
ErrorReductionEstimate measure_gamma(const MgHierarchy& mg, int samples, int power_steps = 30,
                                     std::uint64_t seed = 7);

struct LaplaceSolverOptions {
  double tol = 1e-12;
  int max_iter = 500;
  /// Systems up to this size are solved by dense Cholesky instead of CG.
  Index dense_threshold = 2000;
};

/// "Exact" Poisson solve K^{-1}: dense Cholesky for small systems,
/// otherwise CG preconditioned by one V-cycle. CG failure throws
/// ConvergenceError.
class LaplaceSolver {
 public:
  LaplaceSolver(std::shared_ptr<const MgHierarchy> mg, LaplaceSolverOptions options = {});

  Index size() const { return mg_->size(); }
  bool uses_dense() const { return dense_ != nullptr; }
  RVector solve(const RVector& b) const;
  CVector solve(const CVector& b) const;
  const MgHierarchy& multigrid() const { return *mg_; }

 private:
  std::shared_ptr<const MgHierarchy> mg_;
  LaplaceSolverOptions options_;
  std::shared_ptr<const Eigen::LLT<RMatrix>> dense_;
};

}  // namespace helmfov
