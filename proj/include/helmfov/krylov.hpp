#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "helmfov/linear_operator.hpp"

namespace helmfov {

/// Outcome of one iterative solve.
///
/// residual_history[0] is the initial residual norm and entry i the residual
/// after i iterations, as tracked by the solver recurrence.
struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;
  double rhs_norm = 0.0;
  double true_final_residual = 0.0;
  bool converged = false;
  double wall_time = 0.0;

  double final_residual() const {
    return residual_history.empty() ? 0.0 : residual_history.back();
  }
  bool history_non_increasing() const;
  std::string to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

struct GmresOptions {
  double tol = 1e-6;  // relative to ||b||
  int max_iter = 200;
};

struct GmresResult {
  CVector x;
  SolveReport report;
};

/// Full (unrestarted) GMRES on A B y = b from a zero guess, returning
/// x = B y. Arnoldi uses modified Gram-Schmidt with one reorthogonalisation
/// pass; the least-squares problem is updated with Givens rotations. Running
/// out of iterations yields converged = false rather than an exception.
GmresResult gmres_right(const LinearOperator& a, const LinearOperator& precond, const CVector& b,
                        const GmresOptions& options = {});

struct CgOptions {
  double tol = 1e-12;  // relative to ||b||
  int max_iter = 2000;
};

struct CgResult {
  RVector x;
  SolveReport report;
};

/// Preconditioned CG for real SPD systems. Throws NotPositiveDefiniteError
/// when p^T K p <= 0 or r^T M r <= 0 is met.
CgResult cg_spd(const RealLinearOperator& k, const RealLinearOperator& precond, const RVector& b,
                const CgOptions& options = {});

struct LanczosOptions {
  double tol = 1e-10;
  int max_iter = 400;
  std::uint64_t seed = 20240917;
};

struct LanczosResult {
  double eigenvalue = 0.0;
  CVector eigenvector;
  /// ||H v - lambda v|| for the returned unit vector.
  double residual_norm = 0.0;
  /// max |Ritz value|, a lower estimate of ||H||.
  double norm_estimate = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Largest Ritz value after each step (non-decreasing).
  std::vector<double> ritz_history;
};

/// Largest eigenvalue of a Hermitian operator by Lanczos with full
/// reorthogonalisation. Stops once the Ritz residual is below
/// tol * max(|Ritz values|); hitting max_iter returns the best estimate with
/// converged = false.
LanczosResult lanczos_max_eig(const LinearOperator& h, const LanczosOptions& options = {});

/// Unit-norm complex Gaussian vector from a seeded generator.
CVector random_unit_vector(Index n, std::uint64_t seed);

}  // namespace helmfov
