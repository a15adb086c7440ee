#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "helmfov/geometry.hpp"
#include "helmfov/krylov.hpp"
#include "helmfov/linear_operator.hpp"

namespace helmfov {

struct FovOptions {
  int n_angles = 64;
  double eig_tol = 1e-10;
  int max_lanczos = 400;
  std::uint64_t seed = 20240917;
  /// Sweep angles are angle_offset + 2 pi k / n_angles.
  double angle_offset = 0.0;
  int threads = 1;
};

/// Outer polygon and inner witness points for the field of values of B.
///
/// At angle theta_k, support[k] = lambda_max(H(e^{i theta_k} B)) and the
/// half-plane {z : Re(e^{i theta_k} z) <= support[k]} contains the field of
/// values; witness[k] = v^* B v for the extreme Ritz vector v.
struct FovEnclosure {
  std::vector<double> angles;
  std::vector<double> support;
  std::vector<Complex> witnesses;
  std::vector<double> ritz_residuals;
  std::vector<bool> converged;
  Polygon polygon;
  double scale = 0.0;  // max_k |support[k]|

  bool all_converged() const;
  /// Indices of angles whose Lanczos run did not converge.
  std::vector<int> flagged_angles() const;
};

/// Requires an operator with adjoint and n_angles >= 8. Unconverged angles use
/// the Ritz value plus residual as a conservative support value.
FovEnclosure compute_enclosure(const LinearOperator& b, const FovOptions& options = {});

/// Largest value of Re(direction * z) over the field of values, |direction| = 1.
double support_value(const LinearOperator& b, Complex direction, const FovOptions& options = {});

struct FovDiagnostics {
  Rectangle outer;  // bounding box of the polygon
  Rectangle inner;  // bounding box of the witnesses
  /// min / max over witnesses of Re z + (kappa2 / sigma) Im z; constant sigma only.
  std::optional<double> strip_min;
  std::optional<double> strip_max;
  double origin_distance = 0.0;  // distance from 0 to the polygon
  Complex disc_center;
  double disc_radius = 0.0;
  /// Polygon excludes 0 and disc_radius < |disc_center|.
  bool disc_bound_applicable = false;
  /// h^d, the divisor of the scaled variants.
  double h_pow_d = 1.0;

  Rectangle outer_scaled() const { return outer.scaled(1.0 / h_pow_d); }
  Rectangle inner_scaled() const { return inner.scaled(1.0 / h_pow_d); }
  std::optional<double> strip_min_scaled() const;
  std::optional<double> strip_max_scaled() const;
  /// s / |c|, the per-step GMRES contraction from the disc.
  double disc_ratio() const;
};

/// sigma_const is the constant loss value, or nullopt for a varying loss.
FovDiagnostics diagnostics(const FovEnclosure& enc, double h, int dim, double kappa2,
                           std::optional<double> sigma_const);

struct RotationCheck {
  double hausdorff = 0.0;
  double scale = 0.0;
  bool passed = false;
};

/// Compares the enclosure of e^{i theta} B with e^{i theta} times the
/// enclosure of B; passes when the Hausdorff distance is below tol * scale.
RotationCheck rotation_check(const LinearOperator& b, double theta, const FovOptions& options = {},
                             double tol = 1e-7);

/// theta,support,witness_re,witness_im,converged rows.
void write_enclosure_csv(std::ostream& os, const FovEnclosure& enc);

}  // namespace helmfov
