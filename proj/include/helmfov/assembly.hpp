#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <string>

#include "helmfov/mesh.hpp"
#include "helmfov/sparse.hpp"

namespace helmfov {

/// Loss coefficient: constant over the domain, or sigma_m on an axis-aligned
/// box and zero elsewhere.
struct LossProfile {
  enum class Kind { constant, box };

  Kind kind = Kind::constant;
  double sigma = 0.0;
  Point box_lo{0.0, 0.0, 0.0};
  Point box_hi{1.0, 1.0, 1.0};

  static LossProfile constant(double sigma);
  static LossProfile box(const Point& lo, const Point& hi, double sigma_m);

  /// Throws std::invalid_argument on negative values, empty boxes, or boxes
  /// that do not meet the unit domain.
  void validate(int dim) const;
  /// Coefficient value at a point; box membership is closed on the low side
  /// and open on the high side, which only matters off element centroids.
  double value_at(const Point& p, int dim) const;
  bool is_constant() const { return kind == Kind::constant; }
  /// True when every box face lies on a grid line of `level`.
  bool aligned_with(int level, int dim) const;
  /// Largest coefficient value.
  double max_value() const { return sigma; }

  std::string to_string() const;
};

/// P1 discretisation of the lossy Helmholtz form on one mesh level.
struct HelmholtzProblem {
  std::shared_ptr<const MeshLevel> mesh;
  double kappa2 = 0.0;
  LossProfile loss;
  SparseRealMatrix stiffness;     // K
  SparseRealMatrix mass;          // M
  SparseRealMatrix weighted_mass; // M_sigma
  SparseComplexMatrix system;     // A = K - kappa^2 M + i M_sigma

  Index size() const { return system.rows(); }
};

SparseRealMatrix assemble_stiffness(const MeshLevel& mesh);
SparseRealMatrix assemble_mass(const MeshLevel& mesh);
/// Mass matrix weighted by the loss value at each element centroid.
SparseRealMatrix assemble_weighted_mass(const MeshLevel& mesh, const LossProfile& loss);

HelmholtzProblem assemble(std::shared_ptr<const MeshLevel> mesh, double kappa2,
                          const LossProfile& loss);

/// b_j = f * integral of the j-th hat function.
CVector assemble_load_constant(const MeshLevel& mesh, Complex f_value);

/// {"dim","level","h","dofs","kappa2","loss",...} as a JSON string.
std::string problem_json(const HelmholtzProblem& problem);

}  // namespace helmfov
