#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "helmfov/common.hpp"
#include "helmfov/sparse.hpp"

namespace helmfov {

using Point = std::array<double, 3>;
/// Simplex as node indices; only the first dim+1 entries are used.
using Element = std::array<Index, 4>;

struct MeshOptions {
  Index max_dofs = 10'000'000;
};

/// Uniform simplicial mesh of the unit square or cube.
///
/// Level l has n = 2^l cells per axis. Grid nodes are numbered
/// lexicographically with x fastest; interior nodes carry the degrees of
/// freedom in the same order. Squares are cut along the (0,0)-(1,1) diagonal
/// and cubes into the six Kuhn tetrahedra around the main diagonal, so the
/// family is nested under uniform refinement.
class MeshLevel {
 public:
  MeshLevel(int dim, int level, MeshOptions options = {});

  int dim() const { return dim_; }
  int level() const { return level_; }
  Index cells_per_axis() const { return n_; }
  double h() const { return 1.0 / static_cast<double>(n_); }
  /// h^d, the natural scale of mass-matrix entries.
  double h_pow_d() const;

  Index num_nodes() const { return static_cast<Index>(nodes_.size()); }
  Index num_dofs() const { return static_cast<Index>(node_of_dof_.size()); }
  Index num_elements() const { return static_cast<Index>(elements_.size()); }
  int vertices_per_element() const { return dim_ + 1; }

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Element>& elements() const { return elements_; }
  /// -1 for boundary nodes.
  Index dof_of_node(Index node) const { return dof_of_node_[static_cast<std::size_t>(node)]; }
  Index node_of_dof(Index dof) const { return node_of_dof_[static_cast<std::size_t>(dof)]; }
  std::vector<Point> interior_nodes() const;

  /// Node index of grid position (i, j, k); k ignored in 2D.
  Index node_index(Index i, Index j, Index k = 0) const;
  /// Inverse of node_index.
  std::array<Index, 3> grid_position(Index node) const;

  double signed_volume(Index element) const;

  /// Value at `p` of the P1 function with interior coefficients `coeffs`
  /// (zero on the boundary).
  template <typename V>
  V evaluate(const Eigen::Matrix<V, Eigen::Dynamic, 1>& coeffs, const Point& p) const;

 private:
  /// Barycentric weights of the containing Kuhn simplex.
  std::array<std::pair<Index, double>, 4> locate(const Point& p) const;

  int dim_;
  int level_;
  Index n_;
  std::vector<Point> nodes_;
  std::vector<Element> elements_;
  std::vector<Index> dof_of_node_;
  std::vector<Index> node_of_dof_;
};

template <typename V>
V MeshLevel::evaluate(const Eigen::Matrix<V, Eigen::Dynamic, 1>& coeffs, const Point& p) const {
  require_size(coeffs.size(), num_dofs(), "MeshLevel::evaluate");
  V value{};
  const auto weights = locate(p);
  for (int a = 0; a <= dim_; ++a) {
    const Index dof = dof_of_node(weights[static_cast<std::size_t>(a)].first);
    if (dof >= 0) value += weights[static_cast<std::size_t>(a)].second * coeffs(dof);
  }
  return value;
}

MeshLevel build_mesh(int dim, int level, MeshOptions options = {});

/// Nested meshes from `coarsest` to `finest` with the nodal prolongation
/// between every adjacent pair.
class MeshHierarchy {
 public:
  MeshHierarchy(int dim, int coarsest, int finest, MeshOptions options = {});

  int dim() const { return dim_; }
  int coarsest() const { return coarsest_; }
  int finest() const { return coarsest_ + static_cast<int>(levels_.size()) - 1; }
  int num_levels() const { return static_cast<int>(levels_.size()); }
  bool contains(int level) const { return level >= coarsest() && level <= finest(); }

  const MeshLevel& level(int level) const;
  std::shared_ptr<const MeshLevel> level_ptr(int level) const;
  /// Prolongation from `level` to `level + 1`.
  const SparseRealMatrix& prolongation(int level) const;
  /// Product of adjacent prolongations from `from` up to `to`.
  SparseRealMatrix composite_prolongation(int from, int to) const;

 private:
  int dim_;
  int coarsest_;
  std::vector<std::shared_ptr<const MeshLevel>> levels_;
  std::vector<SparseRealMatrix> prolongations_;
};

MeshHierarchy build_hierarchy(int dim, int coarsest, int finest, MeshOptions options = {});

/// Nodal interpolation between adjacent levels of the structured family.
SparseRealMatrix nodal_prolongation(const MeshLevel& coarse, const MeshLevel& fine);

template <typename V>
Eigen::Matrix<V, Eigen::Dynamic, 1> prolongate(const MeshHierarchy& hier, int from_level,
                                               int to_level,
                                               const Eigen::Matrix<V, Eigen::Dynamic, 1>& x) {
  if (from_level > to_level || !hier.contains(from_level) || !hier.contains(to_level)) {
    throw std::invalid_argument("prolongate: levels out of order or outside hierarchy");
  }
  require_size(x.size(), hier.level(from_level).num_dofs(), "prolongate");
  Eigen::Matrix<V, Eigen::Dynamic, 1> y = x;
  for (int l = from_level; l < to_level; ++l) y = hier.prolongation(l).multiply(y);
  return y;
}

/// {"dim","level","h","dofs","elements"} as a JSON string.
std::string mesh_summary_json(const MeshLevel& mesh);

}  // namespace helmfov
