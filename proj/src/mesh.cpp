#include "helmfov/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace helmfov {
namespace {

constexpr int kMaxLevel = 30;

// Kuhn simplices of the unit cell: vertex offsets along a monotone lattice
// path from the origin to the opposite corner, one simplex per axis order.
std::vector<std::array<std::array<int, 3>, 4>> reference_simplices(int dim) {
  std::vector<std::array<std::array<int, 3>, 4>> out;
  std::array<int, 3> perm{0, 1, 2};
  const auto first = perm.begin();
  const auto last = perm.begin() + dim;
  do {
    std::array<std::array<int, 3>, 4> s{};
    std::array<int, 3> v{0, 0, 0};
    s[0] = v;
    for (int a = 0; a < dim; ++a) {
      v[static_cast<std::size_t>(perm[static_cast<std::size_t>(a)])] = 1;
      s[static_cast<std::size_t>(a) + 1] = v;
    }
    out.push_back(s);
  } while (std::next_permutation(first, last));
  return out;
}

double simplex_volume(int dim, const std::array<Point, 4>& v) {
  if (dim == 2) {
    return 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) -
                  (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
  }
  const double a[3] = {v[1][0] - v[0][0], v[1][1] - v[0][1], v[1][2] - v[0][2]};
  const double b[3] = {v[2][0] - v[0][0], v[2][1] - v[0][1], v[2][2] - v[0][2]};
  const double c[3] = {v[3][0] - v[0][0], v[3][1] - v[0][1], v[3][2] - v[0][2]};
  const double det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
                     a[2] * (b[0] * c[1] - b[1] * c[0]);
  return det / 6.0;
}

}  // namespace

MeshLevel::MeshLevel(int dim, int level, MeshOptions options) : dim_(dim), level_(level) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("build_mesh: dim must be 2 or 3");
  if (level < 1) throw std::invalid_argument("build_mesh: level must be >= 1");
  if (level > kMaxLevel) throw std::invalid_argument("build_mesh: level too large");
  n_ = Index{1} << level;
  // Interior DOF count (n-1)^d, checked before anything is allocated.
  double dofs = 1.0;
  for (int a = 0; a < dim; ++a) dofs *= static_cast<double>(n_ - 1);
  if (dofs > static_cast<double>(options.max_dofs)) {
    throw std::invalid_argument("build_mesh: level " + std::to_string(level) + " in " +
                                std::to_string(dim) + "D exceeds the DOF cap of " +
                                std::to_string(options.max_dofs));
  }

  const Index np = n_ + 1;
  const Index nz = dim == 3 ? np : 1;
  const double h = 1.0 / static_cast<double>(n_);
  nodes_.reserve(static_cast<std::size_t>(np * np * nz));
  dof_of_node_.assign(static_cast<std::size_t>(np * np * nz), -1);
  for (Index k = 0; k < nz; ++k) {
    for (Index j = 0; j < np; ++j) {
      for (Index i = 0; i < np; ++i) {
        const Index node = static_cast<Index>(nodes_.size());
        nodes_.push_back({static_cast<double>(i) * h, static_cast<double>(j) * h,
                          dim == 3 ? static_cast<double>(k) * h : 0.0});
        const bool interior = i > 0 && i < n_ && j > 0 && j < n_ && (dim == 2 || (k > 0 && k < n_));
        if (interior) {
          dof_of_node_[static_cast<std::size_t>(node)] = static_cast<Index>(node_of_dof_.size());
          node_of_dof_.push_back(node);
        }
      }
    }
  }

  auto refs = reference_simplices(dim);
  // Orient every reference simplex positively once.
  for (auto& s : refs) {
    std::array<Point, 4> v{};
    for (int a = 0; a <= dim; ++a) {
      for (int c = 0; c < 3; ++c) {
        v[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] =
            s[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)];
      }
    }
    if (simplex_volume(dim, v) < 0) std::swap(s[1], s[2]);
  }

  const Index cz = dim == 3 ? n_ : 1;
  elements_.reserve(static_cast<std::size_t>(n_ * n_ * cz) * refs.size());
  for (Index k = 0; k < cz; ++k) {
    for (Index j = 0; j < n_; ++j) {
      for (Index i = 0; i < n_; ++i) {
        for (const auto& s : refs) {
          Element e{-1, -1, -1, -1};
          for (int a = 0; a <= dim; ++a) {
            const auto& off = s[static_cast<std::size_t>(a)];
            e[static_cast<std::size_t>(a)] = node_index(i + off[0], j + off[1], k + off[2]);
          }
          elements_.push_back(e);
        }
      }
    }
  }
}

double MeshLevel::h_pow_d() const { return std::pow(h(), dim_); }

std::vector<Point> MeshLevel::interior_nodes() const {
  std::vector<Point> out;
  out.reserve(node_of_dof_.size());
  for (const Index node : node_of_dof_) out.push_back(nodes_[static_cast<std::size_t>(node)]);
  return out;
}

Index MeshLevel::node_index(Index i, Index j, Index k) const {
  const Index np = n_ + 1;
  return i + np * (j + (dim_ == 3 ? np * k : 0));
}

std::array<Index, 3> MeshLevel::grid_position(Index node) const {
  const Index np = n_ + 1;
  return {node % np, (node / np) % np, dim_ == 3 ? node / (np * np) : 0};
}

double MeshLevel::signed_volume(Index element) const {
  std::array<Point, 4> v{};
  const auto& e = elements_[static_cast<std::size_t>(element)];
  for (int a = 0; a <= dim_; ++a) {
    v[static_cast<std::size_t>(a)] = nodes_[static_cast<std::size_t>(e[static_cast<std::size_t>(a)])];
  }
  return simplex_volume(dim_, v);
}

std::array<std::pair<Index, double>, 4> MeshLevel::locate(const Point& p) const {
  std::array<Index, 3> cell{0, 0, 0};
  std::array<double, 3> local{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) {
    const double s = std::clamp(p[static_cast<std::size_t>(a)], 0.0, 1.0) * static_cast<double>(n_);
    const Index c = std::min<Index>(static_cast<Index>(std::floor(s)), n_ - 1);
    cell[static_cast<std::size_t>(a)] = c;
    local[static_cast<std::size_t>(a)] = s - static_cast<double>(c);
  }
  // Kuhn simplex containing `local`: sort coordinates in decreasing order.
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.begin() + dim_, [&](int a, int b) {
    return local[static_cast<std::size_t>(a)] > local[static_cast<std::size_t>(b)];
  });
  std::array<std::pair<Index, double>, 4> out{};
  std::array<Index, 3> vertex = cell;
  double previous = 1.0;
  for (int a = 0; a <= dim_; ++a) {
    const double next = a < dim_ ? local[static_cast<std::size_t>(order[static_cast<std::size_t>(a)])] : 0.0;
    out[static_cast<std::size_t>(a)] = {node_index(vertex[0], vertex[1], vertex[2]), previous - next};
    if (a < dim_) ++vertex[static_cast<std::size_t>(order[static_cast<std::size_t>(a)])];
    previous = next;
  }
  return out;
}

MeshLevel build_mesh(int dim, int level, MeshOptions options) {
  return MeshLevel(dim, level, options);
}

SparseRealMatrix nodal_prolongation(const MeshLevel& coarse, const MeshLevel& fine) {
  if (coarse.dim() != fine.dim() || fine.level() != coarse.level() + 1) {
    throw std::invalid_argument("nodal_prolongation: levels are not adjacent");
  }
  std::vector<Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(fine.num_dofs()) * 2);
  for (Index dof = 0; dof < fine.num_dofs(); ++dof) {
    const auto g = fine.grid_position(fine.node_of_dof(dof));
    // A fine node is a coarse node or the midpoint of the coarse edge whose
    // direction has ones exactly in the odd coordinates.
    std::array<Index, 3> lo{0, 0, 0};
    std::array<Index, 3> hi{0, 0, 0};
    bool coincident = true;
    for (int a = 0; a < fine.dim(); ++a) {
      const Index gi = g[static_cast<std::size_t>(a)];
      lo[static_cast<std::size_t>(a)] = gi / 2;
      hi[static_cast<std::size_t>(a)] = (gi + 1) / 2;
      coincident = coincident && (gi % 2 == 0);
    }
    if (coincident) {
      t.push_back({dof, coarse.dof_of_node(coarse.node_index(lo[0], lo[1], lo[2])), 1.0});
      continue;
    }
    for (const auto& end : {lo, hi}) {
      const Index cdof = coarse.dof_of_node(coarse.node_index(end[0], end[1], end[2]));
      if (cdof >= 0) t.push_back({dof, cdof, 0.5});
    }
  }
  return SparseRealMatrix::from_triplets(fine.num_dofs(), coarse.num_dofs(), std::move(t));
}

MeshHierarchy::MeshHierarchy(int dim, int coarsest, int finest, MeshOptions options)
    : dim_(dim), coarsest_(coarsest) {
  if (coarsest < 1 || finest < coarsest) {
    throw std::invalid_argument("build_hierarchy: need 1 <= coarsest <= finest");
  }
  for (int l = coarsest; l <= finest; ++l) {
    levels_.push_back(std::make_shared<const MeshLevel>(dim, l, options));
  }
  for (std::size_t k = 0; k + 1 < levels_.size(); ++k) {
    prolongations_.push_back(nodal_prolongation(*levels_[k], *levels_[k + 1]));
  }
}

const MeshLevel& MeshHierarchy::level(int level) const { return *level_ptr(level); }

std::shared_ptr<const MeshLevel> MeshHierarchy::level_ptr(int level) const {
  if (!contains(level)) throw std::out_of_range("MeshHierarchy: level outside hierarchy");
  return levels_[static_cast<std::size_t>(level - coarsest_)];
}

const SparseRealMatrix& MeshHierarchy::prolongation(int level) const {
  if (!contains(level) || level == finest()) {
    throw std::out_of_range("MeshHierarchy: no prolongation from this level");
  }
  return prolongations_[static_cast<std::size_t>(level - coarsest_)];
}

SparseRealMatrix MeshHierarchy::composite_prolongation(int from, int to) const {
  if (from > to || !contains(from) || !contains(to)) {
    throw std::invalid_argument("composite_prolongation: bad level pair");
  }
  SparseRealMatrix p = SparseRealMatrix::identity(level(from).num_dofs());
  for (int l = from; l < to; ++l) p = multiply(prolongation(l), p);
  return p;
}

MeshHierarchy build_hierarchy(int dim, int coarsest, int finest, MeshOptions options) {
  if (coarsest >= finest) throw std::invalid_argument("build_hierarchy: need coarsest < finest");
  return MeshHierarchy(dim, coarsest, finest, options);
}

std::string mesh_summary_json(const MeshLevel& mesh) {
  nlohmann::json j;
  j["dim"] = mesh.dim();
  j["level"] = mesh.level();
  j["h"] = mesh.h();
  j["nodes"] = mesh.num_nodes();
  j["dofs"] = mesh.num_dofs();
  j["elements"] = mesh.num_elements();
  return j.dump();
}

}  // namespace helmfov
