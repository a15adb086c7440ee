#include "helmfov/assembly.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"

namespace helmfov {
namespace {

struct ElementGeometry {
  double volume = 0.0;
  // Gradients of the barycentric coordinates, one column per vertex.
  Eigen::Matrix<double, 3, 4> gradients = Eigen::Matrix<double, 3, 4>::Zero();
  Point centroid{0.0, 0.0, 0.0};
};

ElementGeometry element_geometry(const MeshLevel& mesh, Index e) {
  const int d = mesh.dim();
  const auto& el = mesh.elements()[static_cast<std::size_t>(e)];
  const auto& nodes = mesh.nodes();
  ElementGeometry g;
  Eigen::Matrix3d jac = Eigen::Matrix3d::Identity();
  const Point& v0 = nodes[static_cast<std::size_t>(el[0])];
  for (int a = 1; a <= d; ++a) {
    const Point& va = nodes[static_cast<std::size_t>(el[static_cast<std::size_t>(a)])];
    for (int c = 0; c < d; ++c) {
      jac(c, a - 1) = va[static_cast<std::size_t>(c)] - v0[static_cast<std::size_t>(c)];
    }
  }
  const auto jd = jac.topLeftCorner(d, d);
  const double det = jd.determinant();
  g.volume = std::abs(det) / (d == 2 ? 2.0 : 6.0);
  const Eigen::MatrixXd inv_t = jd.inverse().transpose();
  for (int a = 1; a <= d; ++a) g.gradients.block(0, a, d, 1) = inv_t.col(a - 1);
  g.gradients.col(0) = -g.gradients.middleCols(1, d).rowwise().sum();
  for (int a = 0; a <= d; ++a) {
    const Point& va = nodes[static_cast<std::size_t>(el[static_cast<std::size_t>(a)])];
    for (int c = 0; c < 3; ++c) g.centroid[static_cast<std::size_t>(c)] += va[static_cast<std::size_t>(c)];
  }
  for (auto& c : g.centroid) c /= static_cast<double>(d + 1);
  return g;
}

/// Assembles sum over elements of weight(e, a, b) into interior rows/cols.
template <typename LocalEntry>
SparseRealMatrix assemble_interior(const MeshLevel& mesh, LocalEntry&& local) {
  const int nv = mesh.vertices_per_element();
  std::vector<Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(mesh.num_elements() * nv * nv));
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const auto geom = element_geometry(mesh, e);
    const auto& el = mesh.elements()[static_cast<std::size_t>(e)];
    for (int a = 0; a < nv; ++a) {
      const Index ra = mesh.dof_of_node(el[static_cast<std::size_t>(a)]);
      if (ra < 0) continue;
      for (int b = 0; b < nv; ++b) {
        const Index cb = mesh.dof_of_node(el[static_cast<std::size_t>(b)]);
        if (cb < 0) continue;
        t.push_back({ra, cb, local(geom, a, b)});
      }
    }
  }
  return SparseRealMatrix::from_triplets(mesh.num_dofs(), mesh.num_dofs(), std::move(t));
}

double mass_template(const MeshLevel& mesh, const ElementGeometry& g, int a, int b) {
  const double d = mesh.dim();
  return g.volume * (a == b ? 2.0 : 1.0) / ((d + 1.0) * (d + 2.0));
}

}  // namespace

LossProfile LossProfile::constant(double sigma) {
  LossProfile p;
  p.kind = Kind::constant;
  p.sigma = sigma;
  return p;
}

LossProfile LossProfile::box(const Point& lo, const Point& hi, double sigma_m) {
  LossProfile p;
  p.kind = Kind::box;
  p.sigma = sigma_m;
  p.box_lo = lo;
  p.box_hi = hi;
  return p;
}

void LossProfile::validate(int dim) const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("loss: sigma must be finite and non-negative");
  }
  if (kind == Kind::constant) return;
  if (!(sigma > 0.0)) throw std::invalid_argument("loss: box sigma_m must be positive");
  for (int c = 0; c < dim; ++c) {
    const double lo = std::max(box_lo[static_cast<std::size_t>(c)], 0.0);
    const double hi = std::min(box_hi[static_cast<std::size_t>(c)], 1.0);
    if (!(box_hi[static_cast<std::size_t>(c)] > box_lo[static_cast<std::size_t>(c)])) {
      throw std::invalid_argument("loss: box has non-positive extent");
    }
    if (!(hi > lo)) throw std::invalid_argument("loss: box does not intersect the domain");
  }
}

double LossProfile::value_at(const Point& p, int dim) const {
  if (kind == Kind::constant) return sigma;
  for (int c = 0; c < dim; ++c) {
    const double x = p[static_cast<std::size_t>(c)];
    if (x < box_lo[static_cast<std::size_t>(c)] || x >= box_hi[static_cast<std::size_t>(c)]) {
      return 0.0;
    }
  }
  return sigma;
}

bool LossProfile::aligned_with(int level, int dim) const {
  if (kind == Kind::constant) return true;
  const double n = std::ldexp(1.0, level);
  const auto on_grid = [n](double x) {
    const double c = std::clamp(x, 0.0, 1.0) * n;
    return std::abs(c - std::round(c)) < 1e-12 * n;
  };
  for (int c = 0; c < dim; ++c) {
    if (!on_grid(box_lo[static_cast<std::size_t>(c)]) || !on_grid(box_hi[static_cast<std::size_t>(c)])) {
      return false;
    }
  }
  return true;
}

std::string LossProfile::to_string() const {
  std::ostringstream os;
  if (kind == Kind::constant) {
    os << "constant:" << sigma;
  } else {
    os << "box:" << box_lo[0] << ',' << box_lo[1] << ',' << box_lo[2] << ':' << box_hi[0] << ','
       << box_hi[1] << ',' << box_hi[2] << ':' << sigma;
  }
  return os.str();
}

SparseRealMatrix assemble_stiffness(const MeshLevel& mesh) {
  return assemble_interior(mesh, [](const ElementGeometry& g, int a, int b) {
    return g.volume * g.gradients.col(a).dot(g.gradients.col(b));
  });
}

SparseRealMatrix assemble_mass(const MeshLevel& mesh) {
  return assemble_interior(
      mesh, [&mesh](const ElementGeometry& g, int a, int b) { return mass_template(mesh, g, a, b); });
}

SparseRealMatrix assemble_weighted_mass(const MeshLevel& mesh, const LossProfile& loss) {
  return assemble_interior(mesh, [&](const ElementGeometry& g, int a, int b) {
    return loss.value_at(g.centroid, mesh.dim()) * mass_template(mesh, g, a, b);
  });
}

HelmholtzProblem assemble(std::shared_ptr<const MeshLevel> mesh, double kappa2,
                          const LossProfile& loss) {
  if (!mesh) throw std::invalid_argument("assemble: null mesh");
  if (!(kappa2 >= 0.0) || !std::isfinite(kappa2)) {
    throw std::invalid_argument("assemble: kappa^2 must be finite and non-negative");
  }
  loss.validate(mesh->dim());
  HelmholtzProblem p;
  p.mesh = mesh;
  p.kappa2 = kappa2;
  p.loss = loss;
  p.stiffness = assemble_stiffness(*mesh);
  p.mass = assemble_mass(*mesh);
  p.weighted_mass = assemble_weighted_mass(*mesh, loss);
  p.system = linear_combination<Complex, double>({Complex(1.0), Complex(-kappa2), kI},
                                                 {&p.stiffness, &p.mass, &p.weighted_mass});
  return p;
}

CVector assemble_load_constant(const MeshLevel& mesh, Complex f_value) {
  CVector b = CVector::Zero(mesh.num_dofs());
  const int nv = mesh.vertices_per_element();
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const double share = std::abs(mesh.signed_volume(e)) / static_cast<double>(nv);
    const auto& el = mesh.elements()[static_cast<std::size_t>(e)];
    for (int a = 0; a < nv; ++a) {
      const Index dof = mesh.dof_of_node(el[static_cast<std::size_t>(a)]);
      if (dof >= 0) b(dof) += share;
    }
  }
  return f_value * b;
}

std::string problem_json(const HelmholtzProblem& problem) {
  nlohmann::json j;
  j["dim"] = problem.mesh->dim();
  j["level"] = problem.mesh->level();
  j["h"] = problem.mesh->h();
  j["dofs"] = problem.size();
  j["kappa2"] = problem.kappa2;
  j["loss"] = problem.loss.to_string();
  j["nnz"] = problem.system.nnz();
  return j.dump();
}

}  // namespace helmfov
