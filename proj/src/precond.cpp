#include "helmfov/precond.hpp"

#include <charconv>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace helmfov {
namespace {

int parse_positive_int(std::string_view s, std::string_view what) {
  int value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw std::invalid_argument("precond: bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return value;
}

Eigen::SparseMatrix<Complex> to_eigen(const SparseComplexMatrix& a) {
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(static_cast<std::size_t>(a.nnz()));
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index k = a.row_ptr()[static_cast<std::size_t>(i)];
         k < a.row_ptr()[static_cast<std::size_t>(i) + 1]; ++k) {
      t.emplace_back(i, a.col_idx()[static_cast<std::size_t>(k)],
                     a.values()[static_cast<std::size_t>(k)]);
    }
  }
  Eigen::SparseMatrix<Complex> m(a.rows(), a.cols());
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

PrecondSpec PrecondSpec::exact_laplace() { return {}; }

PrecondSpec PrecondSpec::mg_laplace(int cycles) {
  PrecondSpec s;
  s.kind = Kind::mg_laplace;
  s.cycles = cycles;
  return s;
}

PrecondSpec PrecondSpec::two_level(int coarse_level) {
  PrecondSpec s;
  s.kind = Kind::two_level;
  s.coarse_level = coarse_level;
  return s;
}

PrecondSpec PrecondSpec::parse(std::string_view text) {
  if (text == "laplace") return exact_laplace();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("precond: expected laplace, mg:N or twolevel:L, got '" +
                                std::string(text) + "'");
  }
  const auto head = text.substr(0, colon);
  const auto tail = text.substr(colon + 1);
  if (head == "mg") {
    auto s = mg_laplace(parse_positive_int(tail, "cycle count"));
    if (s.cycles < 1) throw std::invalid_argument("precond: mg needs at least one V-cycle");
    return s;
  }
  if (head == "twolevel") {
    auto s = two_level(parse_positive_int(tail, "coarse level"));
    if (s.coarse_level < 1) throw std::invalid_argument("precond: coarse level must be >= 1");
    return s;
  }
  throw std::invalid_argument("precond: unknown kind '" + std::string(head) + "'");
}

void PrecondSpec::validate(int fine_level) const {
  if (kind == Kind::mg_laplace && cycles < 1) {
    throw std::invalid_argument("precond: mg needs at least one V-cycle");
  }
  if (kind == Kind::two_level && (coarse_level < 1 || coarse_level >= fine_level)) {
    throw std::invalid_argument("precond: coarse level " + std::to_string(coarse_level) +
                                " must lie in [1, " + std::to_string(fine_level - 1) + "]");
  }
}

std::string PrecondSpec::to_string() const {
  switch (kind) {
    case Kind::exact_laplace: return "laplace";
    case Kind::mg_laplace: return "mg:" + std::to_string(cycles);
    case Kind::two_level: return "twolevel:" + std::to_string(coarse_level);
  }
  return "?";
}

Discretization discretize(int dim, int level, double kappa2, const LossProfile& loss,
                          const DiscretizationOptions& options) {
  Discretization d;
  d.meshes = std::make_shared<const MeshHierarchy>(dim, 1, level, options.mesh);
  d.mg = std::make_shared<const MgHierarchy>(d.meshes, options.mg);
  d.laplace = std::make_shared<const LaplaceSolver>(d.mg, options.laplace);
  d.problem = std::make_shared<const HelmholtzProblem>(
      assemble(d.meshes->level_ptr(level), kappa2, loss));
  return d;
}

Discretization with_coefficients(const Discretization& base, double kappa2,
                                 const LossProfile& loss) {
  Discretization d = base;
  d.problem = std::make_shared<const HelmholtzProblem>(
      assemble(base.meshes->level_ptr(base.fine_level()), kappa2, loss));
  return d;
}

LinearOperator system_operator(const HelmholtzProblem& problem) {
  auto a = std::make_shared<const SparseComplexMatrix>(problem.system);
  return LinearOperator::from_matrix(a);
}

LinearOperator mass_operator(const HelmholtzProblem& problem) {
  auto m = std::make_shared<const SparseRealMatrix>(problem.mass);
  auto act = [m](const CVector& x) -> CVector { return m->multiply(x); };
  return LinearOperator(m->rows(), act, act);
}

LinearOperator exact_laplace_preconditioner(const Discretization& disc) {
  auto lap = disc.laplace;
  auto m = std::make_shared<const SparseRealMatrix>(disc.problem->mass);
  return LinearOperator(
      disc.size(), [lap, m](const CVector& x) -> CVector { return lap->solve(CVector(m->multiply(x))); },
      [lap, m](const CVector& x) -> CVector { return m->multiply(lap->solve(x)); });
}

LinearOperator mg_laplace_preconditioner(const Discretization& disc, int cycles) {
  if (cycles < 1) throw std::invalid_argument("mg_laplace_preconditioner: cycles must be >= 1");
  auto mg = disc.mg;
  auto m = std::make_shared<const SparseRealMatrix>(disc.problem->mass);
  return LinearOperator(
      disc.size(),
      [mg, m, cycles](const CVector& x) -> CVector {
        return mg->apply_n_cycles(CVector(m->multiply(x)), cycles);
      },
      [mg, m, cycles](const CVector& x) -> CVector {
        return m->multiply(mg->apply_n_cycles(x, cycles));
      });
}

LinearOperator perturbation_operator(const Discretization& disc, int cycles) {
  if (cycles < 1) throw std::invalid_argument("perturbation_operator: cycles must be >= 1");
  auto mg = disc.mg;
  auto lap = disc.laplace;
  auto problem = disc.problem;
  auto difference = [mg, lap, cycles](const CVector& v) -> CVector {
    return mg->apply_n_cycles(v, cycles) - lap->solve(v);
  };
  return LinearOperator(
      disc.size(),
      [problem, difference](const CVector& x) -> CVector {
        return problem->system.multiply(difference(CVector(problem->mass.multiply(x))));
      },
      [problem, difference](const CVector& x) -> CVector {
        return problem->mass.multiply(difference(CVector(problem->system.multiply_adjoint(x))));
      });
}

struct CoarseSolver::SparseImpl {
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu;
};

CoarseSolver::CoarseSolver(const SparseComplexMatrix& a, Index dense_threshold) : n_(a.rows()) {
  if (a.rows() != a.cols()) throw DimensionError("CoarseSolver: matrix not square");
  if (n_ <= dense_threshold) {
    dense_ = std::make_unique<DenseLU>(a.to_dense());
    return;
  }
  sparse_ = std::make_unique<SparseImpl>();
  const auto m = to_eigen(a);
  sparse_->lu.compute(m);
  if (sparse_->lu.info() != Eigen::Success) {
    throw SingularMatrixError("CoarseSolver: sparse LU failed: " + sparse_->lu.lastErrorMessage());
  }
}

CoarseSolver::~CoarseSolver() = default;

CVector CoarseSolver::solve(const CVector& b, SolveMode mode) const {
  require_size(b.size(), n_, "CoarseSolver::solve");
  if (dense_) return dense_->solve(b, mode);
  if (mode == SolveMode::conj_transpose) return sparse_->lu.adjoint().solve(b);
  return sparse_->lu.solve(b);
}

TwoLevelOperators::TwoLevelOperators(const Discretization& disc, int coarse_level)
    : disc_(disc), coarse_level_(coarse_level) {
  if (!disc.meshes->contains(coarse_level)) {
    throw std::invalid_argument("TwoLevelOperators: coarse level " + std::to_string(coarse_level) +
                                " outside the mesh hierarchy");
  }
  if (!disc.problem->loss.aligned_with(coarse_level, disc.dim())) {
    throw std::invalid_argument("TwoLevelOperators: loss box is not aligned with the level " +
                                std::to_string(coarse_level) + " grid");
  }
  coarse_ = assemble(disc.meshes->level_ptr(coarse_level), disc.problem->kappa2, disc.problem->loss);
  r_ = disc.meshes->composite_prolongation(coarse_level, disc.fine_level());
  solver_ = std::make_shared<const CoarseSolver>(coarse_.system);
}

CVector TwoLevelOperators::coarse_correction(const CVector& v) const {
  return r_.multiply(solver_->solve(CVector(r_.multiply_adjoint(v))));
}

CVector TwoLevelOperators::coarse_correction_adjoint(const CVector& v) const {
  return r_.multiply(solver_->solve(CVector(r_.multiply_adjoint(v)), SolveMode::conj_transpose));
}

CVector TwoLevelOperators::residual_correction(const CVector& x) const {
  const CVector mx = disc_.problem->mass.multiply(x);
  const CVector c = coarse_correction(mx);
  return disc_.laplace->solve(CVector(mx - disc_.problem->system.multiply(c)));
}

CVector TwoLevelOperators::apply(const CVector& x) const {
  const CVector mx = disc_.problem->mass.multiply(x);
  const CVector c = coarse_correction(mx);
  return c + disc_.laplace->solve(CVector(mx - disc_.problem->system.multiply(c)));
}

CVector TwoLevelOperators::apply_adjoint(const CVector& x) const {
  const CVector kx = disc_.laplace->solve(x);
  const CVector rest = x - disc_.problem->system.multiply_adjoint(kx);
  return disc_.problem->mass.multiply(CVector(kx + coarse_correction_adjoint(rest)));
}

CVector TwoLevelOperators::projection(const CVector& x) const {
  return coarse_correction_adjoint(CVector(disc_.problem->system.multiply_adjoint(x)));
}

LinearOperator TwoLevelOperators::as_operator() const {
  auto self = std::make_shared<const TwoLevelOperators>(*this);
  return LinearOperator(
      disc_.size(), [self](const CVector& x) -> CVector { return self->apply(x); },
      [self](const CVector& x) -> CVector { return self->apply_adjoint(x); });
}

LinearOperator two_level_preconditioner(const Discretization& disc, int coarse_level) {
  return TwoLevelOperators(disc, coarse_level).as_operator();
}

LinearOperator make_preconditioner(const Discretization& disc, const PrecondSpec& spec) {
  switch (spec.kind) {
    case PrecondSpec::Kind::exact_laplace: return exact_laplace_preconditioner(disc);
    case PrecondSpec::Kind::mg_laplace: return mg_laplace_preconditioner(disc, spec.cycles);
    case PrecondSpec::Kind::two_level: return two_level_preconditioner(disc, spec.coarse_level);
  }
  throw std::logic_error("make_preconditioner: unknown kind");
}

LinearOperator preconditioned_operator(const Discretization& disc, const LinearOperator& precond) {
  return compose(system_operator(*disc.problem), precond);
}

}  // namespace helmfov
