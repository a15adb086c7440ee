#include "helmfov/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "helmfov/assembly.hpp"

namespace helmfov {
namespace {

double power_lambda_max(const SparseRealMatrix& k, int steps) {
  const Index n = k.rows();
  std::mt19937_64 rng(1234567);
  std::uniform_real_distribution<double> uni(0.5, 1.5);
  RVector v(n);
  // Alternating signs load the oscillatory end of the spectrum.
  for (Index i = 0; i < n; ++i) v(i) = (i % 2 == 0 ? 1.0 : -1.0) * uni(rng);
  v.normalize();
  double lambda = 0.0;
  for (int s = 0; s < steps; ++s) {
    RVector w = k.multiply(v);
    lambda = v.dot(w);
    const double nw = w.norm();
    if (nw == 0.0) break;
    v = w / nw;
  }
  return lambda;
}

}  // namespace

MgHierarchy::MgHierarchy(std::shared_ptr<const MeshHierarchy> mesh, MgOptions options)
    : mesh_(std::move(mesh)), options_(options) {
  if (!mesh_) throw std::invalid_argument("MgHierarchy: null mesh hierarchy");
  if (!(options_.damping_factor > 0.0 && options_.damping_factor < 2.0)) {
    throw std::invalid_argument("MgHierarchy: damping factor must lie in (0, 2)");
  }
  coarsest_ = std::clamp(options_.coarsest_level, mesh_->coarsest(), mesh_->finest());
  for (int l = coarsest_; l <= mesh_->finest(); ++l) {
    stiffness_.push_back(assemble_stiffness(mesh_->level(l)));
    const double lam = power_lambda_max(stiffness_.back(), options_.power_iterations);
    lambda_max_.push_back(lam);
    damping_.push_back(options_.damping_factor / lam);
  }
  coarse_solver_.compute(stiffness_.front().to_dense());
  if (coarse_solver_.info() != Eigen::Success) {
    throw SingularMatrixError("MgHierarchy: coarsest stiffness matrix is not SPD");
  }
}

std::size_t MgHierarchy::slot(int level) const {
  if (level < coarsest_ || level > mesh_->finest()) {
    throw std::out_of_range("MgHierarchy: level outside hierarchy");
  }
  return static_cast<std::size_t>(level - coarsest_);
}

const SparseRealMatrix& MgHierarchy::stiffness(int level) const {
  return stiffness_[slot(level)];
}

double MgHierarchy::damping(int level) const {
  return damping_[slot(level)];
}

double MgHierarchy::lambda_max_estimate(int level) const {
  return lambda_max_[slot(level)];
}

RVector MgHierarchy::cycle(std::size_t index, const RVector& b, RVector x) const {
  if (index == 0) return coarse_solver_.solve(b);
  const auto& k = stiffness_[index];
  const double omega = damping_[index];
  const auto& p = mesh_->prolongation(coarsest_ + static_cast<int>(index) - 1);

  x += omega * (b - k.multiply(x));
  const RVector coarse_rhs = p.multiply_adjoint(RVector(b - k.multiply(x)));
  const RVector correction =
      cycle(index - 1, coarse_rhs, RVector::Zero(coarse_rhs.size()));
  x += p.multiply(correction);
  x += omega * (b - k.multiply(x));
  return x;
}

RVector MgHierarchy::vcycle(const RVector& b, const RVector& x0) const {
  require_size(b.size(), size(), "MgHierarchy::vcycle: rhs");
  require_size(x0.size(), size(), "MgHierarchy::vcycle: initial guess");
  return cycle(stiffness_.size() - 1, b, x0);
}

RVector MgHierarchy::apply_n_cycles(const RVector& b, int cycles) const {
  if (cycles < 1) throw std::invalid_argument("apply_n_cycles: need at least one cycle");
  require_size(b.size(), size(), "MgHierarchy::apply_n_cycles");
  RVector x = RVector::Zero(size());
  for (int c = 0; c < cycles; ++c) x = cycle(stiffness_.size() - 1, b, std::move(x));
  return x;
}

CVector MgHierarchy::apply_n_cycles(const CVector& b, int cycles) const {
  return apply_componentwise(b, [&](const RVector& v) { return apply_n_cycles(v, cycles); });
}

RealLinearOperator MgHierarchy::as_operator(int cycles) const {
  auto act = [this, cycles](const RVector& x) -> RVector { return apply_n_cycles(x, cycles); };
  return RealLinearOperator(size(), act, act);
}

ErrorReductionEstimate measure_gamma(const MgHierarchy& mg, int samples, int power_steps,
                                     std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("measure_gamma: samples must be >= 1");
  if (power_steps < 2) throw std::invalid_argument("measure_gamma: need at least two steps");
  ErrorReductionEstimate est;
  est.coarsest_level = mg.coarsest_level();
  est.finest_level = mg.finest_level();
  est.samples = samples;
  if (mg.num_levels() == 1) return est;

  const auto& k = mg.stiffness(mg.finest_level());
  const SparseRealMatrix m = assemble_mass(mg.mesh().level(mg.finest_level()));
  const auto k_norm = [&](const RVector& v) { return std::sqrt(std::max(0.0, v.dot(k.multiply(v)))); };
  const auto m_norm = [&](const RVector& v) { return std::sqrt(std::max(0.0, v.dot(m.multiply(v)))); };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const int tail = std::max(1, power_steps / 2);
  for (int s = 0; s < samples; ++s) {
    RVector e(mg.size());
    for (Index i = 0; i < e.size(); ++i) e(i) = normal(rng);
    e.normalize();
    double kn = k_norm(e);
    double mn = m_norm(e);
    double log_k = 0.0;
    double log_m = 0.0;
    bool annihilated = false;
    for (int step = 0; step < power_steps; ++step) {
      e -= mg.apply_n_cycles(RVector(k.multiply(e)), 1);
      const double kn_new = k_norm(e);
      const double mn_new = m_norm(e);
      if (kn_new == 0.0 || mn_new == 0.0) {
        annihilated = true;
        break;
      }
      if (step >= power_steps - tail) {
        log_k += std::log(kn_new / kn);
        log_m += std::log(mn_new / mn);
      }
      e /= kn_new;
      kn = 1.0;
      mn = mn_new / kn_new;
    }
    if (annihilated) continue;
    est.gamma1 = std::max(est.gamma1, std::exp(log_k / tail));
    est.gamma0 = std::max(est.gamma0, std::exp(log_m / tail));
  }
  return est;
}

LaplaceSolver::LaplaceSolver(std::shared_ptr<const MgHierarchy> mg, LaplaceSolverOptions options)
    : mg_(std::move(mg)), options_(options) {
  if (!mg_) throw std::invalid_argument("LaplaceSolver: null multigrid hierarchy");
  if (mg_->size() <= options_.dense_threshold) {
    auto llt = std::make_shared<Eigen::LLT<RMatrix>>(mg_->stiffness(mg_->finest_level()).to_dense());
    if (llt->info() != Eigen::Success) throw SingularMatrixError("LaplaceSolver: K is not SPD");
    dense_ = std::move(llt);
  }
}

RVector LaplaceSolver::solve(const RVector& b) const {
  require_size(b.size(), size(), "LaplaceSolver::solve");
  if (dense_) return dense_->solve(b);
  const auto& k = mg_->stiffness(mg_->finest_level());
  const RealLinearOperator k_op(
      k.rows(), [&k](const RVector& x) -> RVector { return k.multiply(x); });
  const auto result = cg_spd(k_op, mg_->as_operator(1), b, CgOptions{options_.tol, options_.max_iter});
  if (!result.report.converged) {
    throw ConvergenceError("LaplaceSolver: CG did not reach tolerance in " +
                           std::to_string(options_.max_iter) + " iterations");
  }
  return result.x;
}

CVector LaplaceSolver::solve(const CVector& b) const {
  return apply_componentwise(b, [this](const RVector& v) { return solve(v); });
}

}  // namespace helmfov
