#include <doctest.h>

#include <algorithm>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "generators.hpp"
#include "helmfov/assembly.hpp"
#include "helmfov/multigrid.hpp"
#include "oracles.hpp"

using namespace helmfov;
using helmfov::testing::Gen;

namespace {

std::shared_ptr<const MgHierarchy> make_mg(int dim, int finest, MgOptions opts = {}) {
  auto mesh = std::make_shared<const MeshHierarchy>(build_hierarchy(dim, 1, finest));
  return std::make_shared<const MgHierarchy>(mesh, opts);
}

double k_norm(const RMatrix& k, const RVector& v) { return std::sqrt(v.dot(k * v)); }

}  // namespace

TEST_CASE("smoother damping is a contraction") {
  const auto mg = make_mg(2, 5);
  for (int l = mg->coarsest_level() + 1; l <= mg->finest_level(); ++l) {
    const RMatrix k = mg->stiffness(l).to_dense();
    const double lmax = Eigen::SelfAdjointEigenSolver<RMatrix>(k).eigenvalues().maxCoeff();
    const double w = mg->damping(l) * lmax;
    CHECK(w > 0.0);
    CHECK(w < 2.0);
    CHECK(mg->lambda_max_estimate(l) <= lmax * (1 + 1e-12));
  }
}

TEST_CASE("coarsest level is clamped to the mesh hierarchy") {
  CHECK(make_mg(2, 4)->coarsest_level() == 2);
  CHECK(make_mg(2, 4, MgOptions{2.0 / 3.0, 30, 1})->coarsest_level() == 1);
  CHECK(make_mg(2, 2, MgOptions{2.0 / 3.0, 30, 5})->num_levels() == 1);
  auto mesh = std::make_shared<const MeshHierarchy>(build_hierarchy(2, 1, 3));
  CHECK_THROWS_AS(MgHierarchy(mesh, MgOptions{2.5, 30, 1}), std::invalid_argument);
}

TEST_CASE("single-level hierarchy solves exactly") {
  const auto mg = make_mg(2, 2);
  REQUIRE(mg->num_levels() == 1);
  Gen g(3);
  const RVector b = g.real_vector(mg->size());
  const RMatrix k = helmfov::testing::stencil_stiffness(2, 2);
  const RVector x = mg->vcycle(b, RVector::Zero(mg->size()));
  CHECK((k * x - b).norm() < 1e-13 * b.norm());
  const auto est = measure_gamma(*mg, 2);
  CHECK(est.gamma0 == 0.0);
  CHECK(est.gamma1 == 0.0);
}

TEST_CASE("V-cycle from zero is symmetric") {
  for (int dim : {2, 3}) {
    const auto mg = make_mg(dim, dim == 2 ? 5 : 3);
    Gen g(static_cast<std::uint64_t>(dim));
    for (int t = 0; t < 5; ++t) {
      const RVector b1 = g.real_vector(mg->size());
      const RVector b2 = g.real_vector(mg->size());
      const double lhs = mg->apply_n_cycles(b1, 1).dot(b2);
      const double rhs = b1.dot(mg->apply_n_cycles(b2, 1));
      CHECK(std::abs(lhs - rhs) <= 1e-11 * std::abs(lhs));
    }
  }
}

TEST_CASE("N cycles: one cycle equals vcycle from zero") {
  const auto mg = make_mg(2, 4);
  Gen g(4);
  const RVector b = g.real_vector(mg->size());
  CHECK((mg->apply_n_cycles(b, 1) - mg->vcycle(b, RVector::Zero(mg->size()))).norm() == 0.0);
  CHECK_THROWS_AS(mg->apply_n_cycles(b, 0), std::invalid_argument);
}

TEST_CASE("error propagation identity") {
  const auto mg = make_mg(2, 4);
  const RMatrix k = mg->stiffness(4).to_dense();
  const Eigen::LLT<RMatrix> llt(k);
  Gen g(5);
  const RVector u = g.real_vector(mg->size());
  for (int n : {1, 2, 5}) {
    const RVector err = u - mg->apply_n_cycles(RVector(k * u), n);
    // (K^{-1} - K~^{-N}) K u computed term by term.
    const RVector ref = llt.solve(RVector(k * u)) - mg->apply_n_cycles(RVector(k * u), n);
    CHECK((err - ref).norm() <= 1e-11 * u.norm());
  }
}

TEST_CASE("K-norm error shrinks each cycle, consistently across right-hand sides") {
  const auto mg = make_mg(2, 4);
  const RMatrix k = mg->stiffness(4).to_dense();
  const Eigen::LLT<RMatrix> llt(k);
  Gen g(6);
  std::vector<double> rates;
  for (int t = 0; t < 10; ++t) {
    const RVector b = g.real_vector(mg->size());
    const RVector exact = llt.solve(b);
    RVector x = RVector::Zero(mg->size());
    double prev = k_norm(k, exact);
    double worst = 0.0;
    for (int c = 0; c < 6; ++c) {
      x = mg->vcycle(b, x);
      const double e = k_norm(k, RVector(exact - x));
      worst = std::max(worst, e / prev);
      prev = e;
    }
    CHECK(worst < 1.0);
    rates.push_back(worst);
  }
  const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  CHECK(*hi <= 2.0 * *lo);
}

TEST_CASE("geometric decay of the K-norm error on level 5") {
  const auto mg = make_mg(2, 5);
  const RMatrix k = mg->stiffness(5).to_dense();
  Gen g(7);
  const RVector b = g.real_vector(mg->size());
  const RVector exact = k.llt().solve(b);
  std::vector<double> ns, logs;
  for (int n = 1; n <= 8; ++n) {
    ns.push_back(n);
    logs.push_back(std::log(k_norm(k, RVector(exact - mg->apply_n_cycles(b, n)))));
  }
  const auto fit = helmfov::testing::fit_line(ns, logs);
  CHECK(std::exp(fit.slope) < 1.0);
  CHECK(fit.r2 > 0.9);
}

TEST_CASE("measured reduction factors are below one on levels 2 to 5") {
  for (int level = 2; level <= 5; ++level) {
    const auto est = measure_gamma(*make_mg(2, level), 3, 30, 11);
    CAPTURE(level);
    if (level > 2) CHECK(est.gamma1 > 0.0);
    CHECK(est.gamma1 < 1.0);
    CHECK(est.gamma0 < 1.0);
    CHECK(est.samples == 3);
  }
}

TEST_CASE("Laplace solver: dense and CG paths agree") {
  auto mesh = std::make_shared<const MeshHierarchy>(build_hierarchy(2, 1, 5));
  auto mg = std::make_shared<const MgHierarchy>(mesh);
  const LaplaceSolver dense(mg);
  const LaplaceSolver cg(mg, LaplaceSolverOptions{1e-12, 500, 10});
  CHECK(dense.uses_dense());
  CHECK_FALSE(cg.uses_dense());
  Gen g(8);
  const CVector b = g.complex_vector(mg->size());
  const CVector x1 = dense.solve(b);
  const CVector x2 = cg.solve(b);
  CHECK((x1 - x2).norm() <= 1e-10 * x1.norm());
  const RMatrix k = helmfov::testing::stencil_stiffness(2, 5);
  CHECK((k.cast<Complex>() * x2 - b).norm() <= 1e-11 * b.norm());
}

TEST_CASE("Laplace solver surfaces CG failure") {
  auto mesh = std::make_shared<const MeshHierarchy>(build_hierarchy(2, 1, 5));
  auto mg = std::make_shared<const MgHierarchy>(mesh);
  const LaplaceSolver weak(mg, LaplaceSolverOptions{1e-14, 1, 10});
  Gen g(9);
  CHECK_THROWS_AS(weak.solve(g.real_vector(mg->size())), ConvergenceError);
}
