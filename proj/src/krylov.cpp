#include "helmfov/krylov.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "json.hpp"

namespace helmfov {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Givens {
  double c = 1.0;
  Complex s = 0.0;

  static Givens zeroing(Complex a, Complex b) {
    const double abs_a = std::abs(a);
    const double r = std::hypot(abs_a, std::abs(b));
    if (r == 0.0) return {};
    if (abs_a == 0.0) return {0.0, std::conj(b) / std::abs(b)};
    return {abs_a / r, (a / abs_a) * std::conj(b) / r};
  }

  void apply(Complex& x, Complex& y) const {
    const Complex nx = c * x + s * y;
    y = -std::conj(s) * x + c * y;
    x = nx;
  }
};

}  // namespace

bool SolveReport::history_non_increasing() const {
  for (std::size_t i = 1; i < residual_history.size(); ++i) {
    if (residual_history[i] > residual_history[i - 1]) return false;
  }
  return true;
}

std::string SolveReport::to_json() const {
  nlohmann::json j;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["rhs_norm"] = rhs_norm;
  j["true_final_residual"] = true_final_residual;
  j["wall_time"] = wall_time;
  j["residual_history"] = residual_history;
  return j.dump();
}

std::string SolveReport::csv_header() {
  return "iterations,converged,rhs_norm,final_residual,true_final_residual,wall_time";
}

std::string SolveReport::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << iterations << ',' << (converged ? 1 : 0) << ',' << rhs_norm << ',' << final_residual()
     << ',' << true_final_residual << ',' << wall_time;
  return os.str();
}

CVector random_unit_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  CVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(normal(rng), normal(rng));
  const double nv = v.norm();
  return nv > 0 ? CVector(v / nv) : v;
}

GmresResult gmres_right(const LinearOperator& a, const LinearOperator& precond, const CVector& b,
                        const GmresOptions& options) {
  const auto start = Clock::now();
  const Index n = a.size();
  require_size(precond.size(), n, "gmres_right: preconditioner");
  require_size(b.size(), n, "gmres_right: rhs");
  if (!(options.tol > 0.0)) throw std::invalid_argument("gmres_right: tol must be positive");

  GmresResult out;
  auto& rep = out.report;
  const double beta = b.norm();
  rep.rhs_norm = beta;
  rep.residual_history.push_back(beta);
  if (beta == 0.0) {
    out.x = CVector::Zero(n);
    rep.converged = true;
    rep.wall_time = seconds_since(start);
    return out;
  }

  const int m_max = std::max(0, std::min<int>(options.max_iter, static_cast<int>(n)));
  CMatrix basis(n, m_max + 1);
  CMatrix hess = CMatrix::Zero(m_max + 1, m_max);
  std::vector<Givens> rotations;
  CVector g = CVector::Zero(m_max + 1);
  g(0) = beta;
  basis.col(0) = b / beta;

  const double target = options.tol * beta;
  int k = 0;
  bool breakdown = false;
  while (k < m_max) {
    CVector w = a.apply(precond.apply(basis.col(k)));
    const double w_norm0 = w.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= k; ++i) {
        const Complex hik = basis.col(i).dot(w);
        hess(i, k) += hik;
        w -= hik * basis.col(i);
      }
    }
    const double h_next = w.norm();
    hess(k + 1, k) = h_next;
    for (int i = 0; i < k; ++i) rotations[static_cast<std::size_t>(i)].apply(hess(i, k), hess(i + 1, k));
    const Givens rot = Givens::zeroing(hess(k, k), hess(k + 1, k));
    rot.apply(hess(k, k), hess(k + 1, k));
    hess(k + 1, k) = 0.0;
    rotations.push_back(rot);
    rot.apply(g(k), g(k + 1));
    ++k;
    rep.residual_history.push_back(std::abs(g(k)));

    breakdown = h_next <= 1e2 * std::numeric_limits<double>::epsilon() * w_norm0;
    if (breakdown || std::abs(g(k)) <= target) break;
    basis.col(k) = w / h_next;
  }

  CVector y = CVector::Zero(k);
  if (k > 0) {
    y = hess.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
  }
  const CVector x_tilde = basis.leftCols(k) * y;
  out.x = precond.apply(x_tilde);
  rep.iterations = k;
  rep.converged = breakdown || rep.final_residual() <= target;
  rep.true_final_residual = (b - a.apply(out.x)).norm();
  rep.wall_time = seconds_since(start);
  return out;
}

CgResult cg_spd(const RealLinearOperator& k, const RealLinearOperator& precond, const RVector& b,
                const CgOptions& options) {
  const auto start = Clock::now();
  const Index n = k.size();
  require_size(precond.size(), n, "cg_spd: preconditioner");
  require_size(b.size(), n, "cg_spd: rhs");

  CgResult out;
  auto& rep = out.report;
  out.x = RVector::Zero(n);
  const double b_norm = b.norm();
  rep.rhs_norm = b_norm;
  rep.residual_history.push_back(b_norm);
  if (b_norm == 0.0) {
    rep.converged = true;
    rep.wall_time = seconds_since(start);
    return out;
  }
  const double target = options.tol * b_norm;
  RVector r = b;
  RVector z = precond.apply(r);
  double rz = r.dot(z);
  if (!(rz > 0.0)) throw NotPositiveDefiniteError("cg_spd: preconditioner is not positive definite");
  RVector p = z;
  for (int it = 0; it < options.max_iter; ++it) {
    const RVector kp = k.apply(p);
    const double curvature = p.dot(kp);
    if (!(curvature > 0.0)) throw NotPositiveDefiniteError("cg_spd: non-positive curvature");
    const double alpha = rz / curvature;
    out.x += alpha * p;
    r -= alpha * kp;
    const double r_norm = r.norm();
    rep.residual_history.push_back(r_norm);
    rep.iterations = it + 1;
    if (r_norm <= target) {
      rep.converged = true;
      break;
    }
    z = precond.apply(r);
    const double rz_new = r.dot(z);
    if (!(rz_new > 0.0)) {
      throw NotPositiveDefiniteError("cg_spd: preconditioner is not positive definite");
    }
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  rep.true_final_residual = (b - k.apply(out.x)).norm();
  rep.wall_time = seconds_since(start);
  return out;
}

LanczosResult lanczos_max_eig(const LinearOperator& h, const LanczosOptions& options) {
  const Index n = h.size();
  if (n == 0) throw DimensionError("lanczos_max_eig: empty operator");
  const int m_max = std::max(1, std::min<int>(options.max_iter, static_cast<int>(n)));

  CMatrix q(n, m_max + 1);
  q.col(0) = random_unit_vector(n, options.seed);
  std::vector<double> alpha;
  std::vector<double> beta;
  LanczosResult out;
  RVector ritz_vec;
  double theta = 0.0;

  int m = 0;
  while (m < m_max) {
    CVector w = h.apply(q.col(m));
    const double a = q.col(m).dot(w).real();
    alpha.push_back(a);
    // Full reorthogonalisation, two classical Gram-Schmidt passes.
    for (int pass = 0; pass < 2; ++pass) {
      const CVector coeffs = q.leftCols(m + 1).adjoint() * w;
      w -= q.leftCols(m + 1) * coeffs;
    }
    const double b = w.norm();
    ++m;

    Eigen::SelfAdjointEigenSolver<RMatrix> tri;
    RVector diag = Eigen::Map<const RVector>(alpha.data(), m);
    RVector sub = m > 1 ? RVector(Eigen::Map<const RVector>(beta.data(), m - 1)) : RVector();
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    theta = tri.eigenvalues()(m - 1);
    ritz_vec = tri.eigenvectors().col(m - 1);
    out.norm_estimate = std::max(std::abs(tri.eigenvalues()(0)), std::abs(theta));
    out.ritz_history.push_back(theta);

    const double ritz_residual = b * std::abs(ritz_vec(m - 1));
    const double scale = std::max(out.norm_estimate, std::numeric_limits<double>::min());
    const bool invariant = b <= 1e2 * std::numeric_limits<double>::epsilon() * scale;
    if (invariant || ritz_residual <= options.tol * scale || m == m_max) {
      out.converged = invariant || ritz_residual <= options.tol * scale;
      break;
    }
    beta.push_back(b);
    q.col(m) = w / b;
  }

  out.iterations = m;
  out.eigenvalue = theta;
  CVector v = q.leftCols(m) * ritz_vec.cast<Complex>();
  v /= v.norm();
  out.residual_norm = (h.apply(v) - theta * v).norm();
  out.eigenvector = std::move(v);
  return out;
}

}  // namespace helmfov
