#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "generators.hpp"

namespace helmfov::testing {
namespace {

using LComplex = std::complex<long double>;
using LVector = Eigen::Matrix<LComplex, Eigen::Dynamic, 1>;
using LMatrix = Eigen::Matrix<LComplex, Eigen::Dynamic, Eigen::Dynamic>;

struct Grid {
  int dim;
  Index m;  // interior points per axis

  Index size() const { return dim == 2 ? m * m : m * m * m; }
  Index dof(Index i, Index j, Index k) const { return i + m * j + m * m * k; }
  bool inside(Index i, Index j, Index k) const {
    return i >= 0 && i < m && j >= 0 && j < m && k >= 0 && k < (dim == 2 ? 1 : m);
  }
};

struct Offset {
  int di, dj, dk;
  double weight;
};

RMatrix from_stencil(int dim, int level, double diag, const std::vector<Offset>& offsets) {
  const Grid g{dim, interior_per_axis(level)};
  RMatrix a = RMatrix::Zero(g.size(), g.size());
  const Index kmax = dim == 2 ? 1 : g.m;
  for (Index k = 0; k < kmax; ++k) {
    for (Index j = 0; j < g.m; ++j) {
      for (Index i = 0; i < g.m; ++i) {
        const Index row = g.dof(i, j, k);
        a(row, row) = diag;
        for (const auto& o : offsets) {
          const Index ii = i + o.di, jj = j + o.dj, kk = k + o.dk;
          if (g.inside(ii, jj, kk)) a(row, g.dof(ii, jj, kk)) = o.weight;
        }
      }
    }
  }
  return a;
}

std::vector<Offset> symmetric(std::vector<Offset> half) {
  std::vector<Offset> all;
  for (const auto& o : half) {
    all.push_back(o);
    all.push_back({-o.di, -o.dj, -o.dk, o.weight});
  }
  return all;
}

long double lnorm(const LVector& v) {
  long double s = 0.0L;
  for (Index i = 0; i < v.size(); ++i) s += std::norm(v(i));
  return std::sqrt(s);
}

/// Orthogonalises v against the first `count` columns of q, twice.
void cgs2(const LMatrix& q, Index count, LVector& v) {
  for (int pass = 0; pass < 2; ++pass) {
    if (count == 0) return;
    const LVector c = q.leftCols(count).adjoint() * v;
    v -= q.leftCols(count) * c;
  }
}

}  // namespace

CMatrix Gen::unitary_matrix(Index n) {
  const CMatrix g = complex_matrix(n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ() * CMatrix::Identity(n, n);
}

Index interior_per_axis(int level) { return (Index{1} << level) - 1; }

RMatrix stencil_stiffness(int dim, int level) {
  const double h = 1.0 / static_cast<double>(Index{1} << level);
  if (dim == 2) return from_stencil(2, level, 4.0, symmetric({{1, 0, 0, -1.0}, {0, 1, 0, -1.0}}));
  return from_stencil(3, level, 6.0 * h,
                      symmetric({{1, 0, 0, -h}, {0, 1, 0, -h}, {0, 0, 1, -h}}));
}

RMatrix stencil_mass(int dim, int level) {
  const double h = 1.0 / static_cast<double>(Index{1} << level);
  if (dim == 2) {
    const double o = h * h / 12.0;
    return from_stencil(2, level, h * h / 2.0,
                        symmetric({{1, 0, 0, o}, {0, 1, 0, o}, {1, 1, 0, o}}));
  }
  const double h3 = h * h * h;
  const double edge = h3 / 20.0, face = h3 / 30.0;
  return from_stencil(3, level, 0.4 * h3,
                      symmetric({{1, 0, 0, edge}, {0, 1, 0, edge}, {0, 0, 1, edge},
                                 {1, 1, 1, edge}, {1, 1, 0, face}, {1, 0, 1, face},
                                 {0, 1, 1, face}}));
}

double kuhn_hat(int dim, double s, double t, double u) {
  if (dim == 2) u = 0.0;
  const double hi = std::max({0.0, s, t, u});
  const double lo = std::min({0.0, s, t, u});
  return std::max(0.0, 1.0 - (hi - lo));
}

RMatrix hat_prolongation(int dim, int coarse_level) {
  const Grid coarse{dim, interior_per_axis(coarse_level)};
  const Grid fine{dim, interior_per_axis(coarse_level + 1)};
  RMatrix p = RMatrix::Zero(fine.size(), coarse.size());
  const Index fk = dim == 2 ? 1 : fine.m;
  const Index ck = dim == 2 ? 1 : coarse.m;
  for (Index k = 0; k < fk; ++k) {
    for (Index j = 0; j < fine.m; ++j) {
      for (Index i = 0; i < fine.m; ++i) {
        // Fine node (i+1, j+1, k+1) in fine units is at half that in coarse units.
        const double x = 0.5 * static_cast<double>(i + 1);
        const double y = 0.5 * static_cast<double>(j + 1);
        const double z = 0.5 * static_cast<double>(k + 1);
        for (Index c = 0; c < ck; ++c) {
          for (Index b = 0; b < coarse.m; ++b) {
            for (Index a = 0; a < coarse.m; ++a) {
              const double v = kuhn_hat(dim, x - static_cast<double>(a + 1),
                                        y - static_cast<double>(b + 1),
                                        z - static_cast<double>(c + 1));
              if (v != 0.0) p(fine.dof(i, j, k), coarse.dof(a, b, c)) = v;
            }
          }
        }
      }
    }
  }
  return p;
}

std::vector<double> krylov_min_residuals(const CMatrix& a, const CVector& b, int steps) {
  const Index n = a.rows();
  const LMatrix al = a.cast<LComplex>();
  const LVector bl = b.cast<LComplex>();
  const long double b_norm = lnorm(bl);

  std::vector<double> out{static_cast<double>(b_norm)};
  LMatrix q = LMatrix::Zero(n, steps + 1);
  LMatrix u = LMatrix::Zero(n, steps);
  q.col(0) = bl / b_norm;
  Index basis = 1;
  Index image = 0;
  long double last = b_norm;
  for (int i = 1; i <= steps; ++i) {
    if (basis == i) {
      LVector w = al * q.col(i - 1);
      LVector aw = w;
      cgs2(u, image, aw);
      const long double an = lnorm(aw);
      if (an > 1e-28L * lnorm(w)) {
        u.col(image++) = aw / an;
        cgs2(q, basis, w);
        const long double wn = lnorm(w);
        if (wn > 1e-28L * b_norm && basis < n) q.col(basis++) = w / wn;
      }
      LVector r = bl - u.leftCols(image) * (u.leftCols(image).adjoint() * bl);
      r -= u.leftCols(image) * (u.leftCols(image).adjoint() * r);
      last = lnorm(r);
    }
    out.push_back(static_cast<double>(last));
  }
  return out;
}

CMatrix dense_two_level(const RMatrix& k, const RMatrix& m, const CMatrix& a, const RMatrix& r,
                        const CMatrix& a_coarse) {
  const Index n = k.rows();
  const CMatrix rc = r.cast<Complex>();
  const CMatrix mc = m.cast<Complex>();
  const CMatrix coarse = rc * Eigen::FullPivLU<CMatrix>(a_coarse).solve(CMatrix(rc.transpose()));
  const CMatrix kinv = Eigen::FullPivLU<RMatrix>(k).inverse().cast<Complex>();
  return coarse * mc + kinv * (CMatrix::Identity(n, n) - a * coarse) * mc;
}

DenseFovSample dense_fov(const CMatrix& b, int n_angles) {
  DenseFovSample s;
  for (int k = 0; k < n_angles; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n_angles;
    const Complex rot = std::polar(1.0, theta);
    const CMatrix h = 0.5 * (rot * b + std::conj(rot) * b.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const CVector v = es.eigenvectors().col(h.rows() - 1);
    s.angles.push_back(theta);
    s.support.push_back(es.eigenvalues()(h.rows() - 1));
    s.boundary.push_back(v.dot(b * v));
  }
  return s;
}

double point_set_hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  const auto directed = [](const std::vector<Complex>& p, const std::vector<Complex>& q) {
    double worst = 0.0;
    for (const auto& x : p) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : q) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Line l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  l.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return l;
}

}  // namespace helmfov::testing
