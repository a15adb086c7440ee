#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <sstream>

#include "generators.hpp"
#include "helmfov/fov.hpp"
#include "helmfov/precond.hpp"
#include "oracles.hpp"

using namespace helmfov;
using helmfov::testing::Gen;

namespace {

LinearOperator diag_op(std::vector<Complex> d) {
  CMatrix m = CMatrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
  return LinearOperator::from_dense(m);
}

CMatrix nilpotent() {
  CMatrix n = CMatrix::Zero(2, 2);
  n(0, 1) = 1.0;
  return n;
}

}  // namespace

// ---------------------------------------------------------------- geometry

TEST_CASE("clipping a square") {
  const Polygon sq{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  const auto half = clip(sq, {Complex(1, 0), 0.0});
  CHECK(polygon_area(half) == doctest::Approx(2.0));
  CHECK(clip(sq, {Complex(1, 0), -2.0}).empty());
  CHECK(polygon_area(clip(sq, {Complex(0, 1), 5.0})) == doctest::Approx(4.0));
}

TEST_CASE("half-plane intersection recovers a triangle") {
  std::vector<HalfPlane> planes;
  for (int k = 0; k < 3; ++k) {
    const Complex n = std::polar(1.0, 2.0 * std::numbers::pi * k / 3.0);
    planes.push_back({n, 1.0});
  }
  const auto tri = intersect_halfplanes(planes, 10.0);
  CHECK(tri.size() == 3);
  CHECK(polygon_area(tri) == doctest::Approx(3.0 * std::sqrt(3.0)));
  CHECK(std::abs(polygon_centroid(tri)) < 1e-12);
}

TEST_CASE("convex hull drops interior and collinear points") {
  const auto hull = convex_hull({{0, 0}, {2, 0}, {1, 0}, {2, 2}, {0, 2}, {1, 1}, {0, 1}});
  CHECK(hull.size() == 4);
  CHECK(polygon_area(hull) == doctest::Approx(4.0));
}

TEST_CASE("distances, containment and Hausdorff") {
  const Polygon sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(distance_to_polygon(sq, {0.5, 0.5}) == 0.0);
  CHECK(distance_to_polygon(sq, {2, 0.5}) == doctest::Approx(1.0));
  CHECK(distance_to_polygon(sq, {2, 2}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(polygon_contains(sq, {1.0 + 1e-13, 0.5}, 1e-12));
  CHECK_FALSE(polygon_contains(sq, {1.1, 0.5}, 1e-12));
  Polygon moved;
  for (auto v : sq) moved.push_back(v + Complex(0.25, 0));
  CHECK(hausdorff_distance(sq, moved) == doctest::Approx(0.25));
  CHECK(hausdorff_distance(sq, sq) == 0.0);
  const auto box = bounding_box({{1, -2}, {3, 4}, {-1, 0}});
  CHECK(box.re_min == -1);
  CHECK(box.re_max == 3);
  CHECK(box.im_min == -2);
  CHECK(box.im_max == 4);
}

// ---------------------------------------------------------------- enclosures

TEST_CASE("1x1 operator collapses to its value") {
  const Complex z0(0.3, -1.2);
  const auto enc = compute_enclosure(diag_op({z0}), {16});
  for (const auto& v : enc.polygon) CHECK(std::abs(v - z0) < 1e-9);
  for (const auto& w : enc.witnesses) CHECK(std::abs(w - z0) < 1e-15);
  CHECK(enc.all_converged());
}

TEST_CASE("diag(0,1) encloses the unit segment") {
  FovOptions o;
  o.n_angles = 32;
  const auto enc = compute_enclosure(diag_op({0.0, 1.0}), o);
  const auto box = bounding_box(enc.polygon);
  CHECK(std::abs(box.re_min) < 1e-9);
  CHECK(std::abs(box.re_max - 1.0) < 1e-9);
  CHECK(box.height() < 1e-9);
  for (const auto& w : enc.witnesses) {
    CHECK(std::abs(w.imag()) < 1e-12);
    CHECK(w.real() >= -1e-12);
    CHECK(w.real() <= 1.0 + 1e-12);
  }
}

TEST_CASE("nilpotent 2x2: disc of radius one half") {
  const auto b = LinearOperator::from_dense(nilpotent());
  const auto enc = compute_enclosure(b, {64});
  for (double s : enc.support) CHECK(std::abs(s - 0.5) < 1e-6);
  double max_w = 0.0;
  for (const auto& w : enc.witnesses) max_w = std::max(max_w, std::abs(w));
  CHECK(std::abs(max_w - 0.5) < 1e-6);
  // Rayleigh quotients of random unit vectors never leave the enclosure.
  Gen g(1);
  double sampled = 0.0;
  for (int t = 0; t < 100000; ++t) {
    const CVector v = g.unit_vector(2);
    const Complex z = v.dot(nilpotent() * v);
    sampled = std::max(sampled, std::abs(z));
    if (t % 1000 == 0) CHECK(polygon_contains(enc.polygon, z, 1e-12));
  }
  CHECK(sampled <= 0.5 + 1e-12);
  CHECK(sampled > 0.49);
}

TEST_CASE("normal matrix: enclosure equals the eigenvalue hull") {
  Gen g(2);
  const std::vector<Complex> eig{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}, {0.2, 0.1}, {-0.5, 0.3}};
  CMatrix d = CMatrix::Zero(6, 6);
  for (Index i = 0; i < 6; ++i) d(i, i) = eig[static_cast<std::size_t>(i)];
  const CMatrix u = g.unitary_matrix(6);
  const CMatrix b = u * d * u.adjoint();
  FovOptions o;
  o.n_angles = 64;
  o.eig_tol = 1e-12;
  const auto enc = compute_enclosure(LinearOperator::from_dense(b), o);
  const auto hull = convex_hull(eig);
  CHECK(hausdorff_distance(enc.polygon, hull) <= 10 * o.eig_tol * enc.scale);
}

TEST_CASE("enclosure agrees with dense sampling") {
  Gen g(3);
  const CMatrix b = g.complex_matrix(20, 20);
  FovOptions o;
  o.n_angles = 48;
  const auto enc = compute_enclosure(LinearOperator::from_dense(b), o);
  const auto ref = helmfov::testing::dense_fov(b, 48);
  for (std::size_t k = 0; k < ref.support.size(); ++k) {
    CHECK(std::abs(enc.support[k] - ref.support[k]) <= 1e-8 * enc.scale);
    CHECK(polygon_contains(enc.polygon, ref.boundary[k], 1e-9 * enc.scale));
  }
  // Every witness is itself a point of the field of values, so it sits inside.
  for (const auto& w : enc.witnesses) CHECK(polygon_contains(enc.polygon, w, 1e-9 * enc.scale));
}

TEST_CASE("support value in a single direction") {
  const auto b = diag_op({Complex(2, 0), Complex(0, 3)});
  CHECK(support_value(b, Complex(1, 0)) == doctest::Approx(2.0));
  CHECK(support_value(b, Complex(0, -5)) == doctest::Approx(3.0));
  CHECK(-support_value(b, Complex(-1, 0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(support_value(b, Complex(0, 0)), std::invalid_argument);
}

TEST_CASE("enclosure argument checks") {
  CHECK_THROWS_AS(compute_enclosure(diag_op({1.0}), {4}), std::invalid_argument);
  const LinearOperator no_adj(1, [](const CVector& x) { return x; });
  CHECK_THROWS_AS(compute_enclosure(no_adj), std::invalid_argument);
}

TEST_CASE("rotation check") {
  Gen g(4);
  FovOptions o;
  o.n_angles = 32;
  const auto zero = rotation_check(diag_op({1.0, Complex(0, 2), -0.5}), 0.0, o);
  CHECK(zero.hausdorff == 0.0);
  const auto flip = rotation_check(diag_op({1.0, 3.0}), std::numbers::pi, o);
  CHECK(flip.passed);
  const auto random = rotation_check(LinearOperator::from_dense(g.complex_matrix(20, 20)),
                                     std::numbers::pi / 3, o);
  CHECK(random.hausdorff < 1e-7 * random.scale);
  CHECK(random.passed);
}

TEST_CASE("refining the sweep shrinks the polygon") {
  Gen g(5);
  const auto b = LinearOperator::from_dense(g.complex_matrix(15, 15));
  Polygon prev;
  double prev_area = 0.0;
  for (int n : {8, 16, 32, 64, 128}) {
    FovOptions o;
    o.n_angles = n;
    const auto enc = compute_enclosure(b, o);
    const double area = polygon_area(enc.polygon);
    if (!prev.empty()) {
      CHECK(area <= prev_area * (1 + 1e-12));
      for (const auto& v : enc.polygon) CHECK(polygon_contains(prev, v, 1e-10 * enc.scale));
    }
    prev = enc.polygon;
    prev_area = area;
  }
}

TEST_CASE("parallel sweep reproduces the serial one") {
  Gen g(6);
  const auto b = LinearOperator::from_dense(g.complex_matrix(12, 12));
  FovOptions serial;
  serial.n_angles = 24;
  FovOptions par = serial;
  par.threads = 4;
  const auto a = compute_enclosure(b, serial);
  const auto c = compute_enclosure(b, par);
  CHECK(a.support == c.support);
  CHECK(a.polygon == c.polygon);
}

// ---------------------------------------------------------------- diagnostics

TEST_CASE("one interior node: scaled rectangle and strip intercept") {
  const auto d = discretize(2, 1, 1.0, LossProfile::constant(1.0));
  const auto op = preconditioned_operator(d, exact_laplace_preconditioner(d));
  const auto enc = compute_enclosure(op, {16});
  const auto diag = diagnostics(enc, 0.5, 2, 1.0, 1.0);
  const auto r = diag.outer_scaled();
  CHECK(r.re_min == doctest::Approx(0.484375).epsilon(1e-9));
  CHECK(r.re_max == doctest::Approx(0.484375).epsilon(1e-9));
  CHECK(r.im_min == doctest::Approx(0.015625).epsilon(1e-7));
  CHECK(*diag.strip_min == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(*diag.strip_max == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(*diag.strip_min_scaled() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("conjugate-symmetric spectrum gives a symmetric rectangle") {
  const auto enc = compute_enclosure(diag_op({Complex(5, 1), Complex(5, -1), Complex(6, 0)}), {32});
  const auto diag = diagnostics(enc, 1.0, 2, 0.0, std::nullopt);
  CHECK(diag.outer.im_min == doctest::Approx(-diag.outer.im_max));
  CHECK_FALSE(diag.strip_min.has_value());
  CHECK(diag.origin_distance > 4.9);
  CHECK(diag.disc_bound_applicable);
  CHECK(diag.disc_ratio() < 1.0);
}

TEST_CASE("enclosure CSV") {
  const auto enc = compute_enclosure(diag_op({1.0, 2.0}), {8});
  std::ostringstream os;
  write_enclosure_csv(os, enc);
  const auto s = os.str();
  CHECK(s.rfind("theta,support,witness_re,witness_im,converged\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 9);
}
