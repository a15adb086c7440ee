#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "helmfov/mesh.hpp"
#include "oracles.hpp"

using namespace helmfov;
using helmfov::testing::Gen;

TEST_CASE("level 1 square has one interior node") {
  const auto m = build_mesh(2, 1);
  CHECK(m.num_dofs() == 1);
  CHECK(m.num_elements() == 8);
  CHECK(m.h() == 0.5);
  const auto p = m.interior_nodes().at(0);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.5);
}

TEST_CASE("entity counts") {
  const auto a = build_mesh(2, 3);
  CHECK(a.num_dofs() == 49);
  CHECK(a.num_elements() == 128);
  const auto b = build_mesh(3, 2);
  CHECK(b.num_dofs() == 27);
  CHECK(b.num_elements() == 384);
}

TEST_CASE("invalid mesh arguments are rejected") {
  CHECK_THROWS_AS(build_mesh(1, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(2, 0), std::invalid_argument);
  CHECK_THROWS(build_mesh(3, 8, MeshOptions{1000}));
  CHECK_THROWS(build_hierarchy(2, 3, 2));
}

TEST_CASE("element volumes cover the domain") {
  for (int dim : {2, 3}) {
    for (int level = 1; level <= (dim == 2 ? 5 : 3); ++level) {
      const auto m = build_mesh(dim, level);
      double total = 0.0;
      for (Index e = 0; e < m.num_elements(); ++e) {
        const double v = m.signed_volume(e);
        CHECK(v != 0.0);
        total += std::abs(v);
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("dof numbering is lexicographic with x fastest") {
  const auto m = build_mesh(3, 2);
  const double h = m.h();
  const auto pts = m.interior_nodes();
  for (Index d = 0; d < m.num_dofs(); ++d) {
    const Index i = d % 3, j = (d / 3) % 3, k = d / 9;
    CHECK(pts[static_cast<std::size_t>(d)][0] == doctest::Approx(h * static_cast<double>(i + 1)));
    CHECK(pts[static_cast<std::size_t>(d)][1] == doctest::Approx(h * static_cast<double>(j + 1)));
    CHECK(pts[static_cast<std::size_t>(d)][2] == doctest::Approx(h * static_cast<double>(k + 1)));
  }
}

TEST_CASE("hierarchy prolongation shapes") {
  const auto a = build_hierarchy(2, 1, 2);
  CHECK(a.num_levels() == 2);
  CHECK(a.prolongation(1).rows() == 9);
  CHECK(a.prolongation(1).cols() == 1);
  const auto b = build_hierarchy(2, 2, 4);
  CHECK(b.num_levels() == 3);
  CHECK(b.prolongation(2).rows() == 49);
  CHECK(b.prolongation(2).cols() == 9);
  CHECK(b.prolongation(3).rows() == 225);
  CHECK(b.prolongation(3).cols() == 49);
}

TEST_CASE("prolongation matches sampled coarse hats") {
  for (int dim : {2, 3}) {
    const int top = dim == 2 ? 5 : 3;
    const auto hier = build_hierarchy(dim, 1, top);
    for (int l = 1; l < top; ++l) {
      const RMatrix expected = helmfov::testing::hat_prolongation(dim, l);
      const RMatrix got = hier.prolongation(l).to_dense();
      CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
}

TEST_CASE("single coarse value spreads to the hat support") {
  const auto hier = build_hierarchy(2, 1, 2);
  const RVector v = RVector::Constant(1, 3.0);
  const RVector y = prolongate(hier, 1, 2, v);
  // Fine interior grid is 3x3; centre is dof 4.
  CHECK(y(4) == 3.0);
  for (Index d : {1, 3, 5, 7, 0, 8}) CHECK(y(d) == 1.5);
  CHECK(y(2) == 0.0);
  CHECK(y(6) == 0.0);
}

TEST_CASE("constant coarse vector prolongs to the hat sum") {
  const auto hier = build_hierarchy(2, 2, 3);
  const auto& coarse = hier.level(2);
  const auto& fine = hier.level(3);
  const RVector ones = RVector::Ones(coarse.num_dofs());
  const RVector y = prolongate(hier, 2, 3, ones);
  const auto pts = fine.interior_nodes();
  for (Index d = 0; d < fine.num_dofs(); ++d) {
    CHECK(y(d) == doctest::Approx(coarse.evaluate(ones, pts[static_cast<std::size_t>(d)])));
  }
}

TEST_CASE("prolongate identity and linearity") {
  const auto hier = build_hierarchy(3, 1, 3);
  Gen g(11);
  const RVector x = g.real_vector(hier.level(1).num_dofs());
  const RVector z = g.real_vector(hier.level(1).num_dofs());
  CHECK(prolongate(hier, 1, 1, x) == x);
  const RVector lhs = prolongate(hier, 1, 3, RVector(x + z));
  const RVector rhs = prolongate(hier, 1, 3, x) + prolongate(hier, 1, 3, z);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(prolongate(hier, 1, 2, RVector(RVector::Zero(5))), DimensionError);
  CHECK_THROWS(prolongate(hier, 3, 1, x));
}

TEST_CASE("nested spaces: coarse and prolonged functions agree pointwise") {
  Gen g(2024);
  for (int dim : {2, 3}) {
    const auto hier = build_hierarchy(dim, 1, dim == 2 ? 4 : 3);
    const int from = hier.coarsest() + 1;
    const int to = hier.finest();
    const auto& coarse = hier.level(from);
    const auto& fine = hier.level(to);
    const CVector x = g.complex_vector(coarse.num_dofs());
    const CVector y = prolongate(hier, from, to, x);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      const Point p{g.uniform(0, 1), g.uniform(0, 1), dim == 3 ? g.uniform(0, 1) : 0.0};
      worst = std::max(worst, std::abs(coarse.evaluate(x, p) - fine.evaluate(y, p)));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("composite prolongation is the product of adjacent ones") {
  const auto hier = build_hierarchy(2, 1, 4);
  const RMatrix direct = hier.composite_prolongation(1, 4).to_dense();
  const RMatrix product = hier.prolongation(3).to_dense() * hier.prolongation(2).to_dense() *
                          hier.prolongation(1).to_dense();
  CHECK((direct - product).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("mesh summary json") {
  const auto s = mesh_summary_json(build_mesh(3, 2));
  CHECK(s.find("\"dim\":3") != std::string::npos);
  CHECK(s.find("\"dofs\":27") != std::string::npos);
  CHECK(s.find("\"elements\":384") != std::string::npos);
  CHECK(s.find("\"h\":0.25") != std::string::npos);
}
