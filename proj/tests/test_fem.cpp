#include <cmath>
#include <random>

#include "doctest.h"
#include "porehom/error.hpp"
#include "porehom/fem.hpp"
#include "porehom/mesh.hpp"

using namespace porehom;

namespace {

Mesh2D reference_triangle() {
  return Mesh2D({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}},
                {{{0, 1}, EdgeTag::Outer}, {{1, 2}, EdgeTag::Interface}, {{2, 0}, EdgeTag::Outer}});
}

// (0,0) (1,0) (1,1) (0,1), diagonal 0-2.
Mesh2D two_triangle_square() {
  return Mesh2D({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{{0, 1, 2}}, {{0, 2, 3}}},
                {{{0, 1}, EdgeTag::Outer},
                 {{1, 2}, EdgeTag::Outer},
                 {{2, 3}, EdgeTag::Outer},
                 {{3, 0}, EdgeTag::Outer}});
}

std::vector<double> nodal(const Mesh2D& m, double (*f)(Vec2)) {
  std::vector<double> out(m.num_vertices());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(m.vertex(static_cast<int>(i)));
  return out;
}

Mesh2D perforated(double eps = 0.2) {
  return build_perforated_mesh({0.0, 0.0, 1.2, 1.0}, eps, build_unit_cell_mesh({0.25, 64, 0.1, true}));
}

}  // namespace

TEST_CASE("mass matrix of the reference triangle") {
  const SparseMatrix M = assemble_mass(reference_triangle());
  const double a = 0.5 / 12.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(M.at(i, j) == doctest::Approx((i == j ? 2.0 : 1.0) * a).epsilon(1e-15));
}

TEST_CASE("mass matrix integrates constants") {
  for (const Mesh2D& m : {build_macro_mesh({0, 0, 1, 1}, 0.1), perforated()}) {
    const SparseMatrix M = assemble_mass(m);
    const std::vector<double> one(m.num_vertices(), 1.0);
    CHECK(dot(one, M * one) == doctest::Approx(m.total_area()).epsilon(1e-12));
    CHECK(M.asymmetry() <= 1e-14);
  }
  const Mesh2D sq = build_macro_mesh({0, 0, 1, 1}, 0.07);
  const std::vector<double> one(sq.num_vertices(), 1.0);
  CHECK(dot(one, assemble_mass(sq) * one) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stiffness of the two-triangle square") {
  // Element (0,0),(1,0),(1,1): gradients (-1,0),(1,-1),(0,1), area 1/2.
  // Element (0,0),(1,1),(0,1): gradients (0,-1),(1,0),(-1,1), area 1/2.
  const double expected[4][4] = {
      {1.0, -0.5, 0.0, -0.5},
      {-0.5, 1.0, -0.5, 0.0},
      {0.0, -0.5, 1.0, -0.5},
      {-0.5, 0.0, -0.5, 1.0},
  };
  const Mesh2D m = two_triangle_square();
  const SparseMatrix K = assemble_stiffness(m, identity2());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(K.at(i, j) - expected[i][j]) < 1e-15);

  const SparseMatrix K2 = assemble_stiffness(m, scaled(identity2(), 2.0));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(K2.at(i, j) == 2.0 * K.at(i, j));
}

TEST_CASE("stiffness kernel, symmetry and semidefiniteness") {
  const Mesh2D m = perforated();
  const Mat2 tensor{{{1.3, 0.2}, {0.2, 0.7}}};
  const SparseMatrix K = assemble_stiffness(m, tensor);
  CHECK(K.asymmetry() <= 1e-14);
  const std::vector<double> one(m.num_vertices(), 1.0);
  for (double r : K * one) CHECK(std::abs(r) <= 1e-12 * K.max_abs());

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(m.num_vertices());
    for (double& xi : x) xi = dist(rng);
    CHECK(dot(x, K * x) >= -1e-12 * K.max_abs() * dot(x, x));
  }

  const Mat2 bad{{{1.0, 2.0}, {2.0, 1.0}}};
  try {
    assemble_stiffness(m, bad);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
  }
}

TEST_CASE("patch test reproduces linear fields") {
  const Mesh2D m = perforated();
  const SparseMatrix K = assemble_stiffness(m, identity2());
  auto exact = [](Vec2 p) { return 2.0 * p.x - 3.0 * p.y + 0.5; };
  std::vector<bool> fixed(m.num_vertices(), false);
  for (const BoundaryEdge& e : m.boundary_edges())
    for (int v : e.v) fixed[static_cast<std::size_t>(v)] = true;

  // Dirichlet rows replaced by identity, known values moved to the right side.
  std::vector<Triplet> trip;
  std::vector<double> b(m.num_vertices(), 0.0);
  for (int i = 0; i < K.size(); ++i) {
    if (fixed[static_cast<std::size_t>(i)]) {
      trip.push_back({i, i, 1.0});
      b[static_cast<std::size_t>(i)] = exact(m.vertex(i));
      continue;
    }
    for (int k = K.row_offsets()[i]; k < K.row_offsets()[i + 1]; ++k) {
      const int j = K.columns()[k];
      if (fixed[static_cast<std::size_t>(j)]) {
        b[static_cast<std::size_t>(i)] -= K.values()[k] * exact(m.vertex(j));
      } else {
        trip.push_back({i, j, K.values()[k]});
      }
    }
  }
  const SparseMatrix A = SparseMatrix::from_triplets(K.size(), std::move(trip), true);
  const SolveResult r = solve_spd(A, b, {1e-13, 20000});
  for (std::size_t v = 0; v < m.num_vertices(); ++v) CHECK(std::abs(r.x[v] - exact(m.vertex(static_cast<int>(v)))) < 1e-8);
}

TEST_CASE("interface mass") {
  const Mesh2D line = reference_triangle();
  const SparseMatrix M = assemble_interface_mass(line, EdgeTag::Interface, false);
  const double L = std::sqrt(2.0);
  CHECK(M.at(1, 1) == doctest::Approx(L / 3.0).epsilon(1e-15));
  CHECK(M.at(2, 2) == doctest::Approx(L / 3.0).epsilon(1e-15));
  CHECK(M.at(1, 2) == doctest::Approx(L / 6.0).epsilon(1e-15));
  CHECK(M.at(0, 0) == 0.0);

  const Mesh2D m = perforated();
  const SparseMatrix Mc = assemble_interface_mass(m, EdgeTag::Interface, false);
  const SparseMatrix Ml = assemble_interface_mass(m, EdgeTag::Interface, true);
  const std::vector<double> one(m.num_vertices(), 1.0);
  const double per_hole = 2.0 * 64 * 0.05 * std::sin(3.14159265358979323846 / 64);
  CHECK(std::abs(per_hole - 0.314033) < 1e-6);
  CHECK(dot(one, Mc * one) == doctest::Approx(30 * per_hole).epsilon(1e-12));
  const auto rc = Mc.row_sums();
  const auto rl = Ml.row_sums();
  for (std::size_t i = 0; i < rc.size(); ++i) CHECK(std::abs(rc[i] - rl[i]) < 1e-15);

  CHECK_THROWS_AS(assemble_interface_mass(two_triangle_square(), EdgeTag::Interface, false), Error);
}

TEST_CASE("conjugate gradients") {
  const SparseMatrix A = SparseMatrix::from_triplets(2, {{0, 0, 2}, {0, 1, 1}, {1, 0, 1}, {1, 1, 2}}, true);
  const std::vector<double> b{3.0, 3.0};
  const SolveResult r = solve_spd(A, b);
  CHECK(std::abs(r.x[0] - 1.0) < 1e-12);
  CHECK(std::abs(r.x[1] - 1.0) < 1e-12);

  const SolveResult z = solve_spd(A, std::vector<double>{0.0, 0.0});
  CHECK(z.iterations == 0);
  CHECK(z.x[0] == 0.0);
  CHECK(z.x[1] == 0.0);

  const Mesh2D m = perforated();
  const SparseMatrix M = assemble_mass(m);
  const std::vector<double> one(m.num_vertices(), 1.0);
  const SolveResult rm = solve_spd(M, M * one);
  for (double x : rm.x) CHECK(std::abs(x - 1.0) < 1e-8);

  const SparseMatrix K = assemble_stiffness(m, identity2());
  const SparseMatrix S = SparseMatrix::combine(1.0, M, 1.0, K);
  std::vector<double> rhs(m.num_vertices(), 1.0);
  rhs[0] = 7.0;
  try {
    solve_spd(S, rhs, {1e-14, 2});
    FAIL("expected non-convergence");
  } catch (const SolverError& e) {
    CHECK(e.kind() == ErrorKind::Solver);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("field norms") {
  const Mesh2D sq = build_macro_mesh({0, 0, 1, 1}, 0.1);
  const NodalField c{FieldKind::Volume, std::vector<double>(sq.num_vertices(), 3.0)};
  CHECK(field_norms(sq, c).l2_volume == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(field_norms(sq, c).l2_gradient < 1e-12);

  const NodalField x{FieldKind::Volume, nodal(sq, [](Vec2 p) { return p.x; })};
  const FieldNorms n = field_norms(sq, x);
  CHECK(std::abs(n.l2_volume * n.l2_volume - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(n.l2_gradient * n.l2_gradient - 1.0) < 1e-12);

  const FieldNorms d = field_norms(sq, x, x);
  CHECK(d.l2_volume == 0.0);
  CHECK(d.l2_gradient == 0.0);

  const Mesh2D m = perforated();
  const NodalField s{FieldKind::Surface, std::vector<double>(m.interface_vertices().size(), 2.0)};
  CHECK(field_norms(m, s).l2_surface ==
        doctest::Approx(2.0 * std::sqrt(m.boundary_length(EdgeTag::Interface))).epsilon(1e-12));
  CHECK_THROWS_AS(field_norms(sq, c, NodalField{FieldKind::Surface, {}}), Error);
}

TEST_CASE("interpolation") {
  const Mesh2D macro = build_macro_mesh({0.0, 0.0, 1.2, 1.0}, 0.05);
  const auto lin = nodal(macro, [](Vec2 p) { return 5.0 * (p.x + p.y); });
  const std::vector<Vec2> pts{{0.6, 0.5}};
  CHECK(interpolate(macro, lin, pts)[0] == doctest::Approx(5.5).epsilon(1e-13));

  const std::vector<double> c(macro.num_vertices(), -4.25);
  for (double v : interpolate(macro, c, std::vector<Vec2>{{0.13, 0.77}, {1.2, 1.0}, {0.0, 0.31}}))
    CHECK(v == doctest::Approx(-4.25).epsilon(1e-14));

  const Mesh2D micro = perforated();
  std::vector<Vec2> verts(micro.vertices().begin(), micro.vertices().end());
  const auto on_micro = interpolate(macro, lin, verts);
  REQUIRE(on_micro.size() == micro.num_vertices());
  for (double v : on_micro) CHECK(std::isfinite(v));

  // Restriction to the mesh's own vertices is the identity.
  const auto self = interpolate(micro, nodal(micro, [](Vec2 p) { return p.x * p.y; }), verts);
  for (std::size_t i = 0; i < verts.size(); ++i) CHECK(std::abs(self[i] - verts[i].x * verts[i].y) < 1e-13);

  const std::vector<Vec2> hole{{0.1, 0.1}};
  const auto ml = nodal(micro, [](Vec2 p) { return p.x; });
  CHECK_THROWS_AS(interpolate(micro, ml, hole), Error);
  const double near = interpolate(micro, ml, hole, OutsidePolicy::NearestVertex)[0];
  CHECK(std::abs(near - 0.1) < 0.06);
}
