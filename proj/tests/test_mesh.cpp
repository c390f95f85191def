#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "porehom/error.hpp"
#include "porehom/mesh.hpp"

using namespace porehom;

namespace {

double polygon_perimeter(int n, double r) { return 2.0 * n * r * std::sin(std::numbers::pi / n); }
double polygon_area(int n, double r) { return 0.5 * n * r * r * std::sin(2.0 * std::numbers::pi / n); }

std::vector<double> face_coords(const Mesh2D& m, Side side) {
  std::vector<double> out;
  for (const BoundaryEdge& e : m.boundary_edges()) {
    if (e.tag != EdgeTag::CellFace || e.side != side) continue;
    for (int v : e.v) {
      const Vec2 p = m.vertex(v);
      out.push_back(side == Side::XMin || side == Side::XMax ? p.y : p.x);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TEST_CASE("unit cell with r = 0.25 approximates the pore area") {
  const Mesh2D m = build_unit_cell_mesh({0.25, 64, 0.05, true});
  const double exact = 1.0 - std::numbers::pi * 0.0625;
  CHECK(std::abs(m.total_area() - exact) < 1e-3);
  // The polygonal hole is exact up to rounding.
  CHECK(m.total_area() == doctest::Approx(1.0 - polygon_area(64, 0.25)).epsilon(1e-12));
  CHECK(m.boundary_length(EdgeTag::Interface) == doctest::Approx(polygon_perimeter(64, 0.25)).epsilon(1e-12));
  CHECK(m.count_edges(EdgeTag::Interface) == 64);
  CHECK(m.count_edges(EdgeTag::Outer) == 0);
}

TEST_CASE("unit cell without inclusion covers the square") {
  const Mesh2D m = build_unit_cell_mesh({0.0, 64, 0.1, false});
  CHECK(std::abs(m.total_area() - 1.0) < 1e-12);
  CHECK(m.count_edges(EdgeTag::Interface) == 0);
  CHECK(m.interface_vertices().empty());
}

TEST_CASE("inclusion touching the cell boundary is rejected") {
  try {
    build_unit_cell_mesh({0.5, 64, 0.05, true});
    FAIL("expected a geometry error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Geometry);
  }
  CHECK_THROWS_AS(build_unit_cell_mesh({0.45, 64, 0.05, true}), Error);
  CHECK_THROWS_AS(build_unit_cell_mesh({0.25, 60, 0.05, true}), Error);
}

TEST_CASE("unit cell invariants hold across radii and resolutions") {
  for (double r : {0.1, 0.25, 0.4}) {
    for (int n : {16, 32, 64}) {
      for (double h : {0.2, 0.1, 0.04, 0.02}) {
        CAPTURE(r);
        CAPTURE(n);
        CAPTURE(h);
        const Mesh2D m = build_unit_cell_mesh({r, n, h, true});
        for (std::size_t t = 0; t < m.num_triangles(); ++t) REQUIRE(m.area(t) > 0.0);
        CHECK(m.total_area() == doctest::Approx(1.0 - polygon_area(n, r)).epsilon(1e-12));
        for (const BoundaryEdge& e : m.boundary_edges()) {
          if (e.tag != EdgeTag::Interface) continue;
          for (int v : e.v) CHECK(std::abs(norm(m.vertex(v) - Vec2{0.5, 0.5}) - r) < 1e-10);
        }
        // Periodic matching of opposite faces.
        const auto left = face_coords(m, Side::XMin);
        const auto right = face_coords(m, Side::XMax);
        const auto bottom = face_coords(m, Side::YMin);
        const auto top = face_coords(m, Side::YMax);
        REQUIRE(left.size() == right.size());
        REQUIRE(bottom.size() == top.size());
        for (std::size_t i = 0; i < left.size(); ++i) CHECK(std::abs(left[i] - right[i]) < 1e-12);
        for (std::size_t i = 0; i < bottom.size(); ++i) CHECK(std::abs(bottom[i] - top[i]) < 1e-12);
      }
    }
  }
}

TEST_CASE("perforated tiling of [0,1.2]x[0,1]") {
  const Mesh2D cell = build_unit_cell_mesh({0.25, 64, 0.1, true});
  const Rect domain{0.0, 0.0, 1.2, 1.0};

  SUBCASE("epsilon = 0.2 gives 30 cells") {
    const Mesh2D m = build_perforated_mesh(domain, 0.2, cell);
    CHECK(m.num_cells() == 30);
    CHECK(m.inclusions().size() == 30);
    CHECK(m.total_area() == doctest::Approx(1.2 * (1.0 - polygon_area(64, 0.25))).epsilon(1e-10));
    CHECK(std::abs(m.total_area() - 0.964380) < 1.2e-3);
    CHECK(m.total_area() == doctest::Approx(30 * 0.04 * cell.total_area()).epsilon(1e-10));
    CHECK(m.boundary_length(EdgeTag::Interface) ==
          doctest::Approx(30 * 0.2 * cell.boundary_length(EdgeTag::Interface)).epsilon(1e-10));
    CHECK(m.count_edges(EdgeTag::CellFace) == 0);
    CHECK(m.boundary_length(EdgeTag::Outer) == doctest::Approx(4.4).epsilon(1e-12));
    for (const BoundaryEdge& e : m.boundary_edges()) {
      if (e.tag != EdgeTag::Interface) continue;
      const Inclusion& inc = m.inclusions()[static_cast<std::size_t>(e.pair_id)];
      CHECK(inc.cell == e.pair_id);
      for (int v : e.v) CHECK(std::abs(norm(m.vertex(v) - inc.center) - inc.radius) < 1e-10);
    }
  }

  SUBCASE("epsilon = 0.1 gives 120 cells") {
    const Mesh2D m = build_perforated_mesh(domain, 0.1, cell);
    CHECK(m.num_cells() == 120);
    CHECK(m.total_area() == doctest::Approx(120 * 0.01 * cell.total_area()).epsilon(1e-10));
  }

  SUBCASE("non-commensurate epsilon is a tiling error") {
    try {
      build_perforated_mesh(domain, 0.07, cell);
      FAIL("expected a tiling error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Tiling);
    }
  }
}

TEST_CASE("macro mesh") {
  const Mesh2D m = build_macro_mesh({0.0, 0.0, 1.2, 1.0}, 0.05);
  CHECK(std::abs(m.total_area() - 1.2) < 1e-12);
  CHECK(m.count_edges(EdgeTag::Outer) == m.boundary_edges().size());

  const Mesh2D coarse = build_macro_mesh({0.0, 0.0, 1.0, 1.0}, 0.5);
  CHECK(coarse.num_triangles() >= 2);
  CHECK(std::abs(coarse.total_area() - 1.0) < 1e-12);

  // Edge count scales like h^-2.
  const Mesh2D fine = build_macro_mesh({0.0, 0.0, 1.2, 1.0}, 0.02);
  const Mesh2D finer = build_macro_mesh({0.0, 0.0, 1.2, 1.0}, 0.01);
  CHECK(std::abs(fine.total_area() - 1.2) < 1e-12);
  const double ratio = static_cast<double>(finer.num_edges()) / static_cast<double>(fine.num_edges());
  CHECK(ratio > 3.8);
  CHECK(ratio < 4.2);
}

TEST_CASE("point location") {
  const Mesh2D cell = build_unit_cell_mesh({0.25, 64, 0.1, true});
  const Mesh2D m = build_perforated_mesh({0.0, 0.0, 1.2, 1.0}, 0.2, cell);
  const PointLocator loc(m);

  const auto hit = loc.locate({0.6, 0.5});
  REQUIRE(hit.has_value());
  CHECK(std::abs(hit->bary[0] + hit->bary[1] + hit->bary[2] - 1.0) < 1e-12);

  CHECK_FALSE(loc.locate({0.1, 0.1}).has_value());
  CHECK_FALSE(loc.locate({2.0, 0.5}).has_value());

  const auto at_vertex = loc.locate(m.vertex(17));
  REQUIRE(at_vertex.has_value());
  const auto& b = at_vertex->bary;
  CHECK(std::max({b[0], b[1], b[2]}) == doctest::Approx(1.0).epsilon(1e-14));

  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto l = loc.locate(m.barycenter(t));
    REQUIRE(l.has_value());
    CHECK(l->triangle == static_cast<int>(t));
  }
}
