#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "porehom/geometry.hpp"

namespace porehom {

enum class EdgeTag : std::uint8_t { Outer = 1, Interface = 2, CellFace = 3 };

// Sides of the unit cell (or of the macro rectangle).
enum class Side : std::uint8_t { XMin = 0, XMax = 1, YMin = 2, YMax = 3, None = 255 };

struct BoundaryEdge {
  std::array<int, 2> v{};
  EdgeTag tag = EdgeTag::Outer;
  Side side = Side::None;  // meaningful for CellFace
  int pair_id = -1;        // Interface: owning cell; CellFace: ordinal along the side
};

// Solid inclusion of one periodicity cell.
struct Inclusion {
  Vec2 center;
  double radius = 0.0;
  int cell = 0;
};

// Conforming triangle mesh with tagged boundary edges. Immutable once built.
class Mesh2D {
 public:
  Mesh2D() = default;

  // Validates orientation, conformity and boundary coverage; throws
  // Error(Meshing) when any of them fails.
  Mesh2D(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
         std::vector<BoundaryEdge> boundary_edges, std::vector<Inclusion> inclusions = {});

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  std::span<const Vec2> vertices() const { return vertices_; }
  std::span<const std::array<int, 3>> triangles() const { return triangles_; }
  std::span<const BoundaryEdge> boundary_edges() const { return boundary_edges_; }
  std::span<const double> element_areas() const { return areas_; }
  std::span<const Inclusion> inclusions() const { return inclusions_; }

  const Vec2& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
  const std::array<int, 3>& triangle(std::size_t t) const { return triangles_[t]; }
  double area(std::size_t t) const { return areas_[t]; }
  Vec2 barycenter(std::size_t t) const;

  double total_area() const;
  // Total length of boundary edges carrying `tag`.
  double boundary_length(EdgeTag tag) const;
  std::size_t count_edges(EdgeTag tag) const;
  std::size_t num_edges() const;

  // Sorted global ids of vertices touched by Interface edges.
  const std::vector<int>& interface_vertices() const { return interface_vertices_; }
  // Global vertex id -> position in interface_vertices(), or -1.
  int interface_index(int vertex) const { return interface_index_[static_cast<std::size_t>(vertex)]; }

  // Cell grid of a tiled mesh (0 x 0 otherwise).
  int cells_x() const { return cells_x_; }
  int cells_y() const { return cells_y_; }
  int num_cells() const { return cells_x_ * cells_y_; }
  void set_cell_grid(int nx, int ny) { cells_x_ = nx; cells_y_ = ny; }

  Rect bounding_box() const;

 private:
  void validate() const;

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<Inclusion> inclusions_;
  std::vector<double> areas_;
  std::vector<int> interface_vertices_;
  std::vector<int> interface_index_;
  int cells_x_ = 0;
  int cells_y_ = 0;
};

using MeshPtr = std::shared_ptr<const Mesh2D>;

struct UnitCellSpec {
  double radius = 0.25;
  int n_gamma = 64;  // polygon sides, multiple of 8
  double h = 0.05;   // target edge length in cell units
  bool with_inclusion = true;
};

inline constexpr double kMaxInclusionRadius = 0.45;

// Triangulation of Y^p = (0,1)^2 minus the inscribed n_gamma-gon of the disk
// centered at (0.5, 0.5). The mesh has the full symmetry group of the square,
// so opposite faces match vertex-for-vertex.
Mesh2D build_unit_cell_mesh(const UnitCellSpec& spec);

// Tiles the eps-scaled unit-cell template over `domain`; shared cell faces
// become interior, the rectangle boundary is Outer.
Mesh2D build_perforated_mesh(const Rect& domain, double epsilon, const Mesh2D& cell_template);

// Structured, unperforated triangulation of `domain`.
Mesh2D build_macro_mesh(const Rect& domain, double h);

struct PointLocation {
  int triangle = -1;
  std::array<double, 3> bary{};
};

// Uniform hash grid over triangle bounding boxes. Holds a pointer to the mesh,
// which must outlive the locator.
class PointLocator {
 public:
  explicit PointLocator(const Mesh2D& mesh);

  std::optional<PointLocation> locate(Vec2 p) const;
  const Mesh2D& mesh() const { return *mesh_; }

 private:
  std::size_t bucket(int ix, int iy) const { return static_cast<std::size_t>(iy) * nx_ + ix; }

  const Mesh2D* mesh_;
  Rect box_;
  int nx_ = 1;
  int ny_ = 1;
  double cell_w_ = 1.0;
  double cell_h_ = 1.0;
  std::vector<int> offsets_;
  std::vector<int> items_;
};

std::optional<PointLocation> locate_point(const Mesh2D& mesh, Vec2 p);

// Barycentric coordinates of p in triangle t.
std::array<double, 3> barycentric(const Mesh2D& mesh, std::size_t t, Vec2 p);

}  // namespace porehom
