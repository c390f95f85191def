#include "porehom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

#include "delaunay.hpp"
#include "porehom/error.hpp"

namespace porehom {
namespace {

std::uint64_t undirected_key(int a, int b) {
  const auto lo = static_cast<std::uint32_t>(std::min(a, b));
  const auto hi = static_cast<std::uint32_t>(std::max(a, b));
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

std::string where(Vec2 p) {
  std::ostringstream os;
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

// Edges belonging to exactly one triangle, oriented as in that triangle.
std::vector<std::array<int, 2>> topological_boundary(std::span<const std::array<int, 3>> tris) {
  std::unordered_map<std::uint64_t, std::pair<int, std::array<int, 2>>> count;
  count.reserve(tris.size() * 3);
  for (const auto& t : tris) {
    for (int e = 0; e < 3; ++e) {
      auto& slot = count[undirected_key(t[e], t[(e + 1) % 3])];
      slot.first += 1;
      slot.second = {t[e], t[(e + 1) % 3]};
    }
  }
  std::vector<std::array<int, 2>> out;
  for (const auto& [key, val] : count) {
    if (val.first == 1) out.push_back(val.second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Merges coincident points (within `tol`) using a hash grid.
class VertexWelder {
 public:
  explicit VertexWelder(double tol) : tol_(tol), inv_(1.0 / (4.0 * tol)) {}

  int insert(Vec2 p) {
    const auto ix = static_cast<std::int64_t>(std::floor(p.x * inv_));
    const auto iy = static_cast<std::int64_t>(std::floor(p.y * inv_));
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = grid_.find(key(ix + dx, iy + dy));
        if (it == grid_.end()) continue;
        for (int id : it->second) {
          if (norm(points_[static_cast<std::size_t>(id)] - p) <= tol_) return id;
        }
      }
    }
    const int id = static_cast<int>(points_.size());
    points_.push_back(p);
    grid_[key(ix, iy)].push_back(id);
    return id;
  }

  std::vector<Vec2> take() { return std::move(points_); }

 private:
  static std::uint64_t key(std::int64_t ix, std::int64_t iy) {
    return (static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(iy);
  }

  double tol_;
  double inv_;
  std::vector<Vec2> points_;
  std::unordered_map<std::uint64_t, std::vector<int>> grid_;
};

// Drops vertices not referenced by any triangle and renumbers.
void compact(std::vector<Vec2>& verts, std::vector<std::array<int, 3>>& tris) {
  std::vector<int> remap(verts.size(), -1);
  for (const auto& t : tris)
    for (int v : t) remap[static_cast<std::size_t>(v)] = 0;
  std::vector<Vec2> kept;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (remap[i] == 0) {
      remap[i] = static_cast<int>(kept.size());
      kept.push_back(verts[i]);
    }
  }
  for (auto& t : tris)
    for (int& v : t) v = remap[static_cast<std::size_t>(v)];
  verts = std::move(kept);
}

// ---------------------------------------------------------------------------
// Unit-cell generation on the fundamental region
//   F = { 0 <= y <= x <= 1/2 } \ polygon,
// one eighth of the square; the full cell is its orbit under the symmetry
// group of the square.

struct Segment {
  int a;
  int b;
  bool arc;
};

struct Fundamental {
  Vec2 center{0.5, 0.5};
  double radius = 0.0;
  bool hole = false;
  int n_gamma = 64;

  bool inside_polygon(Vec2 p) const {
    if (!hole) return false;
    const double step = 2.0 * std::numbers::pi / n_gamma;
    double theta = std::atan2(p.y - center.y, p.x - center.x);
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    const int k = static_cast<int>(std::floor(theta / step)) % n_gamma;
    const Vec2 a = center + radius * Vec2{std::cos(k * step), std::sin(k * step)};
    const Vec2 b = center + radius * Vec2{std::cos((k + 1) * step), std::sin((k + 1) * step)};
    return orient(a, b, p) > 0.0;
  }

  bool contains(Vec2 p) const {
    return p.y > 0.0 && p.x < 0.5 && p.y < p.x && !inside_polygon(p);
  }
};

bool encroaches(const std::vector<Vec2>& pts, const std::vector<Segment>& segs, Vec2 p, double factor) {
  for (const Segment& s : segs) {
    const Vec2 a = pts[static_cast<std::size_t>(s.a)];
    const Vec2 b = pts[static_cast<std::size_t>(s.b)];
    const Vec2 m = 0.5 * (a + b);
    if (norm(p - m) < factor * 0.5 * norm(b - a)) return true;
  }
  return false;
}

void add_straight(std::vector<Vec2>& pts, std::vector<Segment>& segs, int ia, int ib, double h,
                  std::mt19937_64& rng) {
  const Vec2 a = pts[static_cast<std::size_t>(ia)];
  const Vec2 b = pts[static_cast<std::size_t>(ib)];
  const int m = std::max(1, static_cast<int>(std::ceil(norm(b - a) / h - 1e-9)));
  std::uniform_real_distribution<double> jitter(-1e-6, 1e-6);
  int prev = ia;
  for (int i = 1; i < m; ++i) {
    const double s = (static_cast<double>(i) + jitter(rng)) / m;
    pts.push_back(a + s * (b - a));
    const int id = static_cast<int>(pts.size()) - 1;
    segs.push_back({prev, id, false});
    prev = id;
  }
  segs.push_back({prev, ib, false});
}

struct FundamentalMesh {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;
};

FundamentalMesh mesh_fundamental(const UnitCellSpec& spec) {
  Fundamental F;
  F.hole = spec.with_inclusion;
  F.radius = spec.with_inclusion ? spec.radius : 0.0;
  F.n_gamma = spec.n_gamma;
  const double h = spec.h;
  const double r = F.radius;
  const Vec2 c = F.center;
  std::mt19937_64 rng(0x5eed1234ULL);

  std::vector<Vec2> pts;
  std::vector<Segment> segs;
  pts.push_back({0.0, 0.0});  // 0: corner
  pts.push_back({0.5, 0.0});  // 1: bottom mid
  int arc_first = -1;
  int arc_last = -1;
  const int arc_segments = spec.n_gamma / 8;
  const double step = 2.0 * std::numbers::pi / spec.n_gamma;
  if (F.hole) {
    // phi measured from the downward direction toward the corner (0,0).
    for (int k = 0; k <= arc_segments; ++k) {
      Vec2 p;
      if (k == 0) {
        p = {0.5, 0.5 - r};
      } else if (k == arc_segments) {
        const double s = r * std::sqrt(0.5);
        p = {0.5 - s, 0.5 - s};
      } else {
        p = c + r * Vec2{-std::sin(k * step), -std::cos(k * step)};
      }
      pts.push_back(p);
      const int id = static_cast<int>(pts.size()) - 1;
      if (k == 0) arc_first = id;
      if (k > 0) segs.push_back({id - 1, id, true});
      arc_last = id;
    }
  } else {
    pts.push_back(c);
    arc_first = arc_last = 2;
  }
  add_straight(pts, segs, 0, 1, h, rng);               // bottom face y = 0
  add_straight(pts, segs, 1, arc_first, h, rng);       // mirror line x = 1/2
  add_straight(pts, segs, arc_last, 0, h, rng);        // diagonal mirror line
  const std::size_t n_boundary = pts.size();

  const double chord = F.hole ? 2.0 * r * std::sin(0.5 * step) : h;
  auto clear_of_lines = [&](Vec2 p, double margin) {
    return p.y >= margin && 0.5 - p.x >= margin && (p.x - p.y) * std::sqrt(0.5) >= margin;
  };

  // Graded rings around the inclusion, from the chord length up to h.
  double ring_outer = r;
  if (F.hole && chord < h) {
    double rho = r;
    double spacing = chord;
    for (int ring = 0;; ++ring) {
      const double radial = std::min(h, 0.866 * spacing);
      rho += radial;
      spacing = rho * step;
      if (rho > 0.5 - 0.6 * h) break;
      const double offset = (ring % 2 == 0) ? 0.5 : 0.0;
      for (int k = 0; k <= arc_segments; ++k) {
        const double phi = (k + offset) * step;
        const Vec2 p = c + rho * Vec2{-std::sin(phi), -std::cos(phi)};
        const double local = std::min(spacing, h);
        if (!F.contains(p) || !clear_of_lines(p, 0.55 * local)) continue;
        if (encroaches(pts, segs, p, 1.05)) continue;
        pts.push_back(p);
      }
      ring_outer = rho;
      if (radial >= h) break;
    }
  }

  // Triangular lattice for the remainder.
  std::uniform_real_distribution<double> jitter(-0.01 * h, 0.01 * h);
  const double dy = h * std::sqrt(3.0) / 2.0;
  for (int j = 0;; ++j) {
    const double y = j * dy;
    if (y > 0.5) break;
    const double x_off = (j % 2 == 1) ? 0.5 * h : 0.0;
    for (int i = 0;; ++i) {
      const double x = x_off + i * h;
      if (x > 0.5) break;
      const Vec2 p{x + jitter(rng), y + jitter(rng)};
      if (!F.contains(p) || !clear_of_lines(p, 0.55 * h)) continue;
      if (F.hole) {
        const double d = norm(p - c);
        if (d - r < std::max(0.55 * h, 1.2 * chord)) continue;
        if (ring_outer > r && d < ring_outer + 0.6 * h) continue;
      }
      if (encroaches(pts, segs, p, 1.05)) continue;
      pts.push_back(p);
    }
  }
  if (F.hole) pts.push_back(c);  // removes cocircular arc degeneracy; dropped later

  for (int attempt = 0; attempt < 16; ++attempt) {
    auto tris = detail::delaunay_triangulate(pts);
    std::erase_if(tris, [&](const std::array<int, 3>& t) {
      const Vec2 g = (1.0 / 3.0) * (pts[static_cast<std::size_t>(t[0])] + pts[static_cast<std::size_t>(t[1])] +
                                    pts[static_cast<std::size_t>(t[2])]);
      return !F.contains(g);
    });

    std::unordered_map<std::uint64_t, int> present;
    for (const auto& t : tris)
      for (int e = 0; e < 3; ++e) present[undirected_key(t[e], t[(e + 1) % 3])] += 1;

    std::vector<Segment> missing;
    for (const Segment& s : segs) {
      if (!present.contains(undirected_key(s.a, s.b))) missing.push_back(s);
    }
    if (missing.empty()) return {std::move(pts), std::move(tris)};

    std::vector<Segment> next;
    for (const Segment& s : segs) {
      const bool is_missing = std::any_of(missing.begin(), missing.end(),
                                          [&](const Segment& m) { return m.a == s.a && m.b == s.b; });
      if (!is_missing) {
        next.push_back(s);
        continue;
      }
      const Vec2 a = pts[static_cast<std::size_t>(s.a)];
      const Vec2 b = pts[static_cast<std::size_t>(s.b)];
      if (s.arc) {
        throw Error(ErrorKind::Meshing, "unit cell: interface chord near " + where(0.5 * (a + b)) +
                                            " could not be recovered");
      }
      pts.push_back(0.5 * (a + b));
      const int id = static_cast<int>(pts.size()) - 1;
      next.push_back({s.a, id, false});
      next.push_back({id, s.b, false});
    }
    segs = std::move(next);
    // Drop interior points that now encroach on the refined boundary.
    std::vector<Vec2> kept(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(n_boundary));
    std::vector<int> remap(pts.size(), -1);
    for (std::size_t i = 0; i < n_boundary; ++i) remap[i] = static_cast<int>(i);
    for (std::size_t i = n_boundary; i < pts.size(); ++i) {
      const bool boundary_point = std::any_of(segs.begin(), segs.end(), [&](const Segment& s) {
        return static_cast<std::size_t>(s.a) == i || static_cast<std::size_t>(s.b) == i;
      });
      const bool is_center = F.hole && pts[i] == c;
      if (!boundary_point && !is_center && encroaches(pts, segs, pts[i], 1.05)) continue;
      remap[i] = static_cast<int>(kept.size());
      kept.push_back(pts[i]);
    }
    for (Segment& s : segs) {
      s.a = remap[static_cast<std::size_t>(s.a)];
      s.b = remap[static_cast<std::size_t>(s.b)];
    }
    pts = std::move(kept);
  }
  throw Error(ErrorKind::Meshing, "unit cell: boundary recovery did not converge near the cell corner");
}

}  // namespace

// ---------------------------------------------------------------------------

Mesh2D::Mesh2D(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
               std::vector<BoundaryEdge> boundary_edges, std::vector<Inclusion> inclusions)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)),
      inclusions_(std::move(inclusions)) {
  areas_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || static_cast<std::size_t>(v) >= vertices_.size())
        throw Error(ErrorKind::Meshing, "triangle references a missing vertex");
    }
    areas_[t] = 0.5 * orient(vertex(tri[0]), vertex(tri[1]), vertex(tri[2]));
    if (!(areas_[t] > 0.0)) {
      throw Error(ErrorKind::Meshing, "degenerate or inverted triangle near " + where(barycenter(t)));
    }
  }
  validate();

  interface_index_.assign(vertices_.size(), -1);
  for (const BoundaryEdge& e : boundary_edges_) {
    if (e.tag != EdgeTag::Interface) continue;
    for (int v : e.v) interface_index_[static_cast<std::size_t>(v)] = 0;
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (interface_index_[i] == 0) {
      interface_index_[i] = static_cast<int>(interface_vertices_.size());
      interface_vertices_.push_back(static_cast<int>(i));
    }
  }
}

void Mesh2D::validate() const {
  std::unordered_map<std::uint64_t, int> edge_count;
  edge_count.reserve(triangles_.size() * 3);
  for (const auto& t : triangles_) {
    for (int e = 0; e < 3; ++e) edge_count[undirected_key(t[e], t[(e + 1) % 3])] += 1;
  }
  std::size_t n_boundary = 0;
  for (const auto& [key, count] : edge_count) {
    if (count > 2) throw Error(ErrorKind::Meshing, "non-manifold edge shared by more than two triangles");
    if (count == 1) ++n_boundary;
  }
  std::unordered_map<std::uint64_t, int> tagged;
  for (const BoundaryEdge& e : boundary_edges_) {
    const auto key = undirected_key(e.v[0], e.v[1]);
    auto it = edge_count.find(key);
    if (it == edge_count.end() || it->second != 1) {
      throw Error(ErrorKind::Meshing, "tagged edge near " + where(0.5 * (vertex(e.v[0]) + vertex(e.v[1]))) +
                                          " is not on the boundary");
    }
    if (++tagged[key] > 1) throw Error(ErrorKind::Meshing, "boundary edge tagged twice");
  }
  if (tagged.size() != n_boundary) {
    throw Error(ErrorKind::Meshing, "boundary edges are not fully tagged");
  }
}

Vec2 Mesh2D::barycenter(std::size_t t) const {
  const auto& tri = triangles_[t];
  return (1.0 / 3.0) * (vertex(tri[0]) + vertex(tri[1]) + vertex(tri[2]));
}

double Mesh2D::total_area() const {
  double s = 0.0;
  for (double a : areas_) s += a;
  return s;
}

double Mesh2D::boundary_length(EdgeTag tag) const {
  double s = 0.0;
  for (const BoundaryEdge& e : boundary_edges_) {
    if (e.tag == tag) s += norm(vertex(e.v[1]) - vertex(e.v[0]));
  }
  return s;
}

std::size_t Mesh2D::count_edges(EdgeTag tag) const {
  return static_cast<std::size_t>(
      std::count_if(boundary_edges_.begin(), boundary_edges_.end(), [&](const BoundaryEdge& e) { return e.tag == tag; }));
}

std::size_t Mesh2D::num_edges() const {
  // Euler: every interior edge is shared by two triangles.
  return (3 * triangles_.size() + boundary_edges_.size()) / 2;
}

Rect Mesh2D::bounding_box() const {
  Rect r{vertices_.front().x, vertices_.front().y, vertices_.front().x, vertices_.front().y};
  for (const Vec2& p : vertices_) {
    r.x0 = std::min(r.x0, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.x1 = std::max(r.x1, p.x);
    r.y1 = std::max(r.y1, p.y);
  }
  return r;
}

// ---------------------------------------------------------------------------

Mesh2D build_unit_cell_mesh(const UnitCellSpec& spec) {
  if (spec.with_inclusion && !(spec.radius > 0.0 && spec.radius < kMaxInclusionRadius)) {
    std::ostringstream os;
    os << "inclusion radius " << spec.radius << " must lie in (0, " << kMaxInclusionRadius
       << "); the solid part would touch the cell boundary";
    throw Error(ErrorKind::Geometry, os.str());
  }
  if (spec.n_gamma < 16 || spec.n_gamma % 8 != 0) {
    throw Error(ErrorKind::Validation, "n_gamma must be a multiple of 8 and at least 16, got " +
                                           std::to_string(spec.n_gamma));
  }
  if (!(spec.h > 0.0)) throw Error(ErrorKind::Validation, "cell mesh size h must be positive");
  const double h = std::min(spec.h, 0.25);

  UnitCellSpec local = spec;
  local.h = h;
  FundamentalMesh fm = mesh_fundamental(local);

  // Orbit under the 8 symmetries of the square.
  VertexWelder welder(1e-12);
  std::vector<std::array<int, 3>> tris;
  tris.reserve(fm.triangles.size() * 8);
  for (int swap = 0; swap < 2; ++swap) {
    for (int fx = 0; fx < 2; ++fx) {
      for (int fy = 0; fy < 2; ++fy) {
        std::vector<int> ids(fm.points.size(), -1);
        for (const auto& t : fm.triangles) {
          for (int v : t) {
            auto& id = ids[static_cast<std::size_t>(v)];
            if (id >= 0) continue;
            Vec2 p = fm.points[static_cast<std::size_t>(v)];
            if (swap) std::swap(p.x, p.y);
            if (fx) p.x = 1.0 - p.x;
            if (fy) p.y = 1.0 - p.y;
            id = welder.insert(p);
          }
        }
        const bool flipped = (swap + fx + fy) % 2 == 1;
        for (const auto& t : fm.triangles) {
          std::array<int, 3> m{ids[static_cast<std::size_t>(t[0])], ids[static_cast<std::size_t>(t[1])],
                               ids[static_cast<std::size_t>(t[2])]};
          if (flipped) std::swap(m[1], m[2]);
          tris.push_back(m);
        }
      }
    }
  }
  std::vector<Vec2> verts = welder.take();
  compact(verts, tris);

  const Vec2 c{0.5, 0.5};
  std::vector<BoundaryEdge> edges;
  for (const auto& be : topological_boundary(tris)) {
    const Vec2 a = verts[static_cast<std::size_t>(be[0])];
    const Vec2 b = verts[static_cast<std::size_t>(be[1])];
    BoundaryEdge e;
    e.v = be;
    constexpr double tol = 1e-12;
    if (std::abs(a.x) < tol && std::abs(b.x) < tol) {
      e.tag = EdgeTag::CellFace, e.side = Side::XMin;
    } else if (std::abs(a.x - 1.0) < tol && std::abs(b.x - 1.0) < tol) {
      e.tag = EdgeTag::CellFace, e.side = Side::XMax;
    } else if (std::abs(a.y) < tol && std::abs(b.y) < tol) {
      e.tag = EdgeTag::CellFace, e.side = Side::YMin;
    } else if (std::abs(a.y - 1.0) < tol && std::abs(b.y - 1.0) < tol) {
      e.tag = EdgeTag::CellFace, e.side = Side::YMax;
    } else if (spec.with_inclusion && std::abs(norm(a - c) - spec.radius) < 1e-10 &&
               std::abs(norm(b - c) - spec.radius) < 1e-10) {
      e.tag = EdgeTag::Interface, e.pair_id = 0;
    } else {
      throw Error(ErrorKind::Meshing, "unit cell: unexpected boundary edge near " + where(0.5 * (a + b)));
    }
    edges.push_back(e);
  }
  // Ordinal of each face edge along its side.
  for (Side side : {Side::XMin, Side::XMax, Side::YMin, Side::YMax}) {
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].tag != EdgeTag::CellFace || edges[i].side != side) continue;
      const Vec2 m = 0.5 * (verts[static_cast<std::size_t>(edges[i].v[0])] + verts[static_cast<std::size_t>(edges[i].v[1])]);
      order.emplace_back((side == Side::XMin || side == Side::XMax) ? m.y : m.x, i);
    }
    std::sort(order.begin(), order.end());
    for (std::size_t k = 0; k < order.size(); ++k) edges[order[k].second].pair_id = static_cast<int>(k);
  }

  std::vector<Inclusion> inclusions;
  if (spec.with_inclusion) inclusions.push_back({c, spec.radius, 0});
  Mesh2D mesh(std::move(verts), std::move(tris), std::move(edges), std::move(inclusions));
  mesh.set_cell_grid(1, 1);
  return mesh;
}

Mesh2D build_perforated_mesh(const Rect& domain, double epsilon, const Mesh2D& cell) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Tiling, "epsilon must be positive");
  const double w = domain.width();
  const double hgt = domain.height();
  const int nx = static_cast<int>(std::llround(w / epsilon));
  const int ny = static_cast<int>(std::llround(hgt / epsilon));
  constexpr double tol = 1e-12;
  if (nx < 1 || ny < 1 || std::abs(nx * epsilon - w) > tol * std::max(1.0, w) ||
      std::abs(ny * epsilon - hgt) > tol * std::max(1.0, hgt)) {
    std::ostringstream os;
    os << "domain " << w << " x " << hgt << " is not an integer multiple of epsilon = " << epsilon;
    throw Error(ErrorKind::Tiling, os.str());
  }
  const Rect box = cell.bounding_box();
  if (std::abs(box.x0) > tol || std::abs(box.y0) > tol || std::abs(box.x1 - 1.0) > tol ||
      std::abs(box.y1 - 1.0) > tol || cell.count_edges(EdgeTag::CellFace) == 0) {
    throw Error(ErrorKind::Tiling, "template is not a unit-cell mesh");
  }

  VertexWelder welder(1e-9 * epsilon);
  std::vector<std::array<int, 3>> tris;
  tris.reserve(cell.num_triangles() * static_cast<std::size_t>(nx * ny));
  std::unordered_map<std::uint64_t, int> interface_owner;
  std::vector<Inclusion> inclusions;
  std::vector<int> ids(cell.num_vertices());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int idx = j * nx + i;
      for (std::size_t v = 0; v < cell.num_vertices(); ++v) {
        const Vec2 p = cell.vertex(static_cast<int>(v));
        ids[v] = welder.insert({domain.x0 + epsilon * (i + p.x), domain.y0 + epsilon * (j + p.y)});
      }
      for (const auto& t : cell.triangles()) {
        tris.push_back({ids[static_cast<std::size_t>(t[0])], ids[static_cast<std::size_t>(t[1])],
                        ids[static_cast<std::size_t>(t[2])]});
      }
      for (const BoundaryEdge& e : cell.boundary_edges()) {
        if (e.tag != EdgeTag::Interface) continue;
        interface_owner[undirected_key(ids[static_cast<std::size_t>(e.v[0])], ids[static_cast<std::size_t>(e.v[1])])] = idx;
      }
      for (const Inclusion& inc : cell.inclusions()) {
        inclusions.push_back({{domain.x0 + epsilon * (i + inc.center.x), domain.y0 + epsilon * (j + inc.center.y)},
                              epsilon * inc.radius, idx});
      }
    }
  }
  std::vector<Vec2> verts = welder.take();

  std::vector<BoundaryEdge> edges;
  const double on_edge = 1e-9 * epsilon;
  for (const auto& be : topological_boundary(tris)) {
    BoundaryEdge e;
    e.v = be;
    auto it = interface_owner.find(undirected_key(be[0], be[1]));
    if (it != interface_owner.end()) {
      e.tag = EdgeTag::Interface;
      e.pair_id = it->second;
      edges.push_back(e);
      continue;
    }
    const Vec2 a = verts[static_cast<std::size_t>(be[0])];
    const Vec2 b = verts[static_cast<std::size_t>(be[1])];
    auto both = [&](auto pred) { return pred(a) && pred(b); };
    if (both([&](Vec2 p) { return std::abs(p.x - domain.x0) < on_edge; })) {
      e.side = Side::XMin;
    } else if (both([&](Vec2 p) { return std::abs(p.x - domain.x1) < on_edge; })) {
      e.side = Side::XMax;
    } else if (both([&](Vec2 p) { return std::abs(p.y - domain.y0) < on_edge; })) {
      e.side = Side::YMin;
    } else if (both([&](Vec2 p) { return std::abs(p.y - domain.y1) < on_edge; })) {
      e.side = Side::YMax;
    } else {
      throw Error(ErrorKind::Conformity, "cell faces failed to merge near " + where(0.5 * (a + b)));
    }
    e.tag = EdgeTag::Outer;
    edges.push_back(e);
  }
  Mesh2D mesh(std::move(verts), std::move(tris), std::move(edges), std::move(inclusions));
  mesh.set_cell_grid(nx, ny);
  return mesh;
}

Mesh2D build_macro_mesh(const Rect& domain, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::Validation, "macro mesh size h must be positive");
  if (!(domain.width() > 0.0 && domain.height() > 0.0)) {
    throw Error(ErrorKind::Geometry, "macro domain must have positive extent");
  }
  const int nx = std::max(1, static_cast<int>(std::ceil(domain.width() / h - 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::ceil(domain.height() / h - 1e-9)));
  std::vector<Vec2> verts;
  verts.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    const double y = (j == ny) ? domain.y1 : domain.y0 + domain.height() * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? domain.x1 : domain.x0 + domain.width() * i / nx;
      verts.push_back({x, y});
    }
  }
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  }
  std::vector<BoundaryEdge> edges;
  for (int i = 0; i < nx; ++i) {
    edges.push_back({{id(i, 0), id(i + 1, 0)}, EdgeTag::Outer, Side::YMin, -1});
    edges.push_back({{id(i + 1, ny), id(i, ny)}, EdgeTag::Outer, Side::YMax, -1});
  }
  for (int j = 0; j < ny; ++j) {
    edges.push_back({{id(nx, j), id(nx, j + 1)}, EdgeTag::Outer, Side::XMax, -1});
    edges.push_back({{id(0, j + 1), id(0, j)}, EdgeTag::Outer, Side::XMin, -1});
  }
  return Mesh2D(std::move(verts), std::move(tris), std::move(edges));
}

// ---------------------------------------------------------------------------

std::array<double, 3> barycentric(const Mesh2D& mesh, std::size_t t, Vec2 p) {
  const auto& tri = mesh.triangle(t);
  const Vec2 a = mesh.vertex(tri[0]);
  const Vec2 b = mesh.vertex(tri[1]);
  const Vec2 c = mesh.vertex(tri[2]);
  const double det = orient(a, b, c);
  const double l1 = orient(a, p, c) / det;
  const double l2 = orient(a, b, p) / det;
  return {1.0 - l1 - l2, l1, l2};
}

PointLocator::PointLocator(const Mesh2D& mesh) : mesh_(&mesh), box_(mesh.bounding_box()) {
  const double w = std::max(box_.width(), 1e-300);
  const double hh = std::max(box_.height(), 1e-300);
  const double target = std::max(1.0, std::sqrt(static_cast<double>(mesh.num_triangles()) / (w * hh)));
  nx_ = std::max(1, static_cast<int>(std::ceil(w * target)));
  ny_ = std::max(1, static_cast<int>(std::ceil(hh * target)));
  cell_w_ = w / nx_;
  cell_h_ = hh / ny_;

  auto clamp_ix = [&](double x) { return std::clamp(static_cast<int>(std::floor((x - box_.x0) / cell_w_)), 0, nx_ - 1); };
  auto clamp_iy = [&](double y) { return std::clamp(static_cast<int>(std::floor((y - box_.y0) / cell_h_)), 0, ny_ - 1); };

  std::vector<int> counts(static_cast<std::size_t>(nx_ * ny_) + 1, 0);
  auto for_each_bucket = [&](std::size_t t, auto&& fn) {
    const auto& tri = mesh.triangle(t);
    double x0 = mesh.vertex(tri[0]).x, x1 = x0, y0 = mesh.vertex(tri[0]).y, y1 = y0;
    for (int v : tri) {
      x0 = std::min(x0, mesh.vertex(v).x);
      x1 = std::max(x1, mesh.vertex(v).x);
      y0 = std::min(y0, mesh.vertex(v).y);
      y1 = std::max(y1, mesh.vertex(v).y);
    }
    const double pad = 1e-12 * std::max(w, hh);
    for (int iy = clamp_iy(y0 - pad); iy <= clamp_iy(y1 + pad); ++iy)
      for (int ix = clamp_ix(x0 - pad); ix <= clamp_ix(x1 + pad); ++ix) fn(bucket(ix, iy));
  };
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) for_each_bucket(t, [&](std::size_t b) { ++counts[b + 1]; });
  for (std::size_t b = 1; b < counts.size(); ++b) counts[b] += counts[b - 1];
  offsets_ = counts;
  items_.resize(static_cast<std::size_t>(offsets_.back()));
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    for_each_bucket(t, [&](std::size_t b) { items_[static_cast<std::size_t>(fill[b]++)] = static_cast<int>(t); });
  }
}

std::optional<PointLocation> PointLocator::locate(Vec2 p) const {
  const double pad = 1e-12 * std::max({1.0, box_.width(), box_.height()});
  if (!box_.contains(p, pad)) return std::nullopt;
  const int ix = std::clamp(static_cast<int>(std::floor((p.x - box_.x0) / cell_w_)), 0, nx_ - 1);
  const int iy = std::clamp(static_cast<int>(std::floor((p.y - box_.y0) / cell_h_)), 0, ny_ - 1);
  const std::size_t b = bucket(ix, iy);
  std::optional<PointLocation> best;
  double best_min = -1e-12;
  for (int k = offsets_[b]; k < offsets_[b + 1]; ++k) {
    const auto t = static_cast<std::size_t>(items_[static_cast<std::size_t>(k)]);
    const auto bary = barycentric(*mesh_, t, p);
    const double m = std::min({bary[0], bary[1], bary[2]});
    if (m >= best_min) {
      best_min = m;
      best = PointLocation{static_cast<int>(t), bary};
      if (m > 0.0) break;
    }
  }
  return best;
}

std::optional<PointLocation> locate_point(const Mesh2D& mesh, Vec2 p) {
  return PointLocator(mesh).locate(p);
}

}  // namespace porehom
