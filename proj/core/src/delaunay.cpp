#include "delaunay.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "porehom/error.hpp"

namespace porehom::detail {
namespace {

struct Tri {
  std::array<int, 3> v;
  bool alive = true;
};

// > 0 when d lies strictly inside the circumcircle of the ccw triangle (a,b,c).
long double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const long double adx = static_cast<long double>(a.x) - d.x;
  const long double ady = static_cast<long double>(a.y) - d.y;
  const long double bdx = static_cast<long double>(b.x) - d.x;
  const long double bdy = static_cast<long double>(b.y) - d.y;
  const long double cdx = static_cast<long double>(c.x) - d.x;
  const long double cdy = static_cast<long double>(c.y) - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Vec2> input) {
  const int n = static_cast<int>(input.size());
  if (n < 3) throw Error(ErrorKind::Meshing, "delaunay: fewer than three points");

  std::vector<Vec2> pts(input.begin(), input.end());
  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const Vec2& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  const Vec2 mid{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
  pts.push_back({mid.x - 20.0 * span, mid.y - 10.0 * span});
  pts.push_back({mid.x + 20.0 * span, mid.y - 10.0 * span});
  pts.push_back({mid.x, mid.y + 20.0 * span});

  std::vector<Tri> tris;
  tris.push_back({{n, n + 1, n + 2}});

  std::vector<int> bad;
  std::vector<int> cavity;
  std::unordered_map<std::uint64_t, int> owner;  // directed edge -> cavity triangle

  for (int ip = 0; ip < n; ++ip) {
    const Vec2 p = pts[static_cast<std::size_t>(ip)];

    // Seed: the triangle containing p (largest minimum orientation).
    int seed = -1;
    double best = -std::numeric_limits<double>::infinity();
    bad.clear();
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      const Tri& tr = tris[static_cast<std::size_t>(t)];
      if (!tr.alive) continue;
      const Vec2 a = pts[static_cast<std::size_t>(tr.v[0])];
      const Vec2 b = pts[static_cast<std::size_t>(tr.v[1])];
      const Vec2 c = pts[static_cast<std::size_t>(tr.v[2])];
      const double area2 = orient(a, b, c);
      const double m = std::min({orient(a, b, p), orient(b, c, p), orient(c, a, p)}) / area2;
      if (m > best) {
        best = m;
        seed = t;
      }
      if (incircle(a, b, c, p) > 0.0L) bad.push_back(t);
    }
    if (seed < 0) throw Error(ErrorKind::Meshing, "delaunay: point outside super triangle");
    if (std::find(bad.begin(), bad.end(), seed) == bad.end()) bad.push_back(seed);

    // Connected component of the bad set around the seed.
    owner.clear();
    for (int t : bad) {
      const auto& v = tris[static_cast<std::size_t>(t)].v;
      for (int e = 0; e < 3; ++e) owner[edge_key(v[e], v[(e + 1) % 3])] = t;
    }
    std::vector<char> in_cavity(tris.size(), 0);
    cavity.assign(1, seed);
    in_cavity[static_cast<std::size_t>(seed)] = 1;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const auto& v = tris[static_cast<std::size_t>(cavity[k])].v;
      for (int e = 0; e < 3; ++e) {
        auto it = owner.find(edge_key(v[(e + 1) % 3], v[e]));
        if (it != owner.end() && !in_cavity[static_cast<std::size_t>(it->second)]) {
          in_cavity[static_cast<std::size_t>(it->second)] = 1;
          cavity.push_back(it->second);
        }
      }
    }

    // Shrink until every boundary edge is visible from p.
    std::vector<std::array<int, 3>> boundary;  // a, b, owning triangle
    for (bool changed = true; changed;) {
      changed = false;
      boundary.clear();
      for (int t : cavity) {
        if (!in_cavity[static_cast<std::size_t>(t)]) continue;
        const auto& v = tris[static_cast<std::size_t>(t)].v;
        for (int e = 0; e < 3; ++e) {
          const int a = v[e];
          const int b = v[(e + 1) % 3];
          auto it = owner.find(edge_key(b, a));
          const bool interior = it != owner.end() && in_cavity[static_cast<std::size_t>(it->second)];
          if (!interior) boundary.push_back({a, b, t});
        }
      }
      for (const auto& be : boundary) {
        const double o = orient(pts[static_cast<std::size_t>(be[0])], pts[static_cast<std::size_t>(be[1])], p);
        if (o <= 0.0 && be[2] != seed) {
          in_cavity[static_cast<std::size_t>(be[2])] = 0;
          changed = true;
        }
      }
    }

    for (int t : cavity) {
      if (in_cavity[static_cast<std::size_t>(t)]) tris[static_cast<std::size_t>(t)].alive = false;
    }
    for (const auto& be : boundary) {
      const double o = orient(pts[static_cast<std::size_t>(be[0])], pts[static_cast<std::size_t>(be[1])], p);
      if (o <= 0.0) continue;  // p on a seed edge: the flat triangle is dropped
      tris.push_back({{be[0], be[1], ip}});
    }

    // Compact occasionally so the scans stay proportional to live triangles.
    if (tris.size() > 64 && (ip % 64) == 0) {
      std::erase_if(tris, [](const Tri& t) { return !t.alive; });
    }
  }

  std::vector<std::array<int, 3>> out;
  out.reserve(tris.size());
  for (const Tri& t : tris) {
    if (!t.alive) continue;
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    out.push_back(t.v);
  }
  return out;
}

}  // namespace porehom::detail
