#pragma once

#include <array>
#include <span>
#include <vector>

#include "porehom/geometry.hpp"

namespace porehom::detail {

// Bowyer-Watson triangulation of a point set. Returns counter-clockwise
// triangles indexing into `points`. Cavities are restricted to the connected,
// star-shaped region around each inserted point, which keeps the result a
// valid triangulation even when the incircle test is ambiguous.
std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Vec2> points);

}  // namespace porehom::detail
