#pragma once

#include <array>
#include <vector>

#include "covsim/geometry.hpp"

namespace covsim {

/// 2D triangulation; triangle entries index into `points`, oriented CCW.
struct Triangulation {
  std::vector<Vec2> points;
  std::vector<std::array<int, 3>> triangles;
};

/// Delaunay triangulation of the convex hull of `points` (Bowyer-Watson).
/// Points are inserted in lexicographic (x, y) order so co-circular ties
/// resolve deterministically. Throws DegenerateSamples when all points are
/// collinear; duplicate points are the caller's responsibility.
Triangulation delaunay_triangulate(const std::vector<Vec2>& points);

}  // namespace covsim
