#include "covsim/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "covsim/errors.hpp"

namespace covsim {
namespace {

struct Tri {
  std::array<int, 3> v;
  bool alive{true};
};

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// Positive when p lies strictly inside the circumcircle of CCW triangle
// (a, b, c). Coordinates are translated by p first, which keeps the 3x3
// determinant well scaled.
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  const double ax = a.x() - p.x(), ay = a.y() - p.y();
  const double bx = b.x() - p.x(), by = b.y() - p.y();
  const double cx = c.x() - p.x(), cy = c.y() - p.y();
  const double a2 = ax * ax + ay * ay;
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

}  // namespace

Triangulation delaunay_triangulate(const std::vector<Vec2>& points) {
  const int n = int(points.size());
  if (n < 3) throw DegenerateSamples("delaunay_triangulate: need at least 3 points");

  // Bounding box and scale for tolerance choices.
  Vec2 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = std::max((hi - lo).maxCoeff(), 1e-12);

  // Collinearity check over all points against the widest pair.
  {
    int i0 = 0, i1 = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      const double d = (points[i] - points[0]).squaredNorm();
      if (d > best) {
        best = d;
        i1 = i;
      }
    }
    double max_dev = 0.0;
    for (int i = 0; i < n; ++i)
      max_dev = std::max(max_dev, std::abs(orient2d(points[i0], points[i1], points[i])));
    if (max_dev <= 1e-12 * scale * scale)
      throw DegenerateSamples("delaunay_triangulate: all points are collinear");
  }

  // Vertex list with a super-triangle appended; its vertices are removed at
  // the end, leaving the Delaunay triangulation of the hull. The radius must
  // exceed the circumradius of any skinny hull triangle, else hull slivers
  // get stolen by the super vertices.
  std::vector<Vec2> verts = points;
  const Vec2 mid = 0.5 * (lo + hi);
  const double r = 1e5 * scale + 1.0;
  verts.push_back(mid + Vec2(-3 * r, -r));
  verts.push_back(mid + Vec2(3 * r, -r));
  verts.push_back(mid + Vec2(0, 3 * r));
  const int s0 = n, s1 = n + 1, s2 = n + 2;

  std::vector<Tri> tris;
  tris.push_back({{s0, s1, s2}, true});

  // Lexicographic insertion order; ties in co-circular configurations then
  // resolve the same way for any permutation of the input.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (points[a].x() != points[b].x()) return points[a].x() < points[b].x();
    return points[a].y() < points[b].y();
  });

  const double eps = 1e-12 * scale * scale * scale * scale;
  std::vector<int> bad;
  std::map<std::pair<int, int>, int> edge_count;

  for (int pi : order) {
    const Vec2& p = points[pi];
    bad.clear();
    for (int t = 0; t < int(tris.size()); ++t) {
      if (!tris[t].alive) continue;
      const auto& v = tris[t].v;
      if (incircle(verts[v[0]], verts[v[1]], verts[v[2]], p) > eps) bad.push_back(t);
    }
    // Cavity boundary: edges of bad triangles that appear exactly once.
    edge_count.clear();
    for (int t : bad) {
      const auto& v = tris[t].v;
      for (int e = 0; e < 3; ++e) {
        const int a = v[e], b = v[(e + 1) % 3];
        auto key = std::minmax(a, b);
        auto it = edge_count.find(key);
        if (it == edge_count.end())
          edge_count.emplace(key, a == key.first ? 1 : -1);
        else
          edge_count.erase(it);  // shared edge, interior to the cavity
      }
    }
    for (int t : bad) tris[t].alive = false;
    for (const auto& [key, dir] : edge_count) {
      int a = dir > 0 ? key.first : key.second;
      int b = dir > 0 ? key.second : key.first;
      // Boundary edges keep their CCW order from the dead triangle, so
      // (a, b, p) is CCW as well.
      tris.push_back({{a, b, pi}, true});
    }
  }

  Triangulation out;
  out.points = points;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    std::array<int, 3> v = t.v;
    if (orient2d(points[v[0]], points[v[1]], points[v[2]]) < 0) std::swap(v[1], v[2]);
    out.triangles.push_back(v);
  }
  if (out.triangles.empty())
    throw DegenerateSamples("delaunay_triangulate: no valid triangles (degenerate input)");
  return out;
}

}  // namespace covsim
