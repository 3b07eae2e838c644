#include "covsim/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "covsim/delaunay.hpp"
#include "covsim/errors.hpp"

namespace covsim {

namespace {
constexpr double kDuplicateTol = 1e-9;
}

void validate_samples(const SamplePointSet& samples, const DomainRect& domain,
                      bool for_triangulation) {
  if (for_triangulation && samples.count() < 3)
    throw std::invalid_argument("samples: need at least 3 points");
  for (const auto& p : samples.points) {
    if (!p.allFinite()) throw std::invalid_argument("samples: non-finite coordinate");
    if (!domain.contains(p.x(), p.y()))
      throw std::invalid_argument("samples: point outside domain");
  }
  for (std::size_t i = 0; i < samples.points.size(); ++i)
    for (std::size_t j = i + 1; j < samples.points.size(); ++j) {
      const Vec2 d = samples.points[i].head<2>() - samples.points[j].head<2>();
      if (d.cwiseAbs().maxCoeff() <= kDuplicateTol)
        throw std::invalid_argument("samples: duplicate (x, y) location");
    }
}

HeightField build_piecewise_linear(const SamplePointSet& samples, const DomainRect& domain) {
  domain.validate();
  validate_samples(samples, domain, /*for_triangulation=*/true);

  // Collinearity is diagnosed on the raw samples, before the corner
  // augmentation would mask it.
  {
    const Vec2 a = samples.points[0].head<2>();
    Vec2 b = a;
    double best = -1.0;
    for (const auto& p : samples.points) {
      const double d = (p.head<2>() - a).squaredNorm();
      if (d > best) {
        best = d;
        b = p.head<2>();
      }
    }
    const double scale = std::max(domain.width(), domain.height());
    bool collinear = true;
    for (const auto& p : samples.points) {
      const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
      if (std::abs(cross) > 1e-12 * scale * scale) {
        collinear = false;
        break;
      }
    }
    if (collinear) throw DegenerateSamples("build_piecewise_linear: sample locations are collinear");
  }

  std::vector<Vec3> pts = samples.points;
  const Vec2 corners[4] = {{domain.x_min, domain.y_min},
                           {domain.x_max, domain.y_min},
                           {domain.x_min, domain.y_max},
                           {domain.x_max, domain.y_max}};
  for (const Vec2& c : corners) {
    bool present = false;
    int nearest = 0;
    double nearest_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < int(samples.points.size()); ++i) {
      const Vec2 d = samples.points[i].head<2>() - c;
      const double dist = d.squaredNorm();
      if (d.cwiseAbs().maxCoeff() <= kDuplicateTol) present = true;
      if (dist < nearest_d) {
        nearest_d = dist;
        nearest = i;
      }
    }
    if (!present) pts.emplace_back(c.x(), c.y(), samples.points[nearest].z());
  }

  std::vector<Vec2> xy(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) xy[i] = pts[i].head<2>();
  Triangulation tri = delaunay_triangulate(xy);

  PlfData data;
  data.vertices = std::move(pts);
  data.triangles = std::move(tri.triangles);
  data.planes.reserve(data.triangles.size());
  for (const auto& t : data.triangles) {
    const Vec3& p0 = data.vertices[t[0]];
    const Vec3& p1 = data.vertices[t[1]];
    const Vec3& p2 = data.vertices[t[2]];
    const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) -
                       (p2.x() - p0.x()) * (p1.y() - p0.y());
    const double a =
        ((p1.z() - p0.z()) * (p2.y() - p0.y()) - (p2.z() - p0.z()) * (p1.y() - p0.y())) / det;
    const double b =
        ((p2.z() - p0.z()) * (p1.x() - p0.x()) - (p1.z() - p0.z()) * (p2.x() - p0.x())) / det;
    data.planes.emplace_back(a, b, p0.z() - a * p0.x() - b * p0.y());
  }
  return piecewise_linear_field(domain, std::move(data));
}

SamplePointSet sample_surface_uniform(const HeightField& field, int count, RngEngine& rng) {
  if (count < 1) throw std::invalid_argument("sample_surface_uniform: count must be >= 1");
  const DomainRect& d = field.domain();
  std::uniform_real_distribution<double> ux(d.x_min, d.x_max);
  std::uniform_real_distribution<double> uy(d.y_min, d.y_max);
  SamplePointSet out;
  out.points.reserve(std::size_t(count));
  while (int(out.points.size()) < count) {
    const double x = ux(rng);
    const double y = uy(rng);
    bool duplicate = false;
    for (const auto& q : out.points)
      if (std::abs(q.x() - x) <= kDuplicateTol && std::abs(q.y() - y) <= kDuplicateTol) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;
    out.points.emplace_back(x, y, field(x, y));
  }
  return out;
}

Vec3 random_surface_point(const HeightField& field, RngEngine& rng) {
  const DomainRect& d = field.domain();
  std::uniform_real_distribution<double> ux(d.x_min, d.x_max);
  std::uniform_real_distribution<double> uy(d.y_min, d.y_max);
  const double x = ux(rng);
  const double y = uy(rng);
  return {x, y, field(x, y)};
}

Vec3 project_to_surface(const HeightField& field, const Vec3& point) {
  const Vec2 xy = field.domain().clamp(point.head<2>());
  return {xy.x(), xy.y(), field(xy.x(), xy.y())};
}

SamplePointSet pyramid_prior(const HeightField& field) {
  const DomainRect& d = field.domain();
  SamplePointSet out;
  const Vec2 locs[5] = {{d.x_min, d.y_min},
                        {d.x_max, d.y_min},
                        {d.x_min, d.y_max},
                        {d.x_max, d.y_max},
                        d.center()};
  for (const Vec2& p : locs) out.points.emplace_back(p.x(), p.y(), field(p.x(), p.y()));
  return out;
}

}  // namespace covsim
