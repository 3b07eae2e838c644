#pragma once

#include <vector>

#include "covsim/heightfield.hpp"

namespace covsim {

/// On-surface sample points (x, y, z). Distinct (x, y) locations; z is the
/// surface height there.
struct SamplePointSet {
  std::vector<Vec3> points;

  int count() const { return int(points.size()); }
};

/// Checks domain membership and (x, y) uniqueness; when `for_triangulation`
/// also requires count >= 3. Throws std::invalid_argument.
void validate_samples(const SamplePointSet& samples, const DomainRect& domain,
                      bool for_triangulation = false);

/// Interpolating piecewise-linear surface over a Delaunay triangulation of
/// the sample (x, y) locations. Domain corners missing from the samples are
/// added at the height of their nearest sample, so the interpolant covers
/// the whole rectangle. Throws DegenerateSamples when the sample locations
/// are collinear.
HeightField build_piecewise_linear(const SamplePointSet& samples, const DomainRect& domain);

/// `count` points with (x, y) uniform over the domain rectangle and z on the
/// surface. Colliding (x, y) draws are retried.
SamplePointSet sample_surface_uniform(const HeightField& field, int count, RngEngine& rng);

/// One on-surface point, (x, y) uniform over the domain.
Vec3 random_surface_point(const HeightField& field, RngEngine& rng);

/// Vertical projection: (x, y) clamped into the domain, z set to the surface
/// height there. Idempotent.
Vec3 project_to_surface(const HeightField& field, const Vec3& point);

/// Corners of the domain plus its center, all at surface height: the minimal
/// five-point prior whose interpolant is a pyramid.
SamplePointSet pyramid_prior(const HeightField& field);

}  // namespace covsim
