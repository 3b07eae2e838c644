#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "covsim/geometry.hpp"
#include "covsim/rng.hpp"

namespace covsim {

enum class FieldKind { Flat, GaussianMixture, PiecewiseLinear, ExternalGrid };

struct GaussianComponent {
  Vec2 center{0.0, 0.0};
  double peak{0.0};   // height at center, meters
  double sigma{1.0};  // isotropic std-dev, meters
};

struct GaussianMixtureSpec {
  DomainRect domain;
  std::vector<GaussianComponent> components;
  double base{0.0};
  std::uint64_t seed{0};

  void validate() const;
};

/// Parameters for drawing a random mixture terrain from a seed.
struct TerrainRandomParams {
  int n_components{7};
  double sigma{16.0};
  double peak_min{5.0};
  double peak_max{30.0};
  double base{0.0};
};

/// Triangulated surface backing a piecewise-linear field. Triangle indices
/// refer to `vertices`; `planes[t]` holds (a, b, c) with z = a*x + b*y + c
/// over triangle t.
struct PlfData {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec3> planes;
};

/// Continuous surface z = f(x, y) over a rectangular domain. Immutable after
/// construction; evaluation is safe from concurrent readers. Copies share the
/// underlying representation.
class HeightField {
 public:
  HeightField();  // flat z=0 over the unit square

  /// Surface height at (x, y); coordinates outside the domain are clamped to
  /// its boundary, so evaluation is total.
  double operator()(double x, double y) const;

  const DomainRect& domain() const;
  FieldKind kind() const;

  struct Impl;
  explicit HeightField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

HeightField flat_field(const DomainRect& domain, double z);

/// z(x,y) = base + sum_j peak_j * exp(-((x-cx_j)^2 + (y-cy_j)^2) / (2 sigma_j^2)).
HeightField generate_terrain(const GaussianMixtureSpec& spec);

/// Mixture spec with component centers uniform over the domain and peak
/// heights uniform in [peak_min, peak_max]; deterministic in `seed`.
GaussianMixtureSpec random_mixture_spec(const DomainRect& domain, std::uint64_t seed,
                                        const TerrainRandomParams& params = {});

/// Bilinear field over a node lattice spanning the domain; z has ny rows and
/// nx columns, z(i, j) at (x_min + j*dx, y_min + i*dy).
HeightField grid_field(const DomainRect& domain, Eigen::MatrixXd z);

/// Interpolating field over a triangulated point set. Triangles must cover
/// the whole domain rectangle.
HeightField piecewise_linear_field(const DomainRect& domain, PlfData data);

/// Access to the triangulation of a piecewise-linear field; nullptr for any
/// other kind.
const PlfData* plf_data(const HeightField& field);

}  // namespace covsim
