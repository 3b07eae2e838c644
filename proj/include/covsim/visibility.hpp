#pragma once

#include <cstdint>
#include <vector>

#include "covsim/heightfield.hpp"

namespace covsim {

struct SensorModel {
  double d_max{25.0};  // sensing range, meters

  void validate() const {
    if (!(d_max > 0)) throw std::invalid_argument("SensorModel: d_max must be > 0");
  }
};

/// Surface discretization: cell centers of an nx-by-ny tiling of the domain,
/// each lifted onto the surface and weighted by its (uniform) cell area.
struct SurfaceGrid {
  DomainRect domain;
  int nx{0}, ny{0};
  double cell_w{0}, cell_h{0};
  double cell_area{0};
  std::vector<Vec3> cells;  // index iy * nx + ix

  static SurfaceGrid build(const HeightField& field, double resolution);

  int count() const { return nx * ny; }
  int index(int ix, int iy) const { return iy * nx + ix; }
};

struct CoverageMeasurement {
  double value{0.0};      // visible area fraction, noiseless
  double noise_std{0.0};  // std-dev attached by the measurement pipeline
  std::vector<std::uint8_t> visible;  // per-cell mask, aligned with SurfaceGrid::cells
};

/// True when every interior sample along a->b clears the terrain. Samples are
/// spaced at most `step` apart; the target end gets 0.01 m of clearance so a
/// surface point cannot occlude itself, and the observer end must be strictly
/// above the surface.
bool line_of_sight(const HeightField& field, const Vec3& a, const Vec3& b, double step);

/// Fraction of surface cells visible from at least one agent: within `d_max`
/// (3D distance) and with line of sight. `los_step` <= 0 selects the default
/// of half the grid resolution. Pure function of its inputs.
CoverageMeasurement coverage(const HeightField& field, const SurfaceGrid& grid,
                             const TeamConfig& team, const SensorModel& sensor,
                             double los_step = -1.0);

/// value + Gaussian(0, noise_std), clamped to [0, 1]. noise_std = 0 returns
/// the value exactly without consuming randomness.
double noisy_coverage(const CoverageMeasurement& measurement, double noise_std, RngEngine& rng);

}  // namespace covsim
