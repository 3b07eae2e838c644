#include "covsim/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covsim {

namespace {
constexpr double kTargetClearance = 0.01;  // meters, self-occlusion guard
}

SurfaceGrid SurfaceGrid::build(const HeightField& field, double resolution) {
  if (!(resolution > 0)) throw std::invalid_argument("SurfaceGrid: resolution must be > 0");
  SurfaceGrid g;
  g.domain = field.domain();
  // Cell edges are stretched so the tiling is exact and weights sum to the
  // domain area even when the resolution does not divide the extent.
  g.nx = std::max(1, int(std::llround(g.domain.width() / resolution)));
  g.ny = std::max(1, int(std::llround(g.domain.height() / resolution)));
  g.cell_w = g.domain.width() / g.nx;
  g.cell_h = g.domain.height() / g.ny;
  g.cell_area = g.cell_w * g.cell_h;
  g.cells.reserve(std::size_t(g.nx) * g.ny);
  for (int iy = 0; iy < g.ny; ++iy) {
    const double y = g.domain.y_min + (iy + 0.5) * g.cell_h;
    for (int ix = 0; ix < g.nx; ++ix) {
      const double x = g.domain.x_min + (ix + 0.5) * g.cell_w;
      g.cells.emplace_back(x, y, field(x, y));
    }
  }
  return g;
}

bool line_of_sight(const HeightField& field, const Vec3& a, const Vec3& b, double step) {
  if (!(step > 0)) throw std::invalid_argument("line_of_sight: step must be > 0");
  if (a.z() <= field(a.x(), a.y())) return false;  // observer on or under the ground

  const Vec3 d = b - a;
  const double len = d.norm();
  if (len <= kTargetClearance) return true;
  const int n = std::max(1, int(std::ceil(len / step)));
  const double t_clear = 1.0 - kTargetClearance / len;
  for (int i = 1; i < n; ++i) {
    const double t = double(i) / n;
    if (t >= t_clear) break;
    const double x = a.x() + t * d.x();
    const double y = a.y() + t * d.y();
    const double z = a.z() + t * d.z();
    if (z < field(x, y)) return false;
  }
  return true;
}

CoverageMeasurement coverage(const HeightField& field, const SurfaceGrid& grid,
                             const TeamConfig& team, const SensorModel& sensor,
                             double los_step) {
  sensor.validate();
  if (team.cols() < 1) throw std::invalid_argument("coverage: team must have at least one agent");
  const double step = los_step > 0 ? los_step : 0.5 * std::min(grid.cell_w, grid.cell_h);
  const double d2 = sensor.d_max * sensor.d_max;

  CoverageMeasurement m;
  m.visible.assign(grid.cells.size(), 0);
  long visible_count = 0;

  for (Eigen::Index i = 0; i < team.cols(); ++i) {
    const Vec3 agent = team.col(i);
    // Only cells inside the agent's horizontal range box can be visible.
    const int ix0 = std::clamp(
        int(std::floor((agent.x() - sensor.d_max - grid.domain.x_min) / grid.cell_w - 0.5)), 0,
        grid.nx - 1);
    const int ix1 = std::clamp(
        int(std::ceil((agent.x() + sensor.d_max - grid.domain.x_min) / grid.cell_w - 0.5)), 0,
        grid.nx - 1);
    const int iy0 = std::clamp(
        int(std::floor((agent.y() - sensor.d_max - grid.domain.y_min) / grid.cell_h - 0.5)), 0,
        grid.ny - 1);
    const int iy1 = std::clamp(
        int(std::ceil((agent.y() + sensor.d_max - grid.domain.y_min) / grid.cell_h - 0.5)), 0,
        grid.ny - 1);
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        const int idx = grid.index(ix, iy);
        if (m.visible[idx]) continue;
        const Vec3& q = grid.cells[idx];
        if ((q - agent).squaredNorm() > d2) continue;
        if (line_of_sight(field, agent, q, step)) {
          m.visible[idx] = 1;
          ++visible_count;
        }
      }
    }
  }
  // Uniform weights: normalized visible area reduces to a cell-count ratio.
  m.value = double(visible_count) / double(grid.cells.size());
  return m;
}

double noisy_coverage(const CoverageMeasurement& measurement, double noise_std, RngEngine& rng) {
  if (noise_std < 0) throw std::invalid_argument("noisy_coverage: noise_std must be >= 0");
  if (noise_std == 0) return measurement.value;
  std::normal_distribution<double> noise(0.0, noise_std);
  return std::clamp(measurement.value + noise(rng), 0.0, 1.0);
}

}  // namespace covsim
