#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "covsim/cao.hpp"
#include "covsim/heightfield.hpp"
#include "covsim/surface.hpp"
#include "covsim/visibility.hpp"

namespace covsim {

/// Shortest decimal form that round-trips the value exactly; keeps repeated
/// runs byte-identical.
std::string fmt_double(double v);

/// `x y z` triples, one per line; lines starting with '#' are comments.
/// Parse errors mention the offending line number.
std::vector<Vec3> load_xyz(const std::filesystem::path& path);
void save_xyz(const std::filesystem::path& path, const std::vector<Vec3>& points);

/// Grid file with a 4-line header (nx / ny / x_min x_max / y_min y_max)
/// followed by ny rows of nx values. Loads as a bilinear field.
HeightField load_grid_field(const std::filesystem::path& path);

/// CSV z-grid sampled on an nx-by-ny node lattice spanning the domain, with
/// header line `nx,ny,x_min,x_max,y_min,y_max`.
void save_grid_csv(const std::filesystem::path& path, const HeightField& field, int nx, int ny);

/// Visible-cell mask aligned with the grid, same header as save_grid_csv
/// followed by ny rows of nx 0/1 flags.
void save_mask_csv(const std::filesystem::path& path, const SurfaceGrid& grid,
                   const std::vector<std::uint8_t>& mask);

/// Optimization trace with fixed column order
/// `iter,coverage,noisy_coverage,x0,y0,z0,x1,y1,z1,...`.
void save_trace_csv(const std::filesystem::path& path, const RunTrace& trace);
RunTrace load_trace_csv(const std::filesystem::path& path);

/// Writes via a temporary file and rename, so partial output never lands
/// under the final name.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace covsim
