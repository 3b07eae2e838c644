// Shared oracles for the tessellation tests: dense-grid Lloyd iteration on a
// flat rectangle and permutation-tolerant set matching.
#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "covsim/geometry.hpp"

namespace covsim::testing {

inline Eigen::Matrix3Xd lloyd_flat(Eigen::Matrix3Xd gens, const DomainRect& d, int grid_n,
                                   int iters) {
  const int n = int(gens.cols());
  for (int it = 0; it < iters; ++it) {
    Eigen::Matrix3Xd sums = Eigen::Matrix3Xd::Zero(3, n);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < grid_n; ++i)
      for (int j = 0; j < grid_n; ++j) {
        const Vec3 p(d.x_min + d.width() * (i + 0.5) / grid_n,
                     d.y_min + d.height() * (j + 0.5) / grid_n, 0.0);
        int nearest = 0;
        double best = (gens.col(0) - p).squaredNorm();
        for (int g = 1; g < n; ++g) {
          const double dist = (gens.col(g) - p).squaredNorm();
          if (dist < best) {
            best = dist;
            nearest = g;
          }
        }
        sums.col(nearest) += p;
        counts[nearest] += 1;
      }
    for (int g = 0; g < n; ++g)
      if (counts[g] > 0) gens.col(g) = sums.col(g) / counts[g];
  }
  return gens;
}

/// Max generator distance under the best matching (brute force; small n).
inline double set_distance(const Eigen::Matrix3Xd& a, const Eigen::Matrix3Xd& b) {
  const int n = int(a.cols());
  std::vector<int> perm;
  perm.resize(std::size_t(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, (a.col(i) - b.col(perm[std::size_t(i)])).norm());
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace covsim::testing
