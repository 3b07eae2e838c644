#include "covsim/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "covsim/errors.hpp"

namespace covsim {

bool is_feasible(const TeamConfig& team, const HeightField& field, const ConstraintSpec& spec) {
  spec.validate();
  for (Eigen::Index i = 0; i < team.cols(); ++i) {
    const Vec3 p = team.col(i);
    if (!spec.domain.contains(p.x(), p.y())) return false;
    // Compare against the computed band bounds rather than the altitude
    // difference: z values built as ground + h_min then pass bitwise.
    const double ground = field(p.x(), p.y());
    if (p.z() < ground + spec.h_min || p.z() > ground + spec.h_max) return false;
  }
  for (Eigen::Index i = 0; i < team.cols(); ++i)
    for (Eigen::Index j = i + 1; j < team.cols(); ++j)
      if ((team.col(i) - team.col(j)).norm() < spec.d_sep) return false;
  return true;
}

TeamConfig repair(const TeamConfig& team, const HeightField& field, const ConstraintSpec& spec) {
  spec.validate();
  if (is_feasible(team, field, spec)) return team;

  TeamConfig out = team;
  const auto clamp_agent = [&](Eigen::Index i) {
    const Vec2 xy = spec.domain.clamp(out.col(i).head<2>());
    out(0, i) = xy.x();
    out(1, i) = xy.y();
    const double ground = field(xy.x(), xy.y());
    out(2, i) = std::clamp(out(2, i), ground + spec.h_min, ground + spec.h_max);
  };
  for (Eigen::Index i = 0; i < out.cols(); ++i) clamp_agent(i);

  constexpr int kMaxPasses = 100;
  constexpr double kSlack = 1e-9;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    bool moved = false;
    for (Eigen::Index i = 0; i < out.cols(); ++i) {
      for (Eigen::Index j = i + 1; j < out.cols(); ++j) {
        const double dist = (out.col(i) - out.col(j)).norm();
        if (dist >= spec.d_sep) continue;
        const double dz = out(2, i) - out(2, j);
        // Horizontal distance needed so the 3D separation reaches d_sep.
        const double need =
            std::sqrt(std::max(spec.d_sep * spec.d_sep - dz * dz, 0.0)) + kSlack;
        Vec2 dir = (out.col(j).head<2>() - out.col(i).head<2>()).eval();
        const double h = dir.norm();
        if (h > 1e-12) {
          dir /= h;
        } else {
          // Coincident columns: deterministic direction from the pair index.
          const double angle = 2.0 * std::numbers::pi *
                               std::fmod(0.6180339887498949 * double(i * out.cols() + j + 1), 1.0);
          dir = Vec2(std::cos(angle), std::sin(angle));
        }
        const double push = 0.5 * (need - h);
        if (push <= 0) continue;
        out.col(i).head<2>() -= push * dir;
        out.col(j).head<2>() += push * dir;
        clamp_agent(i);
        clamp_agent(j);
        moved = true;
      }
    }
    if (is_feasible(out, field, spec)) return out;
    if (!moved) break;
  }
  throw RepairFailure("repair: could not reach pairwise separation d_sep");
}

}  // namespace covsim
