#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace covsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Team configuration: one column per agent, rows are (x, y, z) in meters.
using TeamConfig = Eigen::Matrix3Xd;

/// Axis-aligned rectangular domain in the (x, y) plane.
struct DomainRect {
  double x_min{0.0};
  double x_max{1.0};
  double y_min{0.0};
  double y_max{1.0};

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  Vec2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }

  Vec2 clamp(const Vec2& p) const {
    return {std::clamp(p.x(), x_min, x_max), std::clamp(p.y(), y_min, y_max)};
  }

  void validate() const {
    if (!(x_min < x_max) || !(y_min < y_max))
      throw std::invalid_argument("DomainRect: requires x_min < x_max and y_min < y_max");
  }
};

/// Flattened agent state [x0,y0,z0, x1,y1,z1, ...] as one vector.
inline Eigen::VectorXd flatten(const TeamConfig& team) {
  return Eigen::Map<const Eigen::VectorXd>(team.data(), team.size());
}

inline TeamConfig unflatten(const Eigen::VectorXd& state) {
  if (state.size() % 3 != 0)
    throw std::invalid_argument("unflatten: state length must be a multiple of 3");
  return Eigen::Map<const TeamConfig>(state.data(), 3, state.size() / 3);
}

}  // namespace covsim
