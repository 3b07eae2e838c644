#pragma once

#include "covsim/heightfield.hpp"

namespace covsim {

/// Feasible-set parameters: flight-altitude band above the local terrain,
/// minimum pairwise separation, and the domain rectangle.
struct ConstraintSpec {
  double h_min{5.0};   // meters above local terrain
  double h_max{60.0};  // meters above local terrain
  double d_sep{2.0};   // minimum inter-agent distance, meters
  DomainRect domain;

  void validate() const {
    domain.validate();
    if (!(h_min > 0) || !(h_min < h_max))
      throw std::invalid_argument("ConstraintSpec: requires 0 < h_min < h_max");
    if (d_sep < 0) throw std::invalid_argument("ConstraintSpec: d_sep must be >= 0");
  }
};

/// True iff every agent is inside the domain, flies within [h_min, h_max] of
/// the local terrain, and every pair is at least d_sep apart (3D distance).
/// All bounds inclusive.
bool is_feasible(const TeamConfig& team, const HeightField& field, const ConstraintSpec& spec);

/// Moves agents to nearby feasible positions: (x, y) clamped to the domain,
/// altitude clamped vertically into the band, then violating pairs pushed
/// apart horizontally by equal halves. A feasible input is returned
/// unchanged. Throws RepairFailure when separation cannot be reached.
TeamConfig repair(const TeamConfig& team, const HeightField& field, const ConstraintSpec& spec);

}  // namespace covsim
