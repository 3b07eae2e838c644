#pragma once

#include <functional>

#include "covsim/heightfield.hpp"

namespace covsim {

/// Sampling density over the surface used by the tessellation iteration.
/// XyUniform lifts a uniform planar draw onto the surface; SurfaceArea draws
/// proportional to 3D triangle area (piecewise-linear and flat fields only).
enum class SampleDensity { XyUniform, SurfaceArea };

struct CvtParams {
  int q{0};  // samples per iteration; 0 selects 10 * n_generators
  double alpha1{0.5}, alpha2{0.5};
  double beta1{0.5}, beta2{0.5};
  int max_iters{2000};
  double convergence_tol{0.01};  // meters of generator movement
  int patience{50};              // iterations the movement must stay below tol
  SampleDensity density{SampleDensity::XyUniform};

  void validate() const;
  int samples_per_iter(int n_generators) const {
    return q > 0 ? q : 10 * n_generators;
  }
};

struct CvtState {
  Eigen::Matrix3Xd generators;  // one column per generator, on the surface
  Eigen::VectorXi counters;     // per-generator update counts j_i >= 1
  int iteration{0};
};

/// Generators drawn uniformly on the surface, counters set to 1.
CvtState cvt_init(const HeightField& surface, int n_generators, RngEngine& rng);

/// One probabilistic tessellation update: draw q surface samples, assign each
/// to its nearest generator (3D distance, ties to the lowest index), blend
/// each nonempty cluster mean into its generator with weights
/// ((a1*j + b1)*z + (a2*j + b2)*mean) / (j + 1), and project back onto the
/// surface. Generators with no assigned samples keep position and counter.
void cvt_step(CvtState& state, const HeightField& surface, const CvtParams& params,
              RngEngine& rng);

struct CvtResult {
  TeamConfig config;
  CvtState state;
  bool converged{false};
  int iterations{0};
};

/// Per-iteration observer: (iteration, generators).
using CvtObserver = std::function<void(int, const Eigen::Matrix3Xd&)>;

/// Runs cvt_step until the maximum generator displacement stays below
/// convergence_tol for `patience` consecutive iterations, or max_iters is
/// reached. Non-convergence is reported through the flag, not an error.
CvtResult cvt_run(const HeightField& surface, int n_generators, const CvtParams& params,
                  RngEngine& rng, const CvtObserver& observer = nullptr);

/// Monte-Carlo tessellation energy: mean squared distance from uniform
/// surface samples to their nearest generator, in m^2.
double cvt_energy(const Eigen::Matrix3Xd& generators, const HeightField& surface, int n_probe,
                  RngEngine& rng);

}  // namespace covsim
