#include "covsim/cvt.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "covsim/surface.hpp"

namespace covsim {

void CvtParams::validate() const {
  constexpr double tol = 1e-12;
  if (!(alpha2 > 0) || !(beta2 > 0))
    throw std::invalid_argument("CvtParams: alpha2 and beta2 must be > 0");
  if (std::abs(alpha1 + alpha2 - 1.0) > tol || std::abs(beta1 + beta2 - 1.0) > tol)
    throw std::invalid_argument("CvtParams: alpha1+alpha2 and beta1+beta2 must equal 1");
  if (q < 0) throw std::invalid_argument("CvtParams: q must be >= 0");
  if (max_iters < 0) throw std::invalid_argument("CvtParams: max_iters must be >= 0");
  if (!(convergence_tol > 0)) throw std::invalid_argument("CvtParams: convergence_tol must be > 0");
  if (patience < 1) throw std::invalid_argument("CvtParams: patience must be >= 1");
}

namespace {

// Sampler drawing points proportional to 3D triangle area of a
// piecewise-linear surface: triangle by inverse-CDF over areas, then a
// uniform barycentric point inside it.
class AreaSampler {
 public:
  explicit AreaSampler(const PlfData& data) : data_(&data) {
    cdf_.reserve(data.triangles.size());
    double total = 0.0;
    for (const auto& t : data.triangles) {
      const Vec3 e1 = data.vertices[t[1]] - data.vertices[t[0]];
      const Vec3 e2 = data.vertices[t[2]] - data.vertices[t[0]];
      total += 0.5 * e1.cross(e2).norm();
      cdf_.push_back(total);
    }
  }

  Vec3 draw(RngEngine& rng) const {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double target = u01(rng) * cdf_.back();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), target);
    const auto& t = data_->triangles[size_t(it - cdf_.begin())];
    double a = u01(rng), b = u01(rng);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    return data_->vertices[t[0]] + a * (data_->vertices[t[1]] - data_->vertices[t[0]]) +
           b * (data_->vertices[t[2]] - data_->vertices[t[0]]);
  }

 private:
  const PlfData* data_;
  std::vector<double> cdf_;
};

const PlfData* area_sampling_data(const HeightField& surface, SampleDensity density) {
  if (density != SampleDensity::SurfaceArea) return nullptr;
  if (surface.kind() == FieldKind::Flat) return nullptr;  // planar: xy-uniform is exact
  const PlfData* data = plf_data(surface);
  if (!data)
    throw std::invalid_argument(
        "CvtParams: SurfaceArea density needs a piecewise-linear or flat surface");
  return data;
}

}  // namespace

CvtState cvt_init(const HeightField& surface, int n_generators, RngEngine& rng) {
  if (n_generators < 1) throw std::invalid_argument("cvt_init: n_generators must be >= 1");
  const SamplePointSet pts = sample_surface_uniform(surface, n_generators, rng);
  CvtState state;
  state.generators.resize(3, n_generators);
  for (int i = 0; i < n_generators; ++i) state.generators.col(i) = pts.points[size_t(i)];
  state.counters = Eigen::VectorXi::Ones(n_generators);
  return state;
}

void cvt_step(CvtState& state, const HeightField& surface, const CvtParams& params,
              RngEngine& rng) {
  params.validate();
  const int n = int(state.generators.cols());
  const int q = params.samples_per_iter(n);
  const PlfData* area_data = area_sampling_data(surface, params.density);
  std::optional<AreaSampler> area;
  if (area_data) area.emplace(*area_data);

  Eigen::Matrix3Xd sums = Eigen::Matrix3Xd::Zero(3, n);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(n);
  for (int r = 0; r < q; ++r) {
    const Vec3 y = area ? area->draw(rng) : random_surface_point(surface, rng);
    int nearest = 0;
    double best = (state.generators.col(0) - y).squaredNorm();
    for (int i = 1; i < n; ++i) {
      const double d = (state.generators.col(i) - y).squaredNorm();
      if (d < best) {
        best = d;
        nearest = i;
      }
    }
    sums.col(nearest) += y;
    counts[nearest] += 1;
  }

  for (int i = 0; i < n; ++i) {
    if (counts[i] == 0) continue;
    const Vec3 mean = sums.col(i) / double(counts[i]);
    const double j = double(state.counters[i]);
    const Vec3 blended = ((params.alpha1 * j + params.beta1) * state.generators.col(i) +
                          (params.alpha2 * j + params.beta2) * mean) /
                         (j + 1.0);
    state.generators.col(i) = project_to_surface(surface, blended);
    state.counters[i] += 1;
  }
  state.iteration += 1;
}

CvtResult cvt_run(const HeightField& surface, int n_generators, const CvtParams& params,
                  RngEngine& rng, const CvtObserver& observer) {
  params.validate();
  CvtState state = cvt_init(surface, n_generators, rng);
  if (observer) observer(0, state.generators);

  CvtResult result;
  int quiet_iters = 0;
  bool converged = false;
  int it = 0;
  for (; it < params.max_iters; ++it) {
    const Eigen::Matrix3Xd before = state.generators;
    cvt_step(state, surface, params, rng);
    if (observer) observer(state.iteration, state.generators);
    const double moved = (state.generators - before).colwise().norm().maxCoeff();
    quiet_iters = moved < params.convergence_tol ? quiet_iters + 1 : 0;
    if (quiet_iters >= params.patience) {
      converged = true;
      ++it;
      break;
    }
  }
  result.config = state.generators;
  result.state = std::move(state);
  result.converged = converged;
  result.iterations = it;
  return result;
}

double cvt_energy(const Eigen::Matrix3Xd& generators, const HeightField& surface, int n_probe,
                  RngEngine& rng) {
  if (generators.cols() < 1) throw std::invalid_argument("cvt_energy: need generators");
  if (n_probe < 1) throw std::invalid_argument("cvt_energy: n_probe must be >= 1");
  double sum = 0.0;
  for (int r = 0; r < n_probe; ++r) {
    const Vec3 y = random_surface_point(surface, rng);
    double best = (generators.col(0) - y).squaredNorm();
    for (Eigen::Index i = 1; i < generators.cols(); ++i)
      best = std::min(best, (generators.col(i) - y).squaredNorm());
    sum += best;
  }
  return sum / double(n_probe);
}

}  // namespace covsim
