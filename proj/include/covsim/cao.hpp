#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

#include "covsim/geometry.hpp"
#include "covsim/rng.hpp"

namespace covsim {

/// Affine per-variable normalization applied before monomial evaluation.
/// Keeps the regression design matrix well conditioned when positions span
/// hundreds of meters.
struct StateScaling {
  Eigen::VectorXd center;
  Eigen::VectorXd half;

  static StateScaling identity(int dim);
  static StateScaling for_domain(int n_agents, const DomainRect& domain, double z_min,
                                 double z_max);

  Eigen::VectorXd normalize(const Eigen::VectorXd& state) const {
    return (state - center).cwiseQuotient(half);
  }
};

/// Random polynomial regressor bank: monomials of degree at most 3 over the
/// flattened team state, drawn once per run. The constant term is always
/// present and terms are distinct.
class RegressorBank {
 public:
  struct Term {
    std::array<std::int16_t, 3> vars{{-1, -1, -1}};  // sorted variable indices
    std::int8_t degree{0};
  };

  static RegressorBank draw(int state_dim, int count, std::uint64_t seed,
                            StateScaling scaling);

  /// Count of distinct monomials of degree <= 3 over `state_dim` variables.
  static long max_distinct_terms(int state_dim);

  int size() const { return int(terms_.size()); }
  int state_dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }
  const StateScaling& scaling() const { return scaling_; }

  void evaluate(const Eigen::VectorXd& state, Eigen::VectorXd& phi) const;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& state) const;

 private:
  int dim_{0};
  std::vector<Term> terms_;
  StateScaling scaling_;
};

struct CaoParams {
  int M{0};      // candidates per iteration; 0 selects min(60 * N, 200)
  int L{0};      // regressor count; 0 selects min(2 * 3N + 15, distinct, 200)
  int T_h{-1};   // extra history beyond L; -1 selects 2 * L
  double a0{3.0};     // initial perturbation magnitude, meters
  double gamma{0.6};  // decay exponent; (0.5, 1] keeps the gain admissible
  int max_iters{500};
  double noise_std{0.005};

  /// Gain sequence a0 / (k+1)^gamma: decays to zero, diverging sum,
  /// converging sum of squares.
  double alpha(int k) const { return a0 / std::pow(double(k + 1), gamma); }

  void validate() const;
  /// Copy with the auto (zero / negative) fields resolved for a team size.
  CaoParams resolved(int n_agents) const;
};

int default_candidate_count(int n_agents);
int default_regressor_count(int state_dim);

struct Measurement {
  double noisy{0.0};
  double noiseless{0.0};
  bool has_noiseless{false};
};

using ObjectiveFn = std::function<Measurement(const TeamConfig&)>;
using FeasibilityFn = std::function<bool(const TeamConfig&)>;

struct HistoryEntry {
  Eigen::VectorXd state;  // flattened configuration
  Eigen::VectorXd phi;    // cached regressor values at `state`
  double value;           // noisy measurement
};

struct CaoState {
  int k{0};
  TeamConfig current;
  std::deque<HistoryEntry> history;  // capacity L + T_h
  Eigen::VectorXd theta;
  TeamConfig best_config;
  double best_value{-std::numeric_limits<double>::infinity()};
};

/// Windowed least-squares fit of the surrogate parameters; rank-deficient
/// systems get the minimum-norm solution.
Eigen::VectorXd fit_surrogate(const std::deque<HistoryEntry>& history, const RegressorBank& bank);
Eigen::VectorXd fit_surrogate(const std::vector<Eigen::VectorXd>& states,
                              const Eigen::VectorXd& values, const RegressorBank& bank);

/// M copies of `current` with every agent displaced by alpha * zeta, zeta a
/// standard-normal 3-vector drawn independently per agent and candidate.
std::vector<TeamConfig> propose_candidates(const TeamConfig& current, double alpha, int M,
                                           RngEngine& rng);

/// One optimizer iteration: refit the surrogate, propose candidates, drop the
/// infeasible ones, move to the surrogate argmax (hold position when none
/// survive), then measure and record the new configuration. Returns that
/// measurement.
Measurement cao_step(CaoState& state, const ObjectiveFn& objective,
                     const FeasibilityFn& feasible, const CaoParams& params,
                     const RegressorBank& bank, RngEngine& rng);

struct TraceEntry {
  TeamConfig config;
  double coverage;  // noiseless objective when available, else NaN
  double noisy;
};

struct RunTrace {
  std::vector<TraceEntry> entries;
  TeamConfig best_config;
  double best_value{0.0};

  double max_coverage() const;
  int best_iteration() const;
};

/// Full optimization run: measures the initial configuration, then applies
/// cao_step params.max_iters times. The initial configuration must be
/// feasible. Trace has max_iters + 1 entries.
RunTrace cao_run(const TeamConfig& initial, const ObjectiveFn& objective,
                 const FeasibilityFn& feasible, const CaoParams& params,
                 const RegressorBank& bank, RngEngine& rng);

}  // namespace covsim
