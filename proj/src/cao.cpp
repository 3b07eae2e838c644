#include "covsim/cao.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace covsim {

StateScaling StateScaling::identity(int dim) {
  StateScaling s;
  s.center = Eigen::VectorXd::Zero(dim);
  s.half = Eigen::VectorXd::Ones(dim);
  return s;
}

StateScaling StateScaling::for_domain(int n_agents, const DomainRect& domain, double z_min,
                                      double z_max) {
  domain.validate();
  if (n_agents < 1) throw std::invalid_argument("StateScaling: n_agents must be >= 1");
  if (!(z_min < z_max)) throw std::invalid_argument("StateScaling: z_min < z_max required");
  StateScaling s;
  s.center.resize(3 * n_agents);
  s.half.resize(3 * n_agents);
  for (int i = 0; i < n_agents; ++i) {
    s.center[3 * i + 0] = 0.5 * (domain.x_min + domain.x_max);
    s.center[3 * i + 1] = 0.5 * (domain.y_min + domain.y_max);
    s.center[3 * i + 2] = 0.5 * (z_min + z_max);
    s.half[3 * i + 0] = 0.5 * domain.width();
    s.half[3 * i + 1] = 0.5 * domain.height();
    s.half[3 * i + 2] = 0.5 * (z_max - z_min);
  }
  return s;
}

long RegressorBank::max_distinct_terms(int d) {
  // Multisets of size <= 3 from d variables, plus the constant term:
  // C(d,1) + C(d+1,2) + C(d+2,3) + 1 = C(d+3,3).
  const long n = d;
  return (n + 3) * (n + 2) * (n + 1) / 6;
}

RegressorBank RegressorBank::draw(int state_dim, int count, std::uint64_t seed,
                                  StateScaling scaling) {
  if (state_dim < 1) throw std::invalid_argument("RegressorBank: state_dim must be >= 1");
  if (scaling.center.size() != state_dim || scaling.half.size() != state_dim)
    throw std::invalid_argument("RegressorBank: scaling dimension mismatch");
  count = int(std::min<long>(count, max_distinct_terms(state_dim)));
  if (count < 1) throw std::invalid_argument("RegressorBank: count must be >= 1");

  RegressorBank bank;
  bank.dim_ = state_dim;
  bank.scaling_ = std::move(scaling);

  std::set<std::array<std::int16_t, 3>> seen;
  const auto add = [&](std::array<std::int16_t, 3> vars, int degree) {
    if (!seen.insert(vars).second) return false;
    Term t;
    t.vars = vars;
    t.degree = std::int8_t(degree);
    bank.terms_.push_back(t);
    return true;
  };
  add({{-1, -1, -1}}, 0);  // constant term, always first

  RngEngine rng = make_rng(seed);
  std::uniform_int_distribution<int> deg_dist(1, 3);
  std::uniform_int_distribution<int> var_dist(0, state_dim - 1);
  long attempts = 0;
  const long max_attempts = 1000L * count + 10000L;
  while (int(bank.terms_.size()) < count && attempts < max_attempts) {
    ++attempts;
    const int degree = deg_dist(rng);
    std::array<std::int16_t, 3> vars{{-1, -1, -1}};
    for (int j = 0; j < degree; ++j) vars[size_t(j)] = std::int16_t(var_dist(rng));
    std::sort(vars.begin(), vars.begin() + degree);
    add(vars, degree);
  }
  // Nearly exhausted banks (tiny state spaces) are topped up by enumeration.
  for (std::int16_t a = 0; a < state_dim && int(bank.terms_.size()) < count; ++a) {
    add({{a, -1, -1}}, 1);
    for (std::int16_t b = a; b < state_dim && int(bank.terms_.size()) < count; ++b) {
      add({{a, b, -1}}, 2);
      for (std::int16_t c = b; c < state_dim && int(bank.terms_.size()) < count; ++c)
        add({{a, b, c}}, 3);
    }
  }
  return bank;
}

void RegressorBank::evaluate(const Eigen::VectorXd& state, Eigen::VectorXd& phi) const {
  if (state.size() != dim_) throw std::invalid_argument("RegressorBank: state dimension mismatch");
  const Eigen::VectorXd s = scaling_.normalize(state);
  phi.resize(size());
  for (int t = 0; t < size(); ++t) {
    const Term& term = terms_[size_t(t)];
    double v = 1.0;
    for (int j = 0; j < term.degree; ++j) v *= s[term.vars[size_t(j)]];
    phi[t] = v;
  }
}

Eigen::VectorXd RegressorBank::evaluate(const Eigen::VectorXd& state) const {
  Eigen::VectorXd phi;
  evaluate(state, phi);
  return phi;
}

void CaoParams::validate() const {
  if (M < 1) throw std::invalid_argument("CaoParams: M must be >= 1");
  if (L < 1) throw std::invalid_argument("CaoParams: L must be >= 1");
  if (T_h < 0) throw std::invalid_argument("CaoParams: T_h must be >= 0");
  if (!(a0 > 0)) throw std::invalid_argument("CaoParams: a0 must be > 0");
  if (!(gamma > 0.5) || !(gamma <= 1.0))
    throw std::invalid_argument("CaoParams: gamma must lie in (0.5, 1]");
  if (max_iters < 0) throw std::invalid_argument("CaoParams: max_iters must be >= 0");
  if (noise_std < 0) throw std::invalid_argument("CaoParams: noise_std must be >= 0");
}

int default_candidate_count(int n_agents) { return std::min(60 * n_agents, 200); }

int default_regressor_count(int state_dim) {
  return int(std::min<long>({2L * state_dim + 15L, RegressorBank::max_distinct_terms(state_dim),
                             200L}));
}

CaoParams CaoParams::resolved(int n_agents) const {
  if (n_agents < 1) throw std::invalid_argument("CaoParams: n_agents must be >= 1");
  CaoParams p = *this;
  if (p.M <= 0) p.M = default_candidate_count(n_agents);
  if (p.L <= 0) p.L = default_regressor_count(3 * n_agents);
  if (p.T_h < 0) p.T_h = 2 * p.L;
  p.validate();
  return p;
}

Eigen::VectorXd fit_surrogate(const std::deque<HistoryEntry>& history, const RegressorBank& bank) {
  if (history.empty()) throw std::invalid_argument("fit_surrogate: empty history");
  const int m = int(history.size());
  Eigen::MatrixXd design(m, bank.size());
  Eigen::VectorXd rhs(m);
  for (int r = 0; r < m; ++r) {
    design.row(r) = history[size_t(r)].phi.transpose();
    rhs[r] = history[size_t(r)].value;
  }
  return design.completeOrthogonalDecomposition().solve(rhs);
}

Eigen::VectorXd fit_surrogate(const std::vector<Eigen::VectorXd>& states,
                              const Eigen::VectorXd& values, const RegressorBank& bank) {
  if (states.empty() || int(states.size()) != values.size())
    throw std::invalid_argument("fit_surrogate: states/values size mismatch");
  std::deque<HistoryEntry> history;
  for (std::size_t i = 0; i < states.size(); ++i)
    history.push_back({states[i], bank.evaluate(states[i]), values[Eigen::Index(i)]});
  return fit_surrogate(history, bank);
}

std::vector<TeamConfig> propose_candidates(const TeamConfig& current, double alpha, int M,
                                           RngEngine& rng) {
  if (M < 1) throw std::invalid_argument("propose_candidates: M must be >= 1");
  if (alpha < 0) throw std::invalid_argument("propose_candidates: alpha must be >= 0");
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<TeamConfig> candidates;
  candidates.reserve(size_t(M));
  for (int j = 0; j < M; ++j) {
    TeamConfig c = current;
    for (Eigen::Index i = 0; i < c.cols(); ++i)
      for (int axis = 0; axis < 3; ++axis) c(axis, i) += alpha * unit(rng);
    candidates.push_back(std::move(c));
  }
  return candidates;
}

Measurement cao_step(CaoState& state, const ObjectiveFn& objective,
                     const FeasibilityFn& feasible, const CaoParams& params,
                     const RegressorBank& bank, RngEngine& rng) {
  params.validate();
  if (state.history.empty())
    throw std::invalid_argument("cao_step: history must contain the initial measurement");

  state.theta = fit_surrogate(state.history, bank);

  const double alpha = params.alpha(state.k);
  const std::vector<TeamConfig> candidates = propose_candidates(state.current, alpha, params.M, rng);

  int best_j = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd phi;
  for (int j = 0; j < int(candidates.size()); ++j) {
    if (feasible && !feasible(candidates[size_t(j)])) continue;
    bank.evaluate(flatten(candidates[size_t(j)]), phi);
    const double score = state.theta.dot(phi);
    if (score > best_score) {  // ties keep the lowest candidate index
      best_score = score;
      best_j = j;
    }
  }
  // All candidates infeasible: hold position and measure again.
  const TeamConfig& next = best_j >= 0 ? candidates[size_t(best_j)] : state.current;

  const Measurement meas = objective(next);
  HistoryEntry entry{flatten(next), bank.evaluate(flatten(next)), meas.noisy};
  state.history.push_back(std::move(entry));
  const std::size_t capacity = std::size_t(params.L) + std::size_t(params.T_h);
  while (state.history.size() > capacity) state.history.pop_front();

  const double value = meas.has_noiseless ? meas.noiseless : meas.noisy;
  if (value > state.best_value) {
    state.best_value = value;
    state.best_config = next;
  }
  state.current = next;
  state.k += 1;
  return meas;
}

double RunTrace::max_coverage() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& e : entries) best = std::max(best, e.coverage);
  return best;
}

int RunTrace::best_iteration() const {
  int best = 0;
  for (int i = 1; i < int(entries.size()); ++i)
    if (entries[size_t(i)].coverage > entries[size_t(best)].coverage) best = i;
  return best;
}

RunTrace cao_run(const TeamConfig& initial, const ObjectiveFn& objective,
                 const FeasibilityFn& feasible, const CaoParams& params,
                 const RegressorBank& bank, RngEngine& rng) {
  params.validate();
  if (!objective) throw std::invalid_argument("cao_run: objective callback required");
  if (feasible && !feasible(initial))
    throw std::invalid_argument("cao_run: initial configuration is infeasible");

  CaoState state;
  state.k = 0;
  state.current = initial;

  const Measurement first = objective(initial);
  state.history.push_back({flatten(initial), bank.evaluate(flatten(initial)), first.noisy});
  state.best_config = initial;
  state.best_value = first.has_noiseless ? first.noiseless : first.noisy;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  RunTrace trace;
  trace.entries.reserve(std::size_t(params.max_iters) + 1);
  trace.entries.push_back({initial, first.has_noiseless ? first.noiseless : nan, first.noisy});

  for (int it = 0; it < params.max_iters; ++it) {
    const Measurement m = cao_step(state, objective, feasible, params, bank, rng);
    trace.entries.push_back({state.current, m.has_noiseless ? m.noiseless : nan, m.noisy});
  }
  trace.best_config = state.best_config;
  trace.best_value = state.best_value;
  return trace;
}

}  // namespace covsim
