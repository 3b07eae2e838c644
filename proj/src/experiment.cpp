#include "covsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <thread>

#include "covsim/errors.hpp"
#include "covsim/io.hpp"
#include "covsim/surface.hpp"

namespace covsim {

std::string to_string(InitMode mode) {
  switch (mode) {
    case InitMode::Corner: return "corner";
    case InitMode::Random: return "random";
    case InitMode::Cvt: return "cvt";
  }
  return "?";
}

InitMode init_mode_from_string(const std::string& name) {
  if (name == "corner") return InitMode::Corner;
  if (name == "random") return InitMode::Random;
  if (name == "cvt") return InitMode::Cvt;
  throw ConfigError("unknown init mode '" + name + "' (expected corner|random|cvt)");
}

void ScenarioSpec::validate() const {
  domain.validate();
  if (n_agents < 1) throw std::invalid_argument("ScenarioSpec: n_agents must be >= 1");
  if (!(d_max > 0)) throw std::invalid_argument("ScenarioSpec: d_max must be > 0");
  if (!pyramid_prior && prior_samples < 3)
    throw std::invalid_argument("ScenarioSpec: prior_samples must be >= 3");
  if (!(grid_resolution > 0))
    throw std::invalid_argument("ScenarioSpec: grid_resolution must be > 0");
  cvt.validate();
  {
    ConstraintSpec c = constraints;
    c.domain = domain;
    c.validate();
  }
  cao.resolved(n_agents);  // validates after auto-fill
}

namespace {

void hash_mix(std::uint64_t& h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h = splitmix64(h);
}

std::uint64_t bits(double v) {
  std::uint64_t u;
  static_assert(sizeof(u) == sizeof(v));
  std::memcpy(&u, &v, sizeof(u));
  return u;
}

}  // namespace

std::uint64_t ScenarioSpec::hash() const {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (double v : {domain.x_min, domain.x_max, domain.y_min, domain.y_max, d_max,
                   grid_resolution, terrain.random.sigma, terrain.random.peak_min,
                   terrain.random.peak_max, terrain.random.base, cao.a0, cao.gamma,
                   cao.noise_std, constraints.h_min, constraints.h_max, constraints.d_sep,
                   cvt.alpha1, cvt.alpha2, cvt.beta1, cvt.beta2, cvt.convergence_tol})
    hash_mix(h, bits(v));
  for (std::uint64_t v :
       {std::uint64_t(n_agents), std::uint64_t(prior_samples), std::uint64_t(pyramid_prior),
        std::uint64_t(init_mode), std::uint64_t(terrain.random.n_components),
        std::uint64_t(cao.M), std::uint64_t(cao.L), std::uint64_t(cao.T_h),
        std::uint64_t(cao.max_iters), std::uint64_t(cvt.q), std::uint64_t(cvt.max_iters),
        std::uint64_t(cvt.patience), std::uint64_t(cvt.density), seeds.terrain, seeds.prior,
        seeds.cvt, seeds.cao})
    hash_mix(h, v);
  for (char c : terrain.grid_file) hash_mix(h, std::uint64_t(c));
  return h;
}

HeightField build_truth_terrain(const ScenarioSpec& spec) {
  if (!spec.terrain.grid_file.empty()) {
    HeightField f = load_grid_field(spec.terrain.grid_file);
    const DomainRect& d = f.domain();
    const DomainRect& want = spec.domain;
    if (std::abs(d.x_min - want.x_min) > 1e-9 || std::abs(d.x_max - want.x_max) > 1e-9 ||
        std::abs(d.y_min - want.y_min) > 1e-9 || std::abs(d.y_max - want.y_max) > 1e-9)
      throw ConfigError("terrain grid domain does not match the scenario domain");
    return f;
  }
  return generate_terrain(random_mixture_spec(spec.domain, spec.seeds.terrain, spec.terrain.random));
}

TeamConfig make_initialization(InitMode mode, const ScenarioSpec& spec, const HeightField& truth,
                               const HeightField& approx, RngEngine& rng) {
  ConstraintSpec cons = spec.constraints;
  cons.domain = spec.domain;
  const int n = spec.n_agents;
  TeamConfig team(3, n);

  // Starting exactly on the h_min boundary freezes the optimizer for large
  // teams: a candidate is only accepted when every agent stays in the band,
  // which has probability ~0.5^N at the boundary. One perturbation scale of
  // clearance keeps the start near the ground without that lock-up.
  const double clearance = std::min(cons.h_min + spec.cao.a0, cons.h_max);

  switch (mode) {
    case InitMode::Corner: {
      // Inset one grid step from the walls for the same reason.
      const int cols = std::max(1, int(std::ceil(std::sqrt(double(n)))));
      const double step = std::max(cons.d_sep, 1e-3);
      for (int i = 0; i < n; ++i) {
        const double x = spec.domain.x_min + step * (1 + i % cols);
        const double y = spec.domain.y_min + step * (1 + i / cols);
        team.col(i) = Vec3(x, y, truth(x, y) + clearance);
      }
      break;
    }
    case InitMode::Random: {
      std::uniform_real_distribution<double> ux(spec.domain.x_min, spec.domain.x_max);
      std::uniform_real_distribution<double> uy(spec.domain.y_min, spec.domain.y_max);
      for (int i = 0; i < n; ++i) {
        const double x = ux(rng);
        const double y = uy(rng);
        team.col(i) = Vec3(x, y, truth(x, y) + clearance);
      }
      break;
    }
    case InitMode::Cvt: {
      CvtParams params = spec.cvt;
      const CvtResult res = cvt_run(approx, n, params, rng);
      team = res.config;
      break;
    }
  }
  // Approximation error can leave tessellation points under the real surface;
  // repair lifts them into the admissible band and restores separation.
  return repair(team, truth, cons);
}

RunResult run_scenario(const ScenarioSpec& spec) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const HeightField truth = build_truth_terrain(spec);
  RngEngine prior_rng = make_rng(spec.seeds.prior);
  const SamplePointSet prior = spec.pyramid_prior
                                   ? pyramid_prior(truth)
                                   : sample_surface_uniform(truth, spec.prior_samples, prior_rng);
  const HeightField approx = build_piecewise_linear(prior, spec.domain);

  ConstraintSpec cons = spec.constraints;
  cons.domain = spec.domain;
  RngEngine init_rng = make_rng(spec.seeds.cvt);
  const TeamConfig initial = make_initialization(spec.init_mode, spec, truth, approx, init_rng);

  const SurfaceGrid grid = SurfaceGrid::build(truth, spec.grid_resolution);
  const SensorModel sensor{spec.d_max};
  const CaoParams cao = spec.cao.resolved(spec.n_agents);

  double z_hi = cons.h_max;
  for (const auto& c : grid.cells) z_hi = std::max(z_hi, c.z() + cons.h_max);
  const StateScaling scaling = StateScaling::for_domain(spec.n_agents, spec.domain, 0.0, z_hi);
  const RegressorBank bank =
      RegressorBank::draw(3 * spec.n_agents, cao.L, derive_seed(spec.seeds.cao, 0), scaling);

  RngEngine cand_rng = make_rng(derive_seed(spec.seeds.cao, 1));
  RngEngine noise_rng = make_rng(derive_seed(spec.seeds.cao, 2));
  const ObjectiveFn objective = [&](const TeamConfig& team) {
    CoverageMeasurement m = coverage(truth, grid, team, sensor);
    m.noise_std = cao.noise_std;
    Measurement meas;
    meas.noiseless = m.value;
    meas.has_noiseless = true;
    meas.noisy = noisy_coverage(m, cao.noise_std, noise_rng);
    return meas;
  };
  const FeasibilityFn feasible = [&](const TeamConfig& t) { return is_feasible(t, truth, cons); };

  RunResult out;
  out.trace = cao_run(initial, objective, feasible, cao, bank, cand_rng);
  out.initial_coverage = out.trace.entries.front().coverage;
  out.max_coverage = out.trace.max_coverage();
  out.best_iteration = out.trace.best_iteration();
  out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

const ModeStats* BatchSummary::find(int n_agents, InitMode mode) const {
  for (const auto& r : rows)
    if (r.n_agents == n_agents && r.mode == mode) return &r;
  return nullptr;
}

BatchSummary summarize(const std::vector<BatchRunRecord>& records) {
  struct Acc {
    int count{0};
    double si{0}, si2{0}, sm{0}, sm2{0};
  };
  std::map<std::pair<int, int>, Acc> groups;
  for (const auto& rec : records) {
    if (!rec.ok) continue;
    Acc& a = groups[{rec.spec.n_agents, int(rec.spec.init_mode)}];
    a.count += 1;
    a.si += rec.result.initial_coverage;
    a.si2 += rec.result.initial_coverage * rec.result.initial_coverage;
    a.sm += rec.result.max_coverage;
    a.sm2 += rec.result.max_coverage * rec.result.max_coverage;
  }
  BatchSummary summary;
  summary.scenario_count = int(records.size());
  for (const auto& [key, a] : groups) {
    ModeStats s;
    s.n_agents = key.first;
    s.mode = InitMode(key.second);
    s.count = a.count;
    s.initial_mean = a.si / a.count;
    s.initial_std = std::sqrt(std::max(0.0, a.si2 / a.count - s.initial_mean * s.initial_mean));
    s.max_mean = a.sm / a.count;
    s.max_std = std::sqrt(std::max(0.0, a.sm2 / a.count - s.max_mean * s.max_mean));
    summary.rows.push_back(s);
  }
  return summary;
}

namespace {

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_batch_files(const std::vector<BatchRunRecord>& records, const BatchSummary& summary,
                       const BatchOptions& options) {
  namespace fs = std::filesystem;
  const fs::path out_dir = options.out_dir;
  fs::create_directories(out_dir);

  std::string runs = "index,n_agents,mode,hash,status,initial_coverage,max_coverage,best_iteration\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    runs += std::to_string(i) + "," + std::to_string(rec.spec.n_agents) + "," +
            to_string(rec.spec.init_mode) + "," + hash_hex(rec.spec.hash()) + ",";
    if (rec.ok)
      runs += "ok," + fmt_double(rec.result.initial_coverage) + "," +
              fmt_double(rec.result.max_coverage) + "," + std::to_string(rec.result.best_iteration);
    else
      runs += "error,,,";
    runs += '\n';
  }
  atomic_write_text(out_dir / "runs.csv", runs);

  std::string sum = "n_agents,mode,scenarios,initial_mean,initial_std,max_mean,max_std\n";
  for (const auto& r : summary.rows)
    sum += std::to_string(r.n_agents) + "," + to_string(r.mode) + "," + std::to_string(r.count) +
           "," + fmt_double(r.initial_mean) + "," + fmt_double(r.initial_std) + "," +
           fmt_double(r.max_mean) + "," + fmt_double(r.max_std) + "\n";
  atomic_write_text(out_dir / "summary.csv", sum);
}

}  // namespace

BatchResult run_batch(const std::vector<ScenarioSpec>& specs, const BatchOptions& options) {
  BatchResult result;
  result.records.resize(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) result.records[i].spec = specs[i];

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      BatchRunRecord& rec = result.records[i];
      try {
        rec.result = run_scenario(rec.spec);
        rec.ok = true;
        // One atomic write per finished run; an interrupted batch leaves
        // every already-written trace valid.
        if (!options.out_dir.empty() && options.write_traces)
          save_trace_csv(std::filesystem::path(options.out_dir) / "runs" /
                             (hash_hex(rec.spec.hash()) + ".csv"),
                         rec.result.trace);
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (options.progress)
        std::fprintf(stderr, "[%zu/%zu] n=%d %s %s\n", finished, specs.size(), rec.spec.n_agents,
                     to_string(rec.spec.init_mode).c_str(),
                     rec.ok ? fmt_double(rec.result.max_coverage).c_str() : rec.error.c_str());
    }
  };

  const int threads = std::max(1, options.parallelism);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  result.summary = summarize(result.records);
  if (!options.out_dir.empty()) write_batch_files(result.records, result.summary, options);
  return result;
}

std::vector<ScenarioSpec> make_paired_batch(const ScenarioSpec& base,
                                            const std::vector<int>& team_sizes,
                                            const std::vector<InitMode>& modes, int n_scenarios) {
  if (n_scenarios < 1) throw std::invalid_argument("make_paired_batch: n_scenarios must be >= 1");
  if (team_sizes.empty() || modes.empty())
    throw std::invalid_argument("make_paired_batch: team_sizes and modes must be nonempty");
  std::vector<ScenarioSpec> specs;
  specs.reserve(std::size_t(n_scenarios) * team_sizes.size() * modes.size());
  for (int s = 0; s < n_scenarios; ++s) {
    Seeds seeds;
    seeds.terrain = derive_seed(base.seeds.terrain, std::uint64_t(s));
    seeds.prior = derive_seed(base.seeds.prior, std::uint64_t(s));
    seeds.cvt = derive_seed(base.seeds.cvt, std::uint64_t(s));
    seeds.cao = derive_seed(base.seeds.cao, std::uint64_t(s));
    for (int n : team_sizes)
      for (InitMode mode : modes) {
        ScenarioSpec spec = base;
        spec.n_agents = n;
        spec.init_mode = mode;
        spec.seeds = seeds;
        specs.push_back(std::move(spec));
      }
  }
  return specs;
}

MinimalPriorReport minimal_prior_study(const ScenarioSpec& base, int n_scenarios,
                                       const BatchOptions& options) {
  ScenarioSpec pyramid = base;
  pyramid.pyramid_prior = true;
  ScenarioSpec full = base;
  full.pyramid_prior = false;

  BatchOptions opt = options;
  MinimalPriorReport report;
  if (!options.out_dir.empty()) opt.out_dir = options.out_dir + "/pyramid";
  report.pyramid =
      run_batch(make_paired_batch(pyramid, {base.n_agents}, {base.init_mode}, n_scenarios), opt)
          .summary;
  if (!options.out_dir.empty()) opt.out_dir = options.out_dir + "/full";
  report.full_prior =
      run_batch(make_paired_batch(full, {base.n_agents}, {base.init_mode}, n_scenarios), opt)
          .summary;
  return report;
}

}  // namespace covsim
