// Acceptance suite: runs the full comparative study and the analytic oracles,
// printing one PASS/FAIL line per criterion. The comparison batch (criterion
// 1) is reused for the initial-coverage, band, prior-information, and
// feasibility checks, so the expensive runs happen once.
//
//   acceptance [--scenarios N] [--parallelism P] [--out DIR] [--sweep]
//
// Exit status is nonzero when any hard criterion fails. The quantitative
// band check reports WARN instead of FAIL on a miss (the terrain generator's
// variance is a free parameter); --sweep then runs a reduced
// terrain-parameter sweep to document the sensitivity.

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "covsim/cao.hpp"
#include "covsim/constraints.hpp"
#include "covsim/cvt.hpp"
#include "covsim/experiment.hpp"
#include "covsim/io.hpp"
#include "covsim/surface.hpp"
#include "covsim/visibility.hpp"
#include "support.hpp"

using namespace covsim;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  std::string name;
  int status;  // 0 pass, 1 fail, 2 warn
  std::string detail;
};

std::vector<Criterion> g_results;

void report(int id, const std::string& name, bool pass, const std::string& detail,
            bool warn_only = false) {
  const int status = pass ? 0 : (warn_only ? 2 : 1);
  g_results.push_back({id, name, status, detail});
  std::printf("criterion %d [%s]: %s — %s\n", id, name.c_str(),
              status == 0 ? "PASS" : (status == 2 ? "WARN" : "FAIL"), detail.c_str());
  std::fflush(stdout);
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

ScenarioSpec acceptance_base() {
  ScenarioSpec base;  // 100x100 m, seven Gaussians, d_max 25, 500 iterations
  base.seeds = {101, 202, 303, 404};
  return base;
}

// ---- criteria 1-3, 9: the paired comparison batch ------------------------

void run_comparison_criteria(int n_scenarios, int parallelism, const std::string& out_dir,
                             BatchResult& batch_out) {
  const std::vector<int> sizes = {5, 8, 12, 20};
  const auto specs =
      make_paired_batch(acceptance_base(), sizes,
                        {InitMode::Corner, InitMode::Random, InitMode::Cvt}, n_scenarios);
  BatchOptions options;
  options.parallelism = parallelism;
  options.out_dir = out_dir;
  options.write_traces = false;
  options.progress = true;
  batch_out = run_batch(specs, options);
  const BatchSummary& summary = batch_out.summary;

  int failed_runs = 0;
  for (const auto& rec : batch_out.records)
    if (!rec.ok) ++failed_runs;

  // 1: mean max ordering cvt >= random >= corner, with a margin at 8 and 12.
  {
    bool ok = failed_runs == 0;
    std::string detail;
    for (int n : sizes) {
      const ModeStats* cvt = summary.find(n, InitMode::Cvt);
      const ModeStats* rnd = summary.find(n, InitMode::Random);
      const ModeStats* cor = summary.find(n, InitMode::Corner);
      if (!cvt || !rnd || !cor) {
        ok = false;
        break;
      }
      const bool order = cvt->max_mean >= rnd->max_mean && rnd->max_mean >= cor->max_mean;
      const bool margin = (n != 8 && n != 12) || (cvt->max_mean - rnd->max_mean >= 0.02);
      ok = ok && order && margin;
      detail += "n=" + std::to_string(n) + ": " + fmt3(cvt->max_mean) + "/" +
                fmt3(rnd->max_mean) + "/" + fmt3(cor->max_mean) + " ";
    }
    report(1, "max-coverage ordering cvt>=random>=corner", ok, detail);
  }

  // 2: initial-coverage advantage of the tessellation init.
  {
    bool ok = true;
    std::string detail;
    for (int n : {8, 12, 20}) {
      const ModeStats* cvt = summary.find(n, InitMode::Cvt);
      const ModeStats* rnd = summary.find(n, InitMode::Random);
      const double gap = cvt && rnd ? cvt->initial_mean - rnd->initial_mean : -1;
      ok = ok && gap >= 0.10;
      detail += "n=" + std::to_string(n) + ": gap " + fmt3(gap) + " ";
    }
    report(2, "initial coverage cvt - random >= 0.10", ok, detail);
  }

  // 3: loose quantitative bands for the tessellation-initialized maxima.
  {
    const std::map<int, double> reference = {{5, 0.65}, {8, 0.84}, {12, 0.92}, {20, 0.98}};
    bool ok = true;
    std::string detail;
    for (const auto& [n, ref] : reference) {
      const ModeStats* cvt = summary.find(n, InitMode::Cvt);
      const double got = cvt ? cvt->max_mean : -1;
      ok = ok && std::abs(got - ref) <= 0.10;
      detail += "n=" + std::to_string(n) + ": " + fmt3(got) + " (ref " + fmt3(ref) + ") ";
    }
    if (!ok)
      detail += "| band miss: sweep terrain.sigma / terrain.peak_max (see --sweep and README)";
    report(3, "cvt max within ±0.10 of the reference values", ok, detail, /*warn_only=*/true);
  }

  // 9: every configuration in every stored trace is feasible.
  {
    long checked = 0, bad = 0;
    for (const auto& rec : batch_out.records) {
      if (!rec.ok) continue;
      const HeightField truth = build_truth_terrain(rec.spec);
      ConstraintSpec cons = rec.spec.constraints;
      cons.domain = rec.spec.domain;
      for (const auto& e : rec.result.trace.entries) {
        ++checked;
        if (!is_feasible(e.config, truth, cons)) ++bad;
      }
    }
    report(9, "feasibility of all visited configurations", bad == 0 && checked > 0,
           std::to_string(checked) + " configurations checked, " + std::to_string(bad) +
               " infeasible");
  }
}

// ---- criterion 4: minimal five-point prior --------------------------------

void run_minimal_prior_criterion(const BatchResult& comparison, int n_scenarios, int parallelism) {
  ScenarioSpec base = acceptance_base();
  base.n_agents = 12;
  base.init_mode = InitMode::Cvt;
  base.pyramid_prior = true;

  BatchOptions options;
  options.parallelism = parallelism;
  const BatchResult pyramid =
      run_batch(make_paired_batch(base, {12}, {InitMode::Cvt}, n_scenarios), options);

  // The 30-point arm is the N=12 tessellation group of the comparison batch
  // (same scenario seeds, so the comparison is paired).
  const ModeStats* full = comparison.summary.find(12, InitMode::Cvt);
  const ModeStats* pyr = pyramid.summary.find(12, InitMode::Cvt);
  bool ok = full && pyr && pyr->count == full->count;
  double init_gap = 0, max_gap = 0;
  if (ok) {
    init_gap = full->initial_mean - pyr->initial_mean;
    max_gap = std::abs(full->max_mean - pyr->max_mean);
    ok = init_gap > 0 && max_gap <= 0.04;
  }
  report(4, "five-point pyramid prior",
         ok,
         "initial " + fmt3(pyr ? pyr->initial_mean : -1) + " vs " +
             fmt3(full ? full->initial_mean : -1) + " (gap " + fmt3(init_gap) +
             " > 0), max gap " + fmt3(max_gap) + " <= 0.04");
}

// ---- criterion 5: flat-terrain analytic oracle -----------------------------

void run_flat_disk_criterion() {
  const DomainRect domain{0, 100, 0, 100};
  const HeightField flat = flat_field(domain, 0.0);
  const SurfaceGrid grid = SurfaceGrid::build(flat, 2.0);
  const struct {
    double h, d;
  } cases[] = {{3, 25}, {13.5, 25}, {7, 20}, {7, 18}, {8.5, 15}};

  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    TeamConfig team(3, 1);
    team.col(0) = Vec3(50, 50, c.h);
    const double got = coverage(flat, grid, team, SensorModel{c.d}).value;
    const double want = std::numbers::pi * (c.d * c.d - c.h * c.h) / domain.area();
    const double tol = 2.0 * grid.cell_area / domain.area();
    ok = ok && std::abs(got - want) <= tol;
    detail += "(h=" + fmt3(c.h) + ",d=" + fmt3(c.d) + "): err " + fmt3(std::abs(got - want)) + " ";
  }
  report(5, "flat-terrain analytic visible disk", ok, detail + "tol 0.0008");
}

// ---- criterion 6: tessellation oracle equivalence --------------------------

void run_cvt_oracle_criterion() {
  const DomainRect unit{0, 1, 0, 1};
  const HeightField flat = flat_field(unit, 0.0);
  CvtParams params;
  params.alpha1 = 0.9;
  params.alpha2 = 0.1;
  params.beta1 = 0.1;
  params.beta2 = 0.9;

  bool ok = true;
  std::string detail;
  for (int n : {1, 4}) {
    params.q = n == 1 ? 100 : 200;
    params.max_iters = n == 1 ? 500 : 1500;
    RngEngine rng = make_rng(12);
    const CvtResult res = cvt_run(flat, n, params, rng);
    RngEngine init_rng = make_rng(12);
    const Eigen::Matrix3Xd oracle =
        testing::lloyd_flat(cvt_init(flat, n, init_rng).generators, unit, 200, 200);
    const double dist = testing::set_distance(res.config, oracle);
    ok = ok && dist < 0.05;
    detail += "n=" + std::to_string(n) + ": lloyd distance " + fmt3(dist) + " ";
  }

  int improved = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    params.q = 20;
    params.max_iters = 200;
    RngEngine rng = make_rng(600 + seed);
    const CvtState init = cvt_init(flat, 4, rng);
    RngEngine run_rng = make_rng(600 + seed);
    const CvtResult res = cvt_run(flat, 4, params, run_rng);
    RngEngine ea = make_rng(9000 + seed), eb = make_rng(9000 + seed);
    if (cvt_energy(res.config, flat, 2000, ea) <= cvt_energy(init.generators, flat, 2000, eb))
      ++improved;
  }
  ok = ok && improved >= 38;
  report(6, "tessellation matches the Lloyd oracle", ok,
         detail + "(tol 0.05), energy improved in " + std::to_string(improved) + "/40 runs");
}

// ---- criterion 7: optimizer on the analytic testbed ------------------------

void run_cao_analytic_criterion() {
  const DomainRect box{0, 100, 0, 100};
  const RegressorBank bank =
      RegressorBank::draw(3, 20, 41, StateScaling::for_domain(1, box, 0.0, 100.0));
  CaoParams params;
  params.M = 30;
  params.L = bank.size();
  params.T_h = 2 * bank.size();
  params.max_iters = 500;

  const Vec3 target(60, 40, 20);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto noise_rng = std::make_shared<RngEngine>(make_rng(200 + seed));
    const ObjectiveFn objective = [noise_rng, target](const TeamConfig& t) {
      std::normal_distribution<double> noise(0.0, 0.005);
      Measurement m;
      m.noiseless = -(t.col(0) - target).squaredNorm();
      m.noisy = m.noiseless + noise(*noise_rng);
      m.has_noiseless = true;
      return m;
    };
    TeamConfig init(3, 1);
    init.col(0) = Vec3(20, 20, 10);
    RngEngine rng = make_rng(100 + seed);
    const RunTrace trace = cao_run(init, objective, nullptr, params, bank, rng);
    if ((trace.entries.back().config.col(0) - target).norm() < 1.0) ++hits;
  }

  // Exact recovery of an objective inside the regressor span, zero noise.
  double worst = 0;
  {
    RngEngine rng = make_rng(22);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::normal_distribution<double> g(0.0, 1.0);
    const RegressorBank wide =
        RegressorBank::draw(6, 25, 21, StateScaling::for_domain(2, box, 0.0, 100.0));
    Eigen::VectorXd truth(wide.size());
    for (int i = 0; i < truth.size(); ++i) truth[i] = g(rng);
    std::vector<Eigen::VectorXd> states;
    Eigen::VectorXd values(60);
    for (int i = 0; i < 60; ++i) {
      Eigen::VectorXd s(6);
      for (int k = 0; k < 6; ++k) s[k] = u(rng);
      states.push_back(s);
      values[i] = truth.dot(wide.evaluate(s));
    }
    const Eigen::VectorXd theta = fit_surrogate(states, values, wide);
    for (int i = 0; i < 10; ++i) {
      Eigen::VectorXd s(6);
      for (int k = 0; k < 6; ++k) s[k] = u(rng);
      worst = std::max(worst, std::abs(theta.dot(wide.evaluate(s)) - truth.dot(wide.evaluate(s))));
    }
  }

  const bool ok = hits >= 18 && worst < 1e-6;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%d/20 seeds within 1 m; held-out surrogate error %.2e", hits,
                worst);
  report(7, "optimizer convergence on the quadratic testbed", ok, buf);
}

// ---- criterion 8: determinism ----------------------------------------------

void run_determinism_criterion(const std::string& out_dir) {
  ScenarioSpec spec = acceptance_base();
  spec.n_agents = 8;
  spec.init_mode = InitMode::Cvt;
  spec.seeds = {7101, 7202, 7303, 7404};

  const fs::path dir = fs::path(out_dir) / "determinism";
  const RunResult a = run_scenario(spec);
  save_trace_csv(dir / "a.csv", a.trace);
  const RunResult b = run_scenario(spec);
  save_trace_csv(dir / "b.csv", b.trace);

  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  const std::string sa = slurp(dir / "a.csv");
  const bool ok = !sa.empty() && sa == slurp(dir / "b.csv");
  report(8, "byte-identical repeated traces", ok,
         ok ? "identical trace files (" + std::to_string(sa.size()) + " bytes)"
            : "trace files differ");
}

// ---- optional terrain-parameter sweep for a band miss ----------------------

void run_band_sweep(int parallelism) {
  std::printf("terrain-parameter sweep (12 agents, tessellation init, 8 scenarios each):\n");
  for (const double sigma : {8.0, 12.0, 16.0}) {
    for (const double peak_max : {20.0, 30.0, 40.0}) {
      ScenarioSpec base = acceptance_base();
      base.n_agents = 12;
      base.init_mode = InitMode::Cvt;
      base.terrain.random.sigma = sigma;
      base.terrain.random.peak_max = peak_max;
      BatchOptions options;
      options.parallelism = parallelism;
      const BatchResult r = run_batch(make_paired_batch(base, {12}, {InitMode::Cvt}, 8), options);
      const ModeStats* row = r.summary.find(12, InitMode::Cvt);
      std::printf("  sigma %4.1f peak_max %4.1f -> initial %.3f max %.3f\n", sigma, peak_max,
                  row ? row->initial_mean : -1, row ? row->max_mean : -1);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  int n_scenarios = 40;
  int parallelism = 1;
  std::string out_dir = "acceptance_out";
  bool sweep = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--scenarios" && i + 1 < argc)
      n_scenarios = std::atoi(argv[++i]);
    else if (arg == "--parallelism" && i + 1 < argc)
      parallelism = std::atoi(argv[++i]);
    else if (arg == "--out" && i + 1 < argc)
      out_dir = argv[++i];
    else if (arg == "--sweep")
      sweep = true;
    else {
      std::fprintf(stderr,
                   "usage: acceptance [--scenarios N] [--parallelism P] [--out DIR] [--sweep]\n");
      return 2;
    }
  }

  std::printf("acceptance suite: %d paired scenarios, parallelism %d\n", n_scenarios, parallelism);
  std::fflush(stdout);

  run_flat_disk_criterion();
  run_cvt_oracle_criterion();
  run_cao_analytic_criterion();
  run_determinism_criterion(out_dir);

  BatchResult comparison;
  run_comparison_criteria(n_scenarios, parallelism, out_dir + "/comparison", comparison);
  run_minimal_prior_criterion(comparison, n_scenarios, parallelism);

  bool band_missed = false;
  int failures = 0;
  for (const auto& c : g_results) {
    if (c.status == 1) ++failures;
    if (c.status == 2) band_missed = true;
  }
  if (band_missed && sweep) run_band_sweep(parallelism);

  std::printf("%zu criteria: %d failed%s\n", g_results.size(), failures,
              band_missed ? " (band check reported WARN)" : "");
  return failures == 0 ? 0 : 1;
}
