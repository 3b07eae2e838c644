// Command-line front end: single runs, comparison batches, tessellation-only
// runs, standalone coverage evaluation, and trace replay. All randomness is
// seeded from the config file or the --seed-* overrides.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "covsim/config.hpp"
#include "covsim/constraints.hpp"
#include "covsim/cvt.hpp"
#include "covsim/errors.hpp"
#include "covsim/experiment.hpp"
#include "covsim/io.hpp"
#include "covsim/surface.hpp"

namespace fs = std::filesystem;
using namespace covsim;

namespace {

struct SeedOverrides {
  std::optional<std::uint64_t> terrain, prior, cvt, cao;

  void apply(ScenarioSpec& spec) const {
    if (terrain) spec.seeds.terrain = *terrain;
    if (prior) spec.seeds.prior = *prior;
    if (cvt) spec.seeds.cvt = *cvt;
    if (cao) spec.seeds.cao = *cao;
  }
};

void add_seed_options(CLI::App* cmd, SeedOverrides& seeds) {
  cmd->add_option("--seed-terrain", seeds.terrain, "Override the terrain seed");
  cmd->add_option("--seed-prior", seeds.prior, "Override the prior-sample seed");
  cmd->add_option("--seed-cvt", seeds.cvt, "Override the tessellation/init seed");
  cmd->add_option("--seed-cao", seeds.cao, "Override the optimizer seed");
}

void print_summary_table(const BatchSummary& summary, std::ostream& os) {
  os << "n_agents  mode    runs  initial mean/std   max mean/std\n";
  char line[128];
  for (const auto& r : summary.rows) {
    std::snprintf(line, sizeof(line), "%8d  %-6s  %4d   %.3f / %.3f      %.3f / %.3f\n",
                  r.n_agents, to_string(r.mode).c_str(), r.count, r.initial_mean, r.initial_std,
                  r.max_mean, r.max_std);
    os << line;
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const SeedOverrides& seeds, std::optional<double> grid_res, bool quiet) {
  ScenarioSpec spec = load_scenario_config(config_path);
  seeds.apply(spec);
  if (grid_res) spec.grid_resolution = *grid_res;
  spec.validate();

  const RunResult result = run_scenario(spec);
  fs::create_directories(out_dir);
  save_trace_csv(fs::path(out_dir) / "trace.csv", result.trace);

  const HeightField truth = build_truth_terrain(spec);
  const SurfaceGrid grid = SurfaceGrid::build(truth, spec.grid_resolution);
  const CoverageMeasurement final_m =
      coverage(truth, grid, result.trace.entries.back().config, SensorModel{spec.d_max});
  save_mask_csv(fs::path(out_dir) / "mask_final.csv", grid, final_m.visible);

  nlohmann::json summary;
  summary["n_agents"] = spec.n_agents;
  summary["d_max"] = spec.d_max;
  summary["init_mode"] = to_string(spec.init_mode);
  summary["iterations"] = int(result.trace.entries.size()) - 1;
  summary["initial_coverage"] = result.initial_coverage;
  summary["max_coverage"] = result.max_coverage;
  summary["final_coverage"] = result.trace.entries.back().coverage;
  summary["best_iteration"] = result.best_iteration;
  summary["wall_time_s"] = result.wall_time_s;
  summary["trace_file"] = "trace.csv";
  summary["mask_file"] = "mask_final.csv";
  atomic_write_text(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");

  if (!quiet) {
    std::printf("initial %.4f  max %.4f (iteration %d)  final %.4f\n", result.initial_coverage,
                result.max_coverage, result.best_iteration,
                result.trace.entries.back().coverage);
    std::printf("outputs in %s\n", out_dir.c_str());
  }
  return 0;
}

int cmd_batch(const std::string& config_path, const std::string& out_dir, int parallelism,
              const SeedOverrides& seeds, std::optional<double> grid_res, bool quiet) {
  BatchConfig cfg = load_batch_config(config_path);
  seeds.apply(cfg.base);
  if (grid_res) cfg.base.grid_resolution = *grid_res;

  const auto specs = make_paired_batch(cfg.base, cfg.team_sizes, cfg.modes, cfg.n_scenarios);
  BatchOptions options;
  options.parallelism = parallelism;
  options.out_dir = out_dir;
  options.progress = !quiet;
  const BatchResult result = run_batch(specs, options);

  int failures = 0;
  for (const auto& rec : result.records)
    if (!rec.ok) {
      ++failures;
      std::fprintf(stderr, "run failed (n=%d %s): %s\n", rec.spec.n_agents,
                   to_string(rec.spec.init_mode).c_str(), rec.error.c_str());
    }
  print_summary_table(result.summary, std::cout);
  if (!quiet) std::printf("outputs in %s\n", out_dir.c_str());
  return failures == 0 ? 0 : 1;
}

int cmd_cvt_only(const std::string& config_path, const std::string& out_dir,
                 const SeedOverrides& seeds, bool write_trace, bool quiet) {
  ScenarioSpec spec = load_scenario_config(config_path);
  seeds.apply(spec);

  const HeightField truth = build_truth_terrain(spec);
  RngEngine prior_rng = make_rng(spec.seeds.prior);
  const SamplePointSet prior = spec.pyramid_prior
                                   ? pyramid_prior(truth)
                                   : sample_surface_uniform(truth, spec.prior_samples, prior_rng);
  const HeightField approx = build_piecewise_linear(prior, spec.domain);

  fs::create_directories(out_dir);
  std::string trace_csv = "iter,generator,x,y,z\n";
  CvtObserver observer;
  if (write_trace)
    observer = [&trace_csv](int iter, const Eigen::Matrix3Xd& gens) {
      for (Eigen::Index i = 0; i < gens.cols(); ++i)
        trace_csv += std::to_string(iter) + "," + std::to_string(i) + "," +
                     fmt_double(gens(0, i)) + "," + fmt_double(gens(1, i)) + "," +
                     fmt_double(gens(2, i)) + "\n";
    };

  RngEngine rng = make_rng(spec.seeds.cvt);
  RngEngine init_probe = make_rng(spec.seeds.cvt);
  const Eigen::Matrix3Xd initial = cvt_init(approx, spec.n_agents, init_probe).generators;
  const CvtResult res = cvt_run(approx, spec.n_agents, spec.cvt, rng, observer);

  std::vector<Vec3> out_pts;
  for (Eigen::Index i = 0; i < res.config.cols(); ++i) out_pts.push_back(res.config.col(i));
  save_xyz(fs::path(out_dir) / "generators.xyz", out_pts);
  if (write_trace) atomic_write_text(fs::path(out_dir) / "cvt_trace.csv", trace_csv);

  RngEngine ea = make_rng(derive_seed(spec.seeds.cvt, 99));
  RngEngine eb = make_rng(derive_seed(spec.seeds.cvt, 99));
  const double e0 = cvt_energy(initial, approx, 4000, ea);
  const double e1 = cvt_energy(res.config, approx, 4000, eb);
  if (!quiet)
    std::printf("iterations %d  converged %s  energy %.3f -> %.3f m^2\n", res.iterations,
                res.converged ? "yes" : "no", e0, e1);
  return 0;
}

int cmd_coverage_eval(const std::string& positions_path, const std::string& config_path,
                      const std::string& mask_out, const std::string& terrain_out,
                      std::optional<double> grid_res, bool quiet) {
  ScenarioSpec spec = load_scenario_config(config_path);
  if (grid_res) spec.grid_resolution = *grid_res;

  const std::vector<Vec3> pts = load_xyz(positions_path);
  if (pts.empty()) throw ConfigError(positions_path + ": no positions in file");
  TeamConfig team(3, Eigen::Index(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) team.col(Eigen::Index(i)) = pts[i];

  const HeightField truth = build_truth_terrain(spec);
  ConstraintSpec cons = spec.constraints;
  cons.domain = spec.domain;
  if (!is_feasible(team, truth, cons))
    std::fprintf(stderr, "warning: positions violate the feasibility constraints; "
                         "evaluating anyway\n");

  const SurfaceGrid grid = SurfaceGrid::build(truth, spec.grid_resolution);
  const CoverageMeasurement m = coverage(truth, grid, team, SensorModel{spec.d_max});
  std::printf("%s\n", fmt_double(m.value).c_str());
  if (!mask_out.empty()) {
    save_mask_csv(mask_out, grid, m.visible);
    if (!quiet) std::fprintf(stderr, "mask written to %s\n", mask_out.c_str());
  }
  if (!terrain_out.empty()) {
    save_grid_csv(terrain_out, truth, grid.nx + 1, grid.ny + 1);
    if (!quiet) std::fprintf(stderr, "terrain grid written to %s\n", terrain_out.c_str());
  }
  return 0;
}

int cmd_replay(const std::string& trace_path, const std::string& config_path,
               std::optional<double> grid_res, double tol, bool quiet) {
  ScenarioSpec spec = load_scenario_config(config_path);
  if (grid_res) spec.grid_resolution = *grid_res;

  const RunTrace trace = load_trace_csv(trace_path);
  const HeightField truth = build_truth_terrain(spec);
  const SurfaceGrid grid = SurfaceGrid::build(truth, spec.grid_resolution);

  int mismatches = 0;
  double max_cov = 0;
  for (std::size_t i = 0; i < trace.entries.size(); ++i) {
    const auto& e = trace.entries[i];
    const double got = coverage(truth, grid, e.config, SensorModel{spec.d_max}).value;
    max_cov = std::max(max_cov, got);
    if (std::abs(got - e.coverage) > tol) {
      ++mismatches;
      if (!quiet)
        std::fprintf(stderr, "iteration %zu: stored %s, recomputed %s\n", i,
                     fmt_double(e.coverage).c_str(), fmt_double(got).c_str());
    }
  }
  std::printf("entries %zu  initial %s  max %s  mismatches %d\n", trace.entries.size(),
              fmt_double(trace.entries.front().coverage).c_str(), fmt_double(max_cov).c_str(),
              mismatches);
  return mismatches == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent visual coverage simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", positions_path, trace_path, mask_out, terrain_out;
  int parallelism = 1;
  std::optional<double> grid_res;
  bool quiet = false;
  bool cvt_trace = false;
  double replay_tol = 1e-9;
  SeedOverrides seeds;

  CLI::App* run = app.add_subcommand("run", "Run one scenario end to end");
  run->add_option("--config", config_path, "Scenario config file")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--grid-res", grid_res, "Override the coverage grid resolution (m)");
  run->add_option("--parallelism", parallelism, "Accepted for symmetry; a single run is serial");
  run->add_flag("--quiet", quiet, "Suppress progress output");
  add_seed_options(run, seeds);

  CLI::App* batch = app.add_subcommand("batch", "Run a paired comparison batch");
  batch->add_option("--config", config_path, "Batch config file")->required();
  batch->add_option("--out", out_dir, "Output directory");
  batch->add_option("--parallelism", parallelism, "Worker threads across scenarios");
  batch->add_option("--grid-res", grid_res, "Override the coverage grid resolution (m)");
  batch->add_flag("--quiet", quiet, "Suppress progress output");
  add_seed_options(batch, seeds);

  CLI::App* cvt = app.add_subcommand("cvt-only",
                                     "Tessellation pre-positioning without the optimizer");
  cvt->add_option("--config", config_path, "Scenario config file")->required();
  cvt->add_option("--out", out_dir, "Output directory");
  cvt->add_flag("--trace", cvt_trace, "Write the per-iteration generator trace");
  cvt->add_flag("--quiet", quiet, "Suppress progress output");
  add_seed_options(cvt, seeds);

  CLI::App* ce = app.add_subcommand("coverage-eval", "Evaluate coverage of a fixed team");
  ce->add_option("--positions", positions_path, "File of `x y z` agent positions")->required();
  ce->add_option("--config", config_path, "Scenario config file (terrain, d_max, grid)")
      ->required();
  ce->add_option("--out", mask_out, "Visible-mask CSV path");
  ce->add_option("--export-terrain", terrain_out, "Write the terrain as a CSV z-grid");
  ce->add_option("--grid-res", grid_res, "Override the coverage grid resolution (m)");
  ce->add_flag("--quiet", quiet, "Suppress notes on stderr");

  CLI::App* replay = app.add_subcommand("replay", "Recompute coverage along a stored trace");
  replay->add_option("--trace", trace_path, "Trace CSV from a previous run")->required();
  replay->add_option("--config", config_path, "Scenario config the trace was produced with")
      ->required();
  replay->add_option("--grid-res", grid_res, "Override the coverage grid resolution (m)");
  replay->add_option("--tol", replay_tol, "Allowed |stored - recomputed| difference");
  replay->add_flag("--quiet", quiet, "Only print the final summary line");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, seeds, grid_res, quiet);
    if (batch->parsed())
      return cmd_batch(config_path, out_dir, parallelism, seeds, grid_res, quiet);
    if (cvt->parsed()) return cmd_cvt_only(config_path, out_dir, seeds, cvt_trace, quiet);
    if (ce->parsed())
      return cmd_coverage_eval(positions_path, config_path, mask_out, terrain_out, grid_res,
                               quiet);
    if (replay->parsed()) return cmd_replay(trace_path, config_path, grid_res, replay_tol, quiet);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
