#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "covsim/experiment.hpp"
#include "covsim/io.hpp"
#include "covsim/surface.hpp"

using namespace covsim;

namespace {

ScenarioSpec quick_spec() {
  ScenarioSpec spec;
  spec.n_agents = 4;
  spec.cao.max_iters = 15;
  return spec;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("spec validation") {
  ScenarioSpec spec = quick_spec();
  CHECK_NOTHROW(spec.validate());
  spec.n_agents = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = quick_spec();
  spec.prior_samples = 2;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.pyramid_prior = true;  // the five-point prior ignores prior_samples
  CHECK_NOTHROW(spec.validate());
  spec = quick_spec();
  spec.d_max = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("initialization modes") {
  ScenarioSpec spec = quick_spec();
  const HeightField truth = build_truth_terrain(spec);
  RngEngine prior_rng = make_rng(spec.seeds.prior);
  const HeightField approx = build_piecewise_linear(
      sample_surface_uniform(truth, spec.prior_samples, prior_rng), spec.domain);
  ConstraintSpec cons = spec.constraints;
  cons.domain = spec.domain;

  SUBCASE("corner packs agents into a 2*d_sep square") {
    RngEngine rng = make_rng(1);
    const TeamConfig team = make_initialization(InitMode::Corner, spec, truth, approx, rng);
    for (int i = 0; i < 4; ++i) {
      CHECK(team(0, i) - spec.domain.x_min <= 2 * cons.d_sep);
      CHECK(team(1, i) - spec.domain.y_min <= 2 * cons.d_sep);
    }
    CHECK(is_feasible(team, truth, cons));
  }

  SUBCASE("random mode reproduces with a fixed seed") {
    RngEngine a = make_rng(7), b = make_rng(7);
    const TeamConfig ta = make_initialization(InitMode::Random, spec, truth, approx, a);
    const TeamConfig tb = make_initialization(InitMode::Random, spec, truth, approx, b);
    CHECK((ta - tb).norm() == 0.0);
    CHECK(is_feasible(ta, truth, cons));
  }

  SUBCASE("tessellation mode with exact knowledge of flat ground lands near the 2x2 pattern") {
    const HeightField flat = flat_field(spec.domain, 0.0);
    RngEngine sample_rng = make_rng(3);
    const HeightField flat_approx = build_piecewise_linear(
        sample_surface_uniform(flat, 30, sample_rng), spec.domain);  // exact: surface is planar
    RngEngine rng = make_rng(4);
    const TeamConfig team = make_initialization(InitMode::Cvt, spec, flat, flat_approx, rng);
    CHECK(is_feasible(team, flat, cons));
    // Up to permutation, near the quarter centers, lifted to exactly h_min.
    for (int i = 0; i < 4; ++i) {
      CHECK(team(2, i) == cons.h_min);
      double best = 1e300;
      for (double cx : {25.0, 75.0})
        for (double cy : {25.0, 75.0})
          best = std::min(best, (team.col(i).head<2>() - Vec2(cx, cy)).norm());
      CHECK(best < 10.0);
    }
  }
}

TEST_CASE("run_scenario") {
  SUBCASE("everything visible when the range beats the domain diagonal") {
    ScenarioSpec spec = quick_spec();
    spec.n_agents = 1;
    spec.terrain.random.n_components = 0;  // flat ground
    spec.d_max = 200.0;
    spec.init_mode = InitMode::Corner;
    spec.cao.max_iters = 0;
    const RunResult r = run_scenario(spec);
    CHECK(r.initial_coverage == 1.0);
    CHECK(r.max_coverage == 1.0);
  }

  SUBCASE("reported values are recomputable from the trace") {
    ScenarioSpec spec = quick_spec();
    spec.init_mode = InitMode::Random;
    const RunResult r = run_scenario(spec);
    CHECK(int(r.trace.entries.size()) == spec.cao.max_iters + 1);

    const HeightField truth = build_truth_terrain(spec);
    const SurfaceGrid grid = SurfaceGrid::build(truth, spec.grid_resolution);
    const double initial =
        coverage(truth, grid, r.trace.entries.front().config, SensorModel{spec.d_max}).value;
    CHECK(r.initial_coverage == initial);

    double best = 0;
    for (const auto& e : r.trace.entries) best = std::max(best, e.coverage);
    CHECK(r.max_coverage == best);
    CHECK(r.trace.entries[size_t(r.best_iteration)].coverage == best);
    CHECK(r.initial_coverage <= r.max_coverage);
    CHECK(r.max_coverage <= 1.0);
  }
}

TEST_CASE("paired batches share seeds across modes and sizes") {
  const auto specs = make_paired_batch(quick_spec(), {4, 6},
                                       {InitMode::Corner, InitMode::Random, InitMode::Cvt}, 3);
  CHECK(specs.size() == 2 * 3 * 3);
  for (int s = 0; s < 3; ++s) {
    const std::size_t base = std::size_t(s) * 6;
    for (std::size_t i = base + 1; i < base + 6; ++i) {
      CHECK(specs[i].seeds.terrain == specs[base].seeds.terrain);
      CHECK(specs[i].seeds.prior == specs[base].seeds.prior);
      CHECK(specs[i].seeds.cvt == specs[base].seeds.cvt);
      CHECK(specs[i].seeds.cao == specs[base].seeds.cao);
    }
  }
  CHECK(specs[0].seeds.terrain != specs[6].seeds.terrain);
  CHECK(specs[0].hash() != specs[1].hash());
}

TEST_CASE("batch execution") {
  namespace fs = std::filesystem;

  SUBCASE("a single-run batch reports that run with zero spread") {
    ScenarioSpec spec = quick_spec();
    spec.init_mode = InitMode::Random;
    const BatchResult batch = run_batch({spec}, BatchOptions{});
    const RunResult solo = run_scenario(spec);
    REQUIRE(batch.summary.rows.size() == 1);
    const ModeStats& row = batch.summary.rows[0];
    CHECK(row.count == 1);
    CHECK(row.initial_mean == solo.initial_coverage);
    CHECK(row.max_mean == solo.max_coverage);
    CHECK(row.initial_std == 0.0);
    CHECK(row.max_std == 0.0);
  }

  SUBCASE("failed runs are recorded and the batch continues") {
    ScenarioSpec good = quick_spec();
    ScenarioSpec bad = quick_spec();
    bad.terrain.grid_file = "/nonexistent/terrain.grid";
    const BatchResult batch = run_batch({bad, good}, BatchOptions{});
    CHECK_FALSE(batch.records[0].ok);
    CHECK(!batch.records[0].error.empty());
    CHECK(batch.records[1].ok);
    REQUIRE(batch.summary.rows.size() == 1);
    CHECK(batch.summary.rows[0].count == 1);
  }

  SUBCASE("identical batches write byte-identical files") {
    const fs::path dir = fs::temp_directory_path() / "covsim_batch_det";
    fs::remove_all(dir);
    const auto specs =
        make_paired_batch(quick_spec(), {4}, {InitMode::Random, InitMode::Cvt}, 2);
    BatchOptions opt;
    opt.out_dir = (dir / "a").string();
    run_batch(specs, opt);
    opt.out_dir = (dir / "b").string();
    opt.parallelism = 2;  // scheduling must not leak into the outputs
    run_batch(specs, opt);
    CHECK(slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv"));
    CHECK(slurp(dir / "a" / "runs.csv") == slurp(dir / "b" / "runs.csv"));
    const std::string hash = [&] {
      for (const auto& e : fs::directory_iterator(dir / "a" / "runs"))
        return e.path().filename().string();
      return std::string();
    }();
    REQUIRE(!hash.empty());
    CHECK(slurp(dir / "a" / "runs" / hash) == slurp(dir / "b" / "runs" / hash));
    fs::remove_all(dir);
  }
}

TEST_CASE("tessellation-initialized traces dominate corner-initialized ones") {
  ScenarioSpec base;
  base.n_agents = 6;
  base.cao.max_iters = 120;
  const int S = 8;
  const auto final_coverages = [&](InitMode mode) {
    base.init_mode = mode;
    std::vector<double> out;
    for (const auto& s : make_paired_batch(base, {6}, {mode}, S))
      out.push_back(run_scenario(s).trace.entries.back().coverage);
    return out;
  };
  const auto corner = final_coverages(InitMode::Corner);
  const auto cvt = final_coverages(InitMode::Cvt);
  int dominated = 0;
  for (int s = 0; s < S; ++s)
    if (cvt[size_t(s)] >= corner[size_t(s)]) ++dominated;
  CHECK(dominated >= 6);  // same environments, final-iteration comparison
}

TEST_CASE("minimal prior study produces paired summaries") {
  ScenarioSpec base = quick_spec();
  base.n_agents = 5;
  base.cao.max_iters = 10;
  const MinimalPriorReport report = minimal_prior_study(base, 2, BatchOptions{});
  REQUIRE(report.pyramid.rows.size() == 1);
  REQUIRE(report.full_prior.rows.size() == 1);
  CHECK(report.pyramid.rows[0].count == 2);
  CHECK(report.full_prior.rows[0].count == 2);
  CHECK(report.pyramid.rows[0].initial_mean >= 0.0);
  CHECK(report.pyramid.rows[0].max_mean <= 1.0);
}
