#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covsim/cao.hpp"
#include "covsim/constraints.hpp"
#include "covsim/cvt.hpp"
#include "covsim/heightfield.hpp"
#include "covsim/visibility.hpp"

namespace covsim {

enum class InitMode { Corner, Random, Cvt };

std::string to_string(InitMode mode);
InitMode init_mode_from_string(const std::string& name);

/// Ground-truth terrain source: a seeded random Gaussian mixture unless an
/// external grid file is given.
struct TerrainSpec {
  TerrainRandomParams random{};
  std::string grid_file;
};

/// Independent seed streams for the stages of one scenario.
struct Seeds {
  std::uint64_t terrain{1};
  std::uint64_t prior{2};
  std::uint64_t cvt{3};  // also seeds the random init mode
  std::uint64_t cao{4};
};

struct ScenarioSpec {
  DomainRect domain{0, 100, 0, 100};
  TerrainSpec terrain;
  int n_agents{5};
  double d_max{25.0};
  int prior_samples{30};
  bool pyramid_prior{false};  // corners + center instead of random prior points
  InitMode init_mode{InitMode::Cvt};
  CvtParams cvt;
  CaoParams cao;
  ConstraintSpec constraints;  // its domain member is overridden by `domain`
  double grid_resolution{2.0};
  Seeds seeds;

  void validate() const;
  /// Content hash; names per-run output files.
  std::uint64_t hash() const;
};

struct RunResult {
  double initial_coverage{0.0};
  double max_coverage{0.0};
  int best_iteration{0};
  double wall_time_s{0.0};
  RunTrace trace;
};

/// Builds the ground-truth terrain for a scenario.
HeightField build_truth_terrain(const ScenarioSpec& spec);

/// Initial team configuration for a mode. Corner packs agents on a
/// d_sep-spaced grid in the domain's minimum corner; Random draws (x, y)
/// uniformly; Cvt tessellates the approximating surface. All modes end at
/// feasible positions against the true terrain (repair handles generators
/// that land under it).
TeamConfig make_initialization(InitMode mode, const ScenarioSpec& spec, const HeightField& truth,
                               const HeightField& approx, RngEngine& rng);

/// Full pipeline for one scenario: terrain, prior samples, approximating
/// surface, initialization, optimization. Coverage entries in the result are
/// noiseless oracle values; the optimizer itself only sees the noisy ones.
RunResult run_scenario(const ScenarioSpec& spec);

struct ModeStats {
  int n_agents{0};
  InitMode mode{InitMode::Cvt};
  int count{0};
  double initial_mean{0}, initial_std{0};
  double max_mean{0}, max_std{0};
};

struct BatchSummary {
  std::vector<ModeStats> rows;  // sorted by (n_agents, mode)
  int scenario_count{0};

  const ModeStats* find(int n_agents, InitMode mode) const;
};

struct BatchRunRecord {
  ScenarioSpec spec;
  bool ok{false};
  std::string error;
  RunResult result;
};

struct BatchOptions {
  int parallelism{1};
  std::string out_dir;       // empty: no files written
  bool write_traces{true};
  bool progress{false};      // one line per finished run on stderr
};

struct BatchResult {
  BatchSummary summary;
  std::vector<BatchRunRecord> records;
};

/// Runs every scenario (worker pool across scenarios), writes per-run trace
/// CSVs and a summary CSV when an output directory is set, and aggregates
/// per (team size, mode) statistics. Individual failures are recorded and
/// the batch continues.
BatchResult run_batch(const std::vector<ScenarioSpec>& specs, const BatchOptions& options);

/// Paired scenario grid: for scenario index s all modes and team sizes share
/// the same derived terrain / prior / init / optimizer seed streams, so mode
/// comparisons see identical environments.
std::vector<ScenarioSpec> make_paired_batch(const ScenarioSpec& base,
                                            const std::vector<int>& team_sizes,
                                            const std::vector<InitMode>& modes, int n_scenarios);

struct MinimalPriorReport {
  BatchSummary pyramid;
  BatchSummary full_prior;
};

/// Same paired batch run twice with the five-point pyramid prior and with
/// the base prior sample count, for the prior-information comparison.
MinimalPriorReport minimal_prior_study(const ScenarioSpec& base, int n_scenarios,
                                       const BatchOptions& options);

/// Population mean/std over the run results of one (size, mode) group.
BatchSummary summarize(const std::vector<BatchRunRecord>& records);

}  // namespace covsim
