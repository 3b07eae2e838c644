#pragma once

#include <filesystem>

#include "covsim/experiment.hpp"

namespace covsim {

struct BatchConfig {
  ScenarioSpec base;
  std::vector<int> team_sizes;
  std::vector<InitMode> modes;
  int n_scenarios{1};
};

/// Single-scenario config (JSON, `//` comments allowed). Field names follow
/// the schema in the README; the `seeds` object with all four streams is
/// required. Throws ConfigError naming the offending field.
ScenarioSpec load_scenario_config(const std::filesystem::path& path);

/// Batch config: the scenario schema plus `team_sizes`, `init_modes` and
/// `scenarios`.
BatchConfig load_batch_config(const std::filesystem::path& path);

}  // namespace covsim
