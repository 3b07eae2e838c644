#include "covsim/config.hpp"

#include <fstream>

#include <json.hpp>

#include "covsim/errors.hpp"

namespace covsim {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  try {
    return json::parse(in, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

[[noreturn]] void missing(const std::string& field) {
  throw ConfigError("config: missing required field '" + field + "'");
}

template <typename T>
T get_or(const json& j, const std::string& key, const std::string& scope, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field '" + (scope.empty() ? key : scope + "." + key) +
                      "' has the wrong type");
  }
}

template <typename T>
T require(const json& j, const std::string& key, const std::string& scope) {
  const std::string name = scope.empty() ? key : scope + "." + key;
  if (!j.contains(key)) missing(name);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field '" + name + "' has the wrong type");
  }
}

ScenarioSpec parse_scenario(const json& j) {
  ScenarioSpec spec;

  if (j.contains("domain")) {
    const json& d = j.at("domain");
    spec.domain.x_min = require<double>(d, "x_min", "domain");
    spec.domain.x_max = require<double>(d, "x_max", "domain");
    spec.domain.y_min = require<double>(d, "y_min", "domain");
    spec.domain.y_max = require<double>(d, "y_max", "domain");
  }

  if (j.contains("terrain")) {
    const json& t = j.at("terrain");
    TerrainRandomParams& r = spec.terrain.random;
    spec.terrain.grid_file = get_or<std::string>(t, "grid_file", "terrain", "");
    r.n_components = get_or<int>(t, "components", "terrain", r.n_components);
    r.sigma = get_or<double>(t, "sigma", "terrain", r.sigma);
    r.peak_min = get_or<double>(t, "peak_min", "terrain", r.peak_min);
    r.peak_max = get_or<double>(t, "peak_max", "terrain", r.peak_max);
    r.base = get_or<double>(t, "base", "terrain", r.base);
  }

  spec.n_agents = get_or<int>(j, "n_agents", "", spec.n_agents);
  spec.d_max = get_or<double>(j, "d_max", "", spec.d_max);
  spec.grid_resolution = get_or<double>(j, "grid_resolution", "", spec.grid_resolution);

  if (j.contains("prior_samples")) {
    const json& p = j.at("prior_samples");
    if (p.is_string()) {
      if (p.get<std::string>() != "pyramid")
        throw ConfigError("config: field 'prior_samples' must be a count or \"pyramid\"");
      spec.pyramid_prior = true;
    } else if (p.is_number_integer()) {
      spec.prior_samples = p.get<int>();
    } else {
      throw ConfigError("config: field 'prior_samples' must be a count or \"pyramid\"");
    }
  }

  if (j.contains("init_mode")) spec.init_mode = init_mode_from_string(require<std::string>(j, "init_mode", ""));

  if (j.contains("constraints")) {
    const json& c = j.at("constraints");
    spec.constraints.h_min = get_or<double>(c, "h_min", "constraints", spec.constraints.h_min);
    spec.constraints.h_max = get_or<double>(c, "h_max", "constraints", spec.constraints.h_max);
    spec.constraints.d_sep = get_or<double>(c, "d_sep", "constraints", spec.constraints.d_sep);
  }

  if (j.contains("cvt")) {
    const json& c = j.at("cvt");
    spec.cvt.q = get_or<int>(c, "q", "cvt", spec.cvt.q);
    spec.cvt.alpha1 = get_or<double>(c, "alpha1", "cvt", spec.cvt.alpha1);
    spec.cvt.alpha2 = get_or<double>(c, "alpha2", "cvt", spec.cvt.alpha2);
    spec.cvt.beta1 = get_or<double>(c, "beta1", "cvt", spec.cvt.beta1);
    spec.cvt.beta2 = get_or<double>(c, "beta2", "cvt", spec.cvt.beta2);
    spec.cvt.max_iters = get_or<int>(c, "max_iters", "cvt", spec.cvt.max_iters);
    spec.cvt.convergence_tol = get_or<double>(c, "convergence_tol", "cvt", spec.cvt.convergence_tol);
    spec.cvt.patience = get_or<int>(c, "patience", "cvt", spec.cvt.patience);
    const std::string density = get_or<std::string>(c, "density", "cvt", "xy-uniform");
    if (density == "xy-uniform")
      spec.cvt.density = SampleDensity::XyUniform;
    else if (density == "surface-area")
      spec.cvt.density = SampleDensity::SurfaceArea;
    else
      throw ConfigError("config: field 'cvt.density' must be xy-uniform or surface-area");
  }

  if (j.contains("cao")) {
    const json& c = j.at("cao");
    spec.cao.M = get_or<int>(c, "M", "cao", spec.cao.M);
    spec.cao.L = get_or<int>(c, "L", "cao", spec.cao.L);
    spec.cao.T_h = get_or<int>(c, "T_h", "cao", spec.cao.T_h);
    spec.cao.a0 = get_or<double>(c, "a0", "cao", spec.cao.a0);
    spec.cao.gamma = get_or<double>(c, "gamma", "cao", spec.cao.gamma);
    spec.cao.max_iters = get_or<int>(c, "max_iters", "cao", spec.cao.max_iters);
  }
  spec.cao.noise_std = get_or<double>(j, "noise_std", "", spec.cao.noise_std);

  if (!j.contains("seeds")) missing("seeds");
  const json& s = j.at("seeds");
  spec.seeds.terrain = require<std::uint64_t>(s, "terrain", "seeds");
  spec.seeds.prior = require<std::uint64_t>(s, "prior", "seeds");
  spec.seeds.cvt = require<std::uint64_t>(s, "cvt", "seeds");
  spec.seeds.cao = require<std::uint64_t>(s, "cao", "seeds");

  return spec;
}

}  // namespace

ScenarioSpec load_scenario_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  ScenarioSpec spec = parse_scenario(j);
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return spec;
}

BatchConfig load_batch_config(const std::filesystem::path& path) {
  const json j = parse_file(path);
  BatchConfig cfg;
  cfg.base = parse_scenario(j);
  cfg.team_sizes = j.contains("team_sizes") ? require<std::vector<int>>(j, "team_sizes", "")
                                            : std::vector<int>{cfg.base.n_agents};
  if (j.contains("init_modes")) {
    for (const auto& m : require<std::vector<std::string>>(j, "init_modes", ""))
      cfg.modes.push_back(init_mode_from_string(m));
  } else {
    cfg.modes = {cfg.base.init_mode};
  }
  cfg.n_scenarios = get_or<int>(j, "scenarios", "", 1);
  if (cfg.n_scenarios < 1) throw ConfigError("config: field 'scenarios' must be >= 1");
  if (cfg.team_sizes.empty()) throw ConfigError("config: field 'team_sizes' must be nonempty");
  for (int n : cfg.team_sizes) {
    ScenarioSpec probe = cfg.base;
    probe.n_agents = n;
    try {
      probe.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  return cfg;
}

}  // namespace covsim
