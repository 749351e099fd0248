#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fhtlr/envs/grid_world.hpp"
#include "fhtlr/envs/wireless.hpp"
#include "fhtlr/errors.hpp"
#include "fhtlr/fhtlr_agent.hpp"
#include "fhtlr/mdp.hpp"
#include "fhtlr/tabular_agents.hpp"

#include <nlohmann/json.hpp>

namespace fhtlr {

constexpr int kConfigSchemaVersion = 1;

// Agent ids: "q" (stationary), "fhq", "fhtlr".
struct AgentConfig {
  std::string id = "fhq";
  StepSizeSchedule alpha{StepSizeSchedule::Kind::kConstant, 0.1};
  EpsilonSchedule epsilon{};
  // fhtlr only
  int rank = 1;
  double init_scale = 0.1;
  UpdateMode update_mode = UpdateMode::kJacobi;
  double divergence_bound = 1e6;
};

struct EnvironmentConfig {
  std::string id = "gridworld";  // "gridworld" | "wireless"
  GridWorldConfig gridworld;
  WirelessConfig wireless;
};

// One declarative experiment: identical config + seed => identical outputs.
struct ExperimentConfig {
  std::string name = "experiment";
  EnvironmentConfig environment;
  AgentConfig agent;
  long episodes = 0;
  long eval_every = 1;
  long eval_episodes = 1;
  std::vector<std::uint64_t> seeds = {1};

  void validate() const {
    if (name.empty()) throw ConfigError("name must not be empty");
    if (episodes < 0) throw ConfigError("episodes must be >= 0");
    if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
    if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
  }
};

namespace detail {

// Wraps a JSON object and insists every key is consumed; a silent typo in a
// hyperparameter name would invalidate an experiment.
class StrictObject {
 public:
  StrictObject(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + " must be an object");
  }

  bool has(const std::string& key) {
    if (j_.contains(key)) {
      seen_.insert(key);
      return true;
    }
    return false;
  }

  const nlohmann::json& require(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError(path_ + " is missing required key '" + key + "'");
    seen_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    try {
      return require(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return get<T>(key);
  }

  // Call once all expected keys were pulled.
  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(path_ + " has unknown key '" + it.key() + "'");
      }
    }
  }

  std::string child_path(const std::string& key) const { return path_ + "." + key; }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline StepSizeSchedule parse_alpha(const nlohmann::json& j, const std::string& path) {
  StrictObject o(j, path);
  const std::string kind = o.get<std::string>("kind");
  const double alpha0 = o.get<double>("alpha0");
  o.finish();
  if (kind == "constant") return {StepSizeSchedule::Kind::kConstant, alpha0};
  if (kind == "inverse_visit") return {StepSizeSchedule::Kind::kInverseVisit, alpha0};
  throw ConfigError(path + ".kind must be 'constant' or 'inverse_visit', got '" + kind + "'");
}

inline EpsilonSchedule parse_epsilon(const nlohmann::json& j, const std::string& path) {
  StrictObject o(j, path);
  const double start = o.get<double>("start");
  const double end = o.get<double>("end");
  const int decay = o.get<int>("decay_episodes");
  o.finish();
  try {
    return {start, end, decay};
  } catch (const ValidationError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline AgentConfig parse_agent(const nlohmann::json& j, const std::string& path) {
  StrictObject o(j, path);
  AgentConfig cfg;
  cfg.id = o.get<std::string>("id");
  if (cfg.id != "q" && cfg.id != "fhq" && cfg.id != "fhtlr") {
    throw ConfigError(path + ".id must be one of 'q', 'fhq', 'fhtlr'");
  }
  if (o.has("alpha")) cfg.alpha = parse_alpha(j.at("alpha"), o.child_path("alpha"));
  if (o.has("epsilon")) cfg.epsilon = parse_epsilon(j.at("epsilon"), o.child_path("epsilon"));
  if (cfg.id == "fhtlr") {
    cfg.rank = o.get<int>("rank");
    cfg.init_scale = o.get_or<double>("init_scale", cfg.init_scale);
    cfg.divergence_bound = o.get_or<double>("divergence_bound", cfg.divergence_bound);
    if (o.has("update_mode")) {
      const std::string mode = o.get<std::string>("update_mode");
      if (mode == "jacobi") {
        cfg.update_mode = UpdateMode::kJacobi;
      } else if (mode == "gauss_seidel") {
        cfg.update_mode = UpdateMode::kGaussSeidel;
      } else {
        throw ConfigError(path + ".update_mode must be 'jacobi' or 'gauss_seidel'");
      }
    }
  }
  o.finish();
  return cfg;
}

inline GridWorldConfig parse_gridworld(StrictObject& o) {
  GridWorldConfig cfg;
  cfg.height = o.get_or<int>("height", cfg.height);
  cfg.width = o.get_or<int>("width", cfg.width);
  cfg.horizon = o.get_or<int>("horizon", cfg.horizon);
  if (o.has("goals")) {
    const nlohmann::json& goals = o.require("goals");
    if (!goals.is_array()) throw ConfigError("environment.goals must be an array");
    cfg.goals.clear();
    for (std::size_t i = 0; i < goals.size(); ++i) {
      StrictObject g(goals[i], "environment.goals[" + std::to_string(i) + "]");
      GridGoal goal;
      goal.row = g.get<int>("row");
      goal.col = g.get<int>("col");
      goal.reward = g.get<double>("reward");
      g.finish();
      cfg.goals.push_back(goal);
    }
  }
  return cfg;
}

inline WirelessConfig parse_wireless(StrictObject& o) {
  WirelessConfig cfg;
  cfg.channels = o.get_or<int>("channels", cfg.channels);
  cfg.horizon = o.get_or<int>("horizon", cfg.horizon);
  cfg.fading_gains = o.get_or<std::vector<double>>("fading_gains", cfg.fading_gains);
  cfg.fading_stay_prob = o.get_or<double>("fading_stay_prob", cfg.fading_stay_prob);
  cfg.occupancy_stay_free = o.get_or<double>("occupancy_stay_free", cfg.occupancy_stay_free);
  cfg.occupancy_stay_busy = o.get_or<double>("occupancy_stay_busy", cfg.occupancy_stay_busy);
  cfg.busy_loss_prob = o.get_or<double>("busy_loss_prob", cfg.busy_loss_prob);
  cfg.battery_levels = o.get_or<int>("battery_levels", cfg.battery_levels);
  cfg.harvest_prob = o.get_or<double>("harvest_prob", cfg.harvest_prob);
  cfg.queue_levels = o.get_or<int>("queue_levels", cfg.queue_levels);
  cfg.arrival_prob = o.get_or<double>("arrival_prob", cfg.arrival_prob);
  cfg.power_values = o.get_or<std::vector<double>>("power_values", cfg.power_values);
  cfg.energy_costs = o.get_or<std::vector<int>>("energy_costs", cfg.energy_costs);
  cfg.noise_power = o.get_or<double>("noise_power", cfg.noise_power);
  cfg.weight_battery = o.get_or<double>("weight_battery", cfg.weight_battery);
  cfg.weight_queue = o.get_or<double>("weight_queue", cfg.weight_queue);
  cfg.initial_battery = o.get_or<int>("initial_battery", cfg.initial_battery);
  cfg.initial_queue = o.get_or<int>("initial_queue", cfg.initial_queue);
  return cfg;
}

inline EnvironmentConfig parse_environment(const nlohmann::json& j, const std::string& path) {
  StrictObject o(j, path);
  EnvironmentConfig cfg;
  cfg.id = o.get<std::string>("id");
  if (cfg.id == "gridworld") {
    cfg.gridworld = parse_gridworld(o);
  } else if (cfg.id == "wireless") {
    cfg.wireless = parse_wireless(o);
  } else {
    throw ConfigError(path + ".id must be 'gridworld' or 'wireless', got '" + cfg.id + "'");
  }
  o.finish();
  return cfg;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  detail::StrictObject o(j, "config");
  const int version = o.get<int>("schema_version");
  if (version != kConfigSchemaVersion) {
    throw ConfigError("unsupported schema_version " + std::to_string(version) +
                      " (expected " + std::to_string(kConfigSchemaVersion) + ")");
  }
  ExperimentConfig cfg;
  cfg.name = o.get<std::string>("name");
  cfg.environment = detail::parse_environment(o.require("environment"), "environment");
  cfg.agent = detail::parse_agent(o.require("agent"), "agent");
  cfg.episodes = o.get<long>("episodes");
  cfg.eval_every = o.get_or<long>("eval_every", cfg.eval_every);
  cfg.eval_episodes = o.get<long>("eval_episodes");
  cfg.seeds = o.get<std::vector<std::uint64_t>>("seeds");
  o.finish();
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_experiment_config(j);
}

inline std::unique_ptr<FiniteHorizonMdp> make_environment(const EnvironmentConfig& cfg) {
  if (cfg.id == "gridworld") return std::make_unique<GridWorld>(cfg.gridworld);
  if (cfg.id == "wireless") return std::make_unique<WirelessEnv>(cfg.wireless);
  throw ConfigError("unknown environment id '" + cfg.id + "'");
}

// The agent's learnable state is seeded from the run seed, so every run is
// fully determined by (config, seed).
inline std::unique_ptr<Agent> make_agent(const ExperimentConfig& cfg,
                                         const StateActionSpace& space, std::uint64_t seed) {
  const AgentConfig& a = cfg.agent;
  if (a.id == "q") return std::make_unique<StationaryQAgent>(space, a.alpha);
  if (a.id == "fhq") return std::make_unique<FhqAgent>(space, a.alpha);
  if (a.id == "fhtlr") {
    FhtlrOptions opts;
    opts.rank = a.rank;
    opts.alpha = a.alpha;
    opts.update_mode = a.update_mode;
    opts.init_scale = a.init_scale;
    opts.divergence_bound = a.divergence_bound;
    return std::make_unique<FhtlrAgent>(space, opts, stream_seed(seed, Stream::kFactorInit));
  }
  throw ConfigError("unknown agent id '" + a.id + "'");
}

}  // namespace fhtlr
