#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adversarl/agents/actor_critic.hpp"
#include "adversarl/agents/grid_q.hpp"
#include "adversarl/attack/attacker.hpp"
#include "adversarl/attack/oracle.hpp"
#include "adversarl/core/config.hpp"
#include "adversarl/envs/environment.hpp"

namespace adversarl {

/// Every key accepted in an experiment config file.
std::span<const ConfigKey> experiment_schema();

/// Validated experiment settings with derived defaults filled in.
struct ExperimentConfig {
  std::string env = "slider";
  int horizon = 10;
  std::string agent = "gridq";
  std::string attacker = "lcbt";
  std::int64_t episodes = 20000;
  std::uint64_t seed = 1;
  double radius = 0.0625;
  AttackConfig attack;
  GridQParams gridq;
  ActorCriticParams ac;
  PlannerResolution planner;
  std::string planner_cache_dir;
  int oracle_samples = 4096;
  std::int64_t similarity_steps = 10000;
  std::int64_t eval_episodes = 1000;
  bool timing = false;
  std::int64_t checkpoint_every = 200;
  bool write_trees = true;

  /// Throws ConfigError on unknown names or inconsistent values.
  static ExperimentConfig from(const KeyValueConfig& cfg);
  /// Geometry defaults: nu1 = diam(A) in 1-D and 1.2 diam(A) otherwise,
  /// rho = 2^(-1/action_dim).
  static double default_nu1(const EnvSpec& env);
  static double default_rho(const EnvSpec& env);

  /// Every key with its resolved value; from(parse(render())) round-trips.
  std::string render() const;
};

/// One row of metrics.csv.
struct EpisodeMetrics {
  std::int64_t episode = 0;
  double reward_raw = 0.0;
  double reward_norm = 0.0;
  std::int64_t attacks = 0;
  std::int64_t out_of_target = 0;
  std::int64_t cum_tau = 0;
  std::int64_t cum_alpha = 0;
  std::uint64_t total_nodes = 0;
  double attacker_time_share = 0.0;
};

struct Checkpoint {
  std::int64_t k = 0;
  std::vector<std::uint64_t> nodes_per_step;  // index h-1; empty without trees
  double attacker_time_share = 0.0;
};

struct RunMetrics {
  std::vector<EpisodeMetrics> episodes;
  std::vector<Checkpoint> checkpoints;
  double delta_min_hat = 0.0;  // NaN unless the oracle planner ran
};

using AgentFactory = std::function<std::unique_ptr<Agent>(const EnvSpec&, const ExperimentConfig&)>;

std::unique_ptr<Agent> make_agent(const EnvSpec& env, const ExperimentConfig& cfg);
std::unique_ptr<Attacker> make_attacker(const Environment& env, const TargetPolicySpec& target,
                                        const ExperimentConfig& cfg, double* delta_min_hat = nullptr);

struct RunOptions {
  AgentFactory agent_factory;  // make_agent when empty
  /// Called after each episode with the full harness-side record.
  std::function<void(const Trajectory&)> on_episode;
  /// Tree dumps go here at checkpoints when set and the attacker is LCBT.
  std::filesystem::path tree_dir;
};

struct RunResult {
  RunMetrics metrics;
  std::unique_ptr<Environment> env;
  TargetPolicySpec target;
  std::unique_ptr<Agent> agent;
  std::unique_ptr<Attacker> attacker;
};

/// Runs `episodes` episodes of the agent/attacker/environment loop.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Stream seeds used by the harness, derived from the run seed.
enum class SeedStream : std::uint64_t { reset = 1, agent = 2, evaluation = 3, similarity = 4, attacker = 5 };
std::uint64_t stream_seed(const ExperimentConfig& cfg, SeedStream stream);

}  // namespace adversarl
