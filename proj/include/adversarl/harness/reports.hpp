#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "adversarl/agents/agent.hpp"
#include "adversarl/envs/environment.hpp"
#include "adversarl/harness/experiment.hpp"

namespace adversarl {

/// Fraction of `steps` states, visited by rolling out the target policy, at
/// which the agent's greedy action lies within the target radius. Episodes
/// restart on termination or after H steps.
double similarity_test(Agent& agent, const Environment& env, const TargetPolicySpec& target, std::int64_t steps,
                       std::uint64_t seed);

struct GreedyEvaluation {
  std::int64_t episodes = 0;
  double agent_mean_reward = 0.0;   // raw episode return, greedy agent, no attacker
  double target_mean_reward = 0.0;  // same initial states, target policy
  /// |agent - target| / |target|.
  double relative_gap() const;
};

GreedyEvaluation greedy_evaluation(Agent& agent, const Environment& env, const TargetPolicySpec& target,
                                   std::int64_t episodes, std::uint64_t seed);

struct SublinearityReport {
  double first_decile_rate = 0.0;  // attacks per nominal step (H per episode)
  double last_decile_rate = 0.0;
  double decile_ratio = 0.0;       // last / first; 0 when both are 0
  double slope_full = 0.0;         // d log(cum_tau) / d log(steps)
  double slope_second_half = 0.0;
};

/// Rates use H steps per episode. Slopes are least-squares fits over the
/// episodes with cum_tau > 0, and 0 when fewer than two such episodes.
SublinearityReport sublinearity_report(std::span<const EpisodeMetrics> rows, int horizon);

/// Least-squares slope of log(cum_tau) against log(episode * horizon) over
/// the rows with cum_tau > 0.
double loglog_slope(std::span<const EpisodeMetrics> rows, int horizon);

struct NodeCheck {
  std::int64_t k = 0;
  int h = 0;
  std::uint64_t nodes = 0;
  double bound = 0.0;
  bool pass() const { return static_cast<double>(nodes) <= bound; }
};

/// Compares every logged per-step node count against the growth bound.
std::vector<NodeCheck> node_growth_check(std::span<const Checkpoint> checkpoints, const ExperimentConfig& cfg,
                                         std::uint32_t cells);

/// Human-readable failures of the CSV invariants: row count and numbering,
/// nondecreasing cumulative columns consistent with the per-episode
/// columns, |alpha| >= |tau| and |alpha| - |tau| <= H * warmup.
std::vector<std::string> accounting_check(std::span<const EpisodeMetrics> rows, std::int64_t expected_rows,
                                          int horizon, int warmup_episodes);

struct TimeShareReport {
  std::vector<std::pair<std::int64_t, double>> per_checkpoint;
  double final_share = 0.0;
  double max_share = 0.0;
};

/// Throws ConfigError if the run was made without timing.
TimeShareReport time_share_report(const RunMetrics& metrics, const ExperimentConfig& cfg);

extern const char* const kMetricsHeader;
void write_metrics_csv(std::ostream& os, std::span<const EpisodeMetrics> rows);
/// Throws ConfigError on a malformed file or header.
std::vector<EpisodeMetrics> read_metrics_csv(std::istream& is);

}  // namespace adversarl
