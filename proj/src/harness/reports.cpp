#include "adversarl/harness/reports.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>

#include "adversarl/attack/cover_tree.hpp"
#include "adversarl/core/errors.hpp"

namespace adversarl {

double similarity_test(Agent& agent, const Environment& env, const TargetPolicySpec& target, std::int64_t steps,
                       std::uint64_t seed) {
  if (steps <= 0) return 0.0;
  Rng rng = make_rng(seed, 0);
  const int H = env.spec().horizon;
  std::int64_t hits = 0;
  std::int64_t done = 0;
  while (done < steps) {
    StateVec s = env.reset(rng);
    for (int h = 1; h <= H && done < steps; ++h) {
      const ActionVec a_target = target.target_action(h, s);
      if (target.in_target_space(h, s, agent.act(h, s, false))) ++hits;
      ++done;
      const StepOutcome o = env.step(s, a_target);
      if (o.terminal) break;
      s = o.next_state;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(steps);
}

double GreedyEvaluation::relative_gap() const {
  return std::abs(agent_mean_reward - target_mean_reward) / std::abs(target_mean_reward);
}

GreedyEvaluation greedy_evaluation(Agent& agent, const Environment& env, const TargetPolicySpec& target,
                                   std::int64_t episodes, std::uint64_t seed) {
  GreedyEvaluation out;
  out.episodes = episodes;
  if (episodes <= 0) return out;
  Rng rng = make_rng(seed, 0);
  const int H = env.spec().horizon;
  const auto rollout = [&](const StateVec& s0, auto&& policy) {
    double ret = 0.0;
    StateVec s = s0;
    for (int h = 1; h <= H; ++h) {
      const StepOutcome o = env.step(s, policy(h, s));
      ret += o.raw_reward;
      if (o.terminal) break;
      s = o.next_state;
    }
    return ret;
  };
  double agent_sum = 0.0;
  double target_sum = 0.0;
  for (std::int64_t e = 0; e < episodes; ++e) {
    const StateVec s0 = env.reset(rng);
    agent_sum += rollout(s0, [&](int h, const StateVec& s) { return agent.act(h, s, false); });
    target_sum += rollout(s0, [&](int h, const StateVec& s) { return target.target_action(h, s); });
  }
  out.agent_mean_reward = agent_sum / static_cast<double>(episodes);
  out.target_mean_reward = target_sum / static_cast<double>(episodes);
  return out;
}

double loglog_slope(std::span<const EpisodeMetrics> rows, int horizon) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const EpisodeMetrics& r : rows) {
    if (r.cum_tau <= 0) continue;
    const double x = std::log(static_cast<double>(r.episode) * horizon);
    const double y = std::log(static_cast<double>(r.cum_tau));
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (n < 2) return 0.0;
  const double den = n * sxx - sx * sx;
  return den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

SublinearityReport sublinearity_report(std::span<const EpisodeMetrics> rows, int horizon) {
  SublinearityReport out;
  if (rows.empty()) return out;
  const std::size_t n = rows.size();
  const std::size_t decile = std::max<std::size_t>(1, n / 10);
  const auto rate = [&](std::size_t begin, std::size_t end) {
    std::int64_t attacks = 0;
    for (std::size_t i = begin; i < end; ++i) attacks += rows[i].attacks;
    return static_cast<double>(attacks) / (static_cast<double>(end - begin) * horizon);
  };
  out.first_decile_rate = rate(0, decile);
  out.last_decile_rate = rate(n - decile, n);
  if (out.last_decile_rate == 0.0) {
    out.decile_ratio = 0.0;
  } else if (out.first_decile_rate == 0.0) {
    out.decile_ratio = std::numeric_limits<double>::infinity();
  } else {
    out.decile_ratio = out.last_decile_rate / out.first_decile_rate;
  }
  out.slope_full = loglog_slope(rows, horizon);
  out.slope_second_half = loglog_slope(rows.subspan(n / 2), horizon);
  return out;
}

std::vector<NodeCheck> node_growth_check(std::span<const Checkpoint> checkpoints, const ExperimentConfig& cfg,
                                         std::uint32_t cells) {
  std::vector<NodeCheck> out;
  for (const Checkpoint& cp : checkpoints) {
    for (std::size_t i = 0; i < cp.nodes_per_step.size(); ++i) {
      NodeCheck c;
      c.k = cp.k;
      c.h = static_cast<int>(i) + 1;
      c.nodes = cp.nodes_per_step[i];
      c.bound = node_count_bound(cp.k, cfg.attack.nu1, cfg.attack.rho, cfg.horizon, c.h, cells, cfg.attack.delta1);
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> accounting_check(std::span<const EpisodeMetrics> rows, std::int64_t expected_rows,
                                          int horizon, int warmup_episodes) {
  std::vector<std::string> failures;
  if (static_cast<std::int64_t>(rows.size()) != expected_rows) {
    failures.push_back("metrics has " + std::to_string(rows.size()) + " rows, expected " +
                       std::to_string(expected_rows));
  }
  const std::int64_t slack = static_cast<std::int64_t>(horizon) * warmup_episodes;
  std::int64_t tau = 0;
  std::int64_t alpha = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const EpisodeMetrics& r = rows[i];
    const std::string at = "episode " + std::to_string(r.episode) + ": ";
    if (r.episode != static_cast<std::int64_t>(i) + 1) failures.push_back(at + "row " + std::to_string(i + 1) + " is out of sequence");
    if (r.attacks < 0 || r.attacks > horizon || r.out_of_target < 0 || r.out_of_target > horizon)
      failures.push_back(at + "per-episode counts outside [0, H]");
    tau += r.attacks;
    alpha += r.out_of_target;
    if (r.cum_tau != tau) failures.push_back(at + "cum_tau does not match the running sum of attacks");
    if (r.cum_alpha != alpha) failures.push_back(at + "cum_alpha does not match the running sum of out_of_target");
    if (i > 0 && (r.cum_tau < rows[i - 1].cum_tau || r.cum_alpha < rows[i - 1].cum_alpha))
      failures.push_back(at + "cumulative column decreased");
    if (r.cum_alpha < r.cum_tau) failures.push_back(at + "cum_alpha < cum_tau");
    if (r.cum_alpha - r.cum_tau > slack)
      failures.push_back(at + "cum_alpha - cum_tau = " + std::to_string(r.cum_alpha - r.cum_tau) + " exceeds H*warmup = " +
                         std::to_string(slack));
    if (failures.size() > 50) {
      failures.push_back("further failures suppressed");
      break;
    }
  }
  return failures;
}

TimeShareReport time_share_report(const RunMetrics& metrics, const ExperimentConfig& cfg) {
  if (!cfg.timing) throw ConfigError("time share needs a run made with timing = true");
  TimeShareReport out;
  for (const Checkpoint& cp : metrics.checkpoints) {
    out.per_checkpoint.emplace_back(cp.k, cp.attacker_time_share);
    out.max_share = std::max(out.max_share, cp.attacker_time_share);
  }
  if (!metrics.episodes.empty()) out.final_share = metrics.episodes.back().attacker_time_share;
  return out;
}

const char* const kMetricsHeader =
    "episode,reward_raw,reward_norm,attacks,out_of_target,cum_tau,cum_alpha,total_nodes,attacker_time_share";

void write_metrics_csv(std::ostream& os, std::span<const EpisodeMetrics> rows) {
  os << kMetricsHeader << '\n';
  std::ostringstream line;
  line.precision(10);
  for (const EpisodeMetrics& r : rows) {
    line.str("");
    line << r.episode << ',' << r.reward_raw << ',' << r.reward_norm << ',' << r.attacks << ',' << r.out_of_target
         << ',' << r.cum_tau << ',' << r.cum_alpha << ',' << r.total_nodes << ',' << r.attacker_time_share << '\n';
    os << line.str();
  }
}

std::vector<EpisodeMetrics> read_metrics_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kMetricsHeader) throw ConfigError("metrics.csv has an unexpected header");
  std::vector<EpisodeMetrics> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    EpisodeMetrics r;
    if (!(ls >> r.episode >> r.reward_raw >> r.reward_norm >> r.attacks >> r.out_of_target >> r.cum_tau >>
          r.cum_alpha >> r.total_nodes >> r.attacker_time_share))
      throw ConfigError("metrics.csv line " + std::to_string(line_no) + " is malformed");
    std::string extra;
    if (ls >> extra) throw ConfigError("metrics.csv line " + std::to_string(line_no) + " has extra fields");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace adversarl
