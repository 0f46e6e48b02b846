#pragma once

#include <cstdint>
#include <vector>

#include "adversarl/agents/agent.hpp"
#include "adversarl/core/rng.hpp"

namespace adversarl {

struct GridQParams {
  int state_bins = 16;      // per axis
  int action_bins = 17;     // per axis, endpoints included
  double epsilon_start = 1.0;
  double epsilon_min = 0.01;
  double epsilon_decay = 200.0;  // eps_k = max(eps_min, eps_start / (1 + k / decay))
  double lr_min = 0.05;          // step size is max(lr_min, 1 / visits)
  bool optimistic = true;        // Q starts at (H - h + 1) * reward_hi
};

/// Tabular Q-learning over (h, state bin, action bin) with epsilon-greedy
/// exploration.
class GridQAgent final : public Agent {
 public:
  GridQAgent(const EnvSpec& env, GridQParams params, std::uint64_t seed);

  ActionVec act(int h, const StateVec& s, bool explore) override;
  void observe(const Transition& t) override;
  void end_episode(std::span<const Transition> episode) override;
  void save(std::ostream& os) const override;
  void load(std::istream& is) override;
  std::string name() const override { return "gridq"; }

  std::size_t state_bin(const StateVec& s) const;
  std::size_t action_bin(const ActionVec& a) const;
  ActionVec action_center(std::size_t bin) const;
  std::size_t state_bin_count() const noexcept { return n_state_; }
  std::size_t action_bin_count() const noexcept { return n_action_; }

  double q(int h, std::size_t sbin, std::size_t abin) const { return q_[offset(h, sbin) + abin]; }
  void set_q(int h, std::size_t sbin, std::size_t abin, double v) { q_[offset(h, sbin) + abin] = v; }
  std::uint32_t visits(int h, std::size_t sbin, std::size_t abin) const { return visits_[offset(h, sbin) + abin]; }

  double epsilon() const noexcept { return epsilon_; }
  /// Overrides the schedule until the next end_episode (tests).
  void set_epsilon(double eps) { epsilon_ = eps; }
  /// Fixes the step size (e.g. 1 or 0) instead of the visit schedule.
  void set_fixed_learning_rate(double lr) { fixed_lr_ = lr; }

  std::int64_t episodes() const noexcept { return episodes_; }
  const GridQParams& params() const noexcept { return params_; }

 private:
  std::size_t offset(int h, std::size_t sbin) const {
    return (static_cast<std::size_t>(h - 1) * n_state_ + sbin) * n_action_;
  }
  std::size_t greedy(int h, std::size_t sbin) const;
  double schedule_epsilon() const;

  EnvSpec env_;
  GridQParams params_;
  Rng rng_;
  std::size_t n_state_;
  std::size_t n_action_;
  std::vector<double> q_;
  std::vector<std::uint32_t> visits_;
  std::vector<ActionVec> centers_;
  double epsilon_;
  double fixed_lr_ = -1.0;
  std::int64_t episodes_ = 0;
};

}  // namespace adversarl
