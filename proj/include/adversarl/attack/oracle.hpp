#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adversarl/attack/attacker.hpp"
#include "adversarl/envs/environment.hpp"

namespace adversarl {

/// Grid points per axis (endpoints included) for the backward-induction planner.
struct PlannerResolution {
  int state_points = 201;
  int action_points = 201;
};

/// Default resolutions: 201 x 201 for the slider, 41 x 21 per axis otherwise.
PlannerResolution default_resolution(const EnvSpec& env);

/// Tensor-product grid with nearest-point lookup.
class UniformGrid {
 public:
  UniformGrid() = default;
  UniformGrid(Box bounds, int points_per_axis);

  std::size_t size() const noexcept { return size_; }
  std::size_t dim() const noexcept { return bounds_.dim(); }
  int points_per_axis() const noexcept { return points_; }
  std::vector<double> point(std::size_t index) const;
  std::size_t nearest(std::span<const double> x) const;
  const Box& bounds() const noexcept { return bounds_; }

 private:
  Box bounds_;
  int points_ = 0;
  std::size_t size_ = 0;
};

/// Backward-induction tables for the best in-target policy and the worst
/// action on a state x action grid.
class PlannerGrid {
 public:
  PlannerGrid(UniformGrid states, UniformGrid actions, int horizon);

  int horizon() const noexcept { return horizon_; }
  const UniformGrid& states() const noexcept { return states_; }
  const UniformGrid& actions() const noexcept { return actions_; }

  StateVec state_at(std::size_t si) const { return StateVec(states_.point(si)); }
  ActionVec action_at(std::size_t ai) const { return ActionVec(actions_.point(ai)); }
  std::size_t nearest_state(const StateVec& s) const { return states_.nearest(s.coords()); }

  double q(int h, std::size_t si, std::size_t ai) const { return q_[q_offset(h, si) + ai]; }
  /// v(H+1, .) == 0.
  double v(int h, std::size_t si) const;
  std::size_t worst_action_index(int h, std::size_t si) const { return worst_[w_offset(h, si)]; }

  /// Worst grid action at the grid state nearest to s.
  ActionVec worst_action(int h, const StateVec& s) const {
    return action_at(worst_action_index(h, nearest_state(s)));
  }

  /// min over (h, grid state) of V - Q(worst).
  double delta_min_hat() const noexcept { return delta_min_; }

  void save(const std::filesystem::path& path, std::uint64_t key) const;
  static std::optional<PlannerGrid> load(const std::filesystem::path& path, std::uint64_t key);

 private:
  friend PlannerGrid plan(const Environment&, const TargetPolicySpec&, const PlannerResolution&, unsigned);

  std::size_t q_offset(int h, std::size_t si) const {
    return (static_cast<std::size_t>(h - 1) * states_.size() + si) * actions_.size();
  }
  std::size_t w_offset(int h, std::size_t si) const { return static_cast<std::size_t>(h - 1) * states_.size() + si; }

  UniformGrid states_;
  UniformGrid actions_;
  int horizon_;
  std::vector<double> q_;         // [h][state][action]
  std::vector<double> v_;         // [h][state], h = 1..H
  std::vector<std::uint32_t> worst_;
  double delta_min_ = 0.0;
};

/// Backward induction h = H..1 with normalized rewards, nearest-point
/// snapping of successor states and absorbing terminals. Throws
/// TargetInfeasible if the worst action is ever as good as the best
/// in-target action, ConfigError if some grid state has no in-target grid
/// action. `threads` == 0 uses the hardware concurrency.
PlannerGrid plan(const Environment& env, const TargetPolicySpec& target, const PlannerResolution& res,
                 unsigned threads = 0);

/// Cache key for plan(): hash of env name, horizon, radius and resolution.
std::uint64_t planner_cache_key(const EnvSpec& env, double radius, const PlannerResolution& res);

/// plan() behind a file cache in `cache_dir` (no caching if empty).
PlannerGrid plan_cached(const Environment& env, const TargetPolicySpec& target, const PlannerResolution& res,
                        const std::filesystem::path& cache_dir);

class WorstActionSource {
 public:
  virtual ~WorstActionSource() = default;
  virtual ActionVec worst_action(int h, const StateVec& s) const = 0;
  /// NaN when the source has no global gap estimate.
  virtual double delta_min_hat() const = 0;
};

class GridWorstAction final : public WorstActionSource {
 public:
  explicit GridWorstAction(PlannerGrid grid) : grid_(std::move(grid)) {}
  ActionVec worst_action(int h, const StateVec& s) const override { return grid_.worst_action(h, s); }
  double delta_min_hat() const override { return grid_.delta_min_hat(); }
  const PlannerGrid& grid() const noexcept { return grid_; }

 private:
  PlannerGrid grid_;
};

/// For high-dimensional action spaces: argmin over a fixed set of sampled
/// actions of r(s,a) + V_target(s'), where V_target is the return of rolling
/// out the target policy. Borrows `env`.
class SampledWorstAction final : public WorstActionSource {
 public:
  SampledWorstAction(const Environment& env, TargetPolicySpec target, int samples, std::uint64_t seed);
  ActionVec worst_action(int h, const StateVec& s) const override;
  double delta_min_hat() const override;

 private:
  double target_value(int h, StateVec s) const;

  const Environment& env_;
  TargetPolicySpec target_;
  std::vector<ActionVec> candidates_;
};

/// White-box attacker: replaces every out-of-target action after warm-up by
/// the worst action.
class OracleAttacker final : public Attacker {
 public:
  OracleAttacker(TargetPolicySpec target, int warmup_episodes, std::shared_ptr<const WorstActionSource> worst);

  Interception intercept(std::int64_t k, int h, const StateVec& s, const ActionVec& agent_action) override;
  std::string name() const override { return "oracle"; }
  const WorstActionSource& worst() const noexcept { return *worst_; }

 private:
  TargetPolicySpec target_;
  int warmup_;
  std::shared_ptr<const WorstActionSource> worst_;
};

}  // namespace adversarl
