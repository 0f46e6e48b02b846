#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "adversarl/core/rng.hpp"
#include "adversarl/core/types.hpp"

namespace adversarl {

struct StepOutcome {
  StateVec next_state;
  double raw_reward = 0.0;
  bool terminal = false;
};

/// Pure white-box view of an environment's dynamics.
struct EnvModel {
  std::function<StateVec(const StateVec&, const ActionVec&)> transition;
  std::function<double(const StateVec&, const ActionVec&)> reward;
  std::function<bool(const StateVec&, const ActionVec&)> terminates;
};

/// Deterministic continuous-control environment. Instances hold no episode
/// state; the harness owns the current state and passes it in.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual StateVec reset(Rng& rng) const = 0;

  virtual StateVec transition(const StateVec& s, const ActionVec& a) const = 0;
  virtual double reward(const StateVec& s, const ActionVec& a) const = 0;
  virtual bool terminates(const StateVec& s, const ActionVec& a) const = 0;

  /// Analytic target policy with the given target-space radius.
  virtual TargetPolicySpec builtin_target_policy(double radius) const = 0;

  /// Bounds-checked step built from the three model functions.
  StepOutcome step(const StateVec& s, const ActionVec& a) const;

  /// The returned functions borrow *this.
  EnvModel model() const;
};

/// 1-D slider: s' = s + 2a, reward |a|, falling off the rod ends the episode
/// with reward -1.
class SliderEnv final : public Environment {
 public:
  static constexpr double kInitHalfWidth = 0.7;
  static constexpr double kSafeHalfWidth = 0.7;
  static constexpr double kFallReward = -1.0;

  explicit SliderEnv(int horizon = 10);

  const EnvSpec& spec() const override { return spec_; }
  StateVec reset(Rng& rng) const override;
  StateVec transition(const StateVec& s, const ActionVec& a) const override;
  double reward(const StateVec& s, const ActionVec& a) const override;
  bool terminates(const StateVec& s, const ActionVec& a) const override;
  TargetPolicySpec builtin_target_policy(double radius) const override;

  /// Move to whichever end of the safe interval is farther; ties go positive.
  static double target_action(double s);

 private:
  EnvSpec spec_;
};

/// Point vehicle in [0,8]^dim moving by a in [-1,1]^dim, rewarded for being
/// close to the center (4,...,4).
class VehicleEnv final : public Environment {
 public:
  static constexpr double kCenter = 4.0;
  static constexpr double kForbiddenRadius = 1.0;

  explicit VehicleEnv(int dim, int horizon = 10);

  const EnvSpec& spec() const override { return spec_; }
  StateVec reset(Rng& rng) const override;
  StateVec transition(const StateVec& s, const ActionVec& a) const override;
  double reward(const StateVec& s, const ActionVec& a) const override;
  bool terminates(const StateVec&, const ActionVec&) const override { return false; }
  TargetPolicySpec builtin_target_policy(double radius) const override;

  /// max(0, 1 - |s' - c| / (4 sqrt(dim))): 1 at the center, 0 at a corner.
  double reward_at(const StateVec& next_state) const;
  double distance_to_center(const StateVec& s) const;
  /// Head for the point at distance 1 from the center on the ray through s,
  /// clipped per axis; hold still when already on that sphere.
  static ActionVec target_action(const StateVec& s);

 private:
  int dim_;
  double max_distance_;
  EnvSpec spec_;
};

/// Names accepted by make_environment.
std::span<const std::string_view> environment_names();

/// Throws ConfigError listing valid names if `name` is unknown.
std::unique_ptr<Environment> make_environment(const std::string& name, int horizon = 10);

}  // namespace adversarl
