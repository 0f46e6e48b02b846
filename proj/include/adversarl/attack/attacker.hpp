#pragma once

#include <cstdint>
#include <string>

#include "adversarl/core/types.hpp"

namespace adversarl {

struct Interception {
  ActionVec action;            // what the environment will execute
  bool attacked = false;       // the attacker intervened (out-of-target, post warm-up)
  bool in_target_space = false;
};

/// Sits between agent and environment. Per episode the harness calls
/// intercept()/observe() once for each executed step h = 1, 2, ... and then
/// end_episode() exactly once.
class Attacker {
 public:
  virtual ~Attacker() = default;

  virtual Interception intercept(std::int64_t k, int h, const StateVec& s, const ActionVec& agent_action) = 0;

  /// Raw reward produced by the action returned from the matching intercept().
  virtual void observe(int /*h*/, double /*raw_reward*/, bool /*terminal*/) {}

  virtual void end_episode(std::int64_t /*k*/) {}

  virtual std::string name() const = 0;
};

/// Never attacks; still reports target-space membership for loss accounting.
class NoAttacker final : public Attacker {
 public:
  explicit NoAttacker(TargetPolicySpec target) : target_(std::move(target)) {}

  Interception intercept(std::int64_t, int h, const StateVec& s, const ActionVec& a) override {
    return Interception{a, false, target_.in_target_space(h, s, a)};
  }
  std::string name() const override { return "none"; }

 private:
  TargetPolicySpec target_;
};

}  // namespace adversarl
