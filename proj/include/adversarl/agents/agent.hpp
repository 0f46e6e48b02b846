#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>

#include "adversarl/core/types.hpp"

namespace adversarl {

/// Learner interface. Agents only ever receive Transitions carrying their
/// own action; any substitution made by an attacker is invisible to them.
class Agent {
 public:
  virtual ~Agent() = default;

  /// explore == false must be deterministic for a fixed internal state.
  virtual ActionVec act(int h, const StateVec& s, bool explore) = 0;
  virtual void observe(const Transition& t) = 0;
  virtual void end_episode(std::span<const Transition> episode) = 0;

  virtual void save(std::ostream& os) const = 0;
  virtual void load(std::istream& is) = 0;

  virtual std::string name() const = 0;
};

}  // namespace adversarl
