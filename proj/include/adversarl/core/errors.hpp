#pragma once

#include <stdexcept>
#include <string>

namespace adversarl {

/// A caller broke a documented precondition (dimension mismatch, splitting an
/// internal node, zero-count update, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid or inconsistent configuration, detected before a run starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A runtime invariant failed mid-run. `invariant()` names it so the CLI can
/// report which one.
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(std::string invariant, const std::string& detail)
      : std::runtime_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// The planner found a (step, state) where the worst action is no worse than
/// the best in-target action, so the attack has no leverage.
class TargetInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adversarl
