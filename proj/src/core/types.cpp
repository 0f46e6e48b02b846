#include "adversarl/core/types.hpp"

#include <cmath>
#include <sstream>

#include "adversarl/core/errors.hpp"

namespace adversarl {

bool Box::contains(std::span<const double> x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lo[i] - tol && x[i] <= hi[i] + tol)) return false;
  }
  return true;
}

double Box::diameter() const {
  double sq = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) sq += (hi[i] - lo[i]) * (hi[i] - lo[i]);
  return std::sqrt(sq);
}

std::vector<double> Box::center() const {
  std::vector<double> c(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  return c;
}

void Box::validate(const std::string& what) const {
  if (lo.empty() || lo.size() != hi.size()) {
    throw ContractViolation(what + ": bounds must be non-empty and of equal length");
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) {
      std::ostringstream os;
      os << what << ": axis " << i << " has lo >= hi";
      throw ContractViolation(os.str());
    }
  }
}

void EnvSpec::validate() const {
  state_bounds.validate(name + " state bounds");
  action_bounds.validate(name + " action bounds");
  if (horizon < 1) throw ContractViolation(name + ": horizon must be >= 1");
  if (!(reward_lo < reward_hi)) throw ContractViolation(name + ": reward_lo must be < reward_hi");
}

void Trajectory::validate(int horizon) const {
  if (static_cast<int>(steps.size()) > horizon) {
    throw InvariantViolation("trajectory", "longer than the horizon");
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const StepRecord& st = steps[i];
    if (st.h != static_cast<int>(i) + 1) throw InvariantViolation("trajectory", "step indices must run 1, 2, ...");
    if (st.terminal && i + 1 != steps.size()) throw InvariantViolation("trajectory", "terminal step must be last");
    if (!st.attacked && !(st.submitted_action == st.agent_action)) {
      throw InvariantViolation("attack flag", "unattacked step submitted a different action");
    }
    if (st.attacked && st.in_target_space) throw InvariantViolation("attack flag", "attacked an in-target action");
  }
}

double distance_l(const ActionVec& a, const ActionVec& b) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << "distance_l: dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw ContractViolation(os.str());
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sq);
}

bool TargetPolicySpec::in_target_space(int h, const StateVec& s, const ActionVec& a) const {
  return distance(a, policy(h, s)) <= radius;
}

void AttackConfig::validate() const {
  if (warmup_episodes < 0) throw ConfigError("warmup_episodes must be >= 0");
  if (!(delta1 > 0.0 && delta1 < 1.0)) throw ConfigError("delta1 must lie in (0, 1)");
  if (!(nu1 > 0.0)) throw ConfigError("nu1 must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho must lie in (0, 1)");
  if (m_per_axis < 1) throw ConfigError("m_per_axis must be >= 1");
}

}  // namespace adversarl
