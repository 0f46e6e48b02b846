#include "adversarl/envs/environment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "adversarl/core/errors.hpp"

namespace adversarl {

StepOutcome Environment::step(const StateVec& s, const ActionVec& a) const {
  const EnvSpec& sp = spec();
  if (!sp.state_bounds.contains(s.coords(), 1e-9)) throw ContractViolation(sp.name + ": state out of bounds");
  if (!sp.action_bounds.contains(a.coords(), 1e-9)) throw ContractViolation(sp.name + ": action out of bounds");
  return StepOutcome{transition(s, a), reward(s, a), terminates(s, a)};
}

EnvModel Environment::model() const {
  return EnvModel{
      [this](const StateVec& s, const ActionVec& a) { return transition(s, a); },
      [this](const StateVec& s, const ActionVec& a) { return reward(s, a); },
      [this](const StateVec& s, const ActionVec& a) { return terminates(s, a); },
  };
}

// ---------------------------------------------------------------------------
// Slider

SliderEnv::SliderEnv(int horizon) {
  spec_.name = "slider";
  spec_.state_bounds = Box{{-1.0}, {1.0}};
  spec_.action_bounds = Box{{-1.0}, {1.0}};
  spec_.horizon = horizon;
  spec_.reward_lo = kFallReward;
  spec_.reward_hi = 1.0;
  spec_.validate();
}

StateVec SliderEnv::reset(Rng& rng) const { return StateVec{uniform(rng, -kInitHalfWidth, kInitHalfWidth)}; }

StateVec SliderEnv::transition(const StateVec& s, const ActionVec& a) const {
  // A fall reports the position clamped to the rod end.
  return StateVec{std::clamp(s[0] + 2.0 * a[0], -1.0, 1.0)};
}

bool SliderEnv::terminates(const StateVec& s, const ActionVec& a) const { return std::abs(s[0] + 2.0 * a[0]) > 1.0; }

double SliderEnv::reward(const StateVec& s, const ActionVec& a) const {
  return terminates(s, a) ? kFallReward : std::abs(a[0]);
}

double SliderEnv::target_action(double s) {
  const double down = (-kSafeHalfWidth - s) / 2.0;
  const double up = (kSafeHalfWidth - s) / 2.0;
  return std::abs(up) >= std::abs(down) ? up : down;
}

TargetPolicySpec SliderEnv::builtin_target_policy(double radius) const {
  TargetPolicySpec t;
  t.policy = [](int, const StateVec& s) { return ActionVec{target_action(s[0])}; };
  t.radius = radius;
  return t;
}

// ---------------------------------------------------------------------------
// Vehicle

VehicleEnv::VehicleEnv(int dim, int horizon) : dim_(dim) {
  if (dim < 1) throw ContractViolation("vehicle dimension must be >= 1");
  spec_.name = "vehicle" + std::to_string(dim);
  spec_.state_bounds = Box{std::vector<double>(dim, 0.0), std::vector<double>(dim, 8.0)};
  spec_.action_bounds = Box{std::vector<double>(dim, -1.0), std::vector<double>(dim, 1.0)};
  spec_.horizon = horizon;
  spec_.reward_lo = 0.0;
  spec_.reward_hi = 1.0;
  spec_.validate();
  max_distance_ = kCenter * std::sqrt(static_cast<double>(dim));
}

double VehicleEnv::distance_to_center(const StateVec& s) const {
  double sq = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) sq += (s[i] - kCenter) * (s[i] - kCenter);
  return std::sqrt(sq);
}

StateVec VehicleEnv::reset(Rng& rng) const {
  for (;;) {
    std::vector<double> x(dim_);
    for (double& v : x) v = uniform(rng, 0.0, 8.0);
    StateVec s(std::move(x));
    if (distance_to_center(s) > kForbiddenRadius) return s;
  }
}

StateVec VehicleEnv::transition(const StateVec& s, const ActionVec& a) const {
  std::vector<double> x(dim_);
  for (int i = 0; i < dim_; ++i) x[i] = std::clamp(s[i] + a[i], 0.0, 8.0);
  return StateVec(std::move(x));
}

double VehicleEnv::reward_at(const StateVec& next_state) const {
  return std::max(0.0, 1.0 - distance_to_center(next_state) / max_distance_);
}

double VehicleEnv::reward(const StateVec& s, const ActionVec& a) const { return reward_at(transition(s, a)); }

ActionVec VehicleEnv::target_action(const StateVec& s) {
  const int dim = static_cast<int>(s.dim());
  double sq = 0.0;
  for (int i = 0; i < dim; ++i) sq += (s[i] - kCenter) * (s[i] - kCenter);
  const double d = std::sqrt(sq);
  std::vector<double> a(dim, 0.0);
  if (std::abs(d - kForbiddenRadius) <= 1e-12) return ActionVec(std::move(a));
  std::vector<double> dir(dim, 0.0);
  if (d == 0.0) {
    dir[0] = 1.0;
  } else {
    for (int i = 0; i < dim; ++i) dir[i] = (s[i] - kCenter) / d;
  }
  for (int i = 0; i < dim; ++i) {
    const double goal = kCenter + kForbiddenRadius * dir[i];
    a[i] = std::clamp(goal - s[i], -1.0, 1.0);
  }
  return ActionVec(std::move(a));
}

TargetPolicySpec VehicleEnv::builtin_target_policy(double radius) const {
  TargetPolicySpec t;
  t.policy = [](int, const StateVec& s) { return target_action(s); };
  t.radius = radius;
  return t;
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::array<std::string_view, 3> kEnvNames{"slider", "vehicle2", "vehicle5"};
}

std::span<const std::string_view> environment_names() { return kEnvNames; }

std::unique_ptr<Environment> make_environment(const std::string& name, int horizon) {
  if (name == "slider") return std::make_unique<SliderEnv>(horizon);
  if (name == "vehicle2") return std::make_unique<VehicleEnv>(2, horizon);
  if (name == "vehicle5") return std::make_unique<VehicleEnv>(5, horizon);
  std::ostringstream os;
  os << "unknown env `" << name << "`; valid envs:";
  for (auto n : kEnvNames) os << ' ' << n;
  throw ConfigError(os.str());
}

}  // namespace adversarl
