#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace adversarl {

/// Fixed-dimension real vector with inline storage for up to kMaxDim
/// coordinates. The tag keeps states and actions from being mixed up at
/// call sites.
template <typename Tag>
class Vec {
 public:
  static constexpr std::size_t kMaxDim = 8;

  Vec() = default;
  explicit Vec(std::span<const double> coords) { assign(coords); }
  explicit Vec(const std::vector<double>& coords) { assign(coords); }
  Vec(std::initializer_list<double> coords) { assign(std::span<const double>(coords.begin(), coords.size())); }

  std::size_t dim() const noexcept { return size_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  std::span<const double> coords() const noexcept { return {coords_.data(), size_}; }

  const double* begin() const noexcept { return coords_.data(); }
  const double* end() const noexcept { return coords_.data() + size_; }

  bool operator==(const Vec& o) const noexcept { return std::ranges::equal(coords(), o.coords()); }

 private:
  void assign(std::span<const double> c) {
    if (c.size() > kMaxDim) throw std::length_error("Vec holds at most 8 coordinates");
    size_ = c.size();
    std::copy(c.begin(), c.end(), coords_.begin());
  }

  std::array<double, kMaxDim> coords_{};
  std::size_t size_ = 0;
};

struct StateTag {};
struct ActionTag {};
using StateVec = Vec<StateTag>;
using ActionVec = Vec<ActionTag>;

/// Axis-aligned box [lo, hi] in R^n.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const noexcept { return lo.size(); }
  bool contains(std::span<const double> x, double tol = 1e-12) const;
  double diameter() const;
  std::vector<double> center() const;
  /// Throws ContractViolation unless lo < hi on every axis.
  void validate(const std::string& what) const;
};

struct EnvSpec {
  std::string name;
  Box state_bounds;
  Box action_bounds;
  int horizon = 10;
  double reward_lo = 0.0;
  double reward_hi = 1.0;

  std::size_t state_dim() const noexcept { return state_bounds.dim(); }
  std::size_t action_dim() const noexcept { return action_bounds.dim(); }

  /// Affine map from [reward_lo, reward_hi] onto [0, 1].
  double normalize_reward(double raw) const { return (raw - reward_lo) / (reward_hi - reward_lo); }

  void validate() const;
};

/// One step of an episode as seen by the harness (not the agent).
struct StepRecord {
  int h = 1;
  StateVec state;
  ActionVec agent_action;
  ActionVec submitted_action;
  double reward = 0.0;
  bool attacked = false;
  bool in_target_space = false;
  bool terminal = false;
};

struct Trajectory {
  std::int64_t episode = 1;
  std::vector<StepRecord> steps;

  /// Checks step numbering, terminal placement and the attack flags.
  void validate(int horizon) const;
};

/// What the agent is allowed to see: its own action and the outcome of
/// whatever was actually executed.
struct Transition {
  int h = 1;
  StateVec state;
  ActionVec action;
  double reward = 0.0;
  StateVec next_state;
  bool terminal = false;
};

using PolicyFn = std::function<ActionVec(int h, const StateVec& s)>;
using ActionDistance = std::function<double(const ActionVec&, const ActionVec&)>;

/// Euclidean distance between two actions. Throws ContractViolation on
/// dimension mismatch.
double distance_l(const ActionVec& a, const ActionVec& b);

/// Deterministic target policy plus the radius of the closed ball of
/// acceptable actions around it.
struct TargetPolicySpec {
  PolicyFn policy;
  double radius = 0.0;
  ActionDistance distance = distance_l;

  ActionVec target_action(int h, const StateVec& s) const { return policy(h, s); }
  bool in_target_space(int h, const StateVec& s, const ActionVec& a) const;
};

struct AttackConfig {
  int warmup_episodes = 0;
  double delta1 = 0.05;
  double nu1 = 2.0;
  double rho = 0.5;
  int m_per_axis = 4;
  std::uint64_t seed = 1;

  void validate() const;
};

}  // namespace adversarl
