#include "adversarl/agents/grid_q.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "adversarl/core/errors.hpp"

namespace adversarl {

namespace {

constexpr char kMagic[] = "GRIDQ1";

std::size_t power(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw ConfigError("truncated gridq snapshot");
  return v;
}

}  // namespace

GridQAgent::GridQAgent(const EnvSpec& env, GridQParams params, std::uint64_t seed)
    : env_(env), params_(params), rng_(make_rng(seed, 0)) {
  env_.validate();
  if (params_.state_bins < 1) throw ConfigError("gridq_state_bins must be >= 1");
  if (params_.action_bins < 2) throw ConfigError("gridq_action_bins must be >= 2");
  if (!(params_.epsilon_min > 0.0) || params_.epsilon_min > params_.epsilon_start || params_.epsilon_start > 1.0)
    throw ConfigError("gridq epsilon schedule needs 0 < epsilon_min <= epsilon_start <= 1");
  if (!(params_.epsilon_decay > 0.0)) throw ConfigError("gridq_epsilon_decay must be > 0");
  if (!(params_.lr_min > 0.0) || params_.lr_min > 1.0) throw ConfigError("gridq_lr_min must be in (0, 1]");

  n_state_ = power(static_cast<std::size_t>(params_.state_bins), env_.state_dim());
  n_action_ = power(static_cast<std::size_t>(params_.action_bins), env_.action_dim());
  const double cells = static_cast<double>(env_.horizon) * static_cast<double>(n_state_) * static_cast<double>(n_action_);
  if (cells > 5e7)
    throw ConfigError("gridq table would hold " + std::to_string(static_cast<long long>(cells)) +
                      " entries; use fewer bins or agent = actorcritic");

  q_.assign(static_cast<std::size_t>(cells), 0.0);
  if (params_.optimistic)
    for (int h = 1; h <= env_.horizon; ++h)
      std::fill_n(q_.begin() + static_cast<std::ptrdiff_t>(offset(h, 0)), n_state_ * n_action_,
                  (env_.horizon - h + 1) * std::max(0.0, env_.reward_hi));
  visits_.assign(q_.size(), 0);
  centers_.reserve(n_action_);
  const std::size_t nb = static_cast<std::size_t>(params_.action_bins);
  for (std::size_t b = 0; b < n_action_; ++b) {
    std::vector<double> c(env_.action_dim());
    std::size_t rest = b;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::size_t j = rest % nb;
      rest /= nb;
      const double lo = env_.action_bounds.lo[i];
      const double hi = env_.action_bounds.hi[i];
      c[i] = j + 1 == nb ? hi : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(nb - 1);
    }
    centers_.emplace_back(std::move(c));
  }
  epsilon_ = schedule_epsilon();
}

std::size_t GridQAgent::state_bin(const StateVec& s) const {
  if (s.dim() != env_.state_dim()) throw ContractViolation("gridq: state dimension mismatch");
  const int nb = params_.state_bins;
  std::size_t index = 0;
  std::size_t stride = 1;
  for (std::size_t i = 0; i < s.dim(); ++i) {
    const double lo = env_.state_bounds.lo[i];
    const double hi = env_.state_bounds.hi[i];
    int j = static_cast<int>(std::floor((s[i] - lo) / (hi - lo) * nb));
    j = std::clamp(j, 0, nb - 1);
    index += static_cast<std::size_t>(j) * stride;
    stride *= static_cast<std::size_t>(nb);
  }
  return index;
}

std::size_t GridQAgent::action_bin(const ActionVec& a) const {
  if (a.dim() != env_.action_dim()) throw ContractViolation("gridq: action dimension mismatch");
  const int nb = params_.action_bins;
  std::size_t index = 0;
  std::size_t stride = 1;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double lo = env_.action_bounds.lo[i];
    const double hi = env_.action_bounds.hi[i];
    int j = static_cast<int>(std::lround((a[i] - lo) / (hi - lo) * (nb - 1)));
    j = std::clamp(j, 0, nb - 1);
    index += static_cast<std::size_t>(j) * stride;
    stride *= static_cast<std::size_t>(nb);
  }
  return index;
}

ActionVec GridQAgent::action_center(std::size_t bin) const { return centers_.at(bin); }

std::size_t GridQAgent::greedy(int h, std::size_t sbin) const {
  const double* row = &q_[offset(h, sbin)];
  std::size_t best = 0;
  for (std::size_t a = 1; a < n_action_; ++a)
    if (row[a] > row[best]) best = a;
  return best;
}

double GridQAgent::schedule_epsilon() const {
  const double eps = params_.epsilon_start / (1.0 + static_cast<double>(episodes_) / params_.epsilon_decay);
  return std::max(params_.epsilon_min, eps);
}

ActionVec GridQAgent::act(int h, const StateVec& s, bool explore) {
  if (h < 1 || h > env_.horizon) throw ContractViolation("gridq: step index out of range");
  const std::size_t sbin = state_bin(s);
  if (explore && uniform(rng_, 0.0, 1.0) < epsilon_) return centers_[uniform_index(rng_, n_action_)];
  return centers_[greedy(h, sbin)];
}

void GridQAgent::observe(const Transition& t) {
  if (t.h < 1 || t.h > env_.horizon) throw ContractViolation("gridq: step index out of range");
  const std::size_t idx = offset(t.h, state_bin(t.state)) + action_bin(t.action);
  double target = t.reward;
  if (!t.terminal && t.h < env_.horizon) target += q_[offset(t.h + 1, state_bin(t.next_state)) + greedy(t.h + 1, state_bin(t.next_state))];

  const std::uint32_t n = ++visits_[idx];
  const double lr = fixed_lr_ >= 0.0 ? fixed_lr_ : std::max(params_.lr_min, 1.0 / n);
  const double steps_left = env_.horizon - t.h + 1;
  q_[idx] = std::clamp(q_[idx] + lr * (target - q_[idx]), steps_left * std::min(0.0, env_.reward_lo),
                       steps_left * std::max(0.0, env_.reward_hi));
}

void GridQAgent::end_episode(std::span<const Transition>) {
  ++episodes_;
  epsilon_ = schedule_epsilon();
}

void GridQAgent::save(std::ostream& os) const {
  os.write(kMagic, sizeof(kMagic));
  put(os, static_cast<std::int32_t>(env_.horizon));
  put(os, static_cast<std::uint64_t>(n_state_));
  put(os, static_cast<std::uint64_t>(n_action_));
  put(os, episodes_);
  os.write(reinterpret_cast<const char*>(q_.data()), static_cast<std::streamsize>(q_.size() * sizeof(double)));
  os.write(reinterpret_cast<const char*>(visits_.data()),
           static_cast<std::streamsize>(visits_.size() * sizeof(std::uint32_t)));
}

void GridQAgent::load(std::istream& is) {
  char magic[sizeof(kMagic)];
  if (!is.read(magic, sizeof(magic)) || std::string(magic, sizeof(magic)) != std::string(kMagic, sizeof(kMagic)))
    throw ConfigError("not a gridq snapshot");
  if (take<std::int32_t>(is) != env_.horizon || take<std::uint64_t>(is) != n_state_ ||
      take<std::uint64_t>(is) != n_action_)
    throw ConfigError("gridq snapshot does not match this agent's shape");
  episodes_ = take<std::int64_t>(is);
  if (!is.read(reinterpret_cast<char*>(q_.data()), static_cast<std::streamsize>(q_.size() * sizeof(double))) ||
      !is.read(reinterpret_cast<char*>(visits_.data()),
               static_cast<std::streamsize>(visits_.size() * sizeof(std::uint32_t))))
    throw ConfigError("truncated gridq snapshot");
  epsilon_ = schedule_epsilon();
}

}  // namespace adversarl
