#include "adversarl/attack/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include "adversarl/core/errors.hpp"
#include "adversarl/core/rng.hpp"

namespace adversarl {
namespace {

constexpr char kCacheMagic[8] = {'A', 'D', 'V', 'P', 'L', 'A', 'N', '1'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_pod(std::istream& is, T& v) {
  return static_cast<bool>(is.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

template <typename T>
void write_vec(std::ostream& os, const std::vector<T>& v) {
  write_pod(os, static_cast<std::uint64_t>(v.size()));
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
bool read_vec(std::istream& is, std::vector<T>& v, std::uint64_t expected) {
  std::uint64_t n = 0;
  if (!read_pod(is, n) || n != expected) return false;
  v.resize(n);
  return static_cast<bool>(is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T))));
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

PlannerResolution default_resolution(const EnvSpec& env) {
  if (env.state_dim() == 1 && env.action_dim() == 1) return {201, 201};
  return {41, 21};
}

// ---------------------------------------------------------------------------

UniformGrid::UniformGrid(Box bounds, int points_per_axis) : bounds_(std::move(bounds)), points_(points_per_axis) {
  bounds_.validate("planner grid");
  if (points_per_axis < 2) throw ConfigError("planner grids need at least 2 points per axis");
  const double total = std::pow(static_cast<double>(points_per_axis), static_cast<double>(bounds_.dim()));
  if (total > 5e7) throw ConfigError("planner grid too large; use the sampled worst-action source instead");
  size_ = static_cast<std::size_t>(std::llround(total));
}

std::vector<double> UniformGrid::point(std::size_t index) const {
  std::vector<double> x(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    const std::size_t j = index % static_cast<std::size_t>(points_);
    index /= static_cast<std::size_t>(points_);
    const double step = (bounds_.hi[i] - bounds_.lo[i]) / (points_ - 1);
    x[i] = j + 1 == static_cast<std::size_t>(points_) ? bounds_.hi[i] : bounds_.lo[i] + step * static_cast<double>(j);
  }
  return x;
}

std::size_t UniformGrid::nearest(std::span<const double> x) const {
  std::size_t index = 0;
  std::size_t stride = 1;
  for (std::size_t i = 0; i < dim(); ++i) {
    const double step = (bounds_.hi[i] - bounds_.lo[i]) / (points_ - 1);
    const double j = std::round((x[i] - bounds_.lo[i]) / step);
    const auto clamped = static_cast<std::size_t>(std::clamp(j, 0.0, static_cast<double>(points_ - 1)));
    index += clamped * stride;
    stride *= static_cast<std::size_t>(points_);
  }
  return index;
}

// ---------------------------------------------------------------------------

PlannerGrid::PlannerGrid(UniformGrid states, UniformGrid actions, int horizon)
    : states_(std::move(states)), actions_(std::move(actions)), horizon_(horizon) {
  const std::size_t per_step = states_.size();
  q_.assign(static_cast<std::size_t>(horizon) * per_step * actions_.size(), 0.0);
  v_.assign(static_cast<std::size_t>(horizon) * per_step, 0.0);
  worst_.assign(static_cast<std::size_t>(horizon) * per_step, 0);
}

double PlannerGrid::v(int h, std::size_t si) const {
  if (h == horizon_ + 1) return 0.0;
  return v_[w_offset(h, si)];
}

PlannerGrid plan(const Environment& env, const TargetPolicySpec& target, const PlannerResolution& res,
                 unsigned threads) {
  const EnvSpec& spec = env.spec();
  PlannerGrid grid(UniformGrid(spec.state_bounds, res.state_points), UniformGrid(spec.action_bounds, res.action_points),
                   spec.horizon);
  const std::size_t n_states = grid.states_.size();
  const std::size_t n_actions = grid.actions_.size();

  std::vector<ActionVec> actions;
  actions.reserve(n_actions);
  for (std::size_t ai = 0; ai < n_actions; ++ai) actions.push_back(grid.action_at(ai));

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_states));

  double delta_min = std::numeric_limits<double>::infinity();
  for (int h = spec.horizon; h >= 1; --h) {
    std::vector<double> gaps(n_states, 0.0);
    std::vector<std::string> errors(threads);
    auto sweep = [&](unsigned t) {
      for (std::size_t si = t; si < n_states; si += threads) {
        const StateVec s = grid.state_at(si);
        const ActionVec best_target = target.target_action(h, s);
        double best_in = -std::numeric_limits<double>::infinity();
        double worst = std::numeric_limits<double>::infinity();
        std::uint32_t worst_idx = 0;
        const std::size_t base = grid.q_offset(h, si);
        for (std::size_t ai = 0; ai < n_actions; ++ai) {
          const ActionVec& a = actions[ai];
          double q = spec.normalize_reward(env.reward(s, a));
          if (!env.terminates(s, a)) q += grid.v(h + 1, grid.nearest_state(env.transition(s, a)));
          grid.q_[base + ai] = q;
          if (target.distance(a, best_target) <= target.radius) best_in = std::max(best_in, q);
          if (q < worst) {
            worst = q;
            worst_idx = static_cast<std::uint32_t>(ai);
          }
        }
        if (best_in == -std::numeric_limits<double>::infinity()) {
          std::ostringstream os;
          os << "no grid action lies within r_a of the target action at step " << h << "; refine the action grid";
          errors[t] = os.str();
          return;
        }
        grid.v_[grid.w_offset(h, si)] = best_in;
        grid.worst_[grid.w_offset(h, si)] = worst_idx;
        gaps[si] = best_in - worst;
      }
    };
    if (threads == 1) {
      sweep(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(sweep, t);
    }
    for (const std::string& e : errors) {
      if (!e.empty()) throw ConfigError(e);
    }
    for (double g : gaps) delta_min = std::min(delta_min, g);
  }
  grid.delta_min_ = delta_min;
  if (!(delta_min > 0.0)) {
    std::ostringstream os;
    os << "target policy is globally worst: min gap V - Q(worst) = " << delta_min << " <= 0";
    throw TargetInfeasible(os.str());
  }
  return grid;
}

std::uint64_t planner_cache_key(const EnvSpec& env, double radius, const PlannerResolution& res) {
  std::ostringstream os;
  os << std::setprecision(17) << env.name << '|' << env.horizon << '|' << radius << '|' << res.state_points << '|'
     << res.action_points;
  return fnv1a(os.str());
}

void PlannerGrid::save(const std::filesystem::path& path, std::uint64_t key) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write planner cache " + path.string());
  os.write(kCacheMagic, sizeof(kCacheMagic));
  write_pod(os, key);
  write_pod(os, static_cast<std::int32_t>(horizon_));
  write_pod(os, static_cast<std::int32_t>(states_.points_per_axis()));
  write_pod(os, static_cast<std::int32_t>(actions_.points_per_axis()));
  write_vec(os, states_.bounds().lo);
  write_vec(os, states_.bounds().hi);
  write_vec(os, actions_.bounds().lo);
  write_vec(os, actions_.bounds().hi);
  write_pod(os, delta_min_);
  write_vec(os, v_);
  write_vec(os, worst_);
  write_vec(os, q_);
}

std::optional<PlannerGrid> PlannerGrid::load(const std::filesystem::path& path, std::uint64_t key) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[sizeof(kCacheMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) return std::nullopt;
  std::uint64_t stored_key = 0;
  std::int32_t horizon = 0, sp = 0, ap = 0;
  if (!read_pod(is, stored_key) || stored_key != key) return std::nullopt;
  if (!read_pod(is, horizon) || !read_pod(is, sp) || !read_pod(is, ap)) return std::nullopt;
  Box sb, ab;
  auto read_bounds = [&](std::vector<double>& v) {
    std::uint64_t n = 0;
    if (!read_pod(is, n) || n == 0 || n > 64) return false;
    v.resize(n);
    return static_cast<bool>(is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double))));
  };
  if (!read_bounds(sb.lo) || !read_bounds(sb.hi) || !read_bounds(ab.lo) || !read_bounds(ab.hi)) return std::nullopt;
  try {
    PlannerGrid g(UniformGrid(sb, sp), UniformGrid(ab, ap), horizon);
    if (!read_pod(is, g.delta_min_)) return std::nullopt;
    if (!read_vec(is, g.v_, g.v_.size()) || !read_vec(is, g.worst_, g.worst_.size()) ||
        !read_vec(is, g.q_, g.q_.size())) {
      return std::nullopt;
    }
    return g;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

PlannerGrid plan_cached(const Environment& env, const TargetPolicySpec& target, const PlannerResolution& res,
                        const std::filesystem::path& cache_dir) {
  if (cache_dir.empty()) return plan(env, target, res);
  const std::uint64_t key = planner_cache_key(env.spec(), target.radius, res);
  std::ostringstream name;
  name << "planner_" << std::hex << std::setw(16) << std::setfill('0') << key << ".bin";
  const std::filesystem::path file = cache_dir / name.str();
  if (auto cached = PlannerGrid::load(file, key)) return std::move(*cached);
  PlannerGrid g = plan(env, target, res);
  std::filesystem::create_directories(cache_dir);
  g.save(file, key);
  return g;
}

// ---------------------------------------------------------------------------

SampledWorstAction::SampledWorstAction(const Environment& env, TargetPolicySpec target, int samples,
                                       std::uint64_t seed)
    : env_(env), target_(std::move(target)) {
  if (samples < 1) throw ConfigError("sampled worst action needs at least one sample");
  Rng rng = make_rng(seed, 0x5A3D);
  const Box& ab = env.spec().action_bounds;
  candidates_.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    std::vector<double> a(ab.dim());
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = uniform(rng, ab.lo[j], ab.hi[j]);
    candidates_.emplace_back(std::move(a));
  }
}

double SampledWorstAction::target_value(int h, StateVec s) const {
  const EnvSpec& spec = env_.spec();
  double v = 0.0;
  for (int j = h; j <= spec.horizon; ++j) {
    const ActionVec a = target_.target_action(j, s);
    v += spec.normalize_reward(env_.reward(s, a));
    if (env_.terminates(s, a)) break;
    s = env_.transition(s, a);
  }
  return v;
}

ActionVec SampledWorstAction::worst_action(int h, const StateVec& s) const {
  const EnvSpec& spec = env_.spec();
  double worst = std::numeric_limits<double>::infinity();
  std::size_t idx = 0;
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    const ActionVec& a = candidates_[i];
    double q = spec.normalize_reward(env_.reward(s, a));
    if (!env_.terminates(s, a)) q += target_value(h + 1, env_.transition(s, a));
    if (q < worst) {
      worst = q;
      idx = i;
    }
  }
  return candidates_[idx];
}

double SampledWorstAction::delta_min_hat() const { return std::numeric_limits<double>::quiet_NaN(); }

// ---------------------------------------------------------------------------

OracleAttacker::OracleAttacker(TargetPolicySpec target, int warmup_episodes,
                               std::shared_ptr<const WorstActionSource> worst)
    : target_(std::move(target)), warmup_(warmup_episodes), worst_(std::move(worst)) {
  if (!worst_) throw ContractViolation("oracle attacker needs a worst-action source");
}

Interception OracleAttacker::intercept(std::int64_t k, int h, const StateVec& s, const ActionVec& agent_action) {
  const bool in_target = target_.in_target_space(h, s, agent_action);
  if (k <= warmup_ || in_target) return Interception{agent_action, false, in_target};
  return Interception{worst_->worst_action(h, s), true, false};
}

}  // namespace adversarl
