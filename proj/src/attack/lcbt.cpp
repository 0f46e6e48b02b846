#include "adversarl/attack/lcbt.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "adversarl/core/errors.hpp"

namespace adversarl {

CoverTreeSet::CoverTreeSet(const Box& action_bounds, int horizon, double nu1, double rho) {
  if (horizon < 1) throw ContractViolation("cover tree set needs horizon >= 1");
  trees_.reserve(static_cast<std::size_t>(horizon));
  for (int h = 0; h < horizon; ++h) trees_.emplace_back(action_bounds, nu1, rho);
}

std::uint64_t CoverTreeSet::total_nodes() const {
  std::uint64_t n = 0;
  for (const CoverTree& t : trees_) n += t.size();
  return n;
}

double EpisodeBuffer::behavior_prob(int h) const {
  (void)at(h);
  return 1.0;
}

double EpisodeBuffer::importance_ratio(int h) const {
  double rho = 1.0;
  for (int j = horizon(); j >= h; --j) rho *= at(j).intervened ? 0.0 : 1.0;
  return rho;
}

double EpisodeBuffer::return_from(int h) const {
  double g = 0.0;
  for (int j = horizon(); j >= h; --j) g += at(j).reward;
  return g;
}

void EpisodeBuffer::clear() {
  for (BufferedStep& s : steps_) s = BufferedStep{};
}

LcbtAttacker::LcbtAttacker(const EnvSpec& env, TargetPolicySpec target, const AttackConfig& config)
    : env_(env),
      target_(std::move(target)),
      config_(config),
      partition_(env.state_bounds, config.m_per_axis),
      trees_(env.action_bounds, env.horizon, config.nu1, config.rho),
      buffer_(env.horizon) {
  config_.validate();
}

LcbContext LcbtAttacker::context(std::int64_t k, int h) const {
  LcbContext ctx;
  ctx.horizon = env_.horizon;
  ctx.h = h;
  ctx.cells = partition_.cell_count();
  ctx.k = k;
  ctx.total_nodes = trees_.total_nodes();
  ctx.delta1 = config_.delta1;
  ctx.cell_diameter = partition_.cell_diameter();
  return ctx;
}

Interception LcbtAttacker::intercept(std::int64_t k, int h, const StateVec& s, const ActionVec& agent_action) {
  if (episode_ == 0) {
    episode_ = k;
    next_h_ = 1;
  }
  if (k != episode_) throw ContractViolation("lcbt: intercept for a new episode before end_episode");
  if (terminated_) throw ContractViolation("lcbt: intercept after a terminal step");
  if (awaiting_reward_) throw ContractViolation("lcbt: intercept before the previous step's reward");
  if (h != next_h_) throw ContractViolation("lcbt: steps must be intercepted in order");

  BufferedStep& step = buffer_.at(h);
  step.seen = true;
  step.cell = partition_.cell_index(s);
  awaiting_reward_ = true;
  ++next_h_;

  const bool in_target = target_.in_target_space(h, s, agent_action);
  if (k <= config_.warmup_episodes || in_target) {
    step.intervened = false;
    return Interception{agent_action, false, in_target};
  }
  const TraverseResult tr = trees_.tree(h).wor_traverse(step.cell, context(k, h));
  step.intervened = true;
  step.node = tr.leaf;
  return Interception{trees_.tree(h).node(tr.leaf).representative, true, false};
}

void LcbtAttacker::observe(int h, double raw_reward, bool terminal) {
  if (!awaiting_reward_ || h != next_h_ - 1) throw ContractViolation("lcbt: observe without a matching intercept");
  buffer_.at(h).reward = env_.normalize_reward(raw_reward);
  awaiting_reward_ = false;
  terminated_ = terminal;
}

void LcbtAttacker::end_episode(std::int64_t k) {
  if (episode_ == 0 || k != episode_) throw ContractViolation("lcbt: end_episode without a matching episode");
  if (awaiting_reward_) throw ContractViolation("lcbt: end_episode before the last step's reward");
  if (!terminated_ && next_h_ <= env_.horizon) throw ContractViolation("lcbt: end_episode before H steps");

  // Steps after an early termination stay as padding: zero reward, w = 1.
  double g = 0.0;
  double rho = 1.0;
  if (k > config_.warmup_episodes) {
    for (int h = env_.horizon; h >= 1; --h) {
      const BufferedStep& step = buffer_.at(h);
      if (step.intervened) {
        CoverTree& tree = trees_.tree(h);
        const double target = step.reward + g * rho;
        const std::uint64_t t = tree.record(step.node, step.cell, target);
        bool expanded = false;
        if (tree.node(step.node).is_leaf() &&
            expansion_due(tree.size_bound(tree.node(step.node).depth), context(k, h), t)) {
          tree.split(step.node);
          expanded = true;
        }
        if (hook_) hook_(LcbtUpdate{k, h, step.node, step.cell, target, t, expanded});
      }
      g = step.reward + g;
      rho = (step.intervened ? 0.0 : 1.0) * rho;
    }
  }

  buffer_.clear();
  episode_ = 0;
  next_h_ = 1;
  terminated_ = false;
}

void write_tree_dump(std::ostream& os, const CoverTreeSet& trees, std::int64_t k) {
  os << "# k=" << k << " total_nodes=" << trees.total_nodes() << '\n';
  os << std::setprecision(12);
  for (int h = 1; h <= trees.horizon(); ++h) {
    for (const TreeNode& n : trees.tree(h).nodes()) {
      os << h << ' ' << n.depth << ' ' << n.index << ' ';
      for (std::size_t i = 0; i < n.box.dim(); ++i) {
        if (i) os << ',';
        os << n.box.lo[i] << ':' << n.box.hi[i];
      }
      for (const auto& [cell, st] : n.stats) os << ' ' << cell << ':' << st.count << ':' << st.qhat;
      os << '\n';
    }
  }
}

TreeDumpSummary read_tree_dump(std::istream& is) {
  TreeDumpSummary out;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("k=");
      if (pos == std::string::npos) throw ConfigError("tree dump header lacks k=");
      out.k = std::stoll(line.substr(pos + 2));
      have_header = true;
      continue;
    }
    std::istringstream ls(line);
    int h = 0;
    if (!(ls >> h) || h < 1) throw ConfigError("malformed tree dump line: " + line);
    if (out.nodes_per_step.size() < static_cast<std::size_t>(h)) out.nodes_per_step.resize(h, 0);
    ++out.nodes_per_step[h - 1];
  }
  if (!have_header) throw ConfigError("tree dump has no header");
  return out;
}

}  // namespace adversarl
