#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these reuse the library's internal tables except where noted.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "adversarl/attack/cover_tree.hpp"
#include "adversarl/attack/oracle.hpp"
#include "adversarl/core/rng.hpp"
#include "adversarl/envs/environment.hpp"

namespace adversarl::testing {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Lower confidence bound written out term by term.
inline double reference_lcb(const TreeNode& n, std::uint32_t cell, const LcbContext& ctx, double nu1, double rho) {
  const auto it = n.stats.find(cell);
  if (it == n.stats.end() || it->second.count == 0) return kNegInf;
  const double t = static_cast<double>(it->second.count);
  const double steps_left = ctx.horizon - ctx.h + 1;
  const double log_term = std::log(2.0 * ctx.cells * static_cast<double>(ctx.k) *
                                   static_cast<double>(ctx.total_nodes) / ctx.delta1);
  double size = nu1;
  for (int d = 0; d < n.depth; ++d) size *= rho;
  return it->second.qhat - steps_left / std::sqrt(2.0 * t) * std::sqrt(log_term) - ctx.cell_diameter - size;
}

/// B = L at a leaf, max(L, min(B_left, B_right)) otherwise; plain recursion.
/// L comes from CoverTree::lcb, which is checked against reference_lcb on
/// its own.
inline double reference_bvalue(const CoverTree& tree, int id, std::uint32_t cell, const LcbContext& ctx) {
  const TreeNode& n = tree.node(id);
  const double l = tree.lcb(id, cell, ctx);
  if (n.is_leaf()) return l;
  return std::max(l, std::min(reference_bvalue(tree, n.left, cell, ctx), reference_bvalue(tree, n.right, cell, ctx)));
}

/// Root-to-leaf descent choosing the smaller B, left on ties, recomputing
/// every B from scratch.
inline std::vector<int> reference_descent(const CoverTree& tree, std::uint32_t cell, const LcbContext& ctx) {
  std::vector<int> path{0};
  int id = 0;
  while (!tree.node(id).is_leaf()) {
    const TreeNode& n = tree.node(id);
    id = reference_bvalue(tree, n.left, cell, ctx) <= reference_bvalue(tree, n.right, cell, ctx) ? n.left : n.right;
    path.push_back(id);
  }
  return path;
}

/// Random tree over [-1, 1]^dim with up to 40 random splits and up to 300
/// records in cells 0..2. Means come from a small set so ties are common.
inline CoverTree random_tree(Rng& rng, std::size_t dim) {
  const Box a{std::vector<double>(dim, -1.0), std::vector<double>(dim, 1.0)};
  CoverTree t(a, dim == 1 ? a.diameter() : 1.2 * a.diameter(), std::pow(2.0, -1.0 / static_cast<double>(dim)));
  const int splits = static_cast<int>(uniform_index(rng, 40));
  for (int i = 0; i < splits; ++i) {
    std::vector<int> leaves;
    for (std::size_t id = 0; id < t.size(); ++id)
      if (t.node(static_cast<int>(id)).is_leaf()) leaves.push_back(static_cast<int>(id));
    t.split(leaves[uniform_index(rng, leaves.size())]);
  }
  const int records = static_cast<int>(uniform_index(rng, 300));
  for (int i = 0; i < records; ++i) {
    const int id = static_cast<int>(uniform_index(rng, t.size()));
    t.record(id, static_cast<std::uint32_t>(uniform_index(rng, 3)), static_cast<double>(uniform_index(rng, 4)));
  }
  return t;
}

struct AttackedMdpCheck {
  std::size_t pairs = 0;          // (h, grid state) pairs examined
  std::size_t in_target_optimal = 0;
  double min_margin = std::numeric_limits<double>::infinity();  // best in-target minus best out-of-target
};

/// Exact backward induction on the planner grid of the MDP the agent faces
/// under the oracle attack: every out-of-target grid action is replaced by
/// the planner's worst action before the environment sees it. Counts the
/// (h, state) pairs whose optimal action is in the target space. Rewards,
/// transitions and the target set are recomputed from the environment.
inline AttackedMdpCheck attacked_mdp_value_iteration(const Environment& env, const TargetPolicySpec& target,
                                                     const PlannerGrid& grid) {
  const EnvSpec& spec = env.spec();
  const int H = grid.horizon();
  const std::size_t ns = grid.states().size();
  const std::size_t na = grid.actions().size();
  std::vector<double> next(ns, 0.0);
  std::vector<double> cur(ns, 0.0);
  AttackedMdpCheck out;
  for (int h = H; h >= 1; --h) {
    for (std::size_t si = 0; si < ns; ++si) {
      const StateVec s = grid.state_at(si);
      const ActionVec worst = grid.action_at(grid.worst_action_index(h, si));
      double best_in = kNegInf;
      double best_out = kNegInf;
      for (std::size_t ai = 0; ai < na; ++ai) {
        const ActionVec a = grid.action_at(ai);
        const bool in = target.in_target_space(h, s, a);
        const ActionVec& executed = in ? a : worst;
        double q = spec.normalize_reward(env.reward(s, executed));
        if (!env.terminates(s, executed)) q += next[grid.nearest_state(env.transition(s, executed))];
        (in ? best_in : best_out) = std::max(in ? best_in : best_out, q);
      }
      cur[si] = std::max(best_in, best_out);
      ++out.pairs;
      if (best_in > best_out) ++out.in_target_optimal;
      out.min_margin = std::min(out.min_margin, best_in - best_out);
    }
    std::swap(cur, next);
  }
  return out;
}

/// Mean raw return, over s0 ~ U[-0.7, 0.7], of the policy that is optimal
/// for the bin-center abstraction of the slider, rolled out on the true
/// dynamics with the same state and action bins a tabular learner uses.
inline double slider_binned_optimal_value(const SliderEnv& env, int state_bins, int action_bins) {
  const int H = env.spec().horizon;
  const auto bin_of = [&](double s) {
    return std::clamp(static_cast<int>(std::floor((s + 1.0) / 2.0 * state_bins)), 0, state_bins - 1);
  };
  const auto action_at = [&](int j) { return -1.0 + 2.0 * j / (action_bins - 1); };
  std::vector<std::vector<int>> best_action(static_cast<std::size_t>(H + 1),
                                            std::vector<int>(static_cast<std::size_t>(state_bins), 0));
  std::vector<double> next(static_cast<std::size_t>(state_bins), 0.0);
  std::vector<double> cur(next.size(), 0.0);
  for (int h = H; h >= 1; --h) {
    for (int b = 0; b < state_bins; ++b) {
      const StateVec sv{-1.0 + (b + 0.5) * 2.0 / state_bins};
      double best = kNegInf;
      for (int j = 0; j < action_bins; ++j) {
        const ActionVec av{action_at(j)};
        double q = env.reward(sv, av);
        if (!env.terminates(sv, av)) q += next[static_cast<std::size_t>(bin_of(env.transition(sv, av)[0]))];
        if (q > best) {
          best = q;
          best_action[static_cast<std::size_t>(h)][static_cast<std::size_t>(b)] = j;
        }
      }
      cur[static_cast<std::size_t>(b)] = best;
    }
    std::swap(cur, next);
  }
  double sum = 0.0;
  const int n = 14000;
  for (int i = 0; i < n; ++i) {
    StateVec s{-0.7 + 1.4 * (i + 0.5) / n};
    for (int h = 1; h <= H; ++h) {
      const ActionVec a{action_at(best_action[static_cast<std::size_t>(h)][static_cast<std::size_t>(bin_of(s[0]))])};
      sum += env.reward(s, a);
      if (env.terminates(s, a)) break;
      s = env.transition(s, a);
    }
  }
  return sum / n;
}

}  // namespace adversarl::testing
