#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "adversarl/core/types.hpp"

namespace adversarl {

/// Visit count and running-mean Q estimate of one (node, state cell) pair.
struct CellStats {
  std::uint64_t count = 0;
  double qhat = 0.0;
};

/// Folds `target` into the running mean. The caller increments `count`
/// first; a zero count is a contract violation.
void qhat_update(CellStats& stats, double target);

/// Everything the lower confidence bound needs besides the node itself.
struct LcbContext {
  int horizon = 10;                 // H
  int h = 1;                        // step whose tree is queried
  std::uint32_t cells = 1;          // M
  std::int64_t k = 1;               // current episode
  std::uint64_t total_nodes = 3;    // sum over all H trees
  double delta1 = 0.05;
  double cell_diameter = 0.0;       // L_s * d_s
};

/// Hoeffding radius (H-h+1)/sqrt(2T) * sqrt(ln(2 M k sum|T| / delta1)).
double confidence_radius(const LcbContext& ctx, std::uint64_t count);

struct TreeNode {
  int depth = 0;
  std::uint64_t index = 1;  // 1-based position among nodes of this depth
  Box box;
  ActionVec representative;
  int left = -1;
  int right = -1;
  std::map<std::uint32_t, CellStats> stats;  // sparse over state cells

  bool is_leaf() const noexcept { return left < 0; }
  CellStats stats_for(std::uint32_t cell) const;
};

struct TraverseResult {
  int leaf = 0;
  std::vector<int> path;  // node ids from the root to the leaf
};

/// Binary action cover tree for one step h. Nodes are stored in creation
/// order, so every child id is larger than its parent's.
class CoverTree {
 public:
  /// Builds the initial tree: the root plus its two children.
  CoverTree(Box action_bounds, double nu1, double rho);

  std::size_t size() const noexcept { return nodes_.size(); }
  const TreeNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

  /// Bisects leaf `id` across axis (depth mod action_dim). Children start
  /// with empty statistics. Throws ContractViolation for an internal node and
  /// InvariantViolation if a child breaks diam <= nu1 * rho^depth.
  std::pair<int, int> split(int id);

  /// Lower confidence bound of node `id` in state cell `cell`; -inf when the
  /// pair has never been visited.
  double lcb(int id, std::uint32_t cell, const LcbContext& ctx) const;

  /// B-values of every node for `cell`, indexed by node id.
  std::vector<double> bvalues(std::uint32_t cell, const LcbContext& ctx) const;

  /// Descends from the root towards the child with the smaller B-value
  /// (ties go left) until a leaf is reached.
  TraverseResult wor_traverse(std::uint32_t cell, const LcbContext& ctx) const;

  /// Increments the pair's count and folds `target` into its estimate.
  /// Returns the new count.
  std::uint64_t record(int id, std::uint32_t cell, double target);

  /// Size term nu1 * rho^depth.
  double size_bound(int depth) const;

  double nu1() const noexcept { return nu1_; }
  double rho() const noexcept { return rho_; }

 private:
  int add_node(int depth, std::uint64_t index, Box box);

  double nu1_;
  double rho_;
  std::vector<TreeNode> nodes_;
};

/// True when the node's size term dominates its confidence radius, i.e. it
/// has been visited often enough to be split.
bool expansion_due(double size_bound, const LcbContext& ctx, std::uint64_t count);

/// Upper bound on |T^h_k| for a tree grown by the expansion rule:
/// 4 [k nu1^2 (2 - rho^2) / ((H-h+1)^2 ln(6 M H / delta1)) + 1]^(log_{2/rho^2} 2).
double node_count_bound(std::int64_t k, double nu1, double rho, int horizon, int h, std::uint32_t cells,
                        double delta1);

}  // namespace adversarl
