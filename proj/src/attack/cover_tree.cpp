#include "adversarl/attack/cover_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "adversarl/core/errors.hpp"

namespace adversarl {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxDepth = 62;

}  // namespace

void qhat_update(CellStats& stats, double target) {
  if (stats.count == 0) throw ContractViolation("qhat_update: count must be incremented before the update");
  const double w = 1.0 / static_cast<double>(stats.count);
  stats.qhat = (1.0 - w) * stats.qhat + w * target;
}

double confidence_radius(const LcbContext& ctx, std::uint64_t count) {
  const double log_arg = 2.0 * static_cast<double>(ctx.cells) * static_cast<double>(ctx.k) *
                         static_cast<double>(ctx.total_nodes) / ctx.delta1;
  return static_cast<double>(ctx.horizon - ctx.h + 1) / std::sqrt(2.0 * static_cast<double>(count)) *
         std::sqrt(std::log(log_arg));
}

bool expansion_due(double size_bound, const LcbContext& ctx, std::uint64_t count) {
  return count > 0 && size_bound >= confidence_radius(ctx, count);
}

double node_count_bound(std::int64_t k, double nu1, double rho, int horizon, int h, std::uint32_t cells,
                        double delta1) {
  const double remaining = static_cast<double>(horizon - h + 1);
  const double base = static_cast<double>(k) * nu1 * nu1 * (2.0 - rho * rho) /
                          (remaining * remaining * std::log(6.0 * cells * horizon / delta1)) +
                      1.0;
  const double exponent = std::log(2.0) / std::log(2.0 / (rho * rho));
  return 4.0 * std::pow(base, exponent);
}

CellStats TreeNode::stats_for(std::uint32_t cell) const {
  auto it = stats.find(cell);
  return it == stats.end() ? CellStats{} : it->second;
}

CoverTree::CoverTree(Box action_bounds, double nu1, double rho) : nu1_(nu1), rho_(rho) {
  action_bounds.validate("cover tree action bounds");
  if (!(nu1 > 0.0) || !(rho > 0.0 && rho < 1.0)) throw ContractViolation("cover tree needs nu1 > 0 and 0 < rho < 1");
  if (action_bounds.diameter() > size_bound(0)) {
    throw InvariantViolation("tree geometry", "action space diameter exceeds nu1");
  }
  add_node(0, 1, std::move(action_bounds));
  split(0);
}

double CoverTree::size_bound(int depth) const { return nu1_ * std::pow(rho_, depth); }

int CoverTree::add_node(int depth, std::uint64_t index, Box box) {
  TreeNode n;
  n.depth = depth;
  n.index = index;
  n.representative = ActionVec(box.center());
  n.box = std::move(box);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size() - 1);
}

std::pair<int, int> CoverTree::split(int id) {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) throw ContractViolation("split: no such node");
  if (!nodes_[id].is_leaf()) throw ContractViolation("split: node is not a leaf");
  const int depth = nodes_[id].depth;
  if (depth >= kMaxDepth) throw InvariantViolation("tree depth", "node index would overflow");
  const std::uint64_t index = nodes_[id].index;
  const Box& parent = nodes_[id].box;
  const std::size_t axis = static_cast<std::size_t>(depth) % parent.dim();
  const double mid = 0.5 * (parent.lo[axis] + parent.hi[axis]);

  Box lower = parent;
  Box upper = parent;
  lower.hi[axis] = mid;
  upper.lo[axis] = mid;

  const double bound = size_bound(depth + 1);
  for (const Box* b : {&lower, &upper}) {
    if (!(b->diameter() <= bound)) {
      std::ostringstream os;
      os << "diam " << b->diameter() << " > nu1*rho^" << depth + 1 << " = " << bound;
      throw InvariantViolation("tree geometry", os.str());
    }
  }

  const int left = add_node(depth + 1, 2 * index - 1, std::move(lower));
  const int right = add_node(depth + 1, 2 * index, std::move(upper));
  nodes_[id].left = left;
  nodes_[id].right = right;
  return {left, right};
}

double CoverTree::lcb(int id, std::uint32_t cell, const LcbContext& ctx) const {
  const TreeNode& n = node(id);
  const CellStats st = n.stats_for(cell);
  if (st.count == 0) return kNegInf;
  return st.qhat - confidence_radius(ctx, st.count) - ctx.cell_diameter - size_bound(n.depth);
}

std::vector<double> CoverTree::bvalues(std::uint32_t cell, const LcbContext& ctx) const {
  std::vector<double> b(nodes_.size(), kNegInf);
  // Children come after parents, so a reverse sweep is a post-order.
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const TreeNode& n = nodes_[i];
    const double l = lcb(static_cast<int>(i), cell, ctx);
    b[i] = n.is_leaf() ? l : std::max(l, std::min(b[n.left], b[n.right]));
  }
  return b;
}

TraverseResult CoverTree::wor_traverse(std::uint32_t cell, const LcbContext& ctx) const {
  const std::vector<double> b = bvalues(cell, ctx);
  TraverseResult r;
  int cur = 0;
  r.path.push_back(cur);
  while (!nodes_[cur].is_leaf()) {
    const TreeNode& n = nodes_[cur];
    cur = b[n.left] <= b[n.right] ? n.left : n.right;
    r.path.push_back(cur);
  }
  r.leaf = cur;
  return r;
}

std::uint64_t CoverTree::record(int id, std::uint32_t cell, double target) {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) throw ContractViolation("record: no such node");
  CellStats& st = nodes_[id].stats[cell];
  ++st.count;
  qhat_update(st, target);
  return st.count;
}

}  // namespace adversarl
