#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "adversarl/attack/attacker.hpp"
#include "adversarl/attack/cover_tree.hpp"
#include "adversarl/attack/state_partition.hpp"

namespace adversarl {

/// One cover tree per step h, plus the shared node total.
class CoverTreeSet {
 public:
  CoverTreeSet(const Box& action_bounds, int horizon, double nu1, double rho);

  int horizon() const noexcept { return static_cast<int>(trees_.size()); }
  CoverTree& tree(int h) { return trees_.at(static_cast<std::size_t>(h - 1)); }
  const CoverTree& tree(int h) const { return trees_.at(static_cast<std::size_t>(h - 1)); }
  std::uint64_t total_nodes() const;

 private:
  std::vector<CoverTree> trees_;
};

/// Per-step record of one episode, padded to H once the episode ends.
struct BufferedStep {
  bool seen = false;
  bool intervened = false;  // w_h == 0
  int node = -1;
  std::uint32_t cell = 0;
  double reward = 0.0;      // normalized to [0, 1]
};

class EpisodeBuffer {
 public:
  explicit EpisodeBuffer(int horizon) : steps_(static_cast<std::size_t>(horizon)) {}

  int horizon() const noexcept { return static_cast<int>(steps_.size()); }
  BufferedStep& at(int h) { return steps_.at(static_cast<std::size_t>(h - 1)); }
  const BufferedStep& at(int h) const { return steps_.at(static_cast<std::size_t>(h - 1)); }

  /// Probability the behavior policy gave the submitted action: the realized
  /// action is always the one the behavior rule prescribes, so this is 1.
  double behavior_prob(int h) const;

  /// Product of w over steps h..H; 1 iff none of them was attacked.
  /// importance_ratio(H+1) == 1.
  double importance_ratio(int h) const;

  /// Sum of normalized rewards over steps h..H; return_from(H+1) == 0.
  double return_from(int h) const;

  void clear();

 private:
  std::vector<BufferedStep> steps_;
};

/// Emitted for every statistics update in end_episode (testing/auditing).
struct LcbtUpdate {
  std::int64_t k = 0;
  int h = 0;
  int node = 0;
  std::uint32_t cell = 0;
  double target = 0.0;
  std::uint64_t count = 0;
  bool expanded = false;
};

/// Black-box attacker that searches the action space for the worst action
/// with lower-confidence-bound cover trees.
class LcbtAttacker final : public Attacker {
 public:
  LcbtAttacker(const EnvSpec& env, TargetPolicySpec target, const AttackConfig& config);

  Interception intercept(std::int64_t k, int h, const StateVec& s, const ActionVec& agent_action) override;
  void observe(int h, double raw_reward, bool terminal) override;
  void end_episode(std::int64_t k) override;
  std::string name() const override { return "lcbt"; }

  /// Context for evaluating LCB/B-values of tree h during episode k.
  LcbContext context(std::int64_t k, int h) const;

  const CoverTreeSet& trees() const noexcept { return trees_; }
  const StatePartition& partition() const noexcept { return partition_; }
  const AttackConfig& config() const noexcept { return config_; }
  const EpisodeBuffer& buffer() const noexcept { return buffer_; }

  void set_update_hook(std::function<void(const LcbtUpdate&)> hook) { hook_ = std::move(hook); }

 private:
  EnvSpec env_;
  TargetPolicySpec target_;
  AttackConfig config_;
  StatePartition partition_;
  CoverTreeSet trees_;
  EpisodeBuffer buffer_;
  std::function<void(const LcbtUpdate&)> hook_;

  std::int64_t episode_ = 0;  // episode currently being recorded, 0 if none
  int next_h_ = 1;
  bool awaiting_reward_ = false;
  bool terminated_ = false;
};

/// Writes one line per node: `h D I box cell:count:qhat ...`, preceded by a
/// `# k=<k> total_nodes=<n>` header.
void write_tree_dump(std::ostream& os, const CoverTreeSet& trees, std::int64_t k);

struct TreeDumpSummary {
  std::int64_t k = 0;
  std::vector<std::uint64_t> nodes_per_step;  // index h-1
};

/// Reads back the header and per-step node counts of a tree dump.
TreeDumpSummary read_tree_dump(std::istream& is);

}  // namespace adversarl
