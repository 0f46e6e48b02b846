#pragma once

#include <cstdint>
#include <vector>

#include "adversarl/agents/agent.hpp"
#include "adversarl/agents/mlp.hpp"

namespace adversarl {

struct ActorCriticParams {
  int hidden = 64;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double momentum = 0.9;
  double tau = 0.005;
  int batch_size = 64;
  int replay_capacity = 100000;
  int learn_start = 256;   // transitions stored before the first update
  int train_every = 1;     // transitions between updates
  double noise = 0.1;      // Gaussian std in units of the half-width of the action box
  bool zero_init_output = false;
};

/// A minibatch in network coordinates: features are the scaled state plus a
/// step feature, actions are scaled to [-1, 1].
struct AcBatch {
  Eigen::MatrixXd x;
  Eigen::MatrixXd a;
  Eigen::VectorXd r;
  Eigen::MatrixXd x_next;
  Eigen::VectorXd done;
};

/// Deterministic policy gradient with replay and soft-updated target
/// networks. Undiscounted; an episode boundary ends bootstrapping.
class ActorCriticAgent final : public Agent {
 public:
  ActorCriticAgent(const EnvSpec& env, ActorCriticParams params, std::uint64_t seed);

  ActionVec act(int h, const StateVec& s, bool explore) override;
  void observe(const Transition& t) override;
  void end_episode(std::span<const Transition> episode) override;
  void save(std::ostream& os) const override;
  void load(std::istream& is) override;
  std::string name() const override { return "actorcritic"; }

  Eigen::VectorXd features(int h, const StateVec& s) const;
  Eigen::VectorXd scale_action(const ActionVec& a) const;
  ActionVec unscale_action(const Eigen::VectorXd& a) const;

  /// Mean squared TD error against target-network bootstraps; fills grads
  /// with its gradient wrt the critic parameters when non-null.
  double critic_loss(const AcBatch& batch, Mlp::Gradients* grads) const;
  /// -mean Q(x, mu(x)); fills grads wrt the actor parameters when non-null.
  double actor_loss(const AcBatch& batch, Mlp::Gradients* grads) const;

  AcBatch sample_batch();
  /// One critic step, one actor step, then soft target updates.
  void train_step(const AcBatch& batch);

  Mlp& actor() noexcept { return actor_; }
  Mlp& critic() noexcept { return critic_; }
  const Mlp& target_actor() const noexcept { return target_actor_; }
  const Mlp& target_critic() const noexcept { return target_critic_; }
  void soft_update_targets();
  std::size_t replay_size() const noexcept { return stored_; }
  const ActorCriticParams& params() const noexcept { return params_; }

 private:
  Eigen::MatrixXd policy(const Mlp& net, const Eigen::MatrixXd& x, Mlp::Cache* cache) const;

  EnvSpec env_;
  ActorCriticParams params_;
  Rng rng_;
  int in_dim_;
  int act_dim_;
  Mlp actor_;
  Mlp critic_;
  Mlp target_actor_;
  Mlp target_critic_;
  SgdMomentum actor_opt_;
  SgdMomentum critic_opt_;

  Eigen::MatrixXd replay_x_;
  Eigen::MatrixXd replay_a_;
  Eigen::VectorXd replay_r_;
  Eigen::MatrixXd replay_next_;
  Eigen::VectorXd replay_done_;
  std::size_t stored_ = 0;
  std::size_t cursor_ = 0;
  std::uint64_t since_train_ = 0;
};

}  // namespace adversarl
