#include "adversarl/agents/actor_critic.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "adversarl/core/errors.hpp"

namespace adversarl {

namespace {

constexpr char kHeader[] = "actorcritic-snapshot-1";

void check_params(const ActorCriticParams& p) {
  if (p.hidden < 1) throw ConfigError("ac_hidden must be >= 1");
  if (!(p.actor_lr >= 0.0) || !(p.critic_lr >= 0.0)) throw ConfigError("ac learning rates must be >= 0");
  if (!(p.momentum >= 0.0 && p.momentum < 1.0)) throw ConfigError("ac_momentum must be in [0, 1)");
  if (!(p.tau > 0.0 && p.tau <= 1.0)) throw ConfigError("ac_tau must be in (0, 1]");
  if (p.batch_size < 1) throw ConfigError("ac_batch_size must be >= 1");
  if (p.replay_capacity < p.batch_size) throw ConfigError("ac_replay_capacity must be >= ac_batch_size");
  if (p.learn_start < p.batch_size) throw ConfigError("ac_learn_start must be >= ac_batch_size");
  if (p.train_every < 1) throw ConfigError("ac_train_every must be >= 1");
  if (!(p.noise >= 0.0)) throw ConfigError("ac_noise must be >= 0");
}

}  // namespace

ActorCriticAgent::ActorCriticAgent(const EnvSpec& env, ActorCriticParams params, std::uint64_t seed)
    : env_(env),
      params_((check_params(params), params)),
      rng_(make_rng(seed, 0)),
      in_dim_(static_cast<int>(env.state_dim()) + 1),
      act_dim_(static_cast<int>(env.action_dim())),
      actor_({in_dim_, params.hidden, params.hidden, act_dim_}, rng_, params.zero_init_output),
      critic_({in_dim_ + act_dim_, params.hidden, params.hidden, 1}, rng_, params.zero_init_output),
      target_actor_(actor_),
      target_critic_(critic_),
      actor_opt_(actor_, params.actor_lr, params.momentum),
      critic_opt_(critic_, params.critic_lr, params.momentum) {
  env_.validate();
  const auto cap = static_cast<Eigen::Index>(params_.replay_capacity);
  replay_x_.resize(in_dim_, cap);
  replay_a_.resize(act_dim_, cap);
  replay_r_.resize(cap);
  replay_next_.resize(in_dim_, cap);
  replay_done_.resize(cap);
}

Eigen::VectorXd ActorCriticAgent::features(int h, const StateVec& s) const {
  if (s.dim() != env_.state_dim()) throw ContractViolation("actorcritic: state dimension mismatch");
  Eigen::VectorXd x(in_dim_);
  for (std::size_t i = 0; i < s.dim(); ++i) {
    const double lo = env_.state_bounds.lo[i];
    const double hi = env_.state_bounds.hi[i];
    x(static_cast<Eigen::Index>(i)) = 2.0 * (s[i] - lo) / (hi - lo) - 1.0;
  }
  x(in_dim_ - 1) = env_.horizon == 1 ? 0.0 : 2.0 * (h - 1) / (env_.horizon - 1.0) - 1.0;
  return x;
}

Eigen::VectorXd ActorCriticAgent::scale_action(const ActionVec& a) const {
  if (a.dim() != env_.action_dim()) throw ContractViolation("actorcritic: action dimension mismatch");
  Eigen::VectorXd out(act_dim_);
  for (int i = 0; i < act_dim_; ++i) {
    const double lo = env_.action_bounds.lo[i];
    const double hi = env_.action_bounds.hi[i];
    out(i) = std::clamp(2.0 * (a[i] - lo) / (hi - lo) - 1.0, -1.0, 1.0);
  }
  return out;
}

ActionVec ActorCriticAgent::unscale_action(const Eigen::VectorXd& a) const {
  std::vector<double> out(static_cast<std::size_t>(act_dim_));
  for (int i = 0; i < act_dim_; ++i) {
    const double lo = env_.action_bounds.lo[i];
    const double hi = env_.action_bounds.hi[i];
    out[i] = std::clamp(lo + (std::clamp(a(i), -1.0, 1.0) + 1.0) * 0.5 * (hi - lo), lo, hi);
  }
  return ActionVec(std::move(out));
}

Eigen::MatrixXd ActorCriticAgent::policy(const Mlp& net, const Eigen::MatrixXd& x, Mlp::Cache* cache) const {
  return net.forward(x, cache).array().tanh();
}

ActionVec ActorCriticAgent::act(int h, const StateVec& s, bool explore) {
  Eigen::VectorXd a = policy(actor_, features(h, s), nullptr).col(0);
  if (explore && params_.noise > 0.0)
    for (int i = 0; i < act_dim_; ++i) a(i) = std::clamp(a(i) + params_.noise * standard_normal(rng_), -1.0, 1.0);
  return unscale_action(a);
}

void ActorCriticAgent::observe(const Transition& t) {
  const auto slot = static_cast<Eigen::Index>(cursor_);
  replay_x_.col(slot) = features(t.h, t.state);
  replay_a_.col(slot) = scale_action(t.action);
  replay_r_(slot) = t.reward;
  const bool done = t.terminal || t.h >= env_.horizon;
  replay_next_.col(slot) = done ? features(t.h, t.state) : features(t.h + 1, t.next_state);
  replay_done_(slot) = done ? 1.0 : 0.0;
  cursor_ = (cursor_ + 1) % static_cast<std::size_t>(params_.replay_capacity);
  stored_ = std::min(stored_ + 1, static_cast<std::size_t>(params_.replay_capacity));

  if (stored_ < static_cast<std::size_t>(params_.learn_start)) return;
  if (++since_train_ % static_cast<std::uint64_t>(params_.train_every) != 0) return;
  train_step(sample_batch());
}

void ActorCriticAgent::end_episode(std::span<const Transition>) {}

AcBatch ActorCriticAgent::sample_batch() {
  if (stored_ == 0) throw ContractViolation("actorcritic: sampling from an empty replay buffer");
  const int n = params_.batch_size;
  AcBatch b{Eigen::MatrixXd(in_dim_, n), Eigen::MatrixXd(act_dim_, n), Eigen::VectorXd(n),
            Eigen::MatrixXd(in_dim_, n), Eigen::VectorXd(n)};
  for (int j = 0; j < n; ++j) {
    const auto i = static_cast<Eigen::Index>(uniform_index(rng_, stored_));
    b.x.col(j) = replay_x_.col(i);
    b.a.col(j) = replay_a_.col(i);
    b.r(j) = replay_r_(i);
    b.x_next.col(j) = replay_next_.col(i);
    b.done(j) = replay_done_(i);
  }
  return b;
}

double ActorCriticAgent::critic_loss(const AcBatch& batch, Mlp::Gradients* grads) const {
  const auto n = static_cast<double>(batch.x.cols());
  Eigen::MatrixXd next_in(in_dim_ + act_dim_, batch.x.cols());
  next_in << batch.x_next, policy(target_actor_, batch.x_next, nullptr);
  const Eigen::VectorXd boot = target_critic_.forward(next_in).row(0).transpose();
  const Eigen::VectorXd y = batch.r.array() + (1.0 - batch.done.array()) * boot.array();

  Eigen::MatrixXd in(in_dim_ + act_dim_, batch.x.cols());
  in << batch.x, batch.a;
  Mlp::Cache cache;
  const Eigen::VectorXd q = critic_.forward(in, &cache).row(0).transpose();
  const Eigen::VectorXd err = q - y;
  if (grads) {
    const Eigen::MatrixXd dq = (2.0 / n * err).transpose();
    critic_.backward(cache, dq, *grads);
  }
  return err.squaredNorm() / n;
}

double ActorCriticAgent::actor_loss(const AcBatch& batch, Mlp::Gradients* grads) const {
  const auto n = static_cast<double>(batch.x.cols());
  Mlp::Cache actor_cache;
  const Eigen::MatrixXd a = policy(actor_, batch.x, &actor_cache);
  Eigen::MatrixXd in(in_dim_ + act_dim_, batch.x.cols());
  in << batch.x, a;
  Mlp::Cache critic_cache;
  const Eigen::MatrixXd q = critic_.forward(in, &critic_cache);
  if (grads) {
    Mlp::Gradients unused;
    const Eigen::MatrixXd dq = Eigen::MatrixXd::Constant(1, batch.x.cols(), -1.0 / n);
    const Eigen::MatrixXd din = critic_.backward(critic_cache, dq, unused);
    const Eigen::MatrixXd dz = din.bottomRows(act_dim_).array() * (1.0 - a.array().square());
    actor_.backward(actor_cache, dz, *grads);
  }
  return -q.sum() / n;
}

void ActorCriticAgent::soft_update_targets() {
  soft_update(target_actor_, actor_, params_.tau);
  soft_update(target_critic_, critic_, params_.tau);
}

void ActorCriticAgent::train_step(const AcBatch& batch) {
  Mlp::Gradients g;
  critic_loss(batch, &g);
  critic_opt_.step(critic_, g);
  actor_loss(batch, &g);
  actor_opt_.step(actor_, g);
  soft_update_targets();
}

void ActorCriticAgent::save(std::ostream& os) const {
  os << kHeader << '\n';
  actor_.save(os);
  critic_.save(os);
  target_actor_.save(os);
  target_critic_.save(os);
}

void ActorCriticAgent::load(std::istream& is) {
  std::string header;
  if (!(is >> header) || header != kHeader) throw ConfigError("not an actorcritic snapshot");
  actor_.load(is);
  critic_.load(is);
  target_actor_.load(is);
  target_critic_.load(is);
}

}  // namespace adversarl
