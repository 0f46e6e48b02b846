#include "adversarl/harness/experiment.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "adversarl/attack/lcbt.hpp"
#include "adversarl/core/errors.hpp"

namespace adversarl {

namespace {

constexpr std::array kSchema{
    ConfigKey{"env", "slider", "environment: slider | vehicle2 | vehicle5"},
    ConfigKey{"horizon", "10", "steps per episode H"},
    ConfigKey{"agent", "gridq", "learner: gridq | actorcritic | external"},
    ConfigKey{"attacker", "lcbt", "attacker: none | oracle | lcbt"},
    ConfigKey{"episodes", "20000", "training episodes K"},
    ConfigKey{"seed", "1", "run seed; every random stream derives from it"},
    ConfigKey{"r_a", "0.0625", "radius of the target action space"},
    ConfigKey{"warmup_episodes", "0", "episodes without attacks at the start"},
    ConfigKey{"delta1", "0.05", "LCBT confidence parameter in (0,1)"},
    ConfigKey{"nu1", "auto", "LCBT cell-diameter constant; auto = diam(A), times 1.2 in multi-D"},
    ConfigKey{"rho", "auto", "LCBT shrink factor in (0,1); auto = 2^(-1/action_dim)"},
    ConfigKey{"m_per_axis", "16", "LCBT state cells per axis"},
    ConfigKey{"gridq_state_bins", "16", "gridq state bins per axis"},
    ConfigKey{"gridq_action_bins", "17", "gridq action bins per axis, endpoints included"},
    ConfigKey{"gridq_epsilon_start", "1", "gridq initial exploration rate"},
    ConfigKey{"gridq_epsilon_min", "0.01", "gridq exploration floor"},
    ConfigKey{"gridq_epsilon_decay", "200", "gridq epsilon = start / (1 + k / decay)"},
    ConfigKey{"gridq_lr_min", "0.05", "gridq step size floor; step size is max(lr_min, 1/visits)"},
    ConfigKey{"gridq_optimistic", "true", "gridq starts every Q value at the largest return still reachable"},
    ConfigKey{"ac_hidden", "64", "actorcritic hidden units per layer"},
    ConfigKey{"ac_actor_lr", "0.0001", "actorcritic actor step size"},
    ConfigKey{"ac_critic_lr", "0.001", "actorcritic critic step size"},
    ConfigKey{"ac_momentum", "0.9", "actorcritic momentum"},
    ConfigKey{"ac_tau", "0.005", "actorcritic soft target update coefficient"},
    ConfigKey{"ac_batch_size", "64", "actorcritic minibatch size"},
    ConfigKey{"ac_replay_capacity", "100000", "actorcritic replay capacity"},
    ConfigKey{"ac_learn_start", "256", "actorcritic transitions before the first update"},
    ConfigKey{"ac_train_every", "1", "actorcritic transitions per update"},
    ConfigKey{"ac_noise", "0.1", "actorcritic exploration noise, relative to the action half-width"},
    ConfigKey{"ac_zero_init_output", "false", "actorcritic zero-initialised output layers"},
    ConfigKey{"planner_state_points", "auto", "oracle planner state grid points per axis"},
    ConfigKey{"planner_action_points", "auto", "oracle planner action grid points per axis"},
    ConfigKey{"planner_cache_dir", "none", "directory for cached planner tables; none disables"},
    ConfigKey{"oracle_samples", "4096", "sampled candidate actions when the planner grid is infeasible"},
    ConfigKey{"similarity_steps", "10000", "steps of the post-training similarity test"},
    ConfigKey{"eval_episodes", "1000", "episodes of the post-training greedy evaluation"},
    ConfigKey{"timing", "false", "measure the attacker's share of wall time"},
    ConfigKey{"checkpoint_every", "auto", "episodes between checkpoints; auto = max(1, K/100)"},
    ConfigKey{"write_trees", "true", "dump LCBT trees at checkpoints"},
};

bool is_auto(const KeyValueConfig& cfg, const std::string& key) {
  const auto v = cfg.get(key);
  return !v || v->empty() || *v == "auto";
}

int get_int32(const KeyValueConfig& cfg, const std::string& key) {
  const std::int64_t v = cfg.get_int(key);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError("config key `" + key + "` is out of range");
  return static_cast<int>(v);
}

bool pick_oracle_grid(const EnvSpec& env) { return env.state_dim() <= 2 && env.action_dim() <= 2; }

}  // namespace

std::span<const ConfigKey> experiment_schema() { return kSchema; }

double ExperimentConfig::default_nu1(const EnvSpec& env) {
  const double d = env.action_bounds.diameter();
  return env.action_dim() == 1 ? d : 1.2 * d;
}

double ExperimentConfig::default_rho(const EnvSpec& env) {
  return std::pow(2.0, -1.0 / static_cast<double>(env.action_dim()));
}

ExperimentConfig ExperimentConfig::from(const KeyValueConfig& cfg) {
  ExperimentConfig c;
  c.env = cfg.get_string("env");
  c.horizon = get_int32(cfg, "horizon");
  if (c.horizon < 1) throw ConfigError("horizon must be >= 1");
  const std::unique_ptr<Environment> env = make_environment(c.env, c.horizon);
  const EnvSpec& spec = env->spec();

  c.agent = cfg.get_string("agent");
  if (c.agent == "external")
    throw ConfigError("agent `external` is driven through the language bindings, not the built-in runner");
  if (c.agent != "gridq" && c.agent != "actorcritic")
    throw ConfigError("unknown agent `" + c.agent + "`; valid agents: gridq actorcritic external");
  c.attacker = cfg.get_string("attacker");
  if (c.attacker != "none" && c.attacker != "oracle" && c.attacker != "lcbt")
    throw ConfigError("unknown attacker `" + c.attacker + "`; valid attackers: none oracle lcbt");

  c.episodes = cfg.get_int("episodes");
  if (c.episodes < 1) throw ConfigError("episodes must be >= 1");
  const std::int64_t seed = cfg.get_int("seed");
  if (seed < 0) throw ConfigError("seed must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  c.radius = cfg.get_double("r_a");
  if (!(c.radius > 0.0) || !std::isfinite(c.radius)) throw ConfigError("r_a must be > 0");

  c.attack.warmup_episodes = get_int32(cfg, "warmup_episodes");
  c.attack.delta1 = cfg.get_double("delta1");
  c.attack.nu1 = is_auto(cfg, "nu1") ? default_nu1(spec) : cfg.get_double("nu1");
  c.attack.rho = is_auto(cfg, "rho") ? default_rho(spec) : cfg.get_double("rho");
  c.attack.m_per_axis = get_int32(cfg, "m_per_axis");
  c.attack.seed = derive_seed(c.seed, static_cast<std::uint64_t>(SeedStream::attacker));
  c.attack.validate();

  c.gridq.state_bins = get_int32(cfg, "gridq_state_bins");
  c.gridq.action_bins = get_int32(cfg, "gridq_action_bins");
  c.gridq.epsilon_start = cfg.get_double("gridq_epsilon_start");
  c.gridq.epsilon_min = cfg.get_double("gridq_epsilon_min");
  c.gridq.epsilon_decay = cfg.get_double("gridq_epsilon_decay");
  c.gridq.lr_min = cfg.get_double("gridq_lr_min");
  c.gridq.optimistic = cfg.get_bool("gridq_optimistic");

  c.ac.hidden = get_int32(cfg, "ac_hidden");
  c.ac.actor_lr = cfg.get_double("ac_actor_lr");
  c.ac.critic_lr = cfg.get_double("ac_critic_lr");
  c.ac.momentum = cfg.get_double("ac_momentum");
  c.ac.tau = cfg.get_double("ac_tau");
  c.ac.batch_size = get_int32(cfg, "ac_batch_size");
  c.ac.replay_capacity = get_int32(cfg, "ac_replay_capacity");
  c.ac.learn_start = get_int32(cfg, "ac_learn_start");
  c.ac.train_every = get_int32(cfg, "ac_train_every");
  c.ac.noise = cfg.get_double("ac_noise");
  c.ac.zero_init_output = cfg.get_bool("ac_zero_init_output");

  c.planner = default_resolution(spec);
  if (!is_auto(cfg, "planner_state_points")) c.planner.state_points = get_int32(cfg, "planner_state_points");
  if (!is_auto(cfg, "planner_action_points")) c.planner.action_points = get_int32(cfg, "planner_action_points");
  if (c.planner.state_points < 2 || c.planner.action_points < 2)
    throw ConfigError("planner grids need at least 2 points per axis");
  c.planner_cache_dir = cfg.get_string("planner_cache_dir");
  if (c.planner_cache_dir == "none") c.planner_cache_dir.clear();
  c.oracle_samples = get_int32(cfg, "oracle_samples");
  if (c.oracle_samples < 1) throw ConfigError("oracle_samples must be >= 1");

  c.similarity_steps = cfg.get_int("similarity_steps");
  c.eval_episodes = cfg.get_int("eval_episodes");
  if (c.similarity_steps < 0 || c.eval_episodes < 0) throw ConfigError("similarity_steps and eval_episodes must be >= 0");
  c.timing = cfg.get_bool("timing");
  c.checkpoint_every = is_auto(cfg, "checkpoint_every") ? std::max<std::int64_t>(1, c.episodes / 100)
                                                         : cfg.get_int("checkpoint_every");
  if (c.checkpoint_every < 1) throw ConfigError("checkpoint_every must be >= 1");
  c.write_trees = cfg.get_bool("write_trees");

  // Shape checks that would otherwise fail mid-run.
  if (c.agent == "gridq") (void)GridQAgent(spec, c.gridq, 0);
  if (c.agent == "actorcritic") (void)ActorCriticAgent(spec, c.ac, 0);
  if (c.attacker == "oracle" && pick_oracle_grid(spec)) (void)UniformGrid(spec.state_bounds, c.planner.state_points);
  return c;
}

std::string ExperimentConfig::render() const {
  std::ostringstream os;
  os.precision(17);
  const auto b = [](bool v) { return v ? "true" : "false"; };
  os << "env = " << env << '\n'
     << "horizon = " << horizon << '\n'
     << "agent = " << agent << '\n'
     << "attacker = " << attacker << '\n'
     << "episodes = " << episodes << '\n'
     << "seed = " << seed << '\n'
     << "r_a = " << radius << '\n'
     << "warmup_episodes = " << attack.warmup_episodes << '\n'
     << "delta1 = " << attack.delta1 << '\n'
     << "nu1 = " << attack.nu1 << '\n'
     << "rho = " << attack.rho << '\n'
     << "m_per_axis = " << attack.m_per_axis << '\n'
     << "gridq_state_bins = " << gridq.state_bins << '\n'
     << "gridq_action_bins = " << gridq.action_bins << '\n'
     << "gridq_epsilon_start = " << gridq.epsilon_start << '\n'
     << "gridq_epsilon_min = " << gridq.epsilon_min << '\n'
     << "gridq_epsilon_decay = " << gridq.epsilon_decay << '\n'
     << "gridq_lr_min = " << gridq.lr_min << '\n'
     << "gridq_optimistic = " << (gridq.optimistic ? "true" : "false") << '\n'
     << "ac_hidden = " << ac.hidden << '\n'
     << "ac_actor_lr = " << ac.actor_lr << '\n'
     << "ac_critic_lr = " << ac.critic_lr << '\n'
     << "ac_momentum = " << ac.momentum << '\n'
     << "ac_tau = " << ac.tau << '\n'
     << "ac_batch_size = " << ac.batch_size << '\n'
     << "ac_replay_capacity = " << ac.replay_capacity << '\n'
     << "ac_learn_start = " << ac.learn_start << '\n'
     << "ac_train_every = " << ac.train_every << '\n'
     << "ac_noise = " << ac.noise << '\n'
     << "ac_zero_init_output = " << b(ac.zero_init_output) << '\n'
     << "planner_state_points = " << planner.state_points << '\n'
     << "planner_action_points = " << planner.action_points << '\n'
     << "planner_cache_dir = " << (planner_cache_dir.empty() ? "none" : planner_cache_dir) << '\n'
     << "oracle_samples = " << oracle_samples << '\n'
     << "similarity_steps = " << similarity_steps << '\n'
     << "eval_episodes = " << eval_episodes << '\n'
     << "timing = " << b(timing) << '\n'
     << "checkpoint_every = " << checkpoint_every << '\n'
     << "write_trees = " << b(write_trees) << '\n';
  return os.str();
}

std::uint64_t stream_seed(const ExperimentConfig& cfg, SeedStream stream) {
  return derive_seed(cfg.seed, static_cast<std::uint64_t>(stream));
}

std::unique_ptr<Agent> make_agent(const EnvSpec& env, const ExperimentConfig& cfg) {
  const std::uint64_t seed = stream_seed(cfg, SeedStream::agent);
  if (cfg.agent == "gridq") return std::make_unique<GridQAgent>(env, cfg.gridq, seed);
  if (cfg.agent == "actorcritic") return std::make_unique<ActorCriticAgent>(env, cfg.ac, seed);
  throw ConfigError("unknown agent `" + cfg.agent + "`");
}

std::unique_ptr<Attacker> make_attacker(const Environment& env, const TargetPolicySpec& target,
                                        const ExperimentConfig& cfg, double* delta_min_hat) {
  if (delta_min_hat) *delta_min_hat = std::numeric_limits<double>::quiet_NaN();
  if (cfg.attacker == "none") return std::make_unique<NoAttacker>(target);
  if (cfg.attacker == "lcbt") return std::make_unique<LcbtAttacker>(env.spec(), target, cfg.attack);
  if (cfg.attacker == "oracle") {
    std::shared_ptr<const WorstActionSource> worst;
    if (pick_oracle_grid(env.spec())) {
      worst = std::make_shared<GridWorstAction>(plan_cached(env, target, cfg.planner, cfg.planner_cache_dir));
    } else {
      worst = std::make_shared<SampledWorstAction>(env, target, cfg.oracle_samples, cfg.attack.seed);
    }
    if (delta_min_hat) *delta_min_hat = worst->delta_min_hat();
    return std::make_unique<OracleAttacker>(target, cfg.attack.warmup_episodes, std::move(worst));
  }
  throw ConfigError("unknown attacker `" + cfg.attacker + "`");
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  using Clock = std::chrono::steady_clock;
  RunResult out;
  out.env = make_environment(cfg.env, cfg.horizon);
  const Environment& env = *out.env;
  const EnvSpec& spec = env.spec();
  const int H = spec.horizon;
  out.target = env.builtin_target_policy(cfg.radius);
  out.agent = options.agent_factory ? options.agent_factory(spec, cfg) : make_agent(spec, cfg);
  out.attacker = make_attacker(env, out.target, cfg, &out.metrics.delta_min_hat);
  Agent& agent = *out.agent;
  Attacker& attacker = *out.attacker;
  const auto* lcbt = dynamic_cast<const LcbtAttacker*>(out.attacker.get());

  if (lcbt && cfg.write_trees && !options.tree_dir.empty()) std::filesystem::create_directories(options.tree_dir);

  Rng reset_rng = make_rng(cfg.seed, static_cast<std::uint64_t>(SeedStream::reset));
  std::int64_t cum_tau = 0;
  std::int64_t cum_alpha = 0;
  Clock::duration attacker_time{};
  Clock::duration total_time{};
  // The pass-through attacker is not timed.
  const bool time_attacker = cfg.timing && cfg.attacker != "none";
  const auto timed = [&](auto&& fn) {
    if (!time_attacker) return fn();
    const auto t0 = Clock::now();
    struct Stop {
      Clock::time_point t0;
      Clock::duration& acc;
      ~Stop() { acc += Clock::now() - t0; }
    } stop{t0, attacker_time};
    return fn();
  };

  out.metrics.episodes.reserve(static_cast<std::size_t>(cfg.episodes));
  std::vector<Transition> transitions;
  transitions.reserve(static_cast<std::size_t>(H));
  Trajectory traj;

  for (std::int64_t k = 1; k <= cfg.episodes; ++k) {
    const auto episode_start = cfg.timing ? Clock::now() : Clock::time_point{};
    transitions.clear();
    traj.episode = k;
    traj.steps.clear();
    EpisodeMetrics row;
    row.episode = k;

    StateVec s = env.reset(reset_rng);
    for (int h = 1; h <= H; ++h) {
      const ActionVec a = agent.act(h, s, true);
      const Interception icp = timed([&] { return attacker.intercept(k, h, s, a); });
      const StepOutcome outcome = env.step(s, icp.action);
      timed([&] { attacker.observe(h, outcome.raw_reward, outcome.terminal); });

      transitions.push_back(Transition{h, s, a, outcome.raw_reward, outcome.next_state, outcome.terminal});
      agent.observe(transitions.back());
      traj.steps.push_back(StepRecord{h, s, a, icp.action, outcome.raw_reward, icp.attacked, icp.in_target_space,
                                      outcome.terminal});

      row.reward_raw += outcome.raw_reward;
      row.reward_norm += spec.normalize_reward(outcome.raw_reward);
      row.attacks += icp.attacked ? 1 : 0;
      row.out_of_target += icp.in_target_space ? 0 : 1;
      s = outcome.next_state;
      if (outcome.terminal) break;
    }
    timed([&] { attacker.end_episode(k); });
    agent.end_episode(transitions);
    traj.validate(H);
    if (options.on_episode) options.on_episode(traj);

    cum_tau += row.attacks;
    cum_alpha += row.out_of_target;
    row.cum_tau = cum_tau;
    row.cum_alpha = cum_alpha;
    row.total_nodes = lcbt ? lcbt->trees().total_nodes() : 0;
    if (cfg.timing) {
      total_time += Clock::now() - episode_start;
      row.attacker_time_share =
          total_time.count() > 0 ? static_cast<double>(attacker_time.count()) / static_cast<double>(total_time.count())
                                 : 0.0;
    }
    out.metrics.episodes.push_back(row);

    if (k % cfg.checkpoint_every == 0 || k == cfg.episodes) {
      Checkpoint cp;
      cp.k = k;
      cp.attacker_time_share = row.attacker_time_share;
      if (lcbt) {
        for (int h = 1; h <= H; ++h) cp.nodes_per_step.push_back(lcbt->trees().tree(h).size());
        if (cfg.write_trees && !options.tree_dir.empty()) {
          std::ostringstream name;
          name << "tree_" << k << ".txt";
          std::ofstream f(options.tree_dir / name.str());
          write_tree_dump(f, lcbt->trees(), k);
          if (!f) throw std::runtime_error("cannot write tree dump " + (options.tree_dir / name.str()).string());
        }
      }
      out.metrics.checkpoints.push_back(std::move(cp));
    }
  }
  return out;
}

}  // namespace adversarl
