#include "adversarl/cli/commands.hpp"

#include <cstdlib>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "adversarl/attack/state_partition.hpp"
#include "adversarl/core/errors.hpp"
#include "adversarl/harness/run_dir.hpp"

namespace adversarl::cli {

namespace {

std::string run_dir_name(const ExperimentConfig& cfg) {
  return cfg.env + "-" + cfg.agent + "-" + cfg.attacker + "-seed" + std::to_string(cfg.seed);
}

/// Maps exceptions onto the exit-code contract.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvariantViolation& e) {
    err << "invariant violated: " << e.invariant() << ": " << e.what() << '\n';
    return kCheckFailed;
  } catch (const TargetInfeasible& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
}

std::unique_ptr<Agent> load_agent(const RunPaths& paths, const ExperimentConfig& cfg) {
  if (!std::filesystem::exists(paths.snapshot()))
    throw ConfigError("run directory " + paths.dir.string() + " has no agent.snapshot");
  const auto env = make_environment(cfg.env, cfg.horizon);
  std::unique_ptr<Agent> agent = make_agent(env->spec(), cfg);
  std::ifstream f(paths.snapshot(), std::ios::binary);
  agent->load(f);
  return agent;
}

std::vector<EpisodeMetrics> load_metrics(const RunPaths& paths) {
  std::ifstream f(paths.metrics(), std::ios::binary);
  if (!f) throw ConfigError("run directory " + paths.dir.string() + " has no metrics.csv");
  return read_metrics_csv(f);
}

}  // namespace

std::filesystem::path output_root(const std::optional<std::filesystem::path>& out) {
  if (out) return *out;
  if (const char* env = std::getenv("ADVERSARL_OUT"); env != nullptr && *env != '\0') return env;
  return "runs";
}

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    KeyValueConfig kv = args.config ? KeyValueConfig::load(*args.config, experiment_schema())
                                    : KeyValueConfig(experiment_schema());
    for (const std::string& o : args.overrides) kv.set(std::string_view(o));
    if (args.seed) kv.set("seed", std::to_string(*args.seed));
    if (args.jobs < 1) throw ConfigError("--jobs must be >= 1");

    const ExperimentConfig base = ExperimentConfig::from(kv);
    std::vector<ExperimentConfig> configs;
    for (int j = 0; j < args.jobs; ++j) {
      ExperimentConfig c = base;
      c.seed = base.seed + static_cast<std::uint64_t>(j);
      c.attack.seed = derive_seed(c.seed, static_cast<std::uint64_t>(SeedStream::attacker));
      configs.push_back(std::move(c));
    }
    const std::filesystem::path root = output_root(args.out);

    std::vector<std::string> summaries(configs.size());
    std::vector<int> codes(configs.size(), kOk);
    std::vector<std::string> errors(configs.size());
    {
      std::vector<std::jthread> workers;
      for (std::size_t j = 0; j < configs.size(); ++j) {
        workers.emplace_back([&, j] {
          std::ostringstream e;
          codes[j] = guarded(e, [&] {
            const std::filesystem::path dir = root / run_dir_name(configs[j]);
            const RunReport report = execute_run(configs[j], dir);
            summaries[j] = "run directory: " + dir.string() + "\n" + summary_json(configs[j], report);
            return kOk;
          });
          errors[j] = e.str();
        });
      }
    }
    int code = kOk;
    for (std::size_t j = 0; j < configs.size(); ++j) {
      out << summaries[j];
      err << errors[j];
      code = std::max(code, codes[j]);
    }
    return code;
  });
}

int cmd_eval(const std::filesystem::path& run_dir, std::optional<std::int64_t> steps, std::ostream& out,
             std::ostream& err) {
  return guarded(err, [&] {
    const RunPaths paths{run_dir};
    const ExperimentConfig cfg = load_run_config(paths);
    std::unique_ptr<Agent> agent = load_agent(paths, cfg);
    const auto env = make_environment(cfg.env, cfg.horizon);
    const std::int64_t n = steps.value_or(cfg.similarity_steps);
    if (n < 1) throw ConfigError("--steps must be >= 1");
    const double score =
        similarity_test(*agent, *env, env->builtin_target_policy(cfg.radius), n, stream_seed(cfg, SeedStream::similarity));
    out << "similarity = " << score << " over " << n << " steps\n";
    return kOk;
  });
}

int cmd_check(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunPaths paths{run_dir};
    const ExperimentConfig cfg = load_run_config(paths);
    const std::vector<EpisodeMetrics> rows = load_metrics(paths);

    std::vector<std::string> failures =
        accounting_check(rows, cfg.episodes, cfg.horizon, cfg.attack.warmup_episodes);
    out << (failures.empty() ? "PASS" : "FAIL") << " accounting (" << rows.size() << " rows)\n";

    if (cfg.attacker == "lcbt") {
      const std::vector<Checkpoint> checkpoints = load_tree_checkpoints(paths);
      if (checkpoints.empty() && cfg.write_trees) failures.push_back("no tree dumps found under " + paths.trees().string());
      const auto env = make_environment(cfg.env, cfg.horizon);
      const std::uint32_t cells = StatePartition(env->spec().state_bounds, cfg.attack.m_per_axis).cell_count();
      RunReport r;
      r.node_checks = node_growth_check(checkpoints, cfg, cells);
      const auto node_failures = r.node_bound_failures();
      out << (node_failures.empty() ? "PASS" : "FAIL") << " node bound (" << r.node_checks.size() << " checks)\n";
      failures.insert(failures.end(), node_failures.begin(), node_failures.end());
    }
    for (const std::string& f : failures) err << "  " << f << '\n';
    return failures.empty() ? kOk : kCheckFailed;
  });
}

int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunPaths paths{run_dir};
    const ExperimentConfig cfg = load_run_config(paths);
    const std::vector<EpisodeMetrics> rows = load_metrics(paths);
    const SublinearityReport s = sublinearity_report(rows, cfg.horizon);
    out << "first_decile_rate = " << s.first_decile_rate << '\n'
        << "last_decile_rate = " << s.last_decile_rate << '\n'
        << "decile_ratio = " << s.decile_ratio << '\n'
        << "loglog_slope = " << s.slope_full << '\n'
        << "loglog_slope_second_half = " << s.slope_second_half << '\n';
    if (!rows.empty()) out << "cum_tau = " << rows.back().cum_tau << "\ncum_alpha = " << rows.back().cum_alpha << '\n';
    return kOk;
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Action-manipulation attacks on continuous-control agents"};
  app.require_subcommand(1);

  RunArgs run_args;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_path;
  CLI::App* run = app.add_subcommand("run", "train an agent under attack and write a run directory");
  run->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  run->add_option("--set", run_args.overrides, "key=value override, repeatable");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "run seed");
  CLI::Option* out_opt = run->add_option("--out", out_path, "output root (default $ADVERSARL_OUT or ./runs)");
  run->add_option("--jobs", run_args.jobs, "independent seeds to run in parallel")->check(CLI::PositiveNumber);

  std::string eval_dir;
  std::int64_t eval_steps = 0;
  CLI::App* eval = app.add_subcommand("eval", "similarity of a trained agent to the target policy");
  eval->add_option("run_dir", eval_dir)->required();
  CLI::Option* steps_opt = eval->add_option("--steps", eval_steps, "target-policy steps (default from config)");

  std::string check_dir;
  CLI::App* check = app.add_subcommand("check", "re-validate the accounting and node-growth bounds of a run");
  check->add_option("run_dir", check_dir)->required();

  std::string report_dir;
  CLI::App* report = app.add_subcommand("report", "recompute the attack-cost report from metrics.csv");
  report->add_option("run_dir", report_dir)->required();

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (*run) {
    if (!config_path.empty()) run_args.config = config_path;
    if (*seed_opt) run_args.seed = seed;
    if (*out_opt) run_args.out = out_path;
    return cmd_run(run_args, out, err);
  }
  if (*eval) return cmd_eval(eval_dir, *steps_opt ? std::optional<std::int64_t>(eval_steps) : std::nullopt, out, err);
  if (*check) return cmd_check(check_dir, out, err);
  return cmd_report(report_dir, out, err);
}

}  // namespace adversarl::cli
