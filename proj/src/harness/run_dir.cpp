#include "adversarl/harness/run_dir.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adversarl/attack/lcbt.hpp"
#include "adversarl/attack/state_partition.hpp"
#include "adversarl/core/errors.hpp"

namespace adversarl {

namespace {

std::uint32_t cell_count(const ExperimentConfig& cfg) {
  const auto env = make_environment(cfg.env, cfg.horizon);
  return StatePartition(env->spec().state_bounds, cfg.attack.m_per_axis).cell_count();
}

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

bool RunReport::node_bound_pass() const {
  return std::all_of(node_checks.begin(), node_checks.end(), [](const NodeCheck& c) { return c.pass(); });
}

std::vector<std::string> RunReport::node_bound_failures() const {
  std::vector<std::string> out;
  for (const NodeCheck& c : node_checks) {
    if (c.pass()) continue;
    std::ostringstream os;
    os << "node bound exceeded at (h=" << c.h << ", k=" << c.k << "): " << c.nodes << " nodes > bound " << c.bound;
    out.push_back(os.str());
  }
  return out;
}

RunReport analyze_run(const ExperimentConfig& cfg, RunResult& result) {
  RunReport r;
  const auto& rows = result.metrics.episodes;
  if (!rows.empty()) {
    r.cum_tau = rows.back().cum_tau;
    r.cum_alpha = rows.back().cum_alpha;
  }
  r.delta_min_hat = result.metrics.delta_min_hat;
  r.sublinearity = sublinearity_report(rows, cfg.horizon);
  r.similarity = similarity_test(*result.agent, *result.env, result.target, cfg.similarity_steps,
                                 stream_seed(cfg, SeedStream::similarity));
  r.greedy = greedy_evaluation(*result.agent, *result.env, result.target, cfg.eval_episodes,
                               stream_seed(cfg, SeedStream::evaluation));
  r.node_checks = node_growth_check(result.metrics.checkpoints, cfg, cell_count(cfg));
  r.accounting_failures = accounting_check(rows, cfg.episodes, cfg.horizon, cfg.attack.warmup_episodes);
  if (cfg.timing) r.time_share = time_share_report(result.metrics, cfg);
  return r;
}

std::string summary_json(const ExperimentConfig& cfg, const RunReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["env"] = cfg.env;
  j["agent"] = cfg.agent;
  j["attacker"] = cfg.attacker;
  j["episodes"] = cfg.episodes;
  j["seed"] = cfg.seed;
  j["r_a"] = cfg.radius;
  j["warmup_episodes"] = cfg.attack.warmup_episodes;
  j["cum_tau"] = report.cum_tau;
  j["cum_alpha"] = report.cum_alpha;
  j["delta_min_hat"] = number_or_null(report.delta_min_hat);
  const SublinearityReport& s = report.sublinearity;
  j["sublinearity"] = {{"first_decile_rate", s.first_decile_rate},
                       {"last_decile_rate", s.last_decile_rate},
                       {"decile_ratio", number_or_null(s.decile_ratio)},
                       {"loglog_slope", s.slope_full},
                       {"loglog_slope_second_half", s.slope_second_half}};
  j["similarity"] = {{"steps", cfg.similarity_steps}, {"score", report.similarity}};
  j["greedy_evaluation"] = {{"episodes", report.greedy.episodes},
                            {"agent_mean_reward", report.greedy.agent_mean_reward},
                            {"target_mean_reward", report.greedy.target_mean_reward},
                            {"relative_gap", number_or_null(report.greedy.relative_gap())}};
  double worst_ratio = 0.0;
  for (const NodeCheck& c : report.node_checks) worst_ratio = std::max(worst_ratio, static_cast<double>(c.nodes) / c.bound);
  j["node_bound"] = {{"checked", report.node_checks.size()},
                     {"pass", report.node_bound_pass()},
                     {"max_nodes_over_bound", worst_ratio}};
  j["accounting"] = {{"pass", report.accounting_failures.empty()}, {"failures", report.accounting_failures}};
  if (report.time_share) {
    j["attacker_time_share"] = {{"final", report.time_share->final_share}, {"max", report.time_share->max_share}};
  }
  return j.dump(2) + "\n";
}

RunReport execute_run(const ExperimentConfig& cfg, const std::filesystem::path& dir, const RunOptions& options) {
  const RunPaths paths{dir};
  std::filesystem::create_directories(dir);
  write_text(paths.config(), cfg.render());

  RunOptions opts = options;
  if (opts.tree_dir.empty()) opts.tree_dir = paths.trees();
  RunResult result = run_experiment(cfg, opts);

  {
    std::ofstream f(paths.metrics(), std::ios::binary);
    write_metrics_csv(f, result.metrics.episodes);
    if (!f) throw std::runtime_error("cannot write " + paths.metrics().string());
  }
  {
    std::ofstream f(paths.snapshot(), std::ios::binary);
    result.agent->save(f);
    if (!f) throw std::runtime_error("cannot write " + paths.snapshot().string());
  }
  RunReport report = analyze_run(cfg, result);
  write_text(paths.summary(), summary_json(cfg, report));
  return report;
}

ExperimentConfig load_run_config(const RunPaths& paths) {
  if (!std::filesystem::exists(paths.config()))
    throw ConfigError("run directory " + paths.dir.string() + " has no config.cfg");
  return ExperimentConfig::from(KeyValueConfig::load(paths.config(), experiment_schema()));
}

std::vector<Checkpoint> load_tree_checkpoints(const RunPaths& paths) {
  std::vector<Checkpoint> out;
  if (!std::filesystem::is_directory(paths.trees())) return out;
  for (const auto& entry : std::filesystem::directory_iterator(paths.trees())) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream f(entry.path());
    TreeDumpSummary dump;
    try {
      dump = read_tree_dump(f);
    } catch (const ConfigError& e) {
      throw ConfigError(entry.path().string() + ": " + e.what());
    }
    out.push_back(Checkpoint{dump.k, std::move(dump.nodes_per_step), 0.0});
  }
  std::sort(out.begin(), out.end(), [](const Checkpoint& a, const Checkpoint& b) { return a.k < b.k; });
  return out;
}

}  // namespace adversarl
