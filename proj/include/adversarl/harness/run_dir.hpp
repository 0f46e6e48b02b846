#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adversarl/harness/experiment.hpp"
#include "adversarl/harness/reports.hpp"

namespace adversarl {

/// Post-training analysis of one run.
struct RunReport {
  std::int64_t cum_tau = 0;
  std::int64_t cum_alpha = 0;
  double delta_min_hat = 0.0;
  SublinearityReport sublinearity;
  double similarity = 0.0;
  GreedyEvaluation greedy;
  std::vector<NodeCheck> node_checks;
  std::vector<std::string> accounting_failures;
  std::optional<TimeShareReport> time_share;

  bool node_bound_pass() const;
  std::vector<std::string> node_bound_failures() const;
};

RunReport analyze_run(const ExperimentConfig& cfg, RunResult& result);

/// JSON summary of a run: settings, totals and every report.
std::string summary_json(const ExperimentConfig& cfg, const RunReport& report);

/// Files inside a run directory.
struct RunPaths {
  std::filesystem::path dir;
  std::filesystem::path config() const { return dir / "config.cfg"; }
  std::filesystem::path metrics() const { return dir / "metrics.csv"; }
  std::filesystem::path trees() const { return dir / "trees"; }
  std::filesystem::path summary() const { return dir / "summary.json"; }
  std::filesystem::path snapshot() const { return dir / "agent.snapshot"; }
};

/// Runs, analyzes and writes config.cfg, metrics.csv, trees/, summary.json
/// and agent.snapshot under `dir`.
RunReport execute_run(const ExperimentConfig& cfg, const std::filesystem::path& dir, const RunOptions& options = {});

/// Loads the effective configuration echoed into a run directory.
ExperimentConfig load_run_config(const RunPaths& paths);

/// Node-count checkpoints recovered from the tree dumps of a run directory,
/// sorted by episode.
std::vector<Checkpoint> load_tree_checkpoints(const RunPaths& paths);

}  // namespace adversarl
