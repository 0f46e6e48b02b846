#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace adversarl::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

struct RunArgs {
  std::optional<std::filesystem::path> config;
  std::vector<std::string> overrides;  // key=value, applied after the file
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  int jobs = 1;
};

/// Output root: --out, else $ADVERSARL_OUT, else ./runs.
std::filesystem::path output_root(const std::optional<std::filesystem::path>& out);

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const std::filesystem::path& run_dir, std::optional<std::int64_t> steps, std::ostream& out,
             std::ostream& err);
int cmd_check(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);
/// Recomputes the cost report from metrics.csv.
int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

/// Full command line (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adversarl::cli
