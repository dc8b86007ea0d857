#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace spectral_risk::cli {

/// Stable process exit statuses.
enum ExitStatus : int {
  kSuccess = 0,
  kUsage = 2,
  kDataFormat = 65,
  kMissingFile = 66,
  kInternal = 70,
};

struct CliInvocation {
  enum class Command { spectrum, backtest, experiment, report };
  Command command = Command::spectrum;
  std::string data_path;
  std::string config_path;
  std::string output_dir;  ///< directory for experiment/report, file for backtest
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::size_t window = 20;
  std::vector<std::string> assets;
  std::size_t universe_size = 0;  ///< backtest: sample this many assets when --assets is absent
  std::string strategy = "rr";
  std::optional<double> cost_bp;
  std::optional<double> alpha;
  std::optional<double> reduction;
  std::optional<std::size_t> day;
  bool prices = false;
};

/// Either a validated invocation, or the text and status to exit with
/// (help, usage error, missing file).
struct ParseOutcome {
  std::optional<CliInvocation> invocation;
  int exit_status = kSuccess;
  std::string message;
};

/// Parses arguments (without the program name).
ParseOutcome parse_cli(const std::vector<std::string>& args);

/// Executes a parsed invocation. Errors are reported on `err` and mapped to
/// exit statuses: 65 for bad data or config, 66 for unreadable files, 70
/// for anything else.
int run_cli(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

/// parse_cli followed by run_cli.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spectral_risk::cli
