#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spectral_risk/backtest.hpp"
#include "spectral_risk/market_data.hpp"
#include "spectral_risk/metrics.hpp"
#include "spectral_risk/strategies.hpp"

namespace spectral_risk {

/// Monte-Carlo grid over universe size N and window length w.
struct ExperimentConfig {
  std::vector<std::size_t> grid_N{5, 10, 20};
  std::vector<std::size_t> grid_w{20, 30, 40};
  std::size_t reps = 100;
  double cost_rate = 0.001;
  CostConvention cost_convention = CostConvention::l1;
  double alpha = 0.01;            ///< VaR/CVaR level of the reported metrics
  double optimizer_alpha = 0.01;  ///< tail level inside the VaR/CVaR optimizers
  std::vector<StrategySpec> strategies = default_strategies();
  std::uint64_t master_seed = 1;
  bool save_runs = false;

  /// 1/N, RR, random, Min-var, Min-VaR, Min-CVaR.
  static std::vector<StrategySpec> default_strategies();

  /// Throws ArgumentError naming the offending field.
  void validate() const;
};

/// Outcome of one repetition: one universe, every strategy on it.
struct RepResult {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  Universe universe;
  bool completed = false;
  std::string note;                     ///< why the rep was excluded
  std::vector<MetricsSummary> metrics;  ///< per strategy, config order
  std::vector<std::size_t> signal_days; ///< per strategy
  std::vector<BacktestResult> runs;     ///< kept only with save_runs
};

/// Per-strategy metric means and cross-rep standard deviations for one (N, w).
struct CellResult {
  std::size_t N = 0;
  std::size_t w = 0;
  double alpha = 0.01;  ///< tail level of the VaR/CVaR metrics, for labels
  std::vector<std::string> strategy_names;
  std::vector<MetricsSummary> mean;
  std::vector<MetricsSummary> dispersion;
  std::size_t requested_reps = 0;
  std::size_t completed_reps = 0;
  std::vector<std::uint64_t> rep_seeds;
  std::vector<RepResult> reps;
};

/// Stable per-rep seed: SplitMix-style mix of (master_seed, N, w, rep).
std::uint64_t rep_seed(std::uint64_t master_seed, std::size_t N, std::size_t w, std::size_t rep);

/// Runs one repetition. RR runs before random_control so the control can
/// copy its reduced-day count. Throws only on configuration errors; a
/// wipeout marks the rep as not completed.
RepResult run_rep(const ReturnPanel& panel, const ExperimentConfig& cfg, std::size_t N, std::size_t w,
                  std::size_t rep);

/// Means and dispersions over the completed reps, in rep order.
CellResult aggregate_cell(std::size_t N, std::size_t w, std::vector<std::string> strategy_names,
                          std::vector<RepResult> reps);

/// The whole grid. Work items (cell, rep) run on `jobs` threads; the
/// reduction is ordered by (N, w, rep), so results do not depend on `jobs`.
std::vector<CellResult> run_experiment(const ReturnPanel& panel, const ExperimentConfig& cfg,
                                       unsigned jobs = 1);

enum class TableFormat { csv, markdown };
enum class TableStatistic { mean, dispersion };

/// Comparison tables: one block per cell, the eight metrics as rows and the
/// strategies as columns, six significant digits.
std::string emit_table(const std::vector<CellResult>& results, TableFormat format,
                       TableStatistic statistic = TableStatistic::mean);

/// Per-rep raw metrics for one cell, full precision, readable by read_cell_csv.
void write_cell_csv(std::ostream& out, const CellResult& cell);
CellResult read_cell_csv(std::istream& in);

/// Per-day series of one run.
void write_run_csv(std::ostream& out, const BacktestResult& run, const ReturnPanel& panel);

/// Writes cell_<N>_<w>.csv, summary.csv, summary.md, dispersion.csv,
/// metadata.json and, with save_runs, runs/*.csv into `dir`.
void write_experiment_outputs(const std::string& dir, const std::vector<CellResult>& results,
                              const ExperimentConfig& cfg, const ReturnPanel& panel);

/// Rebuilds summary.csv, summary.md and dispersion.csv from the cell files in `dir`.
std::vector<CellResult> regenerate_report(const std::string& dir);

}  // namespace spectral_risk
