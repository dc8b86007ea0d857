#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "spectral_risk/market_data.hpp"
#include "spectral_risk/rng.hpp"
#include "spectral_risk/strategies.hpp"

namespace spectral_risk {

/// How turnover converts to a traded fraction: full L1 (buys plus sells) or half of it.
enum class CostConvention { l1, half_l1 };

/// One out-of-sample day.
struct BacktestRecord {
  std::size_t day = 0;  ///< panel row whose returns were realized
  double gross_return = 0.0;
  double cost = 0.0;
  double net_return = 0.0;
  double exposure = 1.0;
  bool signal = false;  ///< risk signal fired (spectral strategies only)
  WeightVector weights = WeightVector::equal(1);
  /// Distances to the origin and to [0, ..., 0, 1]; spectral strategies only.
  std::optional<double> distance_origin;
  std::optional<double> distance_single_one;
};

struct BacktestResult {
  std::vector<BacktestRecord> records;
  std::vector<double> wealth;  ///< wealth[0] = 1, one entry per record after it
  StrategySpec strategy;
  Universe universe;
  std::size_t window_length = 0;
  bool wiped_out = false;

  std::vector<double> net_returns() const;
  /// Days on which the risk signal fired.
  std::size_t signal_days() const;
  std::vector<double> exposures() const;
};

struct BacktestOptions {
  double cost_rate = 0.001;
  CostConvention cost_convention = CostConvention::l1;
  /// Required for random_control: how many days the matching RR run reduced exposure.
  std::optional<std::size_t> reduced_days;
};

/// L1 distance between the next target holdings and the current holdings
/// after drifting with `realized_returns`, in wealth fractions including the
/// liquidity sleeve.
double turnover(const Allocation& previous, const Eigen::VectorXd& realized_returns, const Allocation& next);

/// Rolling one-day-ahead backtest of one strategy over days w .. T_total-1.
///
/// Day t uses the window of the w days before it, pays cost_rate times the
/// turnover needed to reach the new target (the first day buys in from all
/// cash), and earns exposure * weights . r_t. A net return <= -1 stops the
/// run with `wiped_out` set.
BacktestResult run_backtest(const ReturnPanel& panel, const Universe& universe, const StrategySpec& spec,
                            std::size_t w, const BacktestOptions& options, Rng& rng);

}  // namespace spectral_risk
