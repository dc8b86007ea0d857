#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spectral_risk/rng.hpp"
#include "spectral_risk/weights.hpp"

namespace spectral_risk {

enum class StrategyKind {
  one_over_n,
  rr,
  rr_enhanced,
  random_control,
  random_benchmark,
  min_var,
  min_var_quantile,
  min_cvar,
};

/// Config and CSV name, e.g. "min_cvar".
std::string_view to_string(StrategyKind kind);
/// Parses a config name; throws ArgumentError for unknown names.
StrategyKind strategy_kind_from_string(std::string_view name);
/// Column heading used in tables, e.g. "Min-CVaR".
std::string_view display_name(StrategyKind kind);

/// A strategy under comparison.
///
/// `reduction` is the exposure kept when the RR signal fires (0.5 halves the
/// risky sleeve). `benchmark_weights` is set exactly when kind is
/// random_benchmark. `optimizer_alpha` is the tail level of the VaR and CVaR
/// optimizers.
struct StrategySpec {
  StrategyKind kind = StrategyKind::one_over_n;
  double reduction = 0.5;
  std::optional<WeightVector> benchmark_weights;
  double optimizer_alpha = 0.01;
  std::string label;  ///< optional override of display_name

  std::string name() const;
  /// Throws ArgumentError if an invariant is broken.
  void validate() const;
};

/// Target for one day: risky-sleeve weights plus the fraction of wealth
/// invested in it. The rest sits in liquidity earning zero.
struct Allocation {
  WeightVector weights;
  double exposure = 1.0;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// Optimizer state carried from one day to the next. Only used to warm-start
/// the variance solver; results do not depend on it beyond solver tolerance.
struct AllocationContext {
  std::optional<Eigen::VectorXd> previous_weights;
};

/// Allocation for the day after `window`.
///
/// random_control returns the 1/N portfolio at full exposure here; its
/// exposure comes from a path built by random_exposure_path, which the
/// backtest applies on top.
Allocation allocate(const StrategySpec& spec, const Eigen::MatrixXd& window,
                    AllocationContext* context = nullptr);

/// Exposure series with exactly `num_reduced` days at `reduction` (chosen
/// uniformly without replacement) and all others at 1.
std::vector<double> random_exposure_path(std::size_t num_days, std::size_t num_reduced,
                                         double reduction, Rng& rng);

/// Uniform draw from the probability simplex (normalized exponential spacings).
WeightVector sample_simplex(Eigen::Index n, Rng& rng);

}  // namespace spectral_risk
