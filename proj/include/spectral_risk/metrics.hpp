#pragma once

#include <cstddef>
#include <span>

namespace spectral_risk {

/// The eight out-of-sample statistics, all in daily units.
///
/// VaR and CVaR are positive loss magnitudes. `sr`, `sk` and `k` are NaN
/// when the series has zero variance.
struct MetricsSummary {
  double a_r = 0.0;     ///< mean return
  double st_dev = 0.0;  ///< sample standard deviation (n - 1)
  double sr = 0.0;      ///< a_r / st_dev, zero risk-free rate
  double var = 0.0;     ///< minus the k-th worst return, k = ceil(alpha n)
  double cvar = 0.0;    ///< minus the mean of the k worst returns
  double mdd = 0.0;     ///< maximum drawdown of compounded wealth
  double sk = 0.0;      ///< m3 / m2^1.5
  double k = 0.0;       ///< m4 / m2^2 (raw, not excess)
};

/// Number of tail scenarios, ceil(alpha * n), at least 1. Alpha in (0, 1).
std::size_t tail_count(double alpha, std::size_t n);

/// Empirical VaR as a positive loss: minus the ceil(alpha n)-th smallest return.
double value_at_risk(std::span<const double> returns, double alpha);

/// Empirical CVaR as a positive loss: minus the mean of the ceil(alpha n) smallest returns.
double conditional_value_at_risk(std::span<const double> returns, double alpha);

/// Largest peak-to-trough decline of wealth compounded from 1. Single pass.
double max_drawdown(std::span<const double> returns);

/// Mean over sample standard deviation. Throws DegenerateInputError on zero variance.
double sharpe_ratio(std::span<const double> returns);

/// All eight statistics. Needs at least four returns, each > -1.
MetricsSummary summarize(std::span<const double> returns, double alpha);

}  // namespace spectral_risk
