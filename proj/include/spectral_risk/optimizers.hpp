#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "spectral_risk/weights.hpp"

namespace spectral_risk {

/// Outcome of a simplex-constrained risk minimization.
struct OptimizationResult {
  WeightVector weights;
  double objective = 0.0;       ///< risk at `weights`, in the optimizer's own units
  bool degenerate = false;      ///< min_variance only: covariance was identically zero
  std::size_t iterations = 0;
};

/// Which risk the benchmark minimizes, and the tail level for VaR/CVaR.
struct RiskObjective {
  enum class Kind { variance, var, cvar };
  Kind kind = Kind::variance;
  double alpha = 0.01;  ///< must lie in (0, 0.5]
};

/// Sample covariance of the columns of `a` (denominator T - 1).
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& a);

/// Rockafellar-Uryasev CVaR of the portfolio losses -a*w at level alpha:
/// min over zeta of zeta + sum((loss - zeta)+) / (alpha T).
double ru_cvar(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, double alpha);

/// Empirical VaR (positive loss) of the portfolio returns a*w.
double portfolio_var(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, double alpha);

struct MinVarianceOptions {
  std::optional<Eigen::VectorXd> warm_start;
  double gradient_tol = 1e-10;
  std::size_t max_iterations = 50000;
};

/// Minimizes w' Sigma w over the simplex by accelerated projected gradient
/// with step 1/L, L the largest eigenvalue of 2 Sigma. Needs T >= 2.
OptimizationResult min_variance(const Eigen::MatrixXd& a, const MinVarianceOptions& options = {});

/// Minimizes the Rockafellar-Uryasev CVaR over the simplex by solving the
/// scenario linear program exactly. Needs T >= 1.
OptimizationResult min_cvar(const Eigen::MatrixXd& a, double alpha);

/// Approximately minimizes empirical VaR over the simplex.
///
/// Multi-start local search with pairwise weight transfers of shrinking step
/// (0.1 down to 1e-4). Starts: equal weights, each vertex, the min_cvar
/// solution, and the best few points of the finest simplex lattice that fits
/// a fixed evaluation budget. The result is never worse than any start.
OptimizationResult min_var_quantile(const Eigen::MatrixXd& a, double alpha);

/// Dispatches on `objective.kind`.
OptimizationResult minimize_risk(const Eigen::MatrixXd& a, const RiskObjective& objective);

}  // namespace spectral_risk
