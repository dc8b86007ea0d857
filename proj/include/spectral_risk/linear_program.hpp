#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace spectral_risk {

/// Solution of a standard-form linear program.
struct LpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

/// Minimizes c'x subject to Ax = b, x >= 0, with b >= 0.
///
/// Dense two-phase tableau simplex. Columns that already form a unit vector
/// in some row seed the initial basis; the remaining rows get artificial
/// variables. Dantzig pricing, switching to Bland's rule after a run of
/// degenerate pivots. Throws ValidationError when infeasible or unbounded and
/// IterationLimitError past `max_pivots`.
LpSolution solve_standard_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                             const Eigen::VectorXd& b, std::size_t max_pivots = 100000);

}  // namespace spectral_risk
