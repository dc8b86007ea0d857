#include "spectral_risk/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <numeric>
#include <utility>
#include <vector>

#include "spectral_risk/error.hpp"
#include "spectral_risk/linear_program.hpp"
#include "spectral_risk/metrics.hpp"

namespace spectral_risk {

namespace {

void check_matrix(const Eigen::MatrixXd& a, Eigen::Index min_rows) {
  if (a.cols() < 1) throw ArgumentError("return matrix has no assets");
  if (a.rows() < min_rows)
    throw ArgumentError("return matrix needs at least " + std::to_string(min_rows) + " rows");
  if (!a.allFinite()) throw ArgumentError("return matrix contains non-finite entries");
}

void check_tail_level(double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) throw ArgumentError("optimizer tail level must lie in (0, 0.5]");
}

/// Largest eigenvalue of a PSD matrix by power iteration.
double largest_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    const Eigen::VectorXd mv = m * v;
    const double norm = mv.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(mv);
    v = mv / norm;
    if (std::abs(next - lambda) <= 1e-12 * std::abs(next)) return std::max(next, norm);
    lambda = next;
  }
  return lambda;
}

double quantile_objective(std::vector<double>& scratch, const Eigen::VectorXd& returns, std::size_t k) {
  scratch.assign(returns.data(), returns.data() + returns.size());
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1), scratch.end());
  return -scratch[k - 1];
}

/// Enumerates the simplex lattice {x : x_i = n_i / m, sum n_i = m}.
template <typename Visit>
void for_each_lattice_point(Eigen::Index dims, int m, Visit&& visit) {
  std::vector<int> counts(static_cast<std::size_t>(dims), 0);
  Eigen::VectorXd x(dims);
  auto recurse = [&](auto&& self, Eigen::Index i, int remaining) -> void {
    if (i == dims - 1) {
      counts[static_cast<std::size_t>(i)] = remaining;
      for (Eigen::Index j = 0; j < dims; ++j) x[j] = counts[static_cast<std::size_t>(j)] / static_cast<double>(m);
      visit(x);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[static_cast<std::size_t>(i)] = c;
      self(self, i + 1, remaining - c);
    }
  };
  recurse(recurse, 0, m);
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

constexpr double kLatticeBudget = 2000.0;
constexpr std::size_t kLatticeStarts = 3;
constexpr std::size_t kLocalSearches = 6;

}  // namespace

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& a) {
  check_matrix(a, 2);
  const Eigen::MatrixXd centered = a.rowwise() - a.colwise().mean();
  return (centered.transpose() * centered) / static_cast<double>(a.rows() - 1);
}

double ru_cvar(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, double alpha) {
  const Eigen::VectorXd losses = -(a * w);
  const auto t = static_cast<std::size_t>(losses.size());
  const std::size_t k = tail_count(alpha, t);
  std::vector<double> sorted(losses.data(), losses.data() + losses.size());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end(),
                   std::greater<>());
  const double zeta = sorted[k - 1];
  double excess = 0.0;
  for (const double l : sorted) excess += std::max(l - zeta, 0.0);
  return zeta + excess / (alpha * static_cast<double>(t));
}

double portfolio_var(const Eigen::MatrixXd& a, const Eigen::VectorXd& w, double alpha) {
  const Eigen::VectorXd r = a * w;
  return value_at_risk(std::span<const double>(r.data(), static_cast<std::size_t>(r.size())), alpha);
}

OptimizationResult min_variance(const Eigen::MatrixXd& a, const MinVarianceOptions& options) {
  check_matrix(a, 2);
  const Eigen::Index n = a.cols();
  const Eigen::MatrixXd sigma = sample_covariance(a);
  auto objective = [&](const Eigen::VectorXd& x) { return x.dot(sigma * x); };

  if (n == 1) return {WeightVector::equal(1), sigma(0, 0), false, 0};
  if (sigma.cwiseAbs().maxCoeff() == 0.0) return {WeightVector::equal(n), 0.0, true, 0};

  // Power iteration can stop marginally below the true eigenvalue; keep the step safe.
  const double lipschitz = 2.0 * largest_eigenvalue(sigma) * 1.01;
  const Eigen::VectorXd equal = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::VectorXd x = equal;
  if (options.warm_start && options.warm_start->size() == n && options.warm_start->allFinite())
    x = project_to_simplex(*options.warm_start);

  auto gradient_mapping_norm = [&](const Eigen::VectorXd& p) {
    const Eigen::VectorXd step = project_to_simplex(p - 2.0 * sigma * p / lipschitz);
    return lipschitz * (p - step).norm();
  };

  Eigen::VectorXd y = x;
  double momentum = 1.0;
  double fx = objective(x);
  std::size_t it = 0;
  for (; it < options.max_iterations; ++it) {
    if (gradient_mapping_norm(x) < options.gradient_tol) break;
    const Eigen::VectorXd next = project_to_simplex(y - 2.0 * sigma * y / lipschitz);
    const double fnext = objective(next);
    if (fnext > fx) {
      // Momentum overshot: restart from the last iterate.
      y = x;
      momentum = 1.0;
      continue;
    }
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = next + ((momentum - 1.0) / next_momentum) * (next - x);
    x = next;
    fx = fnext;
    momentum = next_momentum;
  }
  if (objective(equal) < fx) {
    x = equal;
    fx = objective(equal);
  }
  x /= x.sum();
  return {WeightVector(x), objective(x), false, it};
}

OptimizationResult min_cvar(const Eigen::MatrixXd& a, double alpha) {
  check_matrix(a, 1);
  check_tail_level(alpha);
  const Eigen::Index t = a.rows();
  const Eigen::Index n = a.cols();
  if (n == 1) {
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    return {WeightVector(one), ru_cvar(a, one, alpha), false, 0};
  }

  // Columns: w (n), zeta+ , zeta-, u (t), s (t).
  // Rows 0..t-1: (a w)_r + zeta+ - zeta- + u_r - s_r = 0, i.e. u_r >= loss_r - zeta.
  // Row t: sum w = 1.
  const Eigen::Index cols = n + 2 + 2 * t;
  Eigen::MatrixXd lp = Eigen::MatrixXd::Zero(t + 1, cols);
  lp.topLeftCorner(t, n) = a;
  lp.block(0, n, t, 1).setOnes();
  lp.block(0, n + 1, t, 1).setConstant(-1.0);
  lp.block(0, n + 2, t, t) = Eigen::MatrixXd::Identity(t, t);
  lp.block(0, n + 2 + t, t, t) = -Eigen::MatrixXd::Identity(t, t);
  lp.block(t, 0, 1, n).setOnes();

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
  cost[n] = 1.0;
  cost[n + 1] = -1.0;
  cost.segment(n + 2, t).setConstant(1.0 / (alpha * static_cast<double>(t)));

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(t + 1);
  rhs[t] = 1.0;

  const LpSolution sol = solve_standard_lp(cost, lp, rhs);
  Eigen::VectorXd w = sol.x.head(n).cwiseMax(0.0);
  w /= w.sum();
  return {WeightVector(w), ru_cvar(a, w, alpha), false, sol.pivots};
}

OptimizationResult min_var_quantile(const Eigen::MatrixXd& a, double alpha) {
  check_matrix(a, 1);
  check_tail_level(alpha);
  const Eigen::Index n = a.cols();
  const std::size_t k = tail_count(alpha, static_cast<std::size_t>(a.rows()));
  std::vector<double> scratch;
  auto objective = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd r = a * x;
    return quantile_objective(scratch, r, k);
  };
  if (n == 1) {
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    return {WeightVector(one), objective(one), false, 0};
  }

  std::vector<std::pair<double, Eigen::VectorXd>> starts;
  auto add_start = [&](Eigen::VectorXd x) {
    const double f = objective(x);
    starts.emplace_back(f, std::move(x));
  };
  add_start(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
  for (Eigen::Index i = 0; i < n; ++i) add_start(Eigen::VectorXd::Unit(n, i));
  add_start(min_cvar(a, alpha).weights.values());

  int lattice = 1;
  while (binomial(lattice + 1 + static_cast<int>(n) - 1, static_cast<int>(n) - 1) <= kLatticeBudget) ++lattice;
  if (lattice >= 2) {
    std::vector<std::pair<double, Eigen::VectorXd>> grid;
    for_each_lattice_point(n, lattice, [&](const Eigen::VectorXd& x) {
      const double f = objective(x);
      if (grid.size() < kLatticeStarts) {
        grid.emplace_back(f, x);
      } else {
        auto worst = std::max_element(grid.begin(), grid.end(),
                                      [](const auto& l, const auto& r) { return l.first < r.first; });
        if (f < worst->first) *worst = {f, x};
      }
    });
    for (auto& g : grid) starts.push_back(std::move(g));
  }

  std::stable_sort(starts.begin(), starts.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });

  Eigen::VectorXd best = starts.front().second;
  double best_f = starts.front().first;
  std::size_t evaluations = 0;
  const std::size_t searches = std::min(starts.size(), kLocalSearches);
  for (std::size_t s = 0; s < searches; ++s) {
    Eigen::VectorXd x = starts[s].second;
    Eigen::VectorXd r = a * x;
    double fx = starts[s].first;
    for (double step = 0.1;; step = std::max(step / 2.0, 1e-4)) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = std::min(step, x[i]);
            if (d <= 0.0) continue;
            const Eigen::VectorXd trial = r + d * (a.col(j) - a.col(i));
            const double f = quantile_objective(scratch, trial, k);
            ++evaluations;
            if (f < fx) {
              x[i] -= d;
              x[j] += d;
              r = trial;
              fx = f;
              improved = true;
            }
          }
        }
      }
      if (step <= 1e-4) break;
    }
    if (fx < best_f) {
      best_f = fx;
      best = x;
    }
  }
  best = best.cwiseMax(0.0);
  best /= best.sum();
  return {WeightVector(best), objective(best), false, evaluations};
}

OptimizationResult minimize_risk(const Eigen::MatrixXd& a, const RiskObjective& objective) {
  switch (objective.kind) {
    case RiskObjective::Kind::variance:
      return min_variance(a);
    case RiskObjective::Kind::var:
      return min_var_quantile(a, objective.alpha);
    case RiskObjective::Kind::cvar:
      return min_cvar(a, objective.alpha);
  }
  throw ArgumentError("unknown risk objective");
}

}  // namespace spectral_risk
