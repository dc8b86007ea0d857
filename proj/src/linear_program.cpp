#include "spectral_risk/linear_program.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "spectral_risk/error.hpp"

namespace spectral_risk {

namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kCostTol = 1e-12;
constexpr std::size_t kDegenerateRunBeforeBland = 50;

class Tableau {
 public:
  Tableau(Eigen::MatrixXd body, std::vector<Eigen::Index> basis)
      : t_(std::move(body)), basis_(std::move(basis)) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double rhs(Eigen::Index r) const { return t_(r, cols()); }
  double objective() const { return -t_(rows(), cols()); }
  const std::vector<Eigen::Index>& basis() const { return basis_; }
  double at(Eigen::Index r, Eigen::Index j) const { return t_(r, j); }

  void set_costs(const Eigen::VectorXd& cost) {
    t_.row(rows()).setZero();
    t_.row(rows()).head(cost.size()) = cost.transpose();
    for (Eigen::Index r = 0; r < rows(); ++r) {
      const double cb = t_(rows(), basis_[static_cast<std::size_t>(r)]);
      if (cb != 0.0) t_.row(rows()) -= cb * t_.row(r);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index j) {
    t_.row(r) /= t_(r, j);
    for (Eigen::Index i = 0; i <= rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, j);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = j;
    ++pivots_;
  }

  /// Runs simplex iterations over columns [0, enterable). Returns false if unbounded.
  bool optimize(Eigen::Index enterable, std::size_t max_pivots) {
    std::size_t degenerate_run = 0;
    for (;;) {
      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      Eigen::Index enter = -1;
      double best = -kCostTol;
      for (Eigen::Index j = 0; j < enterable; ++j) {
        const double d = t_(rows(), j);
        if (d < best) {
          enter = j;
          if (bland) break;
          best = d;
        }
      }
      if (enter < 0) return true;

      Eigen::Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < rows(); ++r) {
        const double coef = t_(r, enter);
        if (coef <= kPivotTol) continue;
        const double q = rhs(r) / coef;
        if (q < ratio || (q == ratio && basis_[static_cast<std::size_t>(r)] <
                                            basis_[static_cast<std::size_t>(leave)])) {
          ratio = q;
          leave = r;
        }
      }
      if (leave < 0) return false;
      if (pivots_ >= max_pivots) throw IterationLimitError("simplex pivot limit reached");
      degenerate_run = ratio <= 0.0 ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
  }

  std::size_t pivots() const { return pivots_; }

 private:
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
  std::size_t pivots_ = 0;
};

}  // namespace

LpSolution solve_standard_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                             const Eigen::VectorXd& b, std::size_t max_pivots) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (c.size() != n || b.size() != m) throw ArgumentError("linear program dimensions disagree");
  if ((b.array() < 0.0).any()) throw ArgumentError("linear program needs b >= 0");

  // Seed the basis with existing unit columns.
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m), -1);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index row = -1;
    bool unit = true;
    for (Eigen::Index r = 0; r < m && unit; ++r) {
      if (a(r, j) == 0.0) continue;
      if (a(r, j) == 1.0 && row < 0) {
        row = r;
      } else {
        unit = false;
      }
    }
    if (unit && row >= 0 && basis[static_cast<std::size_t>(row)] < 0) basis[static_cast<std::size_t>(row)] = j;
  }
  Eigen::Index artificials = 0;
  for (auto idx : basis)
    if (idx < 0) ++artificials;

  const Eigen::Index total = n + artificials;
  Eigen::MatrixXd body = Eigen::MatrixXd::Zero(m + 1, total + 1);
  body.topLeftCorner(m, n) = a;
  body.col(total).head(m) = b;
  Eigen::Index next = n;
  for (Eigen::Index r = 0; r < m; ++r) {
    if (basis[static_cast<std::size_t>(r)] < 0) {
      body(r, next) = 1.0;
      basis[static_cast<std::size_t>(r)] = next++;
    }
  }
  Tableau tableau(std::move(body), std::move(basis));

  if (artificials > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(total);
    phase1.tail(artificials).setOnes();
    tableau.set_costs(phase1);
    tableau.optimize(total, max_pivots);
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if (tableau.objective() > 1e-9 * scale) throw ValidationError("linear program is infeasible");
    // Pivot zero-level artificials out of the basis where a structural column allows it.
    for (Eigen::Index r = 0; r < m; ++r) {
      if (tableau.basis()[static_cast<std::size_t>(r)] < n) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(tableau.at(r, j)) > 1e-9) {
          tableau.pivot(r, j);
          break;
        }
      }
    }
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(total);
  phase2.head(n) = c;
  tableau.set_costs(phase2);
  if (!tableau.optimize(n, max_pivots)) throw ValidationError("linear program is unbounded");

  LpSolution out;
  out.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index j = tableau.basis()[static_cast<std::size_t>(r)];
    if (j < n) out.x[j] = std::max(0.0, tableau.rhs(r));
  }
  out.objective = c.dot(out.x);
  out.pivots = tableau.pivots();
  return out;
}

}  // namespace spectral_risk
