#pragma once

#include <Eigen/Dense>

namespace spectral_risk {

/// Long-only, fully invested portfolio weights: every entry >= 0, sum 1.
///
/// Construction tolerates entries down to -1e-9 (clamped to zero) and a sum
/// off by at most 1e-8; anything else throws ArgumentError.
class WeightVector {
 public:
  explicit WeightVector(Eigen::VectorXd weights);

  static WeightVector equal(Eigen::Index n);
  static WeightVector basis(Eigen::Index n, Eigen::Index i);

  const Eigen::VectorXd& values() const noexcept { return weights_; }
  double operator[](Eigen::Index i) const { return weights_[i]; }
  Eigen::Index size() const noexcept { return weights_.size(); }

  friend bool operator==(const WeightVector& a, const WeightVector& b) {
    return a.weights_.size() == b.weights_.size() && a.weights_ == b.weights_;
  }

 private:
  Eigen::VectorXd weights_;
};

/// Euclidean projection onto the probability simplex (sort-based).
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

}  // namespace spectral_risk
