#include "spectral_risk/weights.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "spectral_risk/error.hpp"

namespace spectral_risk {

WeightVector::WeightVector(Eigen::VectorXd weights) : weights_(std::move(weights)) {
  if (weights_.size() < 1) throw ArgumentError("weight vector is empty");
  if (!weights_.allFinite()) throw ArgumentError("weight vector contains non-finite entries");
  if (weights_.minCoeff() < -1e-9) throw ArgumentError("negative portfolio weight");
  weights_ = weights_.cwiseMax(0.0);
  if (std::abs(weights_.sum() - 1.0) > 1e-8) throw ArgumentError("portfolio weights must sum to one");
}

WeightVector WeightVector::equal(Eigen::Index n) {
  if (n < 1) throw ArgumentError("weight vector is empty");
  return WeightVector(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

WeightVector WeightVector::basis(Eigen::Index n, Eigen::Index i) {
  if (i < 0 || i >= n) throw ArgumentError("basis index out of range");
  return WeightVector(Eigen::VectorXd::Unit(n, i));
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) tau = candidate;
  }
  return (v.array() - tau).cwiseMax(0.0);
}

}  // namespace spectral_risk
