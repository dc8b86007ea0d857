#pragma once

// Spectral risk detection on return matrices.
//
// A T x N return matrix is mapped to its normalized spectrum: the N-1
// smallest singular values divided by the largest, in ascending order. That
// vector is a point of the unit hypercube in R^{N-1}. Because it is sorted,
// only the N "staircase" vertices (zeros followed by ones) can be closest to
// it; vertex k has k trailing ones and stands for a rank-k matrix. The closer
// the point sits to a low-rank vertex, the fewer diversification directions
// the window still offers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectral_risk/error.hpp"

namespace spectral_risk {

namespace detail {

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, unsorted.
/// Sweeps until no off-diagonal entry exceeds `rel_tol * ||G||_F`.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> jacobi_eigenvalues(
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> g, Scalar rel_tol) {
  using std::abs;
  using std::sqrt;
  const Eigen::Index n = g.rows();
  const Scalar threshold = rel_tol * g.norm();
  constexpr int kMaxSweeps = 100;

  auto converged = [&] {
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q)
        if (abs(g(p, q)) > threshold) return false;
    return true;
  };

  int sweep = 0;
  while (!converged()) {
    if (++sweep > kMaxSweeps) throw IterationLimitError("Jacobi eigenvalue sweep limit reached");
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = g(p, q);
        if (apq == Scalar(0)) continue;
        // Rotation that zeroes g(p, q); t is the smaller root of t^2 + 2 theta t - 1.
        const Scalar theta = (g(q, q) - g(p, p)) / (Scalar(2) * apq);
        const Scalar t = (theta >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
                         (abs(theta) + sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar gkp = g(k, p);
          const Scalar gkq = g(k, q);
          g(k, p) = c * gkp - s * gkq;
          g(k, q) = s * gkp + c * gkq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar gpk = g(p, k);
          const Scalar gqk = g(q, k);
          g(p, k) = c * gpk - s * gqk;
          g(q, k) = s * gpk + c * gqk;
        }
        g(p, q) = Scalar(0);
        g(q, p) = Scalar(0);
      }
    }
  }
  return g.diagonal();
}

template <typename Scalar>
constexpr Scalar jacobi_tolerance() {
  return std::max(Scalar(1e-12), Scalar(16) * std::numeric_limits<Scalar>::epsilon());
}

/// All N singular values of a T x N matrix (zero-padded when T < N), ascending.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> gram_singular_values(
    const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  if (!a.allFinite()) throw ArgumentError("return matrix contains non-finite entries");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> gram = a.transpose() * a;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values =
      jacobi_eigenvalues<Scalar>(gram, jacobi_tolerance<Scalar>());
  for (auto& v : values) v = v > Scalar(0) ? sqrt(v) : Scalar(0);
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace detail

/// Singular values of `a`, descending, min(T, N) of them.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> singular_values(
    const Eigen::MatrixBase<Derived>& a) {
  const auto ascending = detail::gram_singular_values(a);
  const Eigen::Index k = std::min(a.rows(), a.cols());
  return ascending.reverse().head(k);
}

/// Ascending vector of N-1 singular-value ratios in [0, 1].
template <typename Scalar = double>
class NormalizedSpectrum {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit NormalizedSpectrum(Vector values) : values_(std::move(values)) {
    if (values_.size() < 1) throw ArgumentError("normalized spectrum needs N >= 2 assets");
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
      const Scalar v = values_[i];
      if (!(v >= Scalar(0) && v <= Scalar(1)))
        throw ArgumentError("normalized singular value outside [0, 1]");
      if (i > 0 && v < values_[i - 1]) throw ArgumentError("normalized spectrum must be ascending");
    }
  }

  NormalizedSpectrum(std::initializer_list<Scalar> values)
      : NormalizedSpectrum(Vector(Eigen::Map<const Vector>(values.begin(),
                                                           static_cast<Eigen::Index>(values.size())))) {}

  const Vector& values() const noexcept { return values_; }
  Scalar operator[](Eigen::Index i) const { return values_[i]; }
  Eigen::Index size() const noexcept { return values_.size(); }

  /// N, the number of assets; the omitted largest ratio is always 1.
  Eigen::Index universe_size() const noexcept { return values_.size() + 1; }

  /// sigma_min / sigma_max, the reciprocal of the 2-norm condition number.
  Scalar reciprocal_condition() const { return values_[0]; }

 private:
  Vector values_;
};

/// Normalized spectrum of a T x N return matrix, N >= 2.
/// Throws DegenerateInputError for the zero matrix.
template <typename Derived>
NormalizedSpectrum<typename Derived::Scalar> normalized_spectrum(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.cols() < 2) throw ArgumentError("normalized spectrum needs at least two columns");
  const auto sigma = detail::gram_singular_values(a);
  const Scalar largest = sigma[sigma.size() - 1];
  if (!(largest > Scalar(0))) throw DegenerateInputError("largest singular value is zero");
  typename NormalizedSpectrum<Scalar>::Vector ratios = sigma.head(sigma.size() - 1) / largest;
  for (auto& r : ratios) r = std::min(r, Scalar(1));
  return NormalizedSpectrum<Scalar>(std::move(ratios));
}

/// Euclidean distance from `s` to the staircase vertex with `trailing_ones`
/// ones, i.e. N-1-k zeros followed by k ones.
template <typename Scalar>
Scalar vertex_distance(const NormalizedSpectrum<Scalar>& s, Eigen::Index trailing_ones) {
  const Eigen::Index dim = s.size();
  if (trailing_ones < 0 || trailing_ones > dim)
    throw ArgumentError("vertex index " + std::to_string(trailing_ones) + " outside 0.." +
                        std::to_string(dim));
  const Eigen::Index zeros = dim - trailing_ones;
  const auto& v = s.values();
  const Scalar to_zero = v.head(zeros).squaredNorm();
  const Scalar to_one = (v.tail(trailing_ones).array() - Scalar(1)).matrix().squaredNorm();
  using std::sqrt;
  return sqrt(to_zero + to_one);
}

/// Distances to all N staircase vertices, indexed by number of trailing ones.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> vertex_distances(const NormalizedSpectrum<Scalar>& s) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d(s.size() + 1);
  for (Eigen::Index k = 0; k <= s.size(); ++k) d[k] = vertex_distance(s, k);
  return d;
}

/// Ordinal risk level: 0 when [1, ..., 1] is closest, N-1 when the origin is.
struct RiskScenario {
  Eigen::Index level = 0;
  Eigen::Index closest_vertex_ones = 0;

  friend bool operator==(const RiskScenario&, const RiskScenario&) = default;
};

/// Closest staircase vertex; ties go to the riskier one (fewer ones).
template <typename Scalar>
RiskScenario classify_scenario(const NormalizedSpectrum<Scalar>& s) {
  const auto d = vertex_distances(s);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < d.size(); ++k)
    if (d[k] < d[best]) best = k;
  return {s.size() - best, best};
}

/// True when the spectrum is closer to the origin than to [0, ..., 0, 1].
template <typename Scalar>
bool rr_signal(const NormalizedSpectrum<Scalar>& s) {
  return vertex_distance(s, 0) < vertex_distance(s, 1);
}

/// True when the mean of the two smallest normalized singular values falls
/// strictly below 1/(N-1). Needs N >= 3.
template <typename Scalar>
bool enhanced_signal(const NormalizedSpectrum<Scalar>& s) {
  if (s.size() < 2) throw ArgumentError("enhanced signal needs at least three assets");
  const Scalar mean = (s[0] + s[1]) / Scalar(2);
  return mean < Scalar(1) / static_cast<Scalar>(s.size());
}

}  // namespace spectral_risk
