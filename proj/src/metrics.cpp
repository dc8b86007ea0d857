#include "spectral_risk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "spectral_risk/error.hpp"

namespace spectral_risk {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("tail level must lie in (0, 1)");
}

/// The k smallest returns, ascending.
std::vector<double> worst(std::span<const double> returns, std::size_t k) {
  std::vector<double> sorted(returns.begin(), returns.end());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), sorted.end());
  sorted.resize(k);
  return sorted;
}

double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Exact test; the rounded mean of a constant series can differ from its value.
bool constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

}  // namespace

std::size_t tail_count(double alpha, std::size_t n) {
  check_alpha(alpha);
  if (n == 0) throw ArgumentError("empty return series");
  // Guard against alpha * n landing a hair above an integer.
  const double scaled = alpha * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(scaled - 1e-12 * std::max(1.0, scaled)));
  return std::clamp<std::size_t>(k, 1, n);
}

double value_at_risk(std::span<const double> returns, double alpha) {
  const std::size_t k = tail_count(alpha, returns.size());
  std::vector<double> sorted(returns.begin(), returns.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
  return -sorted[k - 1];
}

double conditional_value_at_risk(std::span<const double> returns, double alpha) {
  const std::size_t k = tail_count(alpha, returns.size());
  const auto tail = worst(returns, k);
  return -mean(tail);
}

double max_drawdown(std::span<const double> returns) {
  double wealth = 1.0;
  double peak = 1.0;
  double mdd = 0.0;
  for (const double r : returns) {
    if (!(r > -1.0)) throw ArgumentError("return of -100% or worse wipes out wealth");
    wealth *= 1.0 + r;
    peak = std::max(peak, wealth);
    mdd = std::max(mdd, 1.0 - wealth / peak);
  }
  return mdd;
}

double sharpe_ratio(std::span<const double> returns) {
  if (returns.size() < 2) throw ArgumentError("Sharpe ratio needs at least two returns");
  if (constant(returns)) throw DegenerateInputError("Sharpe ratio undefined for a zero-variance series");
  const double m = mean(returns);
  double ss = 0.0;
  for (const double r : returns) ss += (r - m) * (r - m);
  const double sd = std::sqrt(ss / static_cast<double>(returns.size() - 1));
  if (sd == 0.0) throw DegenerateInputError("Sharpe ratio undefined for a zero-variance series");
  return m / sd;
}

MetricsSummary summarize(std::span<const double> returns, double alpha) {
  const std::size_t n = returns.size();
  if (n < 4) throw ArgumentError("summary statistics need at least 4 returns, got " + std::to_string(n));
  check_alpha(alpha);
  MetricsSummary s;
  s.a_r = mean(returns);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (constant(returns)) {
    s.a_r = returns.front();
    s.st_dev = 0.0;
    s.sr = s.sk = s.k = nan;
    s.var = s.cvar = -returns.front();
    s.mdd = max_drawdown(returns);
    return s;
  }
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (const double r : returns) {
    const double d = r - s.a_r;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double count = static_cast<double>(n);
  s.st_dev = std::sqrt(m2 / (count - 1.0));
  m2 /= count;
  m3 /= count;
  m4 /= count;
  if (m2 > 0.0) {
    s.sr = s.a_r / s.st_dev;
    s.sk = m3 / std::pow(m2, 1.5);
    s.k = m4 / (m2 * m2);
  } else {
    s.sr = s.sk = s.k = nan;
  }
  s.var = value_at_risk(returns, alpha);
  s.cvar = conditional_value_at_risk(returns, alpha);
  s.mdd = max_drawdown(returns);
  return s;
}

}  // namespace spectral_risk
