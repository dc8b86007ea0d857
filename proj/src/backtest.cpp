#include "spectral_risk/backtest.hpp"

#include <cmath>

#include "spectral_risk/error.hpp"
#include "spectral_risk/spectral.hpp"

namespace spectral_risk {

std::vector<double> BacktestResult::net_returns() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.net_return);
  return out;
}

std::size_t BacktestResult::signal_days() const {
  std::size_t count = 0;
  for (const auto& r : records) count += r.signal ? 1 : 0;
  return count;
}

std::vector<double> BacktestResult::exposures() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.exposure);
  return out;
}

double turnover(const Allocation& previous, const Eigen::VectorXd& realized_returns, const Allocation& next) {
  const auto& w_prev = previous.weights.values();
  const auto& w_next = next.weights.values();
  if (w_prev.size() != w_next.size() || realized_returns.size() != w_prev.size())
    throw ArgumentError("turnover dimensions disagree");
  const Eigen::ArrayXd risky = previous.exposure * w_prev.array() * (1.0 + realized_returns.array());
  const double growth = risky.sum() + (1.0 - previous.exposure);
  if (!(growth > 0.0)) throw ArgumentError("holdings wiped out before rebalancing");
  const Eigen::ArrayXd drifted = risky / growth;
  const double liquidity = (1.0 - previous.exposure) / growth;
  return (next.exposure * w_next.array() - drifted).abs().sum() +
         std::abs((1.0 - next.exposure) - liquidity);
}

BacktestResult run_backtest(const ReturnPanel& panel, const Universe& universe, const StrategySpec& spec,
                            std::size_t w, const BacktestOptions& options, Rng& rng) {
  spec.validate();
  if (universe.empty()) throw ArgumentError("empty universe");
  if (w < 1) throw ArgumentError("window length must be positive");
  if (panel.num_days() <= w)
    throw ArgumentError("panel has " + std::to_string(panel.num_days()) + " days, need more than the window " +
                        std::to_string(w));
  if (!(options.cost_rate >= 0.0)) throw ArgumentError("cost rate must be non-negative");

  const std::size_t days = panel.num_days() - w;
  const auto n = static_cast<Eigen::Index>(universe.size());
  const bool spectral = spec.kind == StrategyKind::rr || spec.kind == StrategyKind::rr_enhanced ||
                        spec.kind == StrategyKind::random_benchmark;

  std::vector<double> control_path;
  if (spec.kind == StrategyKind::random_control) {
    if (!options.reduced_days)
      throw ArgumentError("random_control needs the reduced-day count of the matching RR run");
    control_path = random_exposure_path(days, *options.reduced_days, spec.reduction, rng);
  }

  BacktestResult result;
  result.strategy = spec;
  result.universe = universe;
  result.window_length = w;
  result.records.reserve(days);
  result.wealth.reserve(days + 1);
  result.wealth.push_back(1.0);

  const double cost_scale = options.cost_convention == CostConvention::half_l1 ? 0.5 : 1.0;
  Allocation previous{WeightVector::equal(n), 0.0};  // all cash before the first day
  Eigen::VectorXd realized = Eigen::VectorXd::Zero(n);
  AllocationContext context;

  for (std::size_t step = 0; step < days; ++step) {
    const std::size_t t = w + step;
    const ReturnMatrix win = window(panel, universe, t, w);
    Allocation next = allocate(spec, win.values, &context);

    BacktestRecord rec;
    rec.day = t;
    if (spectral) {
      const auto spectrum = normalized_spectrum(win.values);
      rec.distance_origin = vertex_distance(spectrum, 0);
      rec.distance_single_one = vertex_distance(spectrum, 1);
      rec.signal = spec.kind == StrategyKind::rr_enhanced ? enhanced_signal(spectrum) : rr_signal(spectrum);
    }
    if (spec.kind == StrategyKind::random_control) {
      next.exposure = control_path[step];
      rec.signal = control_path[step] != 1.0;
    }

    const double traded = turnover(previous, realized, next);
    for (Eigen::Index j = 0; j < n; ++j)
      realized[j] = panel.values()(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(universe[static_cast<std::size_t>(j)]));

    rec.exposure = next.exposure;
    rec.gross_return = next.exposure * next.weights.values().dot(realized);
    rec.cost = options.cost_rate * cost_scale * traded;
    rec.net_return = rec.gross_return - rec.cost;
    rec.weights = next.weights;
    result.records.push_back(rec);

    if (!(rec.net_return > -1.0)) {
      result.wiped_out = true;
      result.wealth.push_back(0.0);
      break;
    }
    result.wealth.push_back(result.wealth.back() * (1.0 + rec.net_return));
    previous = std::move(next);
  }
  return result;
}

}  // namespace spectral_risk
