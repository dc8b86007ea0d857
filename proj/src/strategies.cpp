#include "spectral_risk/strategies.hpp"

#include <array>
#include <numeric>
#include <utility>

#include "spectral_risk/error.hpp"
#include "spectral_risk/optimizers.hpp"
#include "spectral_risk/spectral.hpp"

namespace spectral_risk {

namespace {

struct KindInfo {
  StrategyKind kind;
  std::string_view key;
  std::string_view display;
};

constexpr std::array<KindInfo, 8> kKinds{{
    {StrategyKind::one_over_n, "one_over_n", "1/N"},
    {StrategyKind::rr, "rr", "RR"},
    {StrategyKind::random_control, "random_control", "random"},
    {StrategyKind::min_var, "min_var", "Min-var"},
    {StrategyKind::min_var_quantile, "min_var_quantile", "Min-VaR"},
    {StrategyKind::min_cvar, "min_cvar", "Min-CVaR"},
    {StrategyKind::rr_enhanced, "rr_enhanced", "enhanced RR"},
    {StrategyKind::random_benchmark, "random_benchmark", "RR random benchmark"},
}};

const KindInfo& info(StrategyKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k;
  throw ArgumentError("unknown strategy kind");
}

}  // namespace

std::string_view to_string(StrategyKind kind) { return info(kind).key; }

std::string_view display_name(StrategyKind kind) { return info(kind).display; }

StrategyKind strategy_kind_from_string(std::string_view name) {
  for (const auto& k : kKinds)
    if (k.key == name) return k.kind;
  throw ArgumentError("unknown strategy '" + std::string(name) + "'");
}

std::string StrategySpec::name() const {
  return label.empty() ? std::string(display_name(kind)) : label;
}

void StrategySpec::validate() const {
  if (!(reduction >= 0.0 && reduction <= 1.0)) throw ArgumentError("reduction must lie in [0, 1]");
  if (benchmark_weights.has_value() != (kind == StrategyKind::random_benchmark))
    throw ArgumentError("benchmark weights are required for random_benchmark and only for it");
  if (!(optimizer_alpha > 0.0 && optimizer_alpha <= 0.5))
    throw ArgumentError("optimizer_alpha must lie in (0, 0.5]");
}

Allocation allocate(const StrategySpec& spec, const Eigen::MatrixXd& window, AllocationContext* context) {
  const Eigen::Index n = window.cols();
  switch (spec.kind) {
    case StrategyKind::one_over_n:
    case StrategyKind::random_control:
      return {WeightVector::equal(n), 1.0};
    case StrategyKind::rr: {
      const bool reduce = rr_signal(normalized_spectrum(window));
      return {WeightVector::equal(n), reduce ? spec.reduction : 1.0};
    }
    case StrategyKind::rr_enhanced: {
      const bool exit = enhanced_signal(normalized_spectrum(window));
      return {WeightVector::equal(n), exit ? 0.0 : 1.0};
    }
    case StrategyKind::random_benchmark: {
      if (!spec.benchmark_weights || spec.benchmark_weights->size() != n)
        throw ArgumentError("random_benchmark weights do not match the universe size");
      const bool reduce = rr_signal(normalized_spectrum(window));
      return {*spec.benchmark_weights, reduce ? spec.reduction : 1.0};
    }
    case StrategyKind::min_var: {
      MinVarianceOptions options;
      if (context) options.warm_start = context->previous_weights;
      auto result = min_variance(window, options);
      if (context) context->previous_weights = result.weights.values();
      return {std::move(result.weights), 1.0};
    }
    case StrategyKind::min_var_quantile:
      return {min_var_quantile(window, spec.optimizer_alpha).weights, 1.0};
    case StrategyKind::min_cvar:
      return {min_cvar(window, spec.optimizer_alpha).weights, 1.0};
  }
  throw ArgumentError("unknown strategy kind");
}

std::vector<double> random_exposure_path(std::size_t num_days, std::size_t num_reduced, double reduction,
                                         Rng& rng) {
  if (num_reduced > num_days)
    throw ArgumentError("cannot reduce exposure on " + std::to_string(num_reduced) + " of " +
                        std::to_string(num_days) + " days");
  if (!(reduction >= 0.0 && reduction <= 1.0)) throw ArgumentError("reduction must lie in [0, 1]");
  std::vector<std::size_t> days(num_days);
  std::iota(days.begin(), days.end(), std::size_t{0});
  for (std::size_t i = 0; i < num_reduced; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(num_days - i));
    std::swap(days[i], days[j]);
  }
  std::vector<double> path(num_days, 1.0);
  for (std::size_t i = 0; i < num_reduced; ++i) path[days[i]] = reduction;
  return path;
}

WeightVector sample_simplex(Eigen::Index n, Rng& rng) {
  if (n < 1) throw ArgumentError("simplex dimension must be positive");
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e[i] = rng.exponential();
  const double total = e.sum();
  if (!(total > 0.0)) return WeightVector::equal(n);
  return WeightVector(e / total);
}

}  // namespace spectral_risk
