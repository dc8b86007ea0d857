#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <set>

#include "spectral_risk/error.hpp"
#include "spectral_risk/spectral.hpp"
#include "spectral_risk/strategies.hpp"
#include "support/synthetic.hpp"

using namespace spectral_risk;

namespace {

StrategySpec spec_of(StrategyKind kind) {
  StrategySpec s;
  s.kind = kind;
  return s;
}

Eigen::MatrixXd window_with_spectrum(std::initializer_list<double> ratios, std::uint64_t seed, double scale = 0.02) {
  Rng rng(seed);
  Eigen::VectorXd sigma(static_cast<Eigen::Index>(ratios.size()) + 1);
  Eigen::Index i = 0;
  for (double r : ratios) sigma[i++] = r * scale;
  sigma[i] = scale;
  return testing::matrix_with_singular_values(30, sigma, rng);
}

}  // namespace

TEST_CASE("kind names round trip") {
  for (auto kind : {StrategyKind::one_over_n, StrategyKind::rr, StrategyKind::rr_enhanced, StrategyKind::random_control,
                    StrategyKind::random_benchmark, StrategyKind::min_var, StrategyKind::min_var_quantile,
                    StrategyKind::min_cvar}) {
    CHECK(strategy_kind_from_string(to_string(kind)) == kind);
    CHECK_FALSE(display_name(kind).empty());
  }
  CHECK(display_name(StrategyKind::one_over_n) == "1/N");
  CHECK(display_name(StrategyKind::min_cvar) == "Min-CVaR");
  CHECK_THROWS_AS(strategy_kind_from_string("momentum"), ArgumentError);
  auto s = spec_of(StrategyKind::rr);
  CHECK(s.name() == "RR");
  s.label = "RR 25%";
  CHECK(s.name() == "RR 25%");
}

TEST_CASE("spec validation") {
  auto s = spec_of(StrategyKind::rr);
  CHECK_NOTHROW(s.validate());
  s.reduction = 1.5;
  CHECK_THROWS_AS(s.validate(), ArgumentError);
  s.reduction = 0.5;
  s.benchmark_weights = WeightVector::equal(3);
  CHECK_THROWS_AS(s.validate(), ArgumentError);
  auto b = spec_of(StrategyKind::random_benchmark);
  CHECK_THROWS_AS(b.validate(), ArgumentError);
  b.benchmark_weights = WeightVector::equal(3);
  CHECK_NOTHROW(b.validate());
  auto o = spec_of(StrategyKind::min_cvar);
  o.optimizer_alpha = 0.0;
  CHECK_THROWS_AS(o.validate(), ArgumentError);
}

TEST_CASE("1/N allocation") {
  Rng rng(1);
  const auto a = allocate(spec_of(StrategyKind::one_over_n), testing::random_matrix(20, 4, rng));
  CHECK(a.exposure == 1.0);
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(a.weights[i] == 0.25);
}

TEST_CASE("RR reduces exposure on the riskiest example spectrum only") {
  const auto c = window_with_spectrum({0.02, 0.021, 0.0215}, 1);
  CHECK(allocate(spec_of(StrategyKind::rr), c).exposure == 0.5);
  const auto a = window_with_spectrum({0.02, 0.85, 0.9}, 2);
  CHECK(allocate(spec_of(StrategyKind::rr), a).exposure == 1.0);
  auto quarter = spec_of(StrategyKind::rr);
  quarter.reduction = 0.25;
  CHECK(allocate(quarter, c).exposure == 0.25);
}

TEST_CASE("orthogonal equal-norm columns never signal") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(20, 5);
  for (Eigen::Index j = 0; j < 5; ++j) {
    w(2 * j, j) = 0.01;
    w(2 * j + 1, j) = -0.01;
  }
  CHECK(allocate(spec_of(StrategyKind::rr), w).exposure == 1.0);
  CHECK(allocate(spec_of(StrategyKind::rr_enhanced), w).exposure == 1.0);
}

TEST_CASE("enhanced RR toggles between full and zero exposure") {
  CHECK(allocate(spec_of(StrategyKind::rr_enhanced), window_with_spectrum({0.02, 0.021, 0.0215}, 3)).exposure == 0.0);
  CHECK(allocate(spec_of(StrategyKind::rr_enhanced), window_with_spectrum({0.6, 0.8, 0.9}, 4)).exposure == 1.0);
}

TEST_CASE("random benchmark holds fixed weights with RR exposure") {
  Rng rng(5);
  auto s = spec_of(StrategyKind::random_benchmark);
  s.benchmark_weights = sample_simplex(4, rng);
  const auto risky = window_with_spectrum({0.02, 0.021, 0.0215}, 6);
  const auto calm = window_with_spectrum({0.6, 0.8, 0.9}, 7);
  CHECK(allocate(s, risky).weights == *s.benchmark_weights);
  CHECK(allocate(s, risky).exposure == 0.5);
  CHECK(allocate(s, calm).exposure == 1.0);
  CHECK_THROWS_AS(allocate(s, testing::random_matrix(20, 3, rng)), ArgumentError);
}

TEST_CASE("RR and 1/N share weights and differ only in exposure") {
  const auto panel = testing::regime_panel(11, {.days = 400, .assets = 6}).panel;
  const auto u = testing::full_universe(6);
  std::size_t reduced = 0;
  for (std::size_t t = 20; t < panel.num_days(); ++t) {
    const auto w = window(panel, u, t, 20).values;
    const auto rr = allocate(spec_of(StrategyKind::rr), w);
    const auto eq = allocate(spec_of(StrategyKind::one_over_n), w);
    CHECK(rr.weights == eq.weights);
    CHECK((rr.exposure == 1.0 || rr.exposure == 0.5));
    reduced += rr.exposure < 1.0;
  }
  CHECK(reduced > 0);
}

TEST_CASE("deterministic strategies are bit-identical across calls") {
  Rng rng(8);
  const auto w = testing::random_matrix(30, 5, rng, 0.01);
  for (auto kind : {StrategyKind::one_over_n, StrategyKind::rr, StrategyKind::rr_enhanced, StrategyKind::min_var,
                    StrategyKind::min_var_quantile, StrategyKind::min_cvar}) {
    auto s = spec_of(kind);
    s.optimizer_alpha = 0.05;
    CHECK(allocate(s, w) == allocate(s, w));
  }
}

TEST_CASE("optimizer strategies are fully invested") {
  Rng rng(9);
  const auto w = testing::random_matrix(30, 4, rng, 0.01);
  for (auto kind : {StrategyKind::min_var, StrategyKind::min_var_quantile, StrategyKind::min_cvar}) {
    const auto a = allocate(spec_of(kind), w);
    CHECK(a.exposure == 1.0);
    CHECK(a.weights.values().sum() == doctest::Approx(1.0));
  }
  AllocationContext ctx;
  allocate(spec_of(StrategyKind::min_var), w, &ctx);
  CHECK(ctx.previous_weights.has_value());
}

TEST_CASE("random exposure paths") {
  Rng rng(10);
  CHECK(random_exposure_path(10, 0, 0.5, rng) == std::vector<double>(10, 1.0));
  CHECK(random_exposure_path(10, 10, 0.5, rng) == std::vector<double>(10, 0.5));
  const auto p = random_exposure_path(250, 40, 0.5, rng);
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == 250 - 40 * 0.5);
  CHECK(std::count(p.begin(), p.end(), 0.5) == 40);
  CHECK_THROWS_AS(random_exposure_path(5, 6, 0.5, rng), ArgumentError);

  Rng a(3), b(3);
  CHECK(random_exposure_path(100, 30, 0.25, a) == random_exposure_path(100, 30, 0.25, b));

  // each day is reduced with probability num_reduced / num_days
  std::vector<int> hits(20, 0);
  for (int draw = 0; draw < 20000; ++draw) {
    const auto q = random_exposure_path(20, 5, 0.5, rng);
    for (std::size_t i = 0; i < 20; ++i) hits[i] += q[i] < 1.0;
  }
  for (int h : hits) CHECK(std::abs(h / 20000.0 - 0.25) < 0.02);
}

TEST_CASE("simplex sampling") {
  Rng rng(12);
  CHECK(sample_simplex(1, rng)[0] == 1.0);
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  const int draws = 100000;
  double second_moment = 0.0;
  for (int d = 0; d < draws; ++d) {
    const auto w = sample_simplex(3, rng);
    CHECK(w.values().minCoeff() >= 0.0);
    CHECK(std::abs(w.values().sum() - 1.0) <= 1e-12);
    mean += w.values();
    second_moment += w[0] * w[0];
  }
  mean /= draws;
  for (int i = 0; i < 3; ++i) CHECK(std::abs(mean[i] - 1.0 / 3.0) < 0.005);
  // Dirichlet(1,1,1): E[w^2] = 2 / (3 * 4)
  CHECK(std::abs(second_moment / draws - 1.0 / 6.0) < 0.005);
}
