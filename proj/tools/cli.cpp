#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <CLI11.hpp>

#include "spectral_risk/backtest.hpp"
#include "spectral_risk/config.hpp"
#include "spectral_risk/error.hpp"
#include "spectral_risk/experiment.hpp"
#include "spectral_risk/market_data.hpp"
#include "spectral_risk/metrics.hpp"
#include "spectral_risk/spectral.hpp"

namespace spectral_risk::cli {

namespace {

namespace fs = std::filesystem;

/// Missing input file; mapped to exit status 66.
class MissingFile : public Error {
 public:
  using Error::Error;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ReturnPanel read_panel(const CliInvocation& inv) {
  std::ifstream in(inv.data_path);
  if (!in) throw MissingFile("cannot open data file " + inv.data_path);
  return inv.prices ? load_prices(in) : load_panel(in);
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("SPECTRAL_RISK_SEED");
  if (!raw || !*raw) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(raw, &used);
    if (used == std::string(raw).size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError(std::string("SPECTRAL_RISK_SEED is not an unsigned integer: ") + raw);
}

std::uint64_t resolve_seed(const CliInvocation& inv, std::uint64_t fallback) {
  if (inv.seed) return *inv.seed;
  if (auto e = env_seed()) return *e;
  return fallback;
}

int run_spectrum(const CliInvocation& inv, std::ostream& out) {
  const ReturnPanel panel = read_panel(inv);
  const Universe universe = universe_from_tickers(panel, inv.assets);
  if (universe.size() < 2) throw ArgumentError("--assets needs at least two tickers");
  const std::size_t w = inv.window;
  const std::size_t n = universe.size();

  out << "t,window_end";
  for (std::size_t i = 1; i < n; ++i) out << ",sigma_" << i;
  for (std::size_t k = 0; k < n; ++k) out << ",d_v" << k;
  out << ",level,rr_signal,enhanced_signal\n";

  std::size_t first = w;
  std::size_t last = panel.num_days();
  if (inv.day) first = last = *inv.day;
  for (std::size_t t = first; t <= last; ++t) {
    const ReturnMatrix win = window(panel, universe, t, w);
    const auto s = normalized_spectrum(win.values);
    const auto d = vertex_distances(s);
    out << t << ',' << panel.dates()[t - 1];
    for (Eigen::Index i = 0; i < s.size(); ++i) out << ',' << fmt(s[i]);
    for (Eigen::Index k = 0; k < d.size(); ++k) out << ',' << fmt(d[k]);
    out << ',' << classify_scenario(s).level << ',' << (rr_signal(s) ? 1 : 0) << ',';
    if (n >= 3) out << (enhanced_signal(s) ? 1 : 0);
    out << '\n';
  }
  return kSuccess;
}

int run_backtest_cmd(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  const ReturnPanel panel = read_panel(inv);
  const std::uint64_t seed = resolve_seed(inv, 1);
  Universe universe;
  if (!inv.assets.empty()) {
    universe = universe_from_tickers(panel, inv.assets);
  } else {
    if (inv.universe_size == 0) throw ArgumentError("give --assets or --universe-size");
    Rng rng(seed);
    universe = sample_universe(panel, inv.universe_size, rng);
  }

  StrategySpec spec;
  spec.kind = strategy_kind_from_string(inv.strategy);
  spec.reduction = inv.reduction.value_or(0.5);
  const double alpha = inv.alpha.value_or(0.01);
  spec.optimizer_alpha = alpha;
  if (spec.kind == StrategyKind::random_benchmark) {
    Rng rng(mix_seed(seed, 0x62656e63686d6b31ULL));
    spec.benchmark_weights = sample_simplex(static_cast<Eigen::Index>(universe.size()), rng);
  }

  BacktestOptions options;
  options.cost_rate = inv.cost_bp.value_or(10.0) / 1e4;
  if (spec.kind == StrategyKind::random_control) {
    StrategySpec rr = spec;
    rr.kind = StrategyKind::rr;
    Rng rr_rng(seed);
    options.reduced_days = run_backtest(panel, universe, rr, inv.window, options, rr_rng).signal_days();
  }
  Rng rng(mix_seed(seed, 1));
  const BacktestResult result = run_backtest(panel, universe, spec, inv.window, options, rng);

  if (inv.output_dir.empty()) {
    write_run_csv(out, result, panel);
  } else {
    std::ofstream file(inv.output_dir);
    if (!file) throw ArgumentError("cannot write " + inv.output_dir);
    write_run_csv(file, result, panel);
  }

  if (result.wiped_out) {
    err << "wealth wiped out on day " << result.records.back().day << '\n';
    return kSuccess;
  }
  const auto net = result.net_returns();
  if (net.size() >= 4) {
    const MetricsSummary m = summarize(net, alpha);
    err << "strategy " << spec.name() << ", " << net.size() << " days, signal days " << result.signal_days()
        << "\na.r. " << m.a_r << "  st.dev. " << m.st_dev << "  SR " << m.sr << "  VaR " << m.var << "  CVaR "
        << m.cvar << "  MDD " << m.mdd << "  Sk " << m.sk << "  K " << m.k << '\n';
  }
  return kSuccess;
}

int run_experiment_cmd(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  // Precedence: built-in default < SPECTRAL_RISK_SEED < config < --seed.
  ExperimentConfig defaults;
  if (auto e = env_seed()) defaults.master_seed = *e;
  ExperimentConfig cfg = inv.config_path.empty() ? defaults : load_config(inv.config_path, defaults);
  if (inv.seed) cfg.master_seed = *inv.seed;
  if (inv.cost_bp) cfg.cost_rate = *inv.cost_bp / 1e4;
  if (inv.alpha) cfg.alpha = *inv.alpha;
  if (inv.reduction)
    for (auto& s : cfg.strategies) s.reduction = *inv.reduction;
  try {
    cfg.validate();
  } catch (const ArgumentError& e) {
    throw ValidationError(e.what());
  }

  const ReturnPanel panel = read_panel(inv);
  const auto results = run_experiment(panel, cfg, inv.jobs);
  write_experiment_outputs(inv.output_dir, results, cfg, panel);
  out << emit_table(results, TableFormat::markdown);
  err << "wrote " << results.size() << " cells to " << inv.output_dir << '\n';
  return kSuccess;
}

int run_report_cmd(const CliInvocation& inv, std::ostream& out) {
  if (!fs::is_directory(inv.output_dir)) throw MissingFile("no such directory: " + inv.output_dir);
  const auto cells = regenerate_report(inv.output_dir);
  out << emit_table(cells, TableFormat::markdown);
  return kSuccess;
}

}  // namespace

ParseOutcome parse_cli(const std::vector<std::string>& args) {
  CLI::App app{"Spectral risk detection and leverage-switching backtests", "spectral_risk"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  CliInvocation inv;
  double cost_bp = 10.0;
  double alpha = 0.01;
  double reduction = 0.5;
  std::uint64_t seed = 1;
  std::size_t day = 0;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* spectrum = app.add_subcommand("spectrum", "Normalized spectrum and vertex distances of rolling windows");
  spectrum->add_option("--data", inv.data_path, "Returns CSV (date,<ticker>,...)")->required();
  spectrum->add_option("--window", inv.window, "Window length w")->check(CLI::PositiveNumber);
  spectrum->add_option("--assets", inv.assets, "Comma-separated tickers")->delimiter(',')->required()->default_str("");
  auto* day_opt = spectrum->add_option("--day", day, "Only the window ending before this day index");
  spectrum->add_flag("--prices", inv.prices, "Input holds prices; convert to simple returns");

  auto* backtest = app.add_subcommand("backtest", "Rolling backtest of one strategy, per-day CSV");
  backtest->add_option("--data", inv.data_path, "Returns CSV")->required();
  backtest->add_option("--window", inv.window, "Window length w")->check(CLI::PositiveNumber);
  backtest->add_option("--assets", inv.assets, "Comma-separated tickers")->delimiter(',')->default_str("");
  backtest->add_option("--universe-size", inv.universe_size, "Sample this many assets when --assets is absent");
  backtest->add_option("--strategy", inv.strategy,
                       "one_over_n|rr|rr_enhanced|random_control|random_benchmark|min_var|min_var_quantile|min_cvar");
  auto* bt_cost = backtest->add_option("--cost-bp", cost_bp, "Transaction cost in basis points per unit turnover");
  auto* bt_alpha = backtest->add_option("--alpha", alpha, "Tail level for VaR/CVaR optimizers and metrics");
  auto* bt_red = backtest->add_option("--reduction", reduction, "Exposure kept when the RR signal fires");
  auto* bt_seed = backtest->add_option("--seed", seed, "Seed (overrides SPECTRAL_RISK_SEED)");
  backtest->add_option("--out", inv.output_dir, "Output CSV file (default stdout)");
  backtest->add_flag("--prices", inv.prices, "Input holds prices; convert to simple returns");

  auto* experiment = app.add_subcommand("experiment", "Monte-Carlo grid over N and w, comparison tables");
  experiment->add_option("--data", inv.data_path, "Returns CSV")->required();
  experiment->add_option("--config", inv.config_path, "Experiment config JSON");
  experiment->add_option("--out", inv.output_dir, "Output directory")->required();
  auto* ex_seed = experiment->add_option("--seed", seed, "Master seed (overrides config and SPECTRAL_RISK_SEED)");
  experiment->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  auto* ex_cost = experiment->add_option("--cost-bp", cost_bp, "Transaction cost in basis points (overrides config)");
  auto* ex_alpha = experiment->add_option("--alpha", alpha, "Metric tail level (overrides config)");
  auto* ex_red = experiment->add_option("--reduction", reduction, "Exposure kept on RR signal (overrides config)");
  experiment->add_flag("--prices", inv.prices, "Input holds prices; convert to simple returns");

  auto* report = app.add_subcommand("report", "Rebuild summary tables from stored cell CSVs");
  report->add_option("--out", inv.output_dir, "Experiment output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    return {std::nullopt, kSuccess, (app.get_subcommands().empty() ? &app : app.get_subcommands().front())->help()};
  } catch (const CLI::CallForAllHelp&) {
    return {std::nullopt, kSuccess, app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    const auto selected = app.get_subcommands();
    return {std::nullopt, kUsage, std::string(e.what()) + "\n\n" + (selected.empty() ? &app : selected.front())->help()};
  }

  if (spectrum->parsed()) {
    inv.command = CliInvocation::Command::spectrum;
    if (day_opt->count()) inv.day = day;
  } else if (backtest->parsed()) {
    inv.command = CliInvocation::Command::backtest;
    if (bt_cost->count()) inv.cost_bp = cost_bp;
    if (bt_alpha->count()) inv.alpha = alpha;
    if (bt_red->count()) inv.reduction = reduction;
    if (bt_seed->count()) inv.seed = seed;
  } else if (experiment->parsed()) {
    inv.command = CliInvocation::Command::experiment;
    inv.jobs = jobs;
    if (ex_cost->count()) inv.cost_bp = cost_bp;
    if (ex_alpha->count()) inv.alpha = alpha;
    if (ex_red->count()) inv.reduction = reduction;
    if (ex_seed->count()) inv.seed = seed;
  } else {
    inv.command = CliInvocation::Command::report;
  }

  if (!inv.data_path.empty() && !fs::is_regular_file(inv.data_path))
    return {std::nullopt, kMissingFile, "data file not found: " + inv.data_path};
  if (!inv.config_path.empty() && !fs::is_regular_file(inv.config_path))
    return {std::nullopt, kMissingFile, "config file not found: " + inv.config_path};
  if (inv.command == CliInvocation::Command::report && !fs::is_directory(inv.output_dir))
    return {std::nullopt, kMissingFile, "output directory not found: " + inv.output_dir};
  return {std::move(inv), kSuccess, {}};
}

int run_cli(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  try {
    switch (inv.command) {
      case CliInvocation::Command::spectrum:
        return run_spectrum(inv, out);
      case CliInvocation::Command::backtest:
        return run_backtest_cmd(inv, out, err);
      case CliInvocation::Command::experiment:
        return run_experiment_cmd(inv, out, err);
      case CliInvocation::Command::report:
        return run_report_cmd(inv, out);
    }
  } catch (const MissingFile& e) {
    err << "error: " << e.what() << '\n';
    return kMissingFile;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kDataFormat;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kDataFormat;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const ParseOutcome parsed = parse_cli(args);
  if (!parsed.invocation) {
    (parsed.exit_status == kSuccess ? out : err) << parsed.message;
    if (!parsed.message.empty() && parsed.message.back() != '\n') (parsed.exit_status == kSuccess ? out : err) << '\n';
    return parsed.exit_status;
  }
  return run_cli(*parsed.invocation, out, err);
}

}  // namespace spectral_risk::cli
