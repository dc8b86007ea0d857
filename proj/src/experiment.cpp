#include "spectral_risk/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>
#include <array>
#include <limits>

#include "spectral_risk/config.hpp"
#include "spectral_risk/error.hpp"

namespace spectral_risk {

namespace {

constexpr std::uint64_t kBenchmarkSalt = 0x62656e63686d6b31ULL;

struct MetricField {
  const char* key;
  const char* label;
  double MetricsSummary::*member;
};

constexpr std::array<MetricField, 8> kMetricFields{{
    {"a_r", "a.r.", &MetricsSummary::a_r},
    {"st_dev", "st.dev.", &MetricsSummary::st_dev},
    {"sr", "SR", &MetricsSummary::sr},
    {"var", "VaR 1%", &MetricsSummary::var},
    {"cvar", "CVaR 1%", &MetricsSummary::cvar},
    {"mdd", "MDD", &MetricsSummary::mdd},
    {"sk", "Sk", &MetricsSummary::sk},
    {"k", "K", &MetricsSummary::k},
}};

std::string format_g(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string metric_label(const MetricField& f, double alpha) {
  if (f.member == &MetricsSummary::var || f.member == &MetricsSummary::cvar) {
    const std::string pct = format_g(alpha * 100.0, 6) + "%";
    return std::string(f.member == &MetricsSummary::var ? "VaR " : "CVaR ") + pct;
  }
  return f.label;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("trailing characters in number '" + s + "'", line);
    return v;
  } catch (const std::invalid_argument&) {
    throw ParseError("cannot parse number '" + s + "'", line);
  } catch (const std::out_of_range&) {
    throw ParseError("number out of range '" + s + "'", line);
  }
}

std::size_t index_of_rr(const std::vector<StrategySpec>& strategies) {
  for (std::size_t i = 0; i < strategies.size(); ++i)
    if (strategies[i].kind == StrategyKind::rr) return i;
  return strategies.size();
}

}  // namespace

std::vector<StrategySpec> ExperimentConfig::default_strategies() {
  std::vector<StrategySpec> out;
  for (auto kind : {StrategyKind::one_over_n, StrategyKind::rr, StrategyKind::random_control,
                    StrategyKind::min_var, StrategyKind::min_var_quantile, StrategyKind::min_cvar}) {
    StrategySpec s;
    s.kind = kind;
    out.push_back(s);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (grid_N.empty()) throw ArgumentError("grid_N: must not be empty");
  if (grid_w.empty()) throw ArgumentError("grid_w: must not be empty");
  for (auto n : grid_N)
    if (n < 2) throw ArgumentError("grid_N: every universe size must be >= 2");
  for (auto w : grid_w)
    if (w < 2) throw ArgumentError("grid_w: every window length must be >= 2");
  if (reps < 1) throw ArgumentError("reps: must be >= 1");
  if (!(cost_rate >= 0.0)) throw ArgumentError("cost_rate: must be >= 0");
  if (!(alpha > 0.0 && alpha <= 0.5)) throw ArgumentError("alpha: must lie in (0, 0.5]");
  if (!(optimizer_alpha > 0.0 && optimizer_alpha <= 0.5))
    throw ArgumentError("optimizer_alpha: must lie in (0, 0.5]");
  if (strategies.empty()) throw ArgumentError("strategies: must not be empty");
  bool has_control = false;
  std::vector<std::string> names;
  for (const auto& s : strategies) {
    if (!(s.reduction >= 0.0 && s.reduction <= 1.0)) throw ArgumentError("strategies: reduction must lie in [0, 1]");
    if (s.kind == StrategyKind::rr_enhanced)
      for (auto n : grid_N)
        if (n < 3) throw ArgumentError("grid_N: rr_enhanced needs universes of at least 3 assets");
    has_control |= s.kind == StrategyKind::random_control;
    if (s.name().find_first_of(",|\n\r") != std::string::npos)
      throw ArgumentError("strategies: label '" + s.name() + "' must not contain ',', '|' or line breaks");
    names.push_back(s.name());
  }
  if (has_control && index_of_rr(strategies) == strategies.size())
    throw ArgumentError("strategies: random_control requires an rr strategy in the same experiment");
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end())
    throw ArgumentError("strategies: duplicate strategy name; set distinct labels");
}

std::uint64_t rep_seed(std::uint64_t master_seed, std::size_t N, std::size_t w, std::size_t rep) {
  return mix_seed(master_seed, N, w, rep);
}

RepResult run_rep(const ReturnPanel& panel, const ExperimentConfig& cfg, std::size_t N, std::size_t w,
                  std::size_t rep) {
  RepResult out;
  out.rep = rep;
  out.seed = rep_seed(cfg.master_seed, N, w, rep);
  Rng universe_rng(out.seed);
  out.universe = sample_universe(panel, N, universe_rng);

  const auto& specs = cfg.strategies;
  const std::size_t count = specs.size();
  std::vector<BacktestResult> runs(count);
  std::vector<bool> done(count, false);

  BacktestOptions base;
  base.cost_rate = cfg.cost_rate;
  base.cost_convention = cfg.cost_convention;

  auto run_one = [&](std::size_t i) {
    StrategySpec spec = specs[i];
    spec.optimizer_alpha = cfg.optimizer_alpha;
    BacktestOptions options = base;
    if (spec.kind == StrategyKind::random_benchmark && !spec.benchmark_weights) {
      Rng bench_rng(mix_seed(out.seed, kBenchmarkSalt));
      spec.benchmark_weights = sample_simplex(static_cast<Eigen::Index>(N), bench_rng);
    }
    if (spec.kind == StrategyKind::random_control) {
      const std::size_t rr = index_of_rr(specs);
      options.reduced_days = runs[rr].signal_days();
      spec.reduction = specs[rr].reduction;
    }
    Rng rng(mix_seed(out.seed, i + 1));
    runs[i] = run_backtest(panel, out.universe, spec, w, options, rng);
    done[i] = true;
  };

  const std::size_t rr = index_of_rr(specs);
  if (rr < count) run_one(rr);
  for (std::size_t i = 0; i < count; ++i)
    if (!done[i]) run_one(i);

  for (std::size_t i = 0; i < count; ++i) {
    if (runs[i].wiped_out) {
      out.completed = false;
      out.note = specs[i].name() + " wiped out on day " + std::to_string(runs[i].records.back().day);
      out.metrics.clear();
      out.signal_days.clear();
      return out;
    }
    const auto net = runs[i].net_returns();
    out.metrics.push_back(summarize(net, cfg.alpha));
    out.signal_days.push_back(runs[i].signal_days());
  }
  out.completed = true;
  if (cfg.save_runs) out.runs = std::move(runs);
  return out;
}

CellResult aggregate_cell(std::size_t N, std::size_t w, std::vector<std::string> strategy_names,
                          std::vector<RepResult> reps) {
  CellResult cell;
  cell.N = N;
  cell.w = w;
  cell.strategy_names = std::move(strategy_names);
  cell.requested_reps = reps.size();
  const std::size_t s_count = cell.strategy_names.size();
  cell.mean.assign(s_count, MetricsSummary{});
  cell.dispersion.assign(s_count, MetricsSummary{});
  for (const auto& r : reps) {
    cell.rep_seeds.push_back(r.seed);
    if (r.completed) ++cell.completed_reps;
  }
  const double n = static_cast<double>(cell.completed_reps);
  for (std::size_t s = 0; s < s_count; ++s) {
    for (const auto& f : kMetricFields) {
      if (cell.completed_reps == 0) {
        cell.mean[s].*f.member = std::numeric_limits<double>::quiet_NaN();
        cell.dispersion[s].*f.member = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      double sum = 0.0;
      for (const auto& r : reps)
        if (r.completed) sum += r.metrics[s].*f.member;
      const double m = sum / n;
      double ss = 0.0;
      for (const auto& r : reps)
        if (r.completed) ss += (r.metrics[s].*f.member - m) * (r.metrics[s].*f.member - m);
      cell.mean[s].*f.member = m;
      cell.dispersion[s].*f.member = cell.completed_reps > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
  }
  cell.reps = std::move(reps);
  return cell;
}

std::vector<CellResult> run_experiment(const ReturnPanel& panel, const ExperimentConfig& cfg, unsigned jobs) {
  cfg.validate();
  const std::size_t max_n = *std::max_element(cfg.grid_N.begin(), cfg.grid_N.end());
  const std::size_t max_w = *std::max_element(cfg.grid_w.begin(), cfg.grid_w.end());
  if (max_n > panel.num_assets())
    throw ArgumentError("grid_N: universe of " + std::to_string(max_n) + " exceeds the " +
                        std::to_string(panel.num_assets()) + " assets in the panel");
  if (panel.num_days() < max_w + 4)
    throw ArgumentError("panel too short: need at least 4 out-of-sample days after the longest window");

  struct Item {
    std::size_t cell;
    std::size_t N;
    std::size_t w;
    std::size_t rep;
  };
  std::vector<Item> items;
  std::size_t cell_index = 0;
  for (auto N : cfg.grid_N)
    for (auto w : cfg.grid_w) {
      for (std::size_t rep = 0; rep < cfg.reps; ++rep) items.push_back({cell_index, N, w, rep});
      ++cell_index;
    }

  std::vector<RepResult> slots(items.size());
  std::vector<std::exception_ptr> errors(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      try {
        slots[i] = run_rep(panel, cfg, items[i].N, items[i].w, items[i].rep);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, jobs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::string> names;
  for (const auto& s : cfg.strategies) names.push_back(s.name());

  std::vector<CellResult> out;
  std::size_t pos = 0;
  for (auto N : cfg.grid_N)
    for (auto w : cfg.grid_w) {
      std::vector<RepResult> reps(std::make_move_iterator(slots.begin() + static_cast<std::ptrdiff_t>(pos)),
                                  std::make_move_iterator(slots.begin() + static_cast<std::ptrdiff_t>(pos + cfg.reps)));
      pos += cfg.reps;
      for (const auto& r : reps)
        if (!r.completed) std::clog << "cell N=" << N << " w=" << w << " rep " << r.rep << " excluded: " << r.note << '\n';
      out.push_back(aggregate_cell(N, w, names, std::move(reps)));
      out.back().alpha = cfg.alpha;
    }
  return out;
}

std::string emit_table(const std::vector<CellResult>& results, TableFormat format, TableStatistic statistic) {
  std::ostringstream out;
  bool header_written = false;
  for (const auto& cell : results) {
    const auto& values = statistic == TableStatistic::mean ? cell.mean : cell.dispersion;
    if (format == TableFormat::csv) {
      if (!header_written) {
        out << "N,w,completed_reps,metric";
        for (const auto& s : cell.strategy_names) out << ',' << s;
        out << '\n';
        header_written = true;
      }
      for (const auto& f : kMetricFields) {
        out << cell.N << ',' << cell.w << ',' << cell.completed_reps << ',' << metric_label(f, cell.alpha);
        for (const auto& v : values) out << ',' << format_g(v.*f.member, 6);
        out << '\n';
      }
    } else {
      if (header_written) out << '\n';
      header_written = true;
      out << "### N = " << cell.N << ", w = " << cell.w << " (" << cell.completed_reps << "/"
          << cell.requested_reps << " reps"
          << (statistic == TableStatistic::dispersion ? ", cross-rep standard deviation" : "") << ")\n\n";
      out << "| metric |";
      for (const auto& s : cell.strategy_names) out << ' ' << s << " |";
      out << "\n|---|";
      for (std::size_t i = 0; i < cell.strategy_names.size(); ++i) out << "---:|";
      out << '\n';
      for (const auto& f : kMetricFields) {
        out << "| " << metric_label(f, cell.alpha) << " |";
        for (const auto& v : values) out << ' ' << format_g(v.*f.member, 6) << " |";
        out << '\n';
      }
    }
  }
  return out.str();
}

void write_cell_csv(std::ostream& out, const CellResult& cell) {
  out << "N,w,rep,seed,status,universe,strategy,signal_days";
  for (const auto& f : kMetricFields) out << ',' << f.key;
  out << '\n';
  for (const auto& r : cell.reps) {
    std::string universe;
    for (std::size_t i = 0; i < r.universe.size(); ++i) universe += (i ? ";" : "") + std::to_string(r.universe[i]);
    for (std::size_t s = 0; s < cell.strategy_names.size(); ++s) {
      out << cell.N << ',' << cell.w << ',' << r.rep << ',' << r.seed << ','
          << (r.completed ? "completed" : "excluded") << ',' << universe << ',' << cell.strategy_names[s];
      if (r.completed) {
        out << ',' << r.signal_days[s];
        for (const auto& f : kMetricFields) out << ',' << format_g(r.metrics[s].*f.member, 17);
      } else {
        out << ',';
        for (std::size_t i = 0; i < kMetricFields.size(); ++i) out << ',';
      }
      out << '\n';
    }
  }
}

CellResult read_cell_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("empty cell file");
  const auto header = split(line, ',');
  if (header.size() != 8 + kMetricFields.size() || header[0] != "N")
    throw ParseError("unexpected cell file header", 1);

  std::size_t N = 0;
  std::size_t w = 0;
  std::vector<std::string> names;
  std::map<std::size_t, RepResult> reps;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) throw ParseError("wrong field count", line_no);
    try {
      N = std::stoul(f[0]);
      w = std::stoul(f[1]);
      const std::size_t rep = std::stoul(f[2]);
      auto& r = reps[rep];
      r.rep = rep;
      r.seed = std::stoull(f[3]);
      r.completed = f[4] == "completed";
      if (r.universe.empty() && !f[5].empty())
        for (const auto& u : split(f[5], ';')) r.universe.push_back(std::stoul(u));
      if (std::find(names.begin(), names.end(), f[6]) == names.end()) names.push_back(f[6]);
      if (r.completed) {
        r.signal_days.push_back(std::stoul(f[7]));
        MetricsSummary m;
        for (std::size_t i = 0; i < kMetricFields.size(); ++i)
          m.*kMetricFields[i].member = parse_double(f[8 + i], line_no);
        r.metrics.push_back(m);
      }
    } catch (const std::logic_error&) {
      throw ParseError("malformed integer field", line_no);
    }
  }
  std::vector<RepResult> ordered;
  for (auto& [rep, r] : reps) {
    if (r.completed && r.metrics.size() != names.size())
      throw ParseError("rep " + std::to_string(rep) + " does not list every strategy");
    ordered.push_back(std::move(r));
  }
  return aggregate_cell(N, w, names, std::move(ordered));
}

void write_run_csv(std::ostream& out, const BacktestResult& run, const ReturnPanel& panel) {
  out << "day,date,gross,cost,net,exposure,wealth,d_v0,d_v1\n";
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    const auto& r = run.records[i];
    out << r.day << ',' << panel.dates()[r.day] << ',' << format_g(r.gross_return, 17) << ','
        << format_g(r.cost, 17) << ',' << format_g(r.net_return, 17) << ',' << format_g(r.exposure, 17) << ','
        << format_g(run.wealth[i + 1], 17) << ','
        << (r.distance_origin ? format_g(*r.distance_origin, 17) : "") << ','
        << (r.distance_single_one ? format_g(*r.distance_single_one, 17) : "") << '\n';
  }
}

namespace {

void write_summaries(const std::filesystem::path& dir, const std::vector<CellResult>& results) {
  std::ofstream(dir / "summary.csv") << emit_table(results, TableFormat::csv);
  std::ofstream(dir / "summary.md") << emit_table(results, TableFormat::markdown);
  std::ofstream(dir / "dispersion.csv") << emit_table(results, TableFormat::csv, TableStatistic::dispersion);
}

}  // namespace

void write_experiment_outputs(const std::string& dir_name, const std::vector<CellResult>& results,
                              const ExperimentConfig& cfg, const ReturnPanel& panel) {
  namespace fs = std::filesystem;
  const fs::path dir(dir_name);
  fs::create_directories(dir);
  for (const auto& cell : results) {
    std::ofstream out(dir / ("cell_" + std::to_string(cell.N) + "_" + std::to_string(cell.w) + ".csv"));
    write_cell_csv(out, cell);
  }
  write_summaries(dir, results);

  std::vector<std::string> notes;
  for (auto w : cfg.grid_w) {
    const std::size_t k = tail_count(cfg.optimizer_alpha, w);
    if (k == 1)
      notes.push_back("w=" + std::to_string(w) + ": optimizer tail holds a single scenario (ceil(" +
                      format_g(cfg.optimizer_alpha, 6) + "*" + std::to_string(w) +
                      ")=1), so Min-VaR and Min-CVaR both minimize the worst-case loss");
  }
  std::vector<std::string> excluded;
  for (const auto& cell : results)
    for (const auto& r : cell.reps)
      if (!r.completed)
        excluded.push_back("N=" + std::to_string(cell.N) + " w=" + std::to_string(cell.w) + " rep " +
                           std::to_string(r.rep) + ": " + r.note);
  std::ofstream(dir / "metadata.json") << experiment_metadata_json(cfg, panel, notes, excluded);

  if (cfg.save_runs) {
    fs::create_directories(dir / "runs");
    for (const auto& cell : results)
      for (const auto& r : cell.reps)
        for (std::size_t i = 0; i < r.runs.size(); ++i) {
          const auto& run = r.runs[i];
          const std::string name = std::to_string(cell.N) + "_" + std::to_string(cell.w) + "_" +
                                   std::to_string(r.rep) + "_" + std::to_string(i) + "_" +
                                   std::string(to_string(run.strategy.kind)) + ".csv";
          std::ofstream out(dir / "runs" / name);
          write_run_csv(out, run, panel);
        }
  }
}

std::vector<CellResult> regenerate_report(const std::string& dir_name) {
  namespace fs = std::filesystem;
  const fs::path dir(dir_name);
  if (!fs::is_directory(dir)) throw ArgumentError("no such directory: " + dir_name);
  std::vector<CellResult> cells;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("cell_", 0) != 0 || entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path());
    cells.push_back(read_cell_csv(in));
  }
  if (cells.empty()) throw ArgumentError("no cell_*.csv files in " + dir_name);
  // Restore grid order from metadata when present, otherwise (N, w) ascending.
  ReportLayout layout;
  if (fs::exists(dir / "metadata.json")) layout = read_report_layout((dir / "metadata.json").string());
  for (auto& c : cells) c.alpha = layout.alpha;
  const auto& order = layout.grid_order;
  auto rank = [&](const CellResult& c) {
    const auto it = std::find(order.begin(), order.end(), std::make_pair(c.N, c.w));
    return it == order.end() ? order.size() : static_cast<std::size_t>(it - order.begin());
  };
  std::stable_sort(cells.begin(), cells.end(), [&](const CellResult& a, const CellResult& b) {
    const auto ra = rank(a);
    const auto rb = rank(b);
    if (ra != rb) return ra < rb;
    return std::make_pair(a.N, a.w) < std::make_pair(b.N, b.w);
  });
  write_summaries(dir, cells);
  return cells;
}

}  // namespace spectral_risk
