#include "spectral_risk/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string_view>

#include "spectral_risk/error.hpp"

namespace spectral_risk {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

struct RawTable {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  std::vector<std::vector<double>> rows;
};

RawTable read_table(std::istream& in) {
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto fields = split_fields(view);
    if (!have_header) {
      if (fields.size() < 2) throw ParseError("header needs a date column and at least one ticker", line_no);
      if (fields[0] != "date") throw ParseError("first header column must be 'date'", line_no);
      for (std::size_t j = 1; j < fields.size(); ++j) {
        if (fields[j].empty()) throw ParseError("empty ticker name in header", line_no);
        table.tickers.emplace_back(fields[j]);
      }
      auto sorted = table.tickers;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError("duplicate ticker in header");
      have_header = true;
      continue;
    }
    if (fields.size() != table.tickers.size() + 1)
      throw ParseError("expected " + std::to_string(table.tickers.size() + 1) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    if (fields[0].empty()) throw ParseError("empty date", line_no);
    std::vector<double> row(table.tickers.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
      const auto cell = fields[j + 1];
      const std::string where =
          "row " + std::to_string(line_no) + ", ticker " + table.tickers[j];
      if (cell.empty()) throw ValidationError("missing value at " + where);
      double value = 0.0;
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      if (*begin == '+') ++begin;
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || ptr != end) {
        throw ParseError("cannot parse '" + std::string(cell) + "' for ticker " + table.tickers[j],
                         line_no);
      }
      if (!std::isfinite(value)) throw ValidationError("non-finite value at " + where);
      row[j] = value;
    }
    table.dates.emplace_back(fields[0]);
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("empty input, no header row");
  if (table.rows.empty()) throw ValidationError("no data rows");
  return table;
}

ReturnPanel sorted_panel(RawTable table) {
  std::vector<std::size_t> order(table.dates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return table.dates[a] < table.dates[b]; });
  std::vector<std::string> dates;
  dates.reserve(order.size());
  Eigen::MatrixXd values(static_cast<Eigen::Index>(order.size()),
                         static_cast<Eigen::Index>(table.tickers.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto src = order[i];
    if (!dates.empty() && dates.back() == table.dates[src])
      throw ValidationError("duplicate date " + table.dates[src]);
    dates.push_back(table.dates[src]);
    for (std::size_t j = 0; j < table.tickers.size(); ++j)
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table.rows[src][j];
  }
  return ReturnPanel(std::move(dates), std::move(table.tickers), std::move(values));
}

}  // namespace

ReturnPanel::ReturnPanel(std::vector<std::string> dates, std::vector<std::string> tickers,
                         Eigen::MatrixXd values)
    : dates_(std::move(dates)), tickers_(std::move(tickers)), values_(std::move(values)) {
  if (tickers_.empty() || dates_.empty()) throw ValidationError("panel needs at least one day and one asset");
  if (static_cast<std::size_t>(values_.rows()) != dates_.size() ||
      static_cast<std::size_t>(values_.cols()) != tickers_.size())
    throw ValidationError("panel shape does not match dates x tickers");
  for (std::size_t i = 1; i < dates_.size(); ++i)
    if (!(dates_[i - 1] < dates_[i])) throw ValidationError("dates must be strictly increasing at " + dates_[i]);
  if (!values_.allFinite()) throw ValidationError("panel contains non-finite values");
}

std::size_t ReturnPanel::ticker_index(const std::string& ticker) const {
  const auto it = std::find(tickers_.begin(), tickers_.end(), ticker);
  if (it == tickers_.end()) throw ArgumentError("unknown ticker " + ticker);
  return static_cast<std::size_t>(it - tickers_.begin());
}

ReturnPanel ReturnPanel::scaled(double factor) const {
  return ReturnPanel(dates_, tickers_, values_ * factor);
}

ReturnPanel load_panel(std::istream& in) { return sorted_panel(read_table(in)); }

ReturnPanel load_panel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  return load_panel(in);
}

ReturnPanel load_prices(std::istream& in) {
  const ReturnPanel prices = sorted_panel(read_table(in));
  if (prices.num_days() < 2) throw ValidationError("need at least two price rows");
  const Eigen::MatrixXd& p = prices.values();
  if ((p.array() <= 0.0).any()) throw ValidationError("prices must be strictly positive");
  const Eigen::Index t = p.rows() - 1;
  Eigen::MatrixXd r = p.bottomRows(t).cwiseQuotient(p.topRows(t)).array() - 1.0;
  std::vector<std::string> dates(prices.dates().begin() + 1, prices.dates().end());
  return ReturnPanel(std::move(dates), prices.tickers(), std::move(r));
}

void write_panel(std::ostream& out, const ReturnPanel& panel) {
  out << "date";
  for (const auto& t : panel.tickers()) out << ',' << t;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < panel.num_days(); ++i) {
    out << panel.dates()[i];
    for (std::size_t j = 0; j < panel.num_assets(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g",
                    panel.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out << ',' << buf;
    }
    out << '\n';
  }
}

Universe sample_universe(const ReturnPanel& panel, std::size_t count, Rng& rng) {
  const std::size_t n = panel.num_assets();
  if (count > n)
    throw ArgumentError("cannot sample " + std::to_string(count) + " assets from " + std::to_string(n));
  // Partial Fisher-Yates.
  Universe pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

ReturnMatrix window(const ReturnPanel& panel, const Universe& universe, std::size_t t,
                    std::size_t w) {
  if (w == 0) throw ArgumentError("window length must be positive");
  if (t < w) throw ArgumentError("day " + std::to_string(t) + " precedes the first full window of " + std::to_string(w));
  if (t > panel.num_days()) throw ArgumentError("day index past the end of the panel");
  if (universe.empty()) throw ArgumentError("empty universe");
  ReturnMatrix out;
  out.window_start = t - w;
  out.values.resize(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(universe.size()));
  for (std::size_t j = 0; j < universe.size(); ++j) {
    if (universe[j] >= panel.num_assets()) throw ArgumentError("universe index out of range");
    out.values.col(static_cast<Eigen::Index>(j)) =
        panel.values().col(static_cast<Eigen::Index>(universe[j])).segment(
            static_cast<Eigen::Index>(t - w), static_cast<Eigen::Index>(w));
  }
  return out;
}

Universe universe_from_tickers(const ReturnPanel& panel, const std::vector<std::string>& tickers) {
  Universe u;
  u.reserve(tickers.size());
  for (const auto& t : tickers) u.push_back(panel.ticker_index(t));
  return u;
}

}  // namespace spectral_risk
