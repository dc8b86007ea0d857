#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectral_risk/rng.hpp"

namespace spectral_risk {

using Universe = std::vector<std::size_t>;

/// Daily simple returns for n assets over T_total days. Immutable after load.
///
/// Invariants: every cell finite, dates strictly increasing, n >= 1 and
/// T_total >= 1. Dates are opaque strings compared lexicographically, so
/// ISO-8601 is the expected format.
class ReturnPanel {
 public:
  ReturnPanel(std::vector<std::string> dates, std::vector<std::string> tickers,
              Eigen::MatrixXd values);

  const std::vector<std::string>& dates() const noexcept { return dates_; }
  const std::vector<std::string>& tickers() const noexcept { return tickers_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

  std::size_t num_days() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t num_assets() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  /// Index of a ticker; throws ArgumentError if absent.
  std::size_t ticker_index(const std::string& ticker) const;

  /// Same dates and tickers, values multiplied by `factor`.
  ReturnPanel scaled(double factor) const;

 private:
  std::vector<std::string> dates_;
  std::vector<std::string> tickers_;
  Eigen::MatrixXd values_;
};

/// T x N slice of a panel: the w days strictly before `window_start + T`.
struct ReturnMatrix {
  Eigen::MatrixXd values;
  std::size_t window_start = 0;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }
};

/// Reads `date,<ticker>,...` CSV. Rows are sorted ascending by date.
/// Throws ParseError for malformed rows and ValidationError for missing,
/// non-finite or duplicated data.
ReturnPanel load_panel(std::istream& in);
ReturnPanel load_panel_file(const std::string& path);

/// Same CSV layout but cells hold prices; converts to r_t = p_t / p_{t-1} - 1
/// and drops the first date.
ReturnPanel load_prices(std::istream& in);

/// Writes the panel in the format read by load_panel, with round-trip precision.
void write_panel(std::ostream& out, const ReturnPanel& panel);

/// N distinct asset indices drawn uniformly without replacement.
Universe sample_universe(const ReturnPanel& panel, std::size_t count, Rng& rng);

/// Rows t-w .. t-1 of the panel restricted to `universe`.
ReturnMatrix window(const ReturnPanel& panel, const Universe& universe, std::size_t t,
                    std::size_t w);

/// Resolves ticker names to indices.
Universe universe_from_tickers(const ReturnPanel& panel, const std::vector<std::string>& tickers);

}  // namespace spectral_risk
