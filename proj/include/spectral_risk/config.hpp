#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spectral_risk/experiment.hpp"

namespace spectral_risk {

/// Parses an experiment config from JSON text. Omitted keys keep their
/// defaults (N = {5, 10, 20}, w = {20, 30, 40}, 100 reps, 10 bp costs, 1%
/// tail level). Unknown keys and invalid values throw ValidationError naming
/// the key; malformed JSON throws ParseError.
///
/// Schema:
///   grid_N, grid_w     arrays of positive integers
///   reps               integer >= 1
///   cost_rate          number >= 0 (per unit of turnover; 0.001 = 10 bp)
///   cost_convention    "l1" | "half_l1"
///   alpha              metric tail level in (0, 0.5]
///   optimizer_alpha    optimizer tail level in (0, 0.5]
///   reduction          default exposure kept on an RR signal, in [0, 1]
///   master_seed        unsigned integer
///   save_runs          boolean
///   strategies         array of kind names or {"kind", "reduction", "label"}
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

/// As above, but omitted keys take their values from `defaults`.
ExperimentConfig parse_config(std::string_view json_text, const ExperimentConfig& defaults);
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& defaults);

/// Canonical JSON for a config; parse_config(config_to_json(c)) == c.
std::string config_to_json(const ExperimentConfig& cfg);

/// metadata.json written next to experiment outputs.
std::string experiment_metadata_json(const ExperimentConfig& cfg, const ReturnPanel& panel,
                                     const std::vector<std::string>& notes,
                                     const std::vector<std::string>& excluded);

/// What `report` needs from metadata.json to lay tables out like the original run.
struct ReportLayout {
  std::vector<std::pair<std::size_t, std::size_t>> grid_order;
  double alpha = 0.01;
};
ReportLayout read_report_layout(const std::string& metadata_path);

}  // namespace spectral_risk
