#include "spectral_risk/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spectral_risk/error.hpp"

namespace spectral_risk {

namespace {

using nlohmann::json;

std::vector<std::size_t> read_sizes(const json& value, const std::string& key) {
  if (!value.is_array() || value.empty()) throw ValidationError(key + ": expected a non-empty array of integers");
  std::vector<std::size_t> out;
  for (const auto& v : value) {
    if (!v.is_number_integer()) throw ValidationError(key + ": expected integers");
    const auto x = v.get<long long>();
    if (x < 2) throw ValidationError(key + ": every entry must be >= 2, got " + std::to_string(x));
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

double read_number(const json& value, const std::string& key) {
  if (!value.is_number()) throw ValidationError(key + ": expected a number");
  return value.get<double>();
}

StrategySpec read_strategy(const json& value, double default_reduction, std::size_t index) {
  const std::string where = "strategies[" + std::to_string(index) + "]";
  StrategySpec spec;
  spec.reduction = default_reduction;
  auto set_kind = [&](const json& k) {
    if (!k.is_string()) throw ValidationError(where + ".kind: expected a string");
    try {
      spec.kind = strategy_kind_from_string(k.get<std::string>());
    } catch (const ArgumentError& e) {
      throw ValidationError(where + ".kind: " + e.what());
    }
  };
  if (value.is_string()) {
    set_kind(value);
    return spec;
  }
  if (!value.is_object()) throw ValidationError(where + ": expected a kind name or an object");
  if (!value.contains("kind")) throw ValidationError(where + ".kind: missing");
  for (const auto& [key, v] : value.items()) {
    if (key == "kind") {
      set_kind(v);
    } else if (key == "reduction") {
      spec.reduction = read_number(v, where + ".reduction");
      if (!(spec.reduction >= 0.0 && spec.reduction <= 1.0))
        throw ValidationError(where + ".reduction: must lie in [0, 1]");
    } else if (key == "label") {
      if (!v.is_string()) throw ValidationError(where + ".label: expected a string");
      spec.label = v.get<std::string>();
    } else {
      throw ValidationError(where + ": unknown key '" + key + "'");
    }
  }
  return spec;
}

json strategy_to_json(const StrategySpec& s) {
  json j{{"kind", std::string(to_string(s.kind))}, {"reduction", s.reduction}};
  if (!s.label.empty()) j["label"] = s.label;
  return j;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) { return parse_config(json_text, ExperimentConfig{}); }

ExperimentConfig parse_config(std::string_view json_text, const ExperimentConfig& defaults) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config: top level must be a JSON object");

  static const std::set<std::string> known{"grid_N", "grid_w", "reps", "cost_rate", "cost_convention",
                                           "alpha", "optimizer_alpha", "reduction", "master_seed",
                                           "save_runs", "strategies"};
  for (const auto& [key, v] : doc.items())
    if (!known.count(key)) throw ValidationError(key + ": unknown config key");

  ExperimentConfig cfg = defaults;
  if (doc.contains("grid_N")) cfg.grid_N = read_sizes(doc["grid_N"], "grid_N");
  if (doc.contains("grid_w")) cfg.grid_w = read_sizes(doc["grid_w"], "grid_w");
  if (doc.contains("reps")) {
    const auto& v = doc["reps"];
    if (!v.is_number_integer() || v.get<long long>() < 1) throw ValidationError("reps: expected an integer >= 1");
    cfg.reps = v.get<std::size_t>();
  }
  if (doc.contains("cost_rate")) {
    cfg.cost_rate = read_number(doc["cost_rate"], "cost_rate");
    if (!(cfg.cost_rate >= 0.0)) throw ValidationError("cost_rate: must be >= 0");
  }
  if (doc.contains("cost_convention")) {
    const auto& v = doc["cost_convention"];
    if (v == "l1") {
      cfg.cost_convention = CostConvention::l1;
    } else if (v == "half_l1") {
      cfg.cost_convention = CostConvention::half_l1;
    } else {
      throw ValidationError("cost_convention: expected \"l1\" or \"half_l1\"");
    }
  }
  if (doc.contains("alpha")) cfg.alpha = read_number(doc["alpha"], "alpha");
  if (doc.contains("optimizer_alpha")) cfg.optimizer_alpha = read_number(doc["optimizer_alpha"], "optimizer_alpha");
  double reduction = 0.5;
  if (doc.contains("reduction")) {
    reduction = read_number(doc["reduction"], "reduction");
    if (!(reduction >= 0.0 && reduction <= 1.0)) throw ValidationError("reduction: must lie in [0, 1]");
    for (auto& s : cfg.strategies) s.reduction = reduction;
  }
  if (doc.contains("master_seed")) {
    const auto& v = doc["master_seed"];
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
      throw ValidationError("master_seed: expected a non-negative integer");
    cfg.master_seed = v.get<std::uint64_t>();
  }
  if (doc.contains("save_runs")) {
    if (!doc["save_runs"].is_boolean()) throw ValidationError("save_runs: expected a boolean");
    cfg.save_runs = doc["save_runs"].get<bool>();
  }
  if (doc.contains("strategies")) {
    const auto& v = doc["strategies"];
    if (!v.is_array() || v.empty()) throw ValidationError("strategies: expected a non-empty array");
    cfg.strategies.clear();
    for (std::size_t i = 0; i < v.size(); ++i) cfg.strategies.push_back(read_strategy(v[i], reduction, i));
  }
  try {
    cfg.validate();
  } catch (const ArgumentError& e) {
    throw ValidationError(e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) { return load_config(path, ExperimentConfig{}); }

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& defaults) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), defaults);
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["grid_N"] = cfg.grid_N;
  j["grid_w"] = cfg.grid_w;
  j["reps"] = cfg.reps;
  j["cost_rate"] = cfg.cost_rate;
  j["cost_convention"] = cfg.cost_convention == CostConvention::l1 ? "l1" : "half_l1";
  j["alpha"] = cfg.alpha;
  j["optimizer_alpha"] = cfg.optimizer_alpha;
  j["master_seed"] = cfg.master_seed;
  j["save_runs"] = cfg.save_runs;
  j["strategies"] = json::array();
  for (const auto& s : cfg.strategies) j["strategies"].push_back(strategy_to_json(s));
  return j.dump(2);
}

std::string experiment_metadata_json(const ExperimentConfig& cfg, const ReturnPanel& panel,
                                     const std::vector<std::string>& notes,
                                     const std::vector<std::string>& excluded) {
  json j;
  j["config"] = json::parse(config_to_json(cfg));
  j["panel"] = {{"days", panel.num_days()},
                {"assets", panel.num_assets()},
                {"first_date", panel.dates().front()},
                {"last_date", panel.dates().back()}};
  json tails = json::array();
  for (auto w : cfg.grid_w)
    tails.push_back({{"w", w}, {"optimizer_tail_scenarios", tail_count(cfg.optimizer_alpha, w)}});
  j["optimizer_tails"] = tails;
  j["notes"] = notes;
  j["excluded_reps"] = excluded;
  json order = json::array();
  for (auto n : cfg.grid_N)
    for (auto w : cfg.grid_w) order.push_back({n, w});
  j["grid_order"] = order;
  return j.dump(2) + "\n";
}

ReportLayout read_report_layout(const std::string& metadata_path) {
  std::ifstream in(metadata_path);
  if (!in) throw ArgumentError("cannot open " + metadata_path);
  ReportLayout layout;
  try {
    const json j = json::parse(in);
    if (j.contains("grid_order"))
      for (const auto& p : j["grid_order"]) layout.grid_order.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
    if (j.contains("config") && j["config"].contains("alpha")) layout.alpha = j["config"]["alpha"].get<double>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("metadata.json: ") + e.what());
  }
  return layout;
}

}  // namespace spectral_risk
