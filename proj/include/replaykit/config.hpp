#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "replaykit/sweep.hpp"

namespace replaykit {

// Fully validated experiment description. Unknown keys anywhere in the
// config tree are rejected with the offending key named.
struct ExperimentConfig {
  DatasetSpec dataset;
  int n_experiences = 5;
  std::vector<StrategyConfig> strategies{StrategyConfig{}};
  std::vector<WeightingPolicy> policies{WeightingPolicy{}};
  std::optional<std::size_t> capacity;    // run: single memory size
  std::vector<std::size_t> memory_sizes;  // sweep
  AugmentationSpec augmentation;
  Hyperparams hyper;
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir = "results";

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const nlohmann::ordered_json& root);
ExperimentConfig load_config_file(const std::string& path);

// Canonical echo; parse_config(config_to_json(c)) == c.
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

// Sweep series from the strategies x policies cross product. The policy name
// joins the label whenever more than one policy is configured.
std::vector<SweepSeriesSpec> config_series(const ExperimentConfig& config);

}  // namespace replaykit
