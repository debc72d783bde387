// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <beampred/dataset.hpp>
#include <beampred/mlp.hpp>
#include <beampred/scenario.hpp>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace beampred {

/// All tunables of one run: scenario, data handling, model and training.
struct ExperimentConfig {
  ScenarioConfig scenario;
  std::vector<std::size_t> hidden_dims{512, 512};
  TrainConfig train;
  std::size_t q = 32;
  double train_fraction = 0.7;
  SplitMode split_mode = SplitMode::Random;
  FeatureSet feature_set = FeatureSet::Position;
  std::vector<std::size_t> report_k{1, 2, 3, 5};

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

struct ConfigKey {
  std::string name;
  std::string description;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

/// Every documented key, in display order.
const std::vector<ConfigKey>& config_keys();

/// Sets one key. Unknown keys and malformed values raise ConfigError.
void apply_override(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses "key=value".
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

/// Reads a config file on top of `base`. Lines are "key = value"; "waypoint = x, y, z"
/// appends one waypoint; '#' starts a comment.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Sorted "key=value" lines of every key; the input of config_hash.
std::string canonical_config(const ExperimentConfig& cfg);

/// 16 hex digits identifying the effective configuration.
std::string config_hash(const ExperimentConfig& cfg);

/// Help text listing every key with its description and current value.
std::string describe_config_keys(const ExperimentConfig& defaults = {});

}  // namespace beampred
