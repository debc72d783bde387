// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace beampred {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitNumeric = 4,
};

struct RunConfig {
  /// generate, train, evaluate, compare or ingest
  std::string command;
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> data_path;
  std::optional<std::filesystem::path> model_path;
  std::optional<std::filesystem::path> input_path;
  std::optional<std::filesystem::path> mapping_path;
  std::filesystem::path out_dir = ".";
  std::vector<std::string> overrides;
  std::uint64_t master_seed = 0;
  std::optional<std::string> split;
  std::optional<std::size_t> q;
  std::optional<std::string> feature_set;
};

/// Executes one command. Diagnostics go to `err` as a single line; progress to `log`.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Parses argv and calls run().
int cli_main(int argc, char** argv);

}  // namespace beampred
