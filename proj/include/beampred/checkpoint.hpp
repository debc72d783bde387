// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <beampred/dataset.hpp>
#include <beampred/mlp.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace beampred {

/// Everything needed to rebuild a trained classifier and its test split.
struct Checkpoint {
  MlpModel model = MlpModel::zeros({});
  FeatureSet feature_set = FeatureSet::Position;
  std::size_t q = 32;
  Normalizer normalizer;
  SplitMode split_mode = SplitMode::Random;
  double train_fraction = 0.7;
  std::uint64_t split_seed = 0;
  std::uint64_t master_seed = 0;
  std::string config_hash;
};

inline constexpr int kCheckpointVersion = 1;

/// Text format; floating-point values are written as C99 hex floats so a reload is exact.
void save_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint load_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace beampred
