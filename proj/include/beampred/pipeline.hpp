// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <beampred/checkpoint.hpp>
#include <beampred/config.hpp>
#include <beampred/dataset.hpp>
#include <beampred/eval.hpp>
#include <beampred/mlp.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace beampred {

/// Seeds of every random component, derived from one master seed.
struct RunSeeds {
  std::uint64_t scenario = 0;
  std::uint64_t split = 0;
  std::uint64_t train = 0;

  static RunSeeds from_master(std::uint64_t master_seed);
};

/// Sensor samples with their measured (full-codebook) power vectors.
struct RawData {
  std::vector<SensorSample> samples;
  std::vector<PowerVector> powers;

  std::size_t size() const { return samples.size(); }
};

RawData simulate(const ExperimentConfig& cfg, std::uint64_t master_seed);
RawData from_table(SampleTable table);

/// Rows where every feature set has features (i.e. the camera saw the drone).
RawData common_rows(const RawData& raw);

/// Reduces powers to cfg.q beams and builds labeled examples for one feature set.
Dataset make_dataset(const RawData& raw, FeatureSet fs, std::size_t q,
                     std::size_t* dropped = nullptr);

struct TrainedRun {
  Checkpoint checkpoint;
  std::vector<EpochRecord> history;
  SplitDatasets data;
};

/// Split, normalize and train one classifier for `fs`.
TrainedRun train_feature_set(const RawData& raw, const ExperimentConfig& cfg, FeatureSet fs,
                             std::uint64_t master_seed);

/// Rebuilds the checkpoint's test split from `raw` and scores the model on it.
EvalReport evaluate_checkpoint(const Checkpoint& ckpt, const RawData& raw,
                               const std::vector<std::size_t>& ks);

/// Four-feature-set experiment on the rows usable by all feature sets.
ComparisonResult run_comparison(const RawData& raw, const ExperimentConfig& cfg,
                                std::uint64_t master_seed);

}  // namespace beampred
