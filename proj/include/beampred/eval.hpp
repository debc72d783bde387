// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <beampred/dataset.hpp>
#include <beampred/mlp.hpp>
#include <beampred/oracle.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace beampred {

/// k values reported by default.
inline const std::vector<std::size_t> kDefaultReportedK = {1, 2, 3, 5};

/// Fraction of samples whose label is among the first k predictions.
double topk_accuracy(std::span<const std::vector<BeamLabel>> predictions,
                     std::span<const BeamLabel> labels, std::size_t k);

enum class StratumDimension { Height, Speed };

std::string_view stratum_dimension_name(StratumDimension dim);
StratumDimension parse_stratum_dimension(std::string_view name);

struct StratumBin {
  std::string name;
  /// Raw covariate range covered by the bin; values equal to `upper` belong here.
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  std::map<std::size_t, double> topk;

  friend bool operator==(const StratumBin&, const StratumBin&) = default;
};

struct StratifiedReport {
  StratumDimension dimension = StratumDimension::Height;
  /// Fewer than three distinct covariate values: a single "all" bin.
  bool fallback = false;
  std::vector<StratumBin> bins;

  friend bool operator==(const StratifiedReport&, const StratifiedReport&) = default;
};

/// Tertile bins of the covariate (nearest-rank edges at 1/3 and 2/3), each scored separately.
StratifiedReport stratified_accuracy(std::span<const ExampleMeta> meta,
                                     std::span<const std::vector<BeamLabel>> predictions,
                                     std::span<const BeamLabel> labels, StratumDimension dim,
                                     std::span<const std::size_t> ks);

/// Beams swept when only the top-k predictions are trained, relative to an exhaustive sweep.
double overhead_ratio(std::size_t k, std::size_t q);

struct EvalReport {
  std::string feature_set;
  std::size_t q = 0;
  std::size_t n_test = 0;
  std::map<std::size_t, double> topk_accuracy;
  std::vector<StratifiedReport> strata;
  std::map<std::size_t, double> overhead_ratio;
  std::string config_hash;
  std::uint64_t master_seed = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Top-max(ks) predictions for every example of a normalized dataset.
std::vector<std::vector<BeamLabel>> predict_dataset(const MlpModel& model, const Dataset& ds,
                                                    std::size_t k);

/// Scores `model` on a normalized test set: top-k, height and speed strata, overhead.
EvalReport evaluate_model(const MlpModel& model, const Dataset& test,
                          std::span<const std::size_t> ks = kDefaultReportedK);

struct ComparisonRun {
  FeatureSet feature_set;
  SplitDatasets data;
};

struct ComparisonResult {
  std::vector<EvalReport> reports;
  std::vector<std::vector<EpochRecord>> histories;
};

/// Trains one classifier per feature set with identical settings and scores each.
/// Every run must share the same train/test partition of source rows.
ComparisonResult compare_feature_sets(std::span<const ComparisonRun> runs,
                                      const std::vector<std::size_t>& hidden_dims,
                                      const TrainConfig& cfg,
                                      std::span<const std::size_t> ks = kDefaultReportedK);

}  // namespace beampred
