// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <beampred/oracle.hpp>
#include <beampred/scenario.hpp>

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace beampred {

enum class FeatureSet { Position, PositionHeight, PositionHeightDistance, Visual };

inline constexpr std::array<FeatureSet, 4> kAllFeatureSets = {
    FeatureSet::Position, FeatureSet::PositionHeight, FeatureSet::PositionHeightDistance,
    FeatureSet::Visual};

std::size_t feature_dim(FeatureSet fs);

/// CLI spelling: position, position-height, position-height-distance, visual.
std::string_view feature_set_name(FeatureSet fs);

/// Inverse of feature_set_name. Throws std::invalid_argument on unknown names.
FeatureSet parse_feature_set(std::string_view name);

/// Raw (unnormalized) features, or nullopt for a Visual sample without a detection.
std::optional<Eigen::VectorXd> extract_features(const SensorSample& sample, FeatureSet fs);

/// Raw covariates kept for stratified evaluation.
struct ExampleMeta {
  double height_m = 0.0;
  double speed_mps = 0.0;
  double distance_m = 0.0;
};

struct LabeledExample {
  Eigen::VectorXd features;
  BeamLabel label;
  ExampleMeta meta;
  /// Position of the originating row in the sample list.
  std::size_t source_index = 0;
  double time_s = 0.0;
};

struct BuildResult {
  std::vector<LabeledExample> examples;
  std::size_t dropped = 0;
};

/// Pairs sensor samples with labels taken as the argmax of each power vector.
/// Visual samples without a detection are dropped and counted.
BuildResult build_examples(std::span<const SensorSample> samples,
                           std::span<const PowerVector> powers, FeatureSet fs);

/// Brings a power vector to `q` beams: unchanged when already of length q, otherwise
/// downsampled by the integer ratio. A vector with a single nonzero entry is a synthesized
/// label and maps to the nearest retained beam (index / ratio).
PowerVector to_active_codebook(const PowerVector& pv, std::size_t q);

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
  bool constant = false;
};

/// Per-feature min-max scaling fitted on a training split.
class Normalizer {
 public:
  Normalizer() = default;
  explicit Normalizer(std::vector<FeatureRange> ranges) : ranges_(std::move(ranges)) {}

  static Normalizer fit(std::span<const LabeledExample> train);

  /// Maps into [0,1] with clamping. Constant features map to 0.5.
  Eigen::VectorXd apply(const Eigen::VectorXd& raw) const;

  std::size_t dim() const { return ranges_.size(); }
  const std::vector<FeatureRange>& ranges() const { return ranges_; }
  bool has_constant_feature() const;

 private:
  std::vector<FeatureRange> ranges_;
};

struct Dataset {
  std::vector<LabeledExample> examples;
  FeatureSet feature_set = FeatureSet::Position;
  std::size_t q = 32;
  std::optional<Normalizer> normalizer;
  std::uint64_t split_seed = 0;

  std::size_t size() const { return examples.size(); }
};

enum class SplitMode { Random, Temporal };

std::string_view split_mode_name(SplitMode mode);
SplitMode parse_split_mode(std::string_view name);

/// Positions into an example list, never overlapping.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Random: seeded permutation, first floor(fraction * count) go to train.
/// Temporal: ascending time order (`times`), earliest floor(fraction * count) go to train.
SplitIndices split_indices(std::size_t count, double train_fraction, std::uint64_t seed,
                           SplitMode mode = SplitMode::Random,
                           std::span<const double> times = {});

struct SplitDatasets {
  Dataset train;
  Dataset test;
  SplitIndices indices;
};

/// Splits, fits the normalizer on the train portion and normalizes both portions.
SplitDatasets split(const Dataset& ds, double train_fraction, std::uint64_t seed,
                    SplitMode mode = SplitMode::Random);

/// Applies `normalizer` to every example and attaches it to the result.
Dataset normalize(const Dataset& ds, const Normalizer& normalizer);

/// Rows of the on-disk sample schema.
struct SampleTable {
  std::vector<SensorSample> samples;
  std::vector<PowerVector> powers;
  bool label_only = false;
  std::size_t skipped_rows = 0;
};

/// Column renames applied to an external CSV header before parsing.
struct ColumnMapping {
  /// schema column -> external column
  std::map<std::string, std::string> columns;
  /// Codebook size used when synthesizing one-hot vectors from a label column.
  std::size_t label_codebook_size = 64;
};

SampleTable ingest_csv(const std::filesystem::path& path, const ColumnMapping& mapping = {});
SampleTable ingest_csv(std::istream& in, const ColumnMapping& mapping = {},
                       std::string_view source_name = "<stream>");

/// Reads "schema_column = external_column" lines. `beam_label_codebook_size` sets the
/// one-hot length.
ColumnMapping read_column_mapping(const std::filesystem::path& path);

/// Writes the schema CSV. Each comment line is emitted as "# <line>" before the header.
/// With `label_only` the power columns are replaced by a beam_label column.
void write_csv(std::ostream& out, std::span<const SensorSample> samples,
               std::span<const PowerVector> powers, std::span<const std::string> comments = {},
               bool label_only = false);

}  // namespace beampred
