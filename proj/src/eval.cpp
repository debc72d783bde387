// SPDX-License-Identifier: Apache-2.0
#include "beampred/eval.hpp"

#include <beampred/rng.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace beampred {

double topk_accuracy(std::span<const std::vector<BeamLabel>> predictions,
                     std::span<const BeamLabel> labels, std::size_t k) {
  if (predictions.empty()) throw std::invalid_argument("no predictions to score");
  if (predictions.size() != labels.size())
    throw std::invalid_argument("prediction and label counts differ");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& p = predictions[i];
    const auto end = p.begin() + static_cast<std::ptrdiff_t>(std::min(k, p.size()));
    if (std::any_of(p.begin(), end, [&](const BeamLabel& b) { return b.index == labels[i].index; }))
      ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

std::string_view stratum_dimension_name(StratumDimension dim) {
  return dim == StratumDimension::Height ? "height" : "speed";
}

StratumDimension parse_stratum_dimension(std::string_view name) {
  if (name == "height") return StratumDimension::Height;
  if (name == "speed") return StratumDimension::Speed;
  throw std::invalid_argument("unknown stratum dimension '" + std::string(name) + "'");
}

StratifiedReport stratified_accuracy(std::span<const ExampleMeta> meta,
                                     std::span<const std::vector<BeamLabel>> predictions,
                                     std::span<const BeamLabel> labels, StratumDimension dim,
                                     std::span<const std::size_t> ks) {
  if (meta.size() != labels.size() || predictions.size() != labels.size())
    throw std::invalid_argument("meta, prediction and label counts differ");
  if (labels.empty()) throw std::invalid_argument("no samples to stratify");

  std::vector<double> values;
  values.reserve(meta.size());
  for (const auto& m : meta)
    values.push_back(dim == StratumDimension::Height ? m.height_m : m.speed_mps);
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> uniq = sorted;
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

  StratifiedReport report;
  report.dimension = dim;

  const auto score = [&](const std::vector<std::size_t>& members, StratumBin& bin) {
    bin.count = members.size();
    for (std::size_t k : ks) {
      if (members.empty()) {
        bin.topk[k] = 0.0;
        continue;
      }
      std::vector<std::vector<BeamLabel>> p;
      std::vector<BeamLabel> l;
      p.reserve(members.size());
      l.reserve(members.size());
      for (std::size_t i : members) {
        p.push_back(predictions[i]);
        l.push_back(labels[i]);
      }
      bin.topk[k] = topk_accuracy(p, l, k);
    }
  };

  if (uniq.size() < 3) {
    report.fallback = true;
    std::vector<std::size_t> all(labels.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    StratumBin bin{"all", uniq.front(), uniq.back(), 0, {}};
    score(all, bin);
    report.bins.push_back(std::move(bin));
    return report;
  }

  // Nearest-rank tertile edges; a value equal to an edge belongs to the lower bin.
  const std::size_t n = sorted.size();
  const double edge1 = sorted[(n + 2) / 3 - 1];
  const double edge2 = sorted[(2 * n + 2) / 3 - 1];
  const bool height = dim == StratumDimension::Height;
  std::vector<StratumBin> bins = {
      {height ? "low" : "slow", sorted.front(), edge1, 0, {}},
      {"medium", edge1, edge2, 0, {}},
      {height ? "high" : "fast", edge2, sorted.back(), 0, {}},
  };
  std::vector<std::vector<std::size_t>> members(3);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t b = values[i] <= edge1 ? 0 : (values[i] <= edge2 ? 1 : 2);
    members[b].push_back(i);
  }
  for (std::size_t b = 0; b < 3; ++b) score(members[b], bins[b]);
  report.bins = std::move(bins);
  return report;
}

double overhead_ratio(std::size_t k, std::size_t q) {
  if (k < 1 || k > q) throw std::invalid_argument("k must lie in [1, q]");
  return static_cast<double>(k) / static_cast<double>(q);
}

std::vector<std::vector<BeamLabel>> predict_dataset(const MlpModel& model, const Dataset& ds,
                                                    std::size_t k) {
  const auto dim = static_cast<Eigen::Index>(model.architecture().input_dim);
  Eigen::MatrixXd inputs(dim, static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.examples[i].features.size() != dim)
      throw std::invalid_argument("feature length does not match the model input size");
    inputs.col(static_cast<Eigen::Index>(i)) = ds.examples[i].features;
  }
  const Eigen::MatrixXd probs = forward_batch(model, inputs);
  std::vector<std::vector<BeamLabel>> out;
  out.reserve(ds.size());
  const auto q = static_cast<std::size_t>(probs.rows());
  for (Eigen::Index c = 0; c < probs.cols(); ++c) {
    std::vector<BeamLabel> ranked;
    for (std::size_t index :
         topk_indices(std::span<const double>(probs.col(c).data(), q), std::min(k, q)))
      ranked.push_back({index, q});
    out.push_back(std::move(ranked));
  }
  return out;
}

EvalReport evaluate_model(const MlpModel& model, const Dataset& test,
                          std::span<const std::size_t> ks) {
  if (test.examples.empty()) throw std::invalid_argument("empty test set");
  if (ks.empty()) throw std::invalid_argument("no k values requested");
  const std::size_t q = model.architecture().output_dim;
  for (std::size_t k : ks) {
    if (k < 1 || k > q) throw std::invalid_argument("reported k must lie in [1, Q]");
  }
  const std::size_t k_max = *std::max_element(ks.begin(), ks.end());
  const auto predictions = predict_dataset(model, test, k_max);
  std::vector<BeamLabel> labels;
  std::vector<ExampleMeta> meta;
  for (const auto& ex : test.examples) {
    labels.push_back(ex.label);
    meta.push_back(ex.meta);
  }

  EvalReport report;
  report.feature_set = std::string(feature_set_name(test.feature_set));
  report.q = q;
  report.n_test = test.size();
  for (std::size_t k : ks) {
    report.topk_accuracy[k] = topk_accuracy(predictions, labels, k);
    report.overhead_ratio[k] = overhead_ratio(k, q);
  }
  for (StratumDimension dim : {StratumDimension::Height, StratumDimension::Speed})
    report.strata.push_back(stratified_accuracy(meta, predictions, labels, dim, ks));
  return report;
}

namespace {

std::vector<std::size_t> sorted_sources(const Dataset& ds) {
  std::vector<std::size_t> out;
  out.reserve(ds.size());
  for (const auto& ex : ds.examples) out.push_back(ex.source_index);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

ComparisonResult compare_feature_sets(std::span<const ComparisonRun> runs,
                                      const std::vector<std::size_t>& hidden_dims,
                                      const TrainConfig& cfg, std::span<const std::size_t> ks) {
  if (runs.empty()) throw std::invalid_argument("nothing to compare");
  const auto train_ref = sorted_sources(runs.front().data.train);
  const auto test_ref = sorted_sources(runs.front().data.test);
  for (const auto& run : runs) {
    if (sorted_sources(run.data.train) != train_ref || sorted_sources(run.data.test) != test_ref)
      throw std::invalid_argument("feature sets were split differently; comparison is invalid");
    if (run.data.train.q != runs.front().data.train.q)
      throw std::invalid_argument("feature sets use different codebook sizes");
  }

  ComparisonResult result;
  for (const auto& run : runs) {
    MlpArchitecture arch{feature_dim(run.feature_set), hidden_dims, run.data.train.q};
    auto model = MlpModel::initialize(arch, derive_seed(cfg.seed, "model/init"));
    auto trained = train(std::move(model), run.data.train.examples, cfg);
    Dataset test = run.data.test;
    test.feature_set = run.feature_set;
    result.reports.push_back(evaluate_model(trained.model, test, ks));
    result.histories.push_back(std::move(trained.history));
  }
  return result;
}

}  // namespace beampred
