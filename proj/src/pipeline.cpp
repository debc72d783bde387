// SPDX-License-Identifier: Apache-2.0
#include "beampred/pipeline.hpp"

#include <beampred/error.hpp>
#include <beampred/rng.hpp>

#include <stdexcept>

namespace beampred {

RunSeeds RunSeeds::from_master(std::uint64_t master_seed) {
  return {derive_seed(master_seed, "scenario"), derive_seed(master_seed, "split"),
          derive_seed(master_seed, "train")};
}

RawData simulate(const ExperimentConfig& cfg, std::uint64_t master_seed) {
  cfg.validate();
  RawData raw;
  for (auto& s : simulate_scenario(cfg.scenario, RunSeeds::from_master(master_seed).scenario)) {
    raw.samples.push_back(s.sensors);
    raw.powers.push_back(std::move(s.power));
  }
  return raw;
}

RawData from_table(SampleTable table) {
  return {std::move(table.samples), std::move(table.powers)};
}

RawData common_rows(const RawData& raw) {
  RawData out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool usable = true;
    for (FeatureSet fs : kAllFeatureSets) usable = usable && extract_features(raw.samples[i], fs);
    if (!usable) continue;
    out.samples.push_back(raw.samples[i]);
    out.powers.push_back(raw.powers[i]);
  }
  return out;
}

Dataset make_dataset(const RawData& raw, FeatureSet fs, std::size_t q, std::size_t* dropped) {
  std::vector<PowerVector> active;
  active.reserve(raw.size());
  for (const auto& pv : raw.powers) active.push_back(to_active_codebook(pv, q));
  auto built = build_examples(raw.samples, active, fs);
  if (dropped) *dropped = built.dropped;
  if (built.examples.empty())
    throw DataError("no usable examples for feature set '" + std::string(feature_set_name(fs)) + "'");
  Dataset ds;
  ds.examples = std::move(built.examples);
  ds.feature_set = fs;
  ds.q = q;
  return ds;
}

TrainedRun train_feature_set(const RawData& raw, const ExperimentConfig& cfg, FeatureSet fs,
                             std::uint64_t master_seed) {
  cfg.validate();
  const auto seeds = RunSeeds::from_master(master_seed);
  const Dataset ds = make_dataset(raw, fs, cfg.q);
  TrainedRun run;
  run.data = split(ds, cfg.train_fraction, seeds.split, cfg.split_mode);

  TrainConfig tc = cfg.train;
  tc.seed = seeds.train;
  const MlpArchitecture arch{feature_dim(fs), cfg.hidden_dims, cfg.q};
  auto trained = train(MlpModel::initialize(arch, derive_seed(tc.seed, "model/init")),
                       run.data.train.examples, tc);
  run.history = std::move(trained.history);

  run.checkpoint.model = std::move(trained.model);
  run.checkpoint.feature_set = fs;
  run.checkpoint.q = cfg.q;
  run.checkpoint.normalizer = *run.data.train.normalizer;
  run.checkpoint.split_mode = cfg.split_mode;
  run.checkpoint.train_fraction = cfg.train_fraction;
  run.checkpoint.split_seed = seeds.split;
  run.checkpoint.master_seed = master_seed;
  run.checkpoint.config_hash = config_hash(cfg);
  return run;
}

EvalReport evaluate_checkpoint(const Checkpoint& ckpt, const RawData& raw,
                               const std::vector<std::size_t>& ks) {
  const Dataset ds = make_dataset(raw, ckpt.feature_set, ckpt.q);
  std::vector<double> times;
  for (const auto& ex : ds.examples) times.push_back(ex.time_s);
  const auto idx = split_indices(ds.size(), ckpt.train_fraction, ckpt.split_seed, ckpt.split_mode, times);
  Dataset test;
  test.feature_set = ckpt.feature_set;
  test.q = ckpt.q;
  test.split_seed = ckpt.split_seed;
  for (std::size_t i : idx.test) test.examples.push_back(ds.examples[i]);
  test = normalize(test, ckpt.normalizer);
  EvalReport report = evaluate_model(ckpt.model, test, ks);
  report.config_hash = ckpt.config_hash;
  report.master_seed = ckpt.master_seed;
  return report;
}

ComparisonResult run_comparison(const RawData& raw, const ExperimentConfig& cfg,
                                std::uint64_t master_seed) {
  cfg.validate();
  const auto seeds = RunSeeds::from_master(master_seed);
  const RawData usable = common_rows(raw);
  std::vector<ComparisonRun> runs;
  for (FeatureSet fs : kAllFeatureSets) {
    const Dataset ds = make_dataset(usable, fs, cfg.q);
    runs.push_back({fs, split(ds, cfg.train_fraction, seeds.split, cfg.split_mode)});
  }
  TrainConfig tc = cfg.train;
  tc.seed = seeds.train;
  auto result = compare_feature_sets(runs, cfg.hidden_dims, tc, cfg.report_k);
  const std::string hash = config_hash(cfg);
  for (auto& r : result.reports) {
    r.config_hash = hash;
    r.master_seed = master_seed;
  }
  return result;
}

}  // namespace beampred
