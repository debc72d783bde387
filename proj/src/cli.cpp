// SPDX-License-Identifier: Apache-2.0
#include "beampred/cli.hpp"

#include <beampred/checkpoint.hpp>
#include <beampred/config.hpp>
#include <beampred/error.hpp>
#include <beampred/io.hpp>
#include <beampred/pipeline.hpp>
#include <beampred/report.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

namespace beampred {

namespace {

namespace fs = std::filesystem;

ExperimentConfig resolve_config(const RunConfig& rc) {
  ExperimentConfig cfg;
  if (rc.config_path) cfg = load_config(*rc.config_path, cfg);
  for (const auto& o : rc.overrides) apply_override(cfg, o);
  if (rc.split) apply_override(cfg, "data.split", *rc.split);
  if (rc.q) apply_override(cfg, "data.q", std::to_string(*rc.q));
  if (rc.feature_set) apply_override(cfg, "data.feature_set", *rc.feature_set);
  cfg.validate();
  return cfg;
}

std::string provenance(const ExperimentConfig& cfg, std::uint64_t seed) {
  return "config_hash=" + config_hash(cfg) + " master_seed=" + std::to_string(seed);
}

RawData load_or_simulate(const RunConfig& rc, const ExperimentConfig& cfg, std::ostream& log) {
  if (rc.data_path) {
    auto table = ingest_csv(*rc.data_path);
    log << "read " << table.samples.size() << " rows from " << rc.data_path->string();
    if (table.skipped_rows) log << " (" << table.skipped_rows << " skipped)";
    log << '\n';
    return from_table(std::move(table));
  }
  log << "simulating " << cfg.scenario.num_samples << " samples\n";
  return simulate(cfg, rc.master_seed);
}

int cmd_generate(const RunConfig& rc, std::ostream& log) {
  const auto cfg = resolve_config(rc);
  const RawData raw = simulate(cfg, rc.master_seed);
  const std::vector<std::string> comments = {"beampred dataset v1", provenance(cfg, rc.master_seed)};
  std::ostringstream out;
  write_csv(out, raw.samples, raw.powers, comments);
  const auto path = rc.out_dir / "dataset.csv";
  write_file_atomic(path, out.str());
  log << "wrote " << raw.size() << " rows to " << path.string() << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& rc, std::ostream& log) {
  const auto cfg = resolve_config(rc);
  const RawData raw = load_or_simulate(rc, cfg, log);
  const auto run = train_feature_set(raw, cfg, cfg.feature_set, rc.master_seed);
  save_checkpoint(rc.out_dir / "model.ckpt", run.checkpoint);
  write_file_atomic(rc.out_dir / "history.csv",
                    history_to_csv(run.history, config_hash(cfg), rc.master_seed));
  const auto& last = run.history.back();
  log << "trained " << feature_set_name(cfg.feature_set) << " on " << run.data.train.size()
      << " examples; final loss " << last.loss << ", train top-1 " << last.top1 << '\n';
  return kExitOk;
}

int cmd_evaluate(const RunConfig& rc, std::ostream& log) {
  if (!rc.model_path) throw ConfigError("evaluate needs --model");
  const auto cfg = resolve_config(rc);
  const Checkpoint ckpt = load_checkpoint(*rc.model_path);
  RunConfig data_rc = rc;
  data_rc.master_seed = ckpt.master_seed;
  const RawData raw = load_or_simulate(data_rc, cfg, log);
  const EvalReport report = evaluate_checkpoint(ckpt, raw, cfg.report_k);
  write_file_atomic(rc.out_dir / "report.json", report_to_json(report));
  const std::vector<EvalReport> reports{report};
  write_file_atomic(rc.out_dir / "report.csv", reports_to_csv(reports));
  log << "evaluated " << report.feature_set << " on " << report.n_test << " test examples:";
  for (const auto& [k, acc] : report.topk_accuracy) log << " top-" << k << "=" << acc;
  log << '\n';
  return kExitOk;
}

int cmd_compare(const RunConfig& rc, std::ostream& log) {
  const auto cfg = resolve_config(rc);
  const RawData raw = load_or_simulate(rc, cfg, log);
  const auto result = run_comparison(raw, cfg, rc.master_seed);
  const std::string json = reports_to_json(result.reports);
  const std::string csv = reports_to_csv(result.reports);
  write_file_atomic(rc.out_dir / "compare.json", json);
  write_file_atomic(rc.out_dir / "compare.csv", csv);
  for (const auto& r : result.reports) {
    log << r.feature_set << ":";
    for (const auto& [k, acc] : r.topk_accuracy) log << " top-" << k << "=" << acc;
    log << '\n';
  }
  return kExitOk;
}

int cmd_ingest(const RunConfig& rc, std::ostream& log) {
  if (!rc.input_path) throw ConfigError("ingest needs --input");
  ColumnMapping mapping;
  if (rc.mapping_path) mapping = read_column_mapping(*rc.mapping_path);
  const auto table = ingest_csv(*rc.input_path, mapping);
  const std::vector<std::string> comments = {
      "beampred dataset v1",
      "source=" + rc.input_path->filename().string() + " master_seed=" +
          std::to_string(rc.master_seed)};
  std::ostringstream out;
  write_csv(out, table.samples, table.powers, comments, table.label_only);
  const auto path = rc.out_dir / "ingested.csv";
  write_file_atomic(path, out.str());
  log << "converted " << table.samples.size() << " rows (" << table.skipped_rows
      << " skipped) to " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(const RunConfig& rc, std::ostream& log, std::ostream& err) {
  try {
    if (rc.config_path && !fs::exists(*rc.config_path))
      throw ConfigError("config file not found: " + rc.config_path->string());
    if (rc.data_path && !fs::exists(*rc.data_path))
      throw DataError("data file not found: " + rc.data_path->string());
    if (rc.model_path && !fs::exists(*rc.model_path))
      throw DataError("checkpoint not found: " + rc.model_path->string());
    if (rc.input_path && !fs::exists(*rc.input_path))
      throw DataError("input file not found: " + rc.input_path->string());
    if (rc.command == "generate") return cmd_generate(rc, log);
    if (rc.command == "train") return cmd_train(rc, log);
    if (rc.command == "evaluate") return cmd_evaluate(rc, log);
    if (rc.command == "compare") return cmd_compare(rc, log);
    if (rc.command == "ingest") return cmd_ingest(rc, log);
    throw ConfigError("unknown command '" + rc.command + "'");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"beampred: sensing-aided mmWave drone beam prediction"};
  app.require_subcommand(1);
  app.footer("\n" + describe_config_keys());

  RunConfig rc;
  std::string config_path;
  std::string data_path;
  std::string model_path;
  std::string input_path;
  std::string mapping_path;
  std::string out_dir = ".";
  std::string split;
  std::string feature_set;
  std::size_t q = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Scenario/experiment config file");
    sub->add_option("--seed", rc.master_seed, "Master seed");
    sub->add_option("--set", rc.overrides, "Override a config key (key=value), repeatable");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--split", split, "Split mode")->check(CLI::IsMember({"random", "temporal"}));
    sub->add_option("--q", q, "Active codebook size")->check(CLI::IsMember({32, 64}));
    sub->add_option("--feature-set", feature_set, "Feature set")
        ->check(CLI::IsMember({"position", "position-height", "position-height-distance", "visual"}));
  };

  auto* generate = app.add_subcommand("generate", "Simulate a scenario and write a dataset CSV");
  add_common(generate);
  auto* train_cmd = app.add_subcommand("train", "Train one classifier; writes model.ckpt and history.csv");
  add_common(train_cmd);
  train_cmd->add_option("--data", data_path, "Dataset CSV (default: simulate from the config)");
  auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint; writes report.json and report.csv");
  add_common(evaluate);
  evaluate->add_option("--data", data_path, "Dataset CSV the checkpoint was trained on");
  evaluate->add_option("--model", model_path, "Checkpoint file")->required();
  auto* compare = app.add_subcommand("compare", "Train and score all four feature sets");
  add_common(compare);
  compare->add_option("--data", data_path, "Dataset CSV (default: simulate from the config)");
  auto* ingest = app.add_subcommand("ingest", "Convert an external CSV to the dataset schema");
  add_common(ingest);
  ingest->add_option("--input", input_path, "External CSV")->required();
  ingest->add_option("--mapping", mapping_path, "Column mapping file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  rc.command = app.get_subcommands().front()->get_name();
  if (!config_path.empty()) rc.config_path = config_path;
  if (!data_path.empty()) rc.data_path = data_path;
  if (!model_path.empty()) rc.model_path = model_path;
  if (!input_path.empty()) rc.input_path = input_path;
  if (!mapping_path.empty()) rc.mapping_path = mapping_path;
  rc.out_dir = out_dir;
  if (!split.empty()) rc.split = split;
  if (!feature_set.empty()) rc.feature_set = feature_set;
  if (q != 0) rc.q = q;
  return run(rc, std::cout, std::cerr);
}

}  // namespace beampred
