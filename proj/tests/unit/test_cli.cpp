// SPDX-License-Identifier: Apache-2.0
#include <beampred/checkpoint.hpp>
#include <beampred/cli.hpp>
#include <beampred/report.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace beampred;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kSmallRun = {
    "scenario.num_samples=300", "model.hidden_dims=16", "train.epochs=2", "eval.k=1,3"};

struct Scratch {
  fs::path dir;
  Scratch() : dir(fs::temp_directory_path() / "beampred_cli_test") {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

RunConfig small(std::string command, const fs::path& out) {
  RunConfig rc;
  rc.command = std::move(command);
  rc.overrides = kSmallRun;
  rc.out_dir = out;
  rc.master_seed = 3;
  return rc;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("generate, train, evaluate") {
  Scratch scratch;
  std::ostringstream log, err;
  REQUIRE(run(small("generate", scratch.dir), log, err) == kExitOk);
  const auto data = scratch.dir / "dataset.csv";
  REQUIRE(fs::exists(data));
  CHECK(slurp(data).rfind("# beampred dataset v1", 0) == 0);

  auto train_rc = small("train", scratch.dir);
  train_rc.data_path = data;
  REQUIRE(run(train_rc, log, err) == kExitOk);
  CHECK(fs::exists(scratch.dir / "model.ckpt"));
  CHECK(fs::exists(scratch.dir / "history.csv"));

  auto eval_rc = small("evaluate", scratch.dir);
  eval_rc.data_path = data;
  eval_rc.model_path = scratch.dir / "model.ckpt";
  REQUIRE(run(eval_rc, log, err) == kExitOk);
  const auto report = report_from_json(slurp(scratch.dir / "report.json"));
  CHECK(report.feature_set == "position");
  CHECK(report.n_test == 90);
  CHECK(report.topk_accuracy.count(3) == 1);

  // Without --data the checkpoint's own master seed regenerates the same samples.
  auto regen_rc = eval_rc;
  regen_rc.data_path.reset();
  regen_rc.master_seed = 999;
  regen_rc.out_dir = scratch.dir / "regen";
  REQUIRE(run(regen_rc, log, err) == kExitOk);
  CHECK(report_from_json(slurp(regen_rc.out_dir / "report.json")).topk_accuracy ==
        report.topk_accuracy);
}

TEST_CASE("ingest with a column mapping") {
  Scratch scratch;
  const auto input = scratch.dir / "external.csv";
  {
    std::ofstream out(input);
    out << "seconds,latitude,longitude,altitude,range,velocity,bbox_x,bbox_y,bbox_s,beam_index\n"
        << "0.0,33.4271,-111.9391,20,25,3,0.5,0.4,0.1,12\n"
        << "0.1,33.4272,-111.9392,21,26,3,,,,40\n";
  }
  const auto mapping = scratch.dir / "mapping.cfg";
  {
    std::ofstream out(mapping);
    out << "time_s = seconds\nlat = latitude\nlon = longitude\nheight_m = altitude\n"
        << "distance_m = range\nspeed_mps = velocity\nu = bbox_x\nv = bbox_y\nsize = bbox_s\n"
        << "beam_label = beam_index\n";
  }
  RunConfig rc;
  rc.command = "ingest";
  rc.input_path = input;
  rc.mapping_path = mapping;
  rc.out_dir = scratch.dir;
  std::ostringstream log, err;
  REQUIRE(run(rc, log, err) == kExitOk);
  const auto table = ingest_csv(scratch.dir / "ingested.csv");
  REQUIRE(table.samples.size() == 2);
  CHECK(table.label_only);
  CHECK(optimal_beam(table.powers[1]).index == 40);
}

TEST_CASE("exit codes") {
  Scratch scratch;
  std::ostringstream log, err;

  auto rc = small("train", scratch.dir);
  rc.overrides.push_back("train.epoch=3");
  CHECK(run(rc, log, err) == kExitConfig);
  CHECK(err.str().find("train.epoch") != std::string::npos);

  rc = small("frobnicate", scratch.dir);
  CHECK(run(rc, log, err) == kExitConfig);

  rc = small("train", scratch.dir);
  rc.config_path = scratch.dir / "missing.cfg";
  CHECK(run(rc, log, err) == kExitConfig);

  rc = small("train", scratch.dir);
  rc.data_path = scratch.dir / "missing.csv";
  CHECK(run(rc, log, err) == kExitData);

  const auto bad = scratch.dir / "bad.csv";
  std::ofstream(bad) << "time_s,lat\n0,1\n";
  rc = small("train", scratch.dir);
  rc.data_path = bad;
  CHECK(run(rc, log, err) == kExitData);

  rc = small("train", scratch.dir);
  rc.overrides.push_back("train.initial_lr=1e300");
  CHECK(run(rc, log, err) == kExitNumeric);

  rc = small("evaluate", scratch.dir);
  CHECK(run(rc, log, err) == kExitConfig);

  const std::string prog = "beampred";
  const std::string unknown = "--nope";
  std::vector<char*> argv{const_cast<char*>(prog.c_str()), const_cast<char*>(unknown.c_str())};
  CHECK(cli_main(static_cast<int>(argv.size()), argv.data()) == kExitConfig);
}

TEST_CASE("bundled configs parse") {
  const char* root = std::getenv("BEAMPRED_SOURCE_DIR");
  REQUIRE(root != nullptr);
  for (const char* name : {"default.cfg", "noiseless.cfg"}) {
    RunConfig rc = small("generate", fs::temp_directory_path() / "beampred_cli_cfg");
    rc.config_path = fs::path(root) / "configs" / name;
    rc.overrides = {"scenario.num_samples=20"};
    std::ostringstream log, err;
    CHECK_MESSAGE(run(rc, log, err) == kExitOk, err.str());
  }
  fs::remove_all(fs::temp_directory_path() / "beampred_cli_cfg");
}
