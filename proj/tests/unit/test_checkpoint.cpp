// SPDX-License-Identifier: Apache-2.0
#include <beampred/checkpoint.hpp>
#include <beampred/error.hpp>

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace beampred;

namespace {

Checkpoint sample_checkpoint() {
  MlpArchitecture arch;
  arch.input_dim = 4;
  arch.hidden_dims = {16, 8};
  arch.output_dim = 32;
  Checkpoint ckpt;
  ckpt.model = MlpModel::initialize(arch, 321);
  ckpt.feature_set = FeatureSet::PositionHeightDistance;
  ckpt.q = 32;
  ckpt.normalizer = Normalizer({{33.4, 33.5, false}, {-112.0, -111.9, false}, {10, 10, true}, {1, 150, false}});
  ckpt.split_mode = SplitMode::Temporal;
  ckpt.train_fraction = 0.7;
  ckpt.split_seed = 0xdeadbeefcafef00dULL;
  ckpt.master_seed = 17;
  ckpt.config_hash = "0123456789abcdef";
  return ckpt;
}

}  // namespace

TEST_CASE("checkpoint round trip reproduces forward outputs") {
  const auto ckpt = sample_checkpoint();
  std::stringstream buf;
  save_checkpoint(buf, ckpt);
  const auto back = load_checkpoint(buf);

  CHECK(back.model.architecture() == ckpt.model.architecture());
  CHECK(back.model.seed() == ckpt.model.seed());
  CHECK(back.feature_set == ckpt.feature_set);
  CHECK(back.q == ckpt.q);
  CHECK(back.split_mode == ckpt.split_mode);
  CHECK(back.train_fraction == ckpt.train_fraction);
  CHECK(back.split_seed == ckpt.split_seed);
  CHECK(back.master_seed == ckpt.master_seed);
  CHECK(back.config_hash == ckpt.config_hash);
  REQUIRE(back.normalizer.dim() == 4);
  CHECK(back.normalizer.ranges()[2].constant);

  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(4);
    for (auto& v : x) v = rng.uniform();
    CHECK((forward(back.model, x) - forward(ckpt.model, x)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("checkpoint files") {
  const auto dir = std::filesystem::temp_directory_path() / "beampred_ckpt_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "nested" / "model.ckpt";
  save_checkpoint(path, sample_checkpoint());
  CHECK(std::filesystem::exists(path));
  CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  CHECK(load_checkpoint(path).q == 32);
  CHECK_THROWS(load_checkpoint(dir / "absent.ckpt"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("corrupt checkpoints are rejected") {
  std::stringstream full;
  save_checkpoint(full, sample_checkpoint());
  const auto text = full.str();

  std::stringstream wrong_magic("not-a-checkpoint 1\n");
  CHECK_THROWS(load_checkpoint(wrong_magic));
  std::stringstream future("beampred-checkpoint 99\n");
  CHECK_THROWS(load_checkpoint(future));
  std::stringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS(load_checkpoint(truncated));
}
