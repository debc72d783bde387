// SPDX-License-Identifier: Apache-2.0
#include "beampred/checkpoint.hpp"

#include <beampred/error.hpp>
#include <beampred/io.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace beampred {

namespace {

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw DataError("checkpoint: unexpected end of file");
    return w;
  }

  void expect(const std::string& keyword) {
    const std::string w = word();
    if (w != keyword) throw DataError("checkpoint: expected '" + keyword + "', found '" + w + "'");
  }

  double real() {
    const std::string w = word();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(w.c_str(), &end);
    if (end != w.c_str() + w.size() || errno == ERANGE)
      throw DataError("checkpoint: malformed number '" + w + "'");
    return v;
  }

  std::uint64_t integer() {
    const std::string w = word();
    char* end = nullptr;
    const auto v = std::strtoull(w.c_str(), &end, 10);
    if (w.empty() || w.front() == '-' || end != w.c_str() + w.size())
      throw DataError("checkpoint: malformed integer '" + w + "'");
    return v;
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const auto& arch = ckpt.model.architecture();
  out << "beampred-checkpoint " << kCheckpointVersion << '\n';
  out << "config_hash " << (ckpt.config_hash.empty() ? "-" : ckpt.config_hash) << '\n';
  out << "master_seed " << ckpt.master_seed << '\n';
  out << "feature_set " << feature_set_name(ckpt.feature_set) << '\n';
  out << "q " << ckpt.q << '\n';
  out << "split " << split_mode_name(ckpt.split_mode) << ' ' << hex(ckpt.train_fraction) << ' '
      << ckpt.split_seed << '\n';
  out << "model_seed " << ckpt.model.seed() << '\n';
  out << "architecture " << arch.input_dim << ' ' << arch.output_dim << ' '
      << arch.hidden_dims.size();
  for (std::size_t h : arch.hidden_dims) out << ' ' << h;
  out << '\n';
  out << "normalizer " << ckpt.normalizer.dim() << '\n';
  for (const auto& r : ckpt.normalizer.ranges())
    out << "range " << hex(r.min) << ' ' << hex(r.max) << ' ' << (r.constant ? 1 : 0) << '\n';
  const auto& layers = ckpt.model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& w = layers[l].weight;
    out << "layer " << l << ' ' << w.rows() << ' ' << w.cols() << '\n';
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out << (c ? " " : "") << hex(w(r, c));
      out << '\n';
    }
    out << "bias";
    for (Eigen::Index r = 0; r < layers[l].bias.size(); ++r) out << ' ' << hex(layers[l].bias[r]);
    out << '\n';
  }
  out << "end\n";
}

Checkpoint load_checkpoint(std::istream& in) {
  Reader rd(in);
  rd.expect("beampred-checkpoint");
  const auto version = rd.integer();
  if (version != kCheckpointVersion)
    throw DataError("checkpoint: unsupported version " + std::to_string(version));
  Checkpoint ckpt;
  rd.expect("config_hash");
  ckpt.config_hash = rd.word();
  if (ckpt.config_hash == "-") ckpt.config_hash.clear();
  rd.expect("master_seed");
  ckpt.master_seed = rd.integer();
  rd.expect("feature_set");
  try {
    ckpt.feature_set = parse_feature_set(rd.word());
    rd.expect("q");
    ckpt.q = rd.integer();
    rd.expect("split");
    ckpt.split_mode = parse_split_mode(rd.word());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  ckpt.train_fraction = rd.real();
  ckpt.split_seed = rd.integer();
  rd.expect("model_seed");
  const auto model_seed = rd.integer();

  rd.expect("architecture");
  MlpArchitecture arch;
  arch.input_dim = rd.integer();
  arch.output_dim = rd.integer();
  arch.hidden_dims.resize(rd.integer());
  for (auto& h : arch.hidden_dims) h = rd.integer();

  rd.expect("normalizer");
  std::vector<FeatureRange> ranges(rd.integer());
  for (auto& r : ranges) {
    rd.expect("range");
    r.min = rd.real();
    r.max = rd.real();
    r.constant = rd.integer() != 0;
  }
  ckpt.normalizer = Normalizer(std::move(ranges));

  std::vector<DenseLayer> layers(arch.hidden_dims.size() + 1);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    rd.expect("layer");
    if (rd.integer() != l) throw DataError("checkpoint: layers out of order");
    const auto rows = static_cast<Eigen::Index>(rd.integer());
    const auto cols = static_cast<Eigen::Index>(rd.integer());
    layers[l].weight.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) layers[l].weight(r, c) = rd.real();
    rd.expect("bias");
    layers[l].bias.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) layers[l].bias[r] = rd.real();
  }
  rd.expect("end");
  try {
    ckpt.model = MlpModel(arch, std::move(layers), model_seed);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  if (ckpt.normalizer.dim() != arch.input_dim)
    throw DataError("checkpoint: normalizer dimension does not match the model input");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ostringstream out;
  save_checkpoint(out, ckpt);
  write_file_atomic(path, out.str());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace beampred
