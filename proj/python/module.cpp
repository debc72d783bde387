// SPDX-License-Identifier: Apache-2.0
#include <beampred/channel.hpp>
#include <beampred/checkpoint.hpp>
#include <beampred/cli.hpp>
#include <beampred/codebook.hpp>
#include <beampred/config.hpp>
#include <beampred/error.hpp>
#include <beampred/eval.hpp>
#include <beampred/oracle.hpp>
#include <beampred/pipeline.hpp>
#include <beampred/report.hpp>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <limits>
#include <sstream>

namespace py = pybind11;
using namespace beampred;

namespace {

ArrayGeometry ula(std::size_t num_elements, double spacing) {
  ArrayGeometry g;
  g.num_elements = num_elements;
  g.element_spacing = spacing;
  return g;
}

std::vector<std::size_t> label_indices(const std::vector<BeamLabel>& labels) {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(l.index);
  return out;
}

py::dict raw_to_dict(const RawData& raw) {
  const auto n = static_cast<py::ssize_t>(raw.size());
  const auto q = static_cast<py::ssize_t>(raw.size() ? raw.powers.front().size() : 0);
  py::array_t<double> time(n), lat(n), lon(n), height(n), distance(n), speed(n), u(n), v(n),
      size(n);
  py::array_t<double> powers({n, q});
  auto P = powers.mutable_unchecked<2>();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (py::ssize_t i = 0; i < n; ++i) {
    const auto& s = raw.samples[static_cast<std::size_t>(i)];
    time.mutable_at(i) = s.time_s;
    lat.mutable_at(i) = s.gps[0];
    lon.mutable_at(i) = s.gps[1];
    height.mutable_at(i) = s.height_m;
    distance.mutable_at(i) = s.distance_m;
    speed.mutable_at(i) = s.speed_mps;
    u.mutable_at(i) = s.visual_uv ? (*s.visual_uv)[0] : nan;
    v.mutable_at(i) = s.visual_uv ? (*s.visual_uv)[1] : nan;
    size.mutable_at(i) = s.visual_size.value_or(nan);
    const auto& pv = raw.powers[static_cast<std::size_t>(i)];
    for (py::ssize_t j = 0; j < q; ++j) P(i, j) = pv[static_cast<std::size_t>(j)];
  }
  py::dict d;
  d["time_s"] = time;
  d["lat"] = lat;
  d["lon"] = lon;
  d["height_m"] = height;
  d["distance_m"] = distance;
  d["speed_mps"] = speed;
  d["u"] = u;
  d["v"] = v;
  d["size"] = size;
  d["powers"] = powers;
  return d;
}

}  // namespace

PYBIND11_MODULE(_beampred, m) {
  m.doc() = "Sensing-aided mmWave drone beam prediction";

  auto base_error = py::register_exception<Error>(m, "BeampredError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base_error.ptr());
  py::register_exception<DataError>(m, "DataError", base_error.ptr());
  py::register_exception<NumericError>(m, "NumericError", base_error.ptr());

  // Codebook and channel
  m.def(
      "steering_vector",
      [](double sine, std::size_t num_elements, double spacing) {
        return ComplexVector(steering_vector(ula(num_elements, spacing), sine).weights);
      },
      py::arg("sine"), py::arg("num_elements") = 16, py::arg("element_spacing") = 0.5);

  py::class_<BeamCodebook>(m, "Codebook")
      .def_property_readonly("size", &BeamCodebook::size)
      .def_property_readonly("num_elements", &BeamCodebook::num_elements)
      .def_property_readonly("sine_step", &BeamCodebook::sine_step)
      .def_property_readonly("fov_sine", &BeamCodebook::fov_sine_half_width)
      .def_property_readonly("sines",
                             [](const BeamCodebook& cb) {
                               std::vector<double> s;
                               for (const auto& b : cb.beams()) s.push_back(b.steering_sine);
                               return s;
                             })
      .def("weights",
           [](const BeamCodebook& cb) {
             Eigen::MatrixXcd w(static_cast<Eigen::Index>(cb.size()),
                                static_cast<Eigen::Index>(cb.num_elements()));
             for (std::size_t q = 0; q < cb.size(); ++q)
               w.row(static_cast<Eigen::Index>(q)) = cb.beam(q).weights.transpose();
             return w;
           })
      .def("gains", [](const BeamCodebook& cb, const ComplexVector& h) { return beam_gains(cb, h); },
           py::arg("h"))
      .def("nearest_beam", &BeamCodebook::nearest_beam, py::arg("sine"));

  m.def(
      "build_codebook",
      [](std::size_t num_beams, double fov_sine, std::size_t num_elements, double spacing) {
        return build_codebook(ula(num_elements, spacing), num_beams, fov_sine);
      },
      py::arg("num_beams") = 64, py::arg("fov_sine") = 0.866, py::arg("num_elements") = 16,
      py::arg("element_spacing") = 0.5);

  m.def(
      "los_power_vector",
      [](const Vec3& bs, const Vec3& drone, const BeamCodebook& cb, double snr_db, bool noise,
         std::uint64_t seed) {
        Rng rng(seed);
        const auto chan = los_channel({bs, drone, 0.005}, cb.geometry(), rng);
        return received_power_vector(chan, cb, {.snr_db = snr_db, .enabled = noise}, rng);
      },
      py::arg("bs_position"), py::arg("drone_position"), py::arg("codebook"),
      py::arg("snr_db") = 70.0, py::arg("noise") = true, py::arg("seed") = 0,
      "Received power per beam for a line-of-sight link.");

  // Oracle
  m.def("optimal_beam", [](std::vector<double> p) { return optimal_beam(PowerVector(std::move(p))).index; },
        py::arg("powers"));
  m.def(
      "downsample_power",
      [](std::vector<double> p, std::size_t factor) {
        const auto d = downsample_power(PowerVector(std::move(p)), factor);
        return std::vector<double>(d.powers().begin(), d.powers().end());
      },
      py::arg("powers"), py::arg("factor") = 2);
  m.def(
      "topk_beams",
      [](std::vector<double> p, std::size_t k) {
        return label_indices(topk_beams(PowerVector(std::move(p)), k));
      },
      py::arg("powers"), py::arg("k"));

  // Evaluation helpers
  m.def(
      "topk_accuracy",
      [](const std::vector<std::vector<std::size_t>>& predictions,
         const std::vector<std::size_t>& labels, std::size_t k) {
        std::vector<std::vector<BeamLabel>> p;
        for (const auto& row : predictions) {
          std::vector<BeamLabel> r;
          for (auto i : row) r.push_back({i, 0});
          p.push_back(std::move(r));
        }
        std::vector<BeamLabel> l;
        for (auto i : labels) l.push_back({i, 0});
        return topk_accuracy(p, l, k);
      },
      py::arg("predictions"), py::arg("labels"), py::arg("k"));
  m.def("overhead_ratio", &overhead_ratio, py::arg("k"), py::arg("q"));

  // Configuration
  py::class_<ExperimentConfig>(m, "Config")
      .def(py::init<>())
      .def("set", py::overload_cast<ExperimentConfig&, std::string_view, std::string_view>(&apply_override),
           py::arg("key"), py::arg("value"))
      .def("get",
           [](const ExperimentConfig& c, const std::string& key) {
             for (const auto& k : config_keys())
               if (k.name == key) return k.get(c);
             throw ConfigError("unknown config key '" + key + "'");
           })
      .def("validate", &ExperimentConfig::validate)
      .def("hash", [](const ExperimentConfig& c) { return config_hash(c); })
      .def("canonical", [](const ExperimentConfig& c) { return canonical_config(c); });
  m.def("load_config", [](const std::filesystem::path& p) { return load_config(p); }, py::arg("path"));
  m.def("config_keys", [] {
    std::vector<std::string> names;
    for (const auto& k : config_keys()) names.push_back(k.name);
    return names;
  });

  // Data
  py::class_<RawData>(m, "RawData")
      .def_property_readonly("size", &RawData::size)
      .def("__len__", &RawData::size)
      .def("to_dict", &raw_to_dict);
  m.def("simulate", &simulate, py::arg("config"), py::arg("seed") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "read_csv",
      [](const std::filesystem::path& path, std::optional<std::filesystem::path> mapping) {
        ColumnMapping cm;
        if (mapping) cm = read_column_mapping(*mapping);
        return from_table(ingest_csv(path, cm));
      },
      py::arg("path"), py::arg("mapping") = py::none());

  // Models
  py::class_<Checkpoint>(m, "Model")
      .def_property_readonly("feature_set",
                             [](const Checkpoint& c) { return std::string(feature_set_name(c.feature_set)); })
      .def_property_readonly("q", [](const Checkpoint& c) { return c.q; })
      .def_property_readonly("config_hash", [](const Checkpoint& c) { return c.config_hash; })
      .def_property_readonly("parameter_count", [](const Checkpoint& c) { return c.model.parameter_count(); })
      .def(
          "probabilities",
          [](const Checkpoint& c, const Eigen::VectorXd& raw_features) {
            return Eigen::VectorXd(forward(c.model, c.normalizer.apply(raw_features)));
          },
          py::arg("features"), "Softmax output for raw (unnormalized) features.")
      .def(
          "predict_topk",
          [](const Checkpoint& c, const Eigen::VectorXd& raw_features, std::size_t k) {
            return label_indices(predict_topk(c.model, c.normalizer.apply(raw_features), k));
          },
          py::arg("features"), py::arg("k") = 1)
      .def("save", [](const Checkpoint& c, const std::filesystem::path& p) { save_checkpoint(p, c); },
           py::arg("path"));
  m.def("load_model", [](const std::filesystem::path& p) { return load_checkpoint(p); }, py::arg("path"));

  m.def(
      "train",
      [](const RawData& raw, const ExperimentConfig& cfg, const std::string& feature_set,
         std::uint64_t seed) {
        py::gil_scoped_release release;
        auto run = train_feature_set(raw, cfg, parse_feature_set(feature_set), seed);
        std::vector<py::dict> history;
        py::gil_scoped_acquire acquire;
        for (const auto& e : run.history) {
          py::dict d;
          d["epoch"] = e.epoch;
          d["learning_rate"] = e.learning_rate;
          d["loss"] = e.loss;
          d["top1"] = e.top1;
          history.push_back(d);
        }
        return py::make_tuple(std::move(run.checkpoint), history);
      },
      py::arg("data"), py::arg("config"), py::arg("feature_set") = "position", py::arg("seed") = 0,
      "Returns (model, per-epoch history).");

  m.def(
      "evaluate_json",
      [](const Checkpoint& ckpt, const RawData& raw, const std::vector<std::size_t>& ks) {
        py::gil_scoped_release release;
        return report_to_json(evaluate_checkpoint(ckpt, raw, ks));
      },
      py::arg("model"), py::arg("data"), py::arg("ks") = kDefaultReportedK);
  m.def(
      "compare_json",
      [](const RawData& raw, const ExperimentConfig& cfg, std::uint64_t seed) {
        py::gil_scoped_release release;
        return reports_to_json(run_comparison(raw, cfg, seed).reports);
      },
      py::arg("data"), py::arg("config"), py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "beampred");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        return cli_main(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"), "Runs the command-line tool in-process and returns its exit status.");
}
