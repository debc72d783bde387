// SPDX-License-Identifier: Apache-2.0
#include "beampred/config.hpp"

#include <beampred/error.hpp>
#include <beampred/rng.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace beampred {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double to_real(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError("config key '" + std::string(key) + "': '" + std::string(text) +
                      "' is not a finite number");
  return v;
}

std::uint64_t to_count(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("config key '" + std::string(key) + "': '" + std::string(text) +
                      "' is not a nonnegative integer");
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "on" || text == "1") return true;
  if (text == "false" || text == "off" || text == "0") return false;
  throw ConfigError("config key '" + std::string(key) + "': expected true or false");
}

std::vector<std::string_view> split_list(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = text.find(sep);
    const auto part = trim(text.substr(0, pos));
    if (!part.empty()) parts.push_back(part);
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return parts;
}

std::vector<std::size_t> to_counts(std::string_view key, std::string_view text) {
  std::vector<std::size_t> out;
  for (auto part : split_list(text, ',')) out.push_back(to_count(key, part));
  return out;
}

std::string join(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + std::to_string(values[i]);
  return out;
}

Vec3 to_vec3(std::string_view key, std::string_view text) {
  std::string normalized(text);
  std::replace(normalized.begin(), normalized.end(), ' ', ',');
  const auto parts = split_list(normalized, ',');
  if (parts.size() != 3)
    throw ConfigError("config key '" + std::string(key) + "': expected three coordinates");
  return {to_real(key, parts[0]), to_real(key, parts[1]), to_real(key, parts[2])};
}

std::string fmt(const Vec3& v) { return fmt(v.x()) + "," + fmt(v.y()) + "," + fmt(v.z()); }

template <typename Field>
ConfigKey real_key(std::string name, std::string description, Field field) {
  return {name, std::move(description),
          [name, field](ExperimentConfig& c, std::string_view v) { field(c) = to_real(name, v); },
          [field](const ExperimentConfig& c) { return fmt(field(c)); }};
}

template <typename Field>
ConfigKey count_key(std::string name, std::string description, Field field) {
  return {name, std::move(description),
          [name, field](ExperimentConfig& c, std::string_view v) {
            field(c) = static_cast<std::size_t>(to_count(name, v));
          },
          [field](const ExperimentConfig& c) {
            return std::to_string(field(c));
          }};
}

std::vector<ConfigKey> make_keys() {
  std::vector<ConfigKey> keys;
  // Scenario mix
  keys.push_back(count_key("scenario.num_samples", "samples to simulate (0 = one pass over explicit waypoints)",
                           [](auto& c) -> auto& { return c.scenario.num_samples; }));
  keys.push_back(count_key("scenario.waypoints_per_flight", "random waypoints per simulated flight",
                           [](auto& c) -> auto& { return c.scenario.waypoints_per_flight; }));
  keys.push_back(real_key("scenario.max_horizontal_range_m", "horizontal range limit for random waypoints, m",
                          [](auto& c) -> auto& { return c.scenario.max_horizontal_range_m; }));
  keys.push_back(real_key("scenario.frustum_margin", "fraction of the camera half-angle tangent used for waypoints",
                          [](auto& c) -> auto& { return c.scenario.frustum_margin; }));
  // Trajectory
  keys.push_back(real_key("trajectory.speed_min_mps", "minimum segment speed, m/s",
                          [](auto& c) -> auto& { return c.scenario.trajectory.speed_min_mps; }));
  keys.push_back(real_key("trajectory.speed_max_mps", "maximum segment speed, m/s",
                          [](auto& c) -> auto& { return c.scenario.trajectory.speed_max_mps; }));
  keys.push_back(real_key("trajectory.height_min_m", "minimum waypoint height, m",
                          [](auto& c) -> auto& { return c.scenario.trajectory.height_min_m; }));
  keys.push_back(real_key("trajectory.height_max_m", "maximum waypoint height, m",
                          [](auto& c) -> auto& { return c.scenario.trajectory.height_max_m; }));
  keys.push_back(real_key("trajectory.sample_rate_hz", "sensor sampling rate, Hz",
                          [](auto& c) -> auto& { return c.scenario.trajectory.sample_rate_hz; }));
  keys.push_back(real_key("trajectory.hover_duration_s", "duration of a zero-length segment, s",
                          [](auto& c) -> auto& { return c.scenario.trajectory.hover_duration_s; }));
  keys.push_back({"trajectory.waypoints", "explicit flight path 'x,y,z; x,y,z; ...' in meters (empty = random flights)",
                  [](ExperimentConfig& c, std::string_view v) {
                    c.scenario.trajectory.waypoints.clear();
                    for (auto part : split_list(v, ';'))
                      c.scenario.trajectory.waypoints.push_back(to_vec3("trajectory.waypoints", part));
                  },
                  [](const ExperimentConfig& c) {
                    std::string out;
                    for (std::size_t i = 0; i < c.scenario.trajectory.waypoints.size(); ++i)
                      out += (i ? ";" : "") + fmt(c.scenario.trajectory.waypoints[i]);
                    return out;
                  }});
  // Sensors
  keys.push_back(real_key("sensors.gps_noise_sigma_m", "GPS error std per horizontal axis, m",
                          [](auto& c) -> auto& { return c.scenario.trajectory.gps_noise_sigma_m; }));
  keys.push_back(real_key("sensors.height_noise_sigma_m", "height error std, m",
                          [](auto& c) -> auto& { return c.scenario.trajectory.height_noise_sigma_m; }));
  keys.push_back(real_key("sensors.distance_noise_sigma_m", "distance error std, m",
                          [](auto& c) -> auto& { return c.scenario.trajectory.distance_noise_sigma_m; }));
  keys.push_back(real_key("sensors.reference_size_m", "apparent-size reference length, m",
                          [](auto& c) -> auto& { return c.scenario.trajectory.reference_size_m; }));
  // Site
  keys.push_back({"site.bs_position", "basestation array and camera position 'x,y,z', m",
                  [](ExperimentConfig& c, std::string_view v) {
                    c.scenario.trajectory.bs_position = to_vec3("site.bs_position", v);
                    c.scenario.camera.position = c.scenario.trajectory.bs_position;
                  },
                  [](const ExperimentConfig& c) { return fmt(c.scenario.trajectory.bs_position); }});
  keys.push_back(real_key("site.anchor_lat_deg", "latitude of the ENU origin, degrees",
                          [](auto& c) -> auto& { return c.scenario.trajectory.anchor.latitude_deg; }));
  keys.push_back(real_key("site.anchor_lon_deg", "longitude of the ENU origin, degrees",
                          [](auto& c) -> auto& { return c.scenario.trajectory.anchor.longitude_deg; }));
  // Camera
  keys.push_back(real_key("camera.horizontal_fov_deg", "camera horizontal field of view, degrees",
                          [](auto& c) -> auto& { return c.scenario.camera.horizontal_fov_deg; }));
  keys.push_back(real_key("camera.vertical_fov_deg", "camera vertical field of view, degrees",
                          [](auto& c) -> auto& { return c.scenario.camera.vertical_fov_deg; }));
  // Array / codebook / channel
  keys.push_back(count_key("array.num_elements", "ULA element count M",
                           [](auto& c) -> auto& { return c.scenario.array.num_elements; }));
  keys.push_back(real_key("array.element_spacing", "element spacing, wavelengths",
                          [](auto& c) -> auto& { return c.scenario.array.element_spacing; }));
  keys.push_back(count_key("codebook.num_beams", "beams in the measured codebook",
                           [](auto& c) -> auto& { return c.scenario.num_beams; }));
  keys.push_back(real_key("codebook.fov_sine", "half width of the codebook grid in sine space",
                          [](auto& c) -> auto& { return c.scenario.fov_sine_half_width; }));
  keys.push_back(real_key("channel.snr_db", "transmit SNR P/sigma^2 at 1 m reference, dB",
                          [](auto& c) -> auto& { return c.scenario.noise.snr_db; }));
  keys.push_back({"channel.noise", "add receiver noise to beam sweeps (true/false)",
                  [](ExperimentConfig& c, std::string_view v) { c.scenario.noise.enabled = to_bool("channel.noise", v); },
                  [](const ExperimentConfig& c) { return std::string(c.scenario.noise.enabled ? "true" : "false"); }});
  keys.push_back(count_key("channel.num_subcarriers", "OFDM subcarriers K",
                           [](auto& c) -> auto& { return c.scenario.num_subcarriers; }));
  // Data
  keys.push_back(count_key("data.q", "active codebook size after downsampling (32 or 64)",
                           [](auto& c) -> auto& { return c.q; }));
  keys.push_back(real_key("data.train_fraction", "training share of the split",
                          [](auto& c) -> auto& { return c.train_fraction; }));
  keys.push_back({"data.split", "split mode: random or temporal",
                  [](ExperimentConfig& c, std::string_view v) {
                    try {
                      c.split_mode = parse_split_mode(trim(v));
                    } catch (const std::invalid_argument& e) {
                      throw ConfigError(std::string("config key 'data.split': ") + e.what());
                    }
                  },
                  [](const ExperimentConfig& c) { return std::string(split_mode_name(c.split_mode)); }});
  keys.push_back({"data.feature_set", "position, position-height, position-height-distance or visual",
                  [](ExperimentConfig& c, std::string_view v) {
                    try {
                      c.feature_set = parse_feature_set(trim(v));
                    } catch (const std::invalid_argument& e) {
                      throw ConfigError(std::string("config key 'data.feature_set': ") + e.what());
                    }
                  },
                  [](const ExperimentConfig& c) { return std::string(feature_set_name(c.feature_set)); }});
  // Model / training
  keys.push_back({"model.hidden_dims", "hidden layer widths, comma separated",
                  [](ExperimentConfig& c, std::string_view v) { c.hidden_dims = to_counts("model.hidden_dims", v); },
                  [](const ExperimentConfig& c) { return join(c.hidden_dims); }});
  keys.push_back(count_key("train.batch_size", "mini-batch size",
                           [](auto& c) -> auto& { return c.train.batch_size; }));
  keys.push_back(real_key("train.initial_lr", "initial Adam learning rate",
                          [](auto& c) -> auto& { return c.train.initial_lr; }));
  keys.push_back({"train.lr_decay_epochs", "epochs at which the rate is multiplied by train.lr_factor",
                  [](ExperimentConfig& c, std::string_view v) { c.train.lr_decay_epochs = to_counts("train.lr_decay_epochs", v); },
                  [](const ExperimentConfig& c) { return join(c.train.lr_decay_epochs); }});
  keys.push_back(real_key("train.lr_factor", "learning-rate reduction factor",
                          [](auto& c) -> auto& { return c.train.lr_factor; }));
  keys.push_back(count_key("train.epochs", "training epochs",
                           [](auto& c) -> auto& { return c.train.epochs; }));
  keys.push_back(real_key("train.adam_beta1", "Adam first-moment decay",
                          [](auto& c) -> auto& { return c.train.adam.beta1; }));
  keys.push_back(real_key("train.adam_beta2", "Adam second-moment decay",
                          [](auto& c) -> auto& { return c.train.adam.beta2; }));
  keys.push_back(real_key("train.adam_eps", "Adam epsilon",
                          [](auto& c) -> auto& { return c.train.adam.eps; }));
  keys.push_back({"eval.k", "reported top-k values, comma separated",
                  [](ExperimentConfig& c, std::string_view v) { c.report_k = to_counts("eval.k", v); },
                  [](const ExperimentConfig& c) { return join(c.report_k); }});
  return keys;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = make_keys();
  return keys;
}

void apply_override(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  const auto& keys = config_keys();
  const auto it = std::find_if(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.name == key; });
  if (it == keys.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->set(cfg, trim(value));
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  apply_override(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  bool explicit_waypoints = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view t = line;
    if (const auto hash = t.find('#'); hash != std::string_view::npos) t = t.substr(0, hash);
    t = trim(t);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = trim(t.substr(0, eq));
    const auto value = trim(t.substr(eq + 1));
    try {
      if (key == "waypoint") {
        if (!explicit_waypoints) base.scenario.trajectory.waypoints.clear();
        explicit_waypoints = true;
        base.scenario.trajectory.waypoints.push_back(to_vec3("waypoint", value));
      } else {
        apply_override(base, key, value);
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return base;
}

void ExperimentConfig::validate() const {
  try {
    scenario.validate();
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  if (q < 2) throw ConfigError("invalid configuration: data.q must be >= 2");
  if (scenario.num_beams % q != 0)
    throw ConfigError("invalid configuration: codebook.num_beams must be a multiple of data.q");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("invalid configuration: data.train_fraction must lie in (0, 1)");
  if (hidden_dims.empty() ||
      std::any_of(hidden_dims.begin(), hidden_dims.end(), [](std::size_t h) { return h == 0; }))
    throw ConfigError("invalid configuration: model.hidden_dims needs positive widths");
  if (report_k.empty() ||
      std::any_of(report_k.begin(), report_k.end(), [&](std::size_t k) { return k < 1 || k > q; }))
    throw ConfigError("invalid configuration: eval.k values must lie in [1, data.q]");
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  for (const auto& key : config_keys()) lines.push_back(key.name + "=" + key.get(cfg));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config(cfg))));
  return buf;
}

std::string describe_config_keys(const ExperimentConfig& defaults) {
  std::ostringstream out;
  out << "Override keys (--set key=value):\n";
  for (const auto& key : config_keys()) {
    out << "  " << key.name << "\n      " << key.description << " [default: " << key.get(defaults)
        << "]\n";
  }
  return out.str();
}

}  // namespace beampred
