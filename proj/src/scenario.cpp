// SPDX-License-Identifier: Apache-2.0
#include "beampred/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace beampred {

namespace {

constexpr double kEarthRadiusM = 6378137.0;
constexpr double kDegPerRad = 180.0 / std::numbers::pi;

double tan_half_angle(double fov_deg) { return std::tan(0.5 * fov_deg / kDegPerRad); }

bool is_unit(const Vec3& v) { return std::abs(v.norm() - 1.0) <= 1e-9; }

}  // namespace

Vec2 enu_to_geodetic(const GeoAnchor& anchor, double east_m, double north_m) {
  const double lat = anchor.latitude_deg + north_m / kEarthRadiusM * kDegPerRad;
  const double lon = anchor.longitude_deg +
                     east_m / (kEarthRadiusM * std::cos(anchor.latitude_deg / kDegPerRad)) *
                         kDegPerRad;
  return {lat, lon};
}

Vec2 geodetic_to_enu(const GeoAnchor& anchor, const Vec2& lat_lon_deg) {
  const double north = (lat_lon_deg.x() - anchor.latitude_deg) / kDegPerRad * kEarthRadiusM;
  const double east = (lat_lon_deg.y() - anchor.longitude_deg) / kDegPerRad * kEarthRadiusM *
                      std::cos(anchor.latitude_deg / kDegPerRad);
  return {east, north};
}

void CameraModel::validate() const {
  if (!is_unit(optical_axis) || !is_unit(image_right))
    throw std::invalid_argument("camera axes must be unit vectors");
  if (std::abs(optical_axis.dot(image_right)) > 1e-9)
    throw std::invalid_argument("camera image_right must be orthogonal to the optical axis");
  if (!(horizontal_fov_deg > 0.0 && horizontal_fov_deg < 180.0) ||
      !(vertical_fov_deg > 0.0 && vertical_fov_deg < 180.0))
    throw std::invalid_argument("camera field of view must lie in (0, 180) degrees");
}

std::optional<Vec2> project(const CameraModel& camera, const Vec3& point) {
  const Vec3 offset = point - camera.position;
  const double depth = offset.dot(camera.optical_axis);
  if (!(depth > 0.0)) return std::nullopt;
  const Vec3 image_down = camera.optical_axis.cross(camera.image_right);
  const double tx = offset.dot(camera.image_right) / depth;
  const double ty = offset.dot(image_down) / depth;
  const double half_u = tan_half_angle(camera.horizontal_fov_deg);
  const double half_v = tan_half_angle(camera.vertical_fov_deg);
  if (std::abs(tx) > half_u || std::abs(ty) > half_v) return std::nullopt;
  return Vec2{0.5 + 0.5 * tx / half_u, 0.5 + 0.5 * ty / half_v};
}

void TrajectoryConfig::validate() const {
  if (!(speed_min_mps >= 0.0 && speed_min_mps <= speed_max_mps))
    throw std::invalid_argument("speed range must satisfy 0 <= min <= max");
  if (!(height_min_m >= 0.0 && height_min_m <= height_max_m))
    throw std::invalid_argument("height range must satisfy 0 <= min <= max");
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be positive");
  if (!(gps_noise_sigma_m >= 0.0) || !(height_noise_sigma_m >= 0.0) ||
      !(distance_noise_sigma_m >= 0.0))
    throw std::invalid_argument("noise sigmas must be nonnegative");
  if (!(hover_duration_s > 0.0)) throw std::invalid_argument("hover duration must be positive");
  if (!(reference_size_m > 0.0)) throw std::invalid_argument("reference size must be positive");
}

std::vector<DroneState> generate_trajectory(const TrajectoryConfig& cfg) {
  cfg.validate();
  if (cfg.waypoints.size() < 2) throw std::invalid_argument("trajectory needs at least two waypoints");
  for (const auto& w : cfg.waypoints) {
    if (!w.allFinite() || w.z() < 0.0)
      throw std::invalid_argument("waypoints must be finite and above ground");
  }

  struct Segment {
    Vec3 start;
    Vec3 end;
    double t_start;
    double duration;
    Vec3 velocity;
  };
  Rng rng(cfg.rng_seed);
  std::vector<Segment> segments;
  double t = 0.0;
  for (std::size_t i = 0; i + 1 < cfg.waypoints.size(); ++i) {
    const Vec3& a = cfg.waypoints[i];
    const Vec3& b = cfg.waypoints[i + 1];
    const double speed = cfg.speed_min_mps == cfg.speed_max_mps
                             ? cfg.speed_min_mps
                             : rng.uniform(cfg.speed_min_mps, cfg.speed_max_mps);
    const double length = (b - a).norm();
    Segment seg{a, b, t, 0.0, Vec3::Zero()};
    if (length == 0.0) {
      seg.duration = cfg.hover_duration_s;
    } else {
      if (!(speed > 0.0)) throw std::invalid_argument("zero speed on a segment of nonzero length");
      seg.duration = length / speed;
      seg.velocity = (b - a) / seg.duration;
    }
    segments.push_back(seg);
    t += seg.duration;
  }

  const double total = t;
  const auto count = static_cast<std::size_t>(std::floor(total * cfg.sample_rate_hz + 1e-9)) + 1;
  std::vector<DroneState> states;
  states.reserve(count);
  std::size_t s = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double time = static_cast<double>(i) / cfg.sample_rate_hz;
    while (s + 1 < segments.size() && time >= segments[s + 1].t_start) ++s;
    const Segment& seg = segments[s];
    const double frac = std::clamp((time - seg.t_start) / seg.duration, 0.0, 1.0);
    DroneState state;
    state.time_s = time;
    state.position = seg.start + frac * (seg.end - seg.start);
    state.velocity = seg.velocity;
    states.push_back(state);
  }
  return states;
}

SensorSample sense(const DroneState& state, const CameraModel& camera, const TrajectoryConfig& cfg,
                   Rng& rng) {
  // Every draw is taken unconditionally so the stream layout does not depend on the sigmas.
  const double east_error = rng.normal() * cfg.gps_noise_sigma_m;
  const double north_error = rng.normal() * cfg.gps_noise_sigma_m;
  const double height_error = rng.normal() * cfg.height_noise_sigma_m;
  const double distance_error = rng.normal() * cfg.distance_noise_sigma_m;

  SensorSample sample;
  sample.time_s = state.time_s;
  sample.gps = enu_to_geodetic(cfg.anchor, state.position.x() + east_error,
                               state.position.y() + north_error);
  sample.height_m = std::max(0.0, state.position.z() + height_error);
  const double true_distance = (state.position - cfg.bs_position).norm();
  sample.distance_m = true_distance + distance_error;
  if (!(sample.distance_m > 0.0)) sample.distance_m = true_distance;
  sample.speed_mps = state.velocity.norm();
  sample.visual_uv = project(camera, state.position);
  if (sample.visual_uv) {
    sample.visual_size = std::min(1.0, cfg.reference_size_m / true_distance);
  }
  return sample;
}

void ScenarioConfig::validate() const {
  trajectory.validate();
  camera.validate();
  array.validate();
  if (num_beams < 2) throw std::invalid_argument("codebook needs at least two beams");
  if (!(fov_sine_half_width > 0.0 && fov_sine_half_width <= 1.0))
    throw std::invalid_argument("codebook field of view must lie in (0, 1]");
  if (num_subcarriers < 1) throw std::invalid_argument("need at least one subcarrier");
  if (waypoints_per_flight < 2) throw std::invalid_argument("flights need at least two waypoints");
  if (!(max_horizontal_range_m > 0.0))
    throw std::invalid_argument("maximum horizontal range must be positive");
  if (!(frustum_margin > 0.0 && frustum_margin <= 1.0))
    throw std::invalid_argument("frustum margin must lie in (0, 1]");
  if (trajectory.waypoints.empty() && num_samples == 0)
    throw std::invalid_argument("random flights need a positive sample count");
}

namespace {

// Random waypoint inside the camera frustum, the height band and the range cylinder.
Vec3 random_waypoint(const ScenarioConfig& cfg, Rng& rng) {
  const CameraModel& cam = cfg.camera;
  const Vec3 image_down = cam.optical_axis.cross(cam.image_right);
  const double half_u = cfg.frustum_margin * tan_half_angle(cam.horizontal_fov_deg);
  const double half_v = cfg.frustum_margin * tan_half_angle(cam.vertical_fov_deg);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double height = rng.uniform(cfg.trajectory.height_min_m, cfg.trajectory.height_max_m);
    const double tx = rng.uniform(-half_u, half_u);
    const double ty = rng.uniform(-half_v, half_v);
    const Vec3 ray = cam.optical_axis + tx * cam.image_right + ty * image_down;
    const double rise = ray.z();
    const double depth = (height - cam.position.z()) / rise;
    if (!(rise > 0.0) || !(depth > 0.0)) continue;
    const Vec3 point = cam.position + depth * ray;
    if (point.head<2>().norm() > cfg.max_horizontal_range_m) continue;
    if ((point - cfg.trajectory.bs_position).norm() < 1.0) continue;
    return point;
  }
  throw std::invalid_argument(
      "could not place a waypoint inside the camera frustum; check heights and ranges");
}

}  // namespace

std::vector<SimulatedSample> simulate_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const BeamCodebook codebook = build_codebook(cfg.array, cfg.num_beams, cfg.fov_sine_half_width);
  Rng waypoint_rng(derive_seed(seed, "scenario/waypoints"));
  Rng sensor_rng(derive_seed(seed, "scenario/sensors"));
  Rng channel_rng(derive_seed(seed, "scenario/channel"));
  const std::uint64_t flight_seed_base = derive_seed(seed, "scenario/flights");

  std::vector<SimulatedSample> samples;
  if (cfg.num_samples > 0) samples.reserve(cfg.num_samples);
  double time_offset = 0.0;
  for (std::uint64_t flight = 0;; ++flight) {
    TrajectoryConfig traj = cfg.trajectory;
    traj.rng_seed = flight_seed_base + flight;
    if (traj.waypoints.empty()) {
      for (std::size_t w = 0; w < cfg.waypoints_per_flight; ++w)
        traj.waypoints.push_back(random_waypoint(cfg, waypoint_rng));
    }
    const auto states = generate_trajectory(traj);
    for (DroneState state : states) {
      state.time_s += time_offset;
      SimulatedSample sample;
      sample.state = state;
      sample.sensors = sense(state, cfg.camera, traj, sensor_rng);
      const LinkGeometry link{traj.bs_position, state.position, 0.005};
      const auto channel = los_channel(link, cfg.array, channel_rng, cfg.num_subcarriers);
      sample.power = PowerVector(received_power_vector(channel, codebook, cfg.noise, channel_rng));
      samples.push_back(std::move(sample));
      if (cfg.num_samples > 0 && samples.size() == cfg.num_samples) return samples;
    }
    time_offset = samples.back().state.time_s + 1.0 / traj.sample_rate_hz;
    if (cfg.num_samples == 0) return samples;
  }
}

}  // namespace beampred
