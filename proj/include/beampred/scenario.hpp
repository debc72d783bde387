// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <beampred/channel.hpp>
#include <beampred/codebook.hpp>
#include <beampred/oracle.hpp>
#include <beampred/rng.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace beampred {

/// Ground-truth drone kinematics in the basestation-anchored ENU frame.
struct DroneState {
  double time_s = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

/// Geodetic location of the ENU origin.
struct GeoAnchor {
  double latitude_deg = 33.427;
  double longitude_deg = -111.939;
};

/// (latitude, longitude) in degrees for a local east/north offset. Equirectangular.
Vec2 enu_to_geodetic(const GeoAnchor& anchor, double east_m, double north_m);

/// Inverse of enu_to_geodetic: (east, north) in meters.
Vec2 geodetic_to_enu(const GeoAnchor& anchor, const Vec2& lat_lon_deg);

/// Pinhole camera. Image u runs along image_right, v along optical_axis x image_right.
struct CameraModel {
  Vec3 position{0.0, 0.0, 1.5};
  Vec3 optical_axis = Vec3::UnitZ();
  Vec3 image_right = Vec3::UnitX();
  double horizontal_fov_deg = 120.0;
  double vertical_fov_deg = 120.0;

  void validate() const;
};

/// Normalized pixel coordinates in [0,1]^2, or nullopt when outside either field of view.
std::optional<Vec2> project(const CameraModel& camera, const Vec3& point);

/// One noisy multi-sensor observation.
struct SensorSample {
  double time_s = 0.0;
  Vec2 gps = Vec2::Zero();  // (latitude, longitude), degrees
  double height_m = 0.0;
  double distance_m = 1.0;
  double speed_mps = 0.0;
  std::optional<Vec2> visual_uv;
  std::optional<double> visual_size;
};

struct TrajectoryConfig {
  std::vector<Vec3> waypoints;
  double speed_min_mps = 2.0;
  double speed_max_mps = 20.0;
  double height_min_m = 10.0;
  double height_max_m = 100.0;
  double sample_rate_hz = 10.0;
  double gps_noise_sigma_m = 2.5;
  double height_noise_sigma_m = 0.0;
  double distance_noise_sigma_m = 0.0;
  double hover_duration_s = 5.0;
  double reference_size_m = 1.0;
  Vec3 bs_position{0.0, 0.0, 1.5};
  GeoAnchor anchor;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Piecewise-linear flight through the waypoints, one uniform speed draw per segment.
/// A zero-length segment is a hover lasting hover_duration_s.
std::vector<DroneState> generate_trajectory(const TrajectoryConfig& cfg);

/// GPS, height, distance, speed and the camera proxy for one state.
SensorSample sense(const DroneState& state, const CameraModel& camera, const TrajectoryConfig& cfg,
                   Rng& rng);

/// A full synthetic capture: random flights inside the camera frustum plus beam sweeps.
struct ScenarioConfig {
  TrajectoryConfig trajectory;
  CameraModel camera;
  ArrayGeometry array;
  std::size_t num_beams = 64;
  double fov_sine_half_width = 0.866;
  NoiseModel noise{.snr_db = 70.0, .enabled = true};
  std::size_t num_subcarriers = 1;
  std::size_t num_samples = 12004;
  std::size_t waypoints_per_flight = 4;
  double max_horizontal_range_m = 150.0;
  /// Fraction of the camera half-angle tangent used when placing random waypoints.
  double frustum_margin = 0.95;

  void validate() const;
};

struct SimulatedSample {
  DroneState state;
  SensorSample sensors;
  PowerVector power;
};

std::vector<SimulatedSample> simulate_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace beampred
