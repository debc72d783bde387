// SPDX-License-Identifier: Apache-2.0
#include <beampred/scenario.hpp>

#include <doctest.h>

#include <cmath>

using namespace beampred;

namespace {

TrajectoryConfig straight_line() {
  TrajectoryConfig cfg;
  cfg.waypoints = {Vec3(0.0, 10.0, 40.0), Vec3(100.0, 10.0, 40.0)};
  cfg.speed_min_mps = cfg.speed_max_mps = 10.0;
  cfg.sample_rate_hz = 1.0;
  return cfg;
}

}  // namespace

TEST_CASE("constant-velocity segment") {
  const auto states = generate_trajectory(straight_line());
  REQUIRE(states.size() == 11);
  for (std::size_t i = 0; i < states.size(); ++i) {
    CHECK(states[i].time_s == doctest::Approx(double(i)));
    CHECK(states[i].position.x() == doctest::Approx(10.0 * i));
    CHECK(states[i].position.z() == doctest::Approx(40.0));
    CHECK(states[i].velocity.norm() == doctest::Approx(10.0));
  }
}

TEST_CASE("hover segment keeps the position and reports zero speed") {
  auto cfg = straight_line();
  cfg.waypoints = {Vec3(5.0, 5.0, 30.0), Vec3(5.0, 5.0, 30.0)};
  cfg.hover_duration_s = 3.0;
  const auto states = generate_trajectory(cfg);
  REQUIRE(states.size() == 4);
  for (const auto& s : states) {
    CHECK(s.position == Vec3(5.0, 5.0, 30.0));
    CHECK(s.velocity.norm() == 0.0);
  }
}

TEST_CASE("zig-zag trajectory is bitwise reproducible") {
  TrajectoryConfig cfg;
  cfg.waypoints = {Vec3(0, 0, 20), Vec3(40, 30, 60), Vec3(-20, 60, 35), Vec3(10, 90, 80)};
  cfg.rng_seed = 99;
  const auto a = generate_trajectory(cfg);
  const auto b = generate_trajectory(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].time_s == b[i].time_s);
    CHECK(a[i].position == b[i].position);
    CHECK(a[i].velocity == b[i].velocity);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double speed = a[i].velocity.norm();
    CHECK(speed >= cfg.speed_min_mps - 1e-9);
    CHECK(speed <= cfg.speed_max_mps + 1e-9);
  }
}

TEST_CASE("trajectory validation") {
  auto cfg = straight_line();
  cfg.waypoints.pop_back();
  CHECK_THROWS_AS(generate_trajectory(cfg), std::invalid_argument);
  cfg = straight_line();
  cfg.waypoints[0].z() = -1.0;
  CHECK_THROWS_AS(generate_trajectory(cfg), std::invalid_argument);
  cfg = straight_line();
  cfg.speed_min_mps = 5.0;
  cfg.speed_max_mps = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = straight_line();
  cfg.height_min_m = 50.0;
  cfg.height_max_m = 10.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = straight_line();
  cfg.sample_rate_hz = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = straight_line();
  cfg.gps_noise_sigma_m = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("camera validation") {
  CameraModel cam;
  cam.horizontal_fov_deg = 180.0;
  CHECK_THROWS_AS(cam.validate(), std::invalid_argument);
  cam = CameraModel{};
  cam.vertical_fov_deg = 0.0;
  CHECK_THROWS_AS(cam.validate(), std::invalid_argument);
  cam = CameraModel{};
  cam.image_right = Vec3::UnitZ();
  CHECK_THROWS_AS(cam.validate(), std::invalid_argument);
}

TEST_CASE("noiseless on-axis drone") {
  TrajectoryConfig cfg;
  cfg.gps_noise_sigma_m = 0.0;
  CameraModel cam;
  DroneState state;
  state.position = cam.position + Vec3(0.0, 0.0, 50.0);
  Rng rng(1);
  const auto s = sense(state, cam, cfg, rng);
  REQUIRE(s.visual_uv.has_value());
  CHECK((*s.visual_uv)[0] == doctest::Approx(0.5));
  CHECK((*s.visual_uv)[1] == doctest::Approx(0.5));
  const auto exact = enu_to_geodetic(cfg.anchor, state.position.x(), state.position.y());
  CHECK(s.gps == exact);
  CHECK(s.height_m == doctest::Approx(51.5));
  CHECK(s.distance_m == doctest::Approx(50.0));
  REQUIRE(s.visual_size.has_value());
  CHECK(*s.visual_size == doctest::Approx(1.0 / 50.0));
}

TEST_CASE("frustum culling") {
  CameraModel cam;
  CHECK_FALSE(project(cam, cam.position - Vec3(0.0, 0.0, 10.0)).has_value());
  // 70 degrees off axis lies outside a 120 degree field of view.
  const double off = std::tan(70.0 * M_PI / 180.0);
  CHECK_FALSE(project(cam, cam.position + Vec3(off, 0.0, 1.0)).has_value());
  const double in = std::tan(55.0 * M_PI / 180.0);
  CHECK(project(cam, cam.position + Vec3(in, 0.0, 1.0)).has_value());

  TrajectoryConfig cfg;
  DroneState behind;
  behind.position = Vec3(0.0, 0.0, 0.5);
  Rng rng(0);
  const auto s = sense(behind, cam, cfg, rng);
  CHECK_FALSE(s.visual_uv.has_value());
  CHECK_FALSE(s.visual_size.has_value());
}

TEST_CASE("projection depends only on direction") {
  CameraModel cam;
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec3 dir = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), 1.0).normalized();
    const auto near = project(cam, cam.position + 3.0 * dir);
    const auto far = project(cam, cam.position + rng.uniform(10.0, 500.0) * dir);
    REQUIRE(near.has_value() == far.has_value());
    if (near) {
      CHECK(std::abs((*near - *far).norm()) < 1e-9);
      CHECK((*near)[0] >= 0.0);
      CHECK((*near)[0] <= 1.0);
      CHECK((*near)[1] >= 0.0);
      CHECK((*near)[1] <= 1.0);
    }
  }
}

TEST_CASE("GPS noise has the configured spread") {
  TrajectoryConfig cfg;
  cfg.gps_noise_sigma_m = 5.0;
  CameraModel cam;
  DroneState state;
  state.position = Vec3(30.0, -20.0, 40.0);
  Rng rng(2025);
  double sum_sq = 0.0;
  constexpr int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto s = sense(state, cam, cfg, rng);
    const auto enu = geodetic_to_enu(cfg.anchor, s.gps);
    sum_sq += (enu.x() - 30.0) * (enu.x() - 30.0);
  }
  CHECK(std::sqrt(sum_sq / n) == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("noiseless GPS inverts back to horizontal position") {
  TrajectoryConfig cfg;
  cfg.gps_noise_sigma_m = 0.0;
  CameraModel cam;
  Rng rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    DroneState state;
    state.position = Vec3(rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(0, 120));
    const auto s = sense(state, cam, cfg, rng);
    const auto enu = geodetic_to_enu(cfg.anchor, s.gps);
    CHECK(std::abs(enu.x() - state.position.x()) < 1e-6);
    CHECK(std::abs(enu.y() - state.position.y()) < 1e-6);
  }
}

TEST_CASE("slant distance is consistent with height and horizontal offset") {
  TrajectoryConfig cfg;
  cfg.bs_position = Vec3::Zero();
  cfg.gps_noise_sigma_m = 0.0;
  CameraModel cam;
  Rng rng(14);
  for (int trial = 0; trial < 1000; ++trial) {
    DroneState state;
    state.position = Vec3(rng.uniform(-150, 150), rng.uniform(-150, 150), rng.uniform(1, 120));
    const auto s = sense(state, cam, cfg, rng);
    const double horizontal = state.position.head<2>().squaredNorm();
    CHECK(std::abs(s.distance_m * s.distance_m - (s.height_m * s.height_m + horizontal)) <
          1e-9 * (1.0 + s.distance_m * s.distance_m));
  }
}

TEST_CASE("simulated scenario") {
  ScenarioConfig cfg;
  cfg.num_samples = 600;
  const auto a = simulate_scenario(cfg, 42);
  const auto b = simulate_scenario(cfg, 42);
  REQUIRE(a.size() == 600);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& s = a[i].sensors;
    CHECK(s.height_m >= 0.0);
    CHECK(s.distance_m > 0.0);
    CHECK(s.speed_mps >= 0.0);
    CHECK(s.visual_uv.has_value());
    CHECK(a[i].power.size() == 64);
    CHECK(a[i].state.position == b[i].state.position);
    CHECK(s.gps == b[i].sensors.gps);
    CHECK(std::equal(a[i].power.powers().begin(), a[i].power.powers().end(),
                     b[i].power.powers().begin()));
    if (i > 0) CHECK(a[i].state.time_s > a[i - 1].state.time_s);
  }
  const auto c = simulate_scenario(cfg, 43);
  CHECK(c[0].state.position != a[0].state.position);
}
