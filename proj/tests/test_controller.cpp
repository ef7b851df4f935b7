#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "pursuit/controller.hpp"
#include "support/oracles.hpp"

using namespace pursuit;

namespace {

constexpr double kPi = 3.14159265358979323846;

Path straight_path(double length, double spacing) {
  std::vector<PathPoint> pts;
  const int n = int(std::lround(length / spacing));
  for (int i = 0; i <= n; ++i) pts.push_back({i * spacing, 0.0});
  return Path(pts);
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("mode names are stable identifiers") {
  CHECK(mode_name(Mode::Tracking) == "tracking");
  CHECK(mode_name(Mode::ReverseTracking) == "reverse_tracking");
  CHECK(mode_name(Mode::RotatingToHeading) == "rotating_to_heading");
  CHECK(mode_name(Mode::RotatingToGoal) == "rotating_to_goal");
  CHECK(mode_name(Mode::GoalReached) == "goal_reached");
  CHECK(mode_name(Mode::StoppedImminentCollision) ==
        "stopped_imminent_collision");
  CHECK(mode_name(Mode::NoValidPath) == "no_valid_path");
}

TEST_CASE("curvature through the lookahead point, hand-worked") {
  SUBCASE("point dead ahead steers straight") {
    const auto k = compute_curvature({1.0, 0.0});
    REQUIRE(k.has_value());
    CHECK(*k == 0.0);
  }
  SUBCASE("point straight left is a half-metre-radius turn") {
    const auto k = compute_curvature({0.0, 1.0});
    REQUIRE(k.has_value());
    CHECK(*k == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("unit-distance oblique point") {
    const auto k = compute_curvature({0.6, 0.8});
    REQUIRE(k.has_value());
    CHECK(*k == doctest::Approx(1.6).epsilon(1e-12));
  }
  SUBCASE("negative y turns clockwise") {
    const auto k = compute_curvature({0.6, -0.8});
    REQUIRE(k.has_value());
    CHECK(*k == doctest::Approx(-1.6).epsilon(1e-12));
  }
  SUBCASE("degenerate points are rejected") {
    CHECK_FALSE(compute_curvature({0.0, 0.0}).has_value());
    CHECK_FALSE(compute_curvature({1e-7, 0.0}).has_value());
    CHECK_FALSE(compute_curvature({0.0, -1e-7}).has_value());
  }
}

TEST_CASE("curvature formula agrees with a geometric circle fit") {
  std::mt19937_64 rng(1212);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  int tested = 0;
  while (tested < 1000) {
    const PathPoint p{coord(rng), coord(rng)};
    const double norm = std::hypot(p.x, p.y);
    if (norm < 0.05 || norm > 3.0) continue;
    ++tested;
    const auto got = compute_curvature(p);
    REQUIRE(got.has_value());
    const double want = oracles::circle_fit_curvature(p);
    CHECK(close_rel(*got, want, 1e-9));
  }
}

TEST_CASE("curvature heuristic slows only below the radius threshold") {
  CHECK(curvature_heuristic(1.0, 0.0, 1.5) == 1.0);
  CHECK(curvature_heuristic(1.0, 0.5, 1.5) == 1.0);  // radius 2 m, inactive
  CHECK(curvature_heuristic(1.0, 2.0, 1.5) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(curvature_heuristic(1.0, -2.0, 1.5) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  SUBCASE("continuous at the threshold") {
    const double at = curvature_heuristic(0.8, 1.0 / 1.5, 1.5);
    const double just_over = curvature_heuristic(0.8, 1.0 / 1.5 + 1e-9, 1.5);
    CHECK(at == 0.8);
    CHECK(std::abs(just_over - at) < 1e-8);
  }
  SUBCASE("never exceeds the input and tightens with r_min") {
    std::mt19937_64 rng(1313);
    std::uniform_real_distribution<double> kap(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
      const double kappa = kap(rng);
      const double loose = curvature_heuristic(0.8, kappa, 1.0);
      const double tight = curvature_heuristic(0.8, kappa, 2.0);
      CHECK(loose <= 0.8 + 1e-15);
      CHECK(tight <= loose + 1e-15);
      if (std::abs(kappa) > 1.0) {  // active for both radii
        CHECK(tight < loose);
      }
    }
  }
}

TEST_CASE("proximity heuristic scales linearly inside the band") {
  CHECK(proximity_heuristic(1.0, 5.0, 0.5, 0.5) == 1.0);  // out of band
  CHECK(proximity_heuristic(1.0, 0.25, 0.5, 1.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(proximity_heuristic(0.8, 0.25, 0.5, 0.5) ==
        doctest::Approx(0.2).epsilon(1e-12));
  CHECK(proximity_heuristic(1.0, 0.0, 0.5, 0.5) == 0.0);  // contact stops

  SUBCASE("monotone in the obstacle distance") {
    double prev = -1.0;
    for (double d = 0.0; d <= 0.5; d += 0.01) {
      const double v = proximity_heuristic(0.8, d, 0.5, 0.5);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(prev <= 0.8);
  }
}

TEST_CASE("combining regulations keeps the stronger reduction") {
  CHECK(combine_regulation(1.0, 1.0) == 1.0);
  CHECK(combine_regulation(0.33, 0.5) == 0.33);
  CHECK(combine_regulation(0.8, 0.2) == 0.2);
}

TEST_CASE("goal approach scaling is linear with a floor") {
  CHECK(goal_approach_scaling(0.8, 2.0, 1.0, 0.1) == 0.8);
  CHECK(goal_approach_scaling(0.8, 0.5, 1.0, 0.1) ==
        doctest::Approx(0.4).epsilon(1e-12));
  CHECK(goal_approach_scaling(0.8, 0.01, 1.0, 0.1) == 0.1);
}

TEST_CASE("speed floor keeps the robot moving") {
  CHECK(apply_speed_floor(0.05, 0.1) == 0.1);
  CHECK(apply_speed_floor(0.5, 0.1) == 0.5);
  CHECK(apply_speed_floor(0.1, 0.1) == 0.1);
}

TEST_CASE("angular rate command preserves curvature under the clamp") {
  SUBCASE("hand-worked cases") {
    const VelocityCommand a = angular_velocity(0.5, 2.0, 3.2);
    CHECK(a.v == 0.5);
    CHECK(a.omega == doctest::Approx(1.0).epsilon(1e-12));

    const VelocityCommand b = angular_velocity(1.0, 0.0, 3.2);
    CHECK(b.v == 1.0);
    CHECK(b.omega == 0.0);

    const VelocityCommand c = angular_velocity(1.0, 4.0, 3.2);
    CHECK(c.omega == 3.2);
    CHECK(c.v == doctest::Approx(0.8).epsilon(1e-12));

    const VelocityCommand d = angular_velocity(-0.5, 2.0, 3.2);
    CHECK(d.v == -0.5);
    CHECK(d.omega == doctest::Approx(-1.0).epsilon(1e-12));

    const VelocityCommand e = angular_velocity(0.5, -8.0, 3.2);
    CHECK(e.omega == -3.2);
    CHECK(e.v == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("commanded curvature is exact even when clamped") {
    std::mt19937_64 rng(1414);
    std::uniform_real_distribution<double> vel(-1.0, 1.0);
    std::uniform_real_distribution<double> kap(-20.0, 20.0);
    for (int i = 0; i < 500; ++i) {
      const double v = vel(rng);
      const double kappa = kap(rng);
      if (std::abs(kappa) < 1e-9 || std::abs(v) < 1e-6) continue;
      const VelocityCommand cmd = angular_velocity(v, kappa, 3.2);
      CHECK(std::abs(cmd.omega) <= 3.2);
      CHECK(std::abs(cmd.v) <= std::abs(v) + 1e-15);
      CHECK(close_rel(cmd.omega / cmd.v, kappa, 1e-12));
    }
  }
}

TEST_CASE("in-place rotation is proportional and clamped") {
  const VelocityCommand zero = rotate_in_place(0.0, 3.2, 2.0);
  CHECK(zero.v == 0.0);
  CHECK(zero.omega == 0.0);

  const VelocityCommand quarter = rotate_in_place(kPi / 2.0, 3.2, 2.0);
  CHECK(quarter.v == 0.0);
  CHECK(quarter.omega == doctest::Approx(kPi).epsilon(1e-12));

  const VelocityCommand clamped = rotate_in_place(-kPi, 3.2, 2.0);
  CHECK(clamped.v == 0.0);
  CHECK(clamped.omega == -3.2);
}

TEST_CASE("controller without a path reports no_valid_path") {
  Controller ctrl{ControllerConfig{}};
  CHECK_FALSE(ctrl.has_path());
  CHECK(ctrl.path() == nullptr);
  const ControlOutput out = ctrl.compute(Pose2D(0, 0, 0), 0.0, nullptr, nullptr);
  CHECK(out.mode == Mode::NoValidPath);
  CHECK(out.command.v == 0.0);
  CHECK(out.command.omega == 0.0);
}

TEST_CASE("straight tracking commands desired speed with zero turn") {
  ControllerConfig cfg;  // regulated variant
  Controller ctrl{cfg};
  ctrl.set_path(straight_path(10.0, 0.05));
  REQUIRE(ctrl.has_path());

  const ControlOutput out =
      ctrl.compute(Pose2D(0, 0, 0), 0.8, nullptr, nullptr);
  CHECK(out.mode == Mode::Tracking);
  CHECK(out.command.v == cfg.v_desired);
  CHECK(out.command.omega == 0.0);
  CHECK(out.breakdown.kappa == 0.0);
  CHECK(out.breakdown.v_desired == cfg.v_desired);
  CHECK(out.breakdown.v_curvature == cfg.v_desired);
  CHECK(out.breakdown.v_proximity == cfg.v_desired);
  CHECK(out.breakdown.v_combined == cfg.v_desired);
  CHECK(out.breakdown.v_goal_scaled == cfg.v_desired);
  CHECK(out.breakdown.v_final == cfg.v_desired);
  CHECK_FALSE(out.time_to_collision.has_value());
  CHECK_FALSE(out.rolling_window_violation);
}

TEST_CASE("goal behaviors: align, latch, reset") {
  ControllerConfig cfg;
  SUBCASE("misaligned arrival rotates toward the path heading") {
    Controller ctrl{cfg};
    ctrl.set_path(straight_path(2.0, 0.05));
    const ControlOutput out =
        ctrl.compute(Pose2D(1.95, 0, -1.0), 0.0, nullptr, nullptr);
    CHECK(out.mode == Mode::RotatingToGoal);
    CHECK(out.command.v == 0.0);
    CHECK(out.command.omega == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("aligned arrival latches goal_reached until a new path") {
    Controller ctrl{cfg};
    ctrl.set_path(straight_path(2.0, 0.05));
    const ControlOutput arrive =
        ctrl.compute(Pose2D(1.95, 0, -0.1), 0.0, nullptr, nullptr);
    CHECK(arrive.mode == Mode::GoalReached);
    CHECK(arrive.command.v == 0.0);
    CHECK(arrive.command.omega == 0.0);

    // Latched: even a pose far from the goal keeps reporting done.
    const ControlOutput still =
        ctrl.compute(Pose2D(0, 0, 0), 0.0, nullptr, nullptr);
    CHECK(still.mode == Mode::GoalReached);
    CHECK(still.command.v == 0.0);

    ctrl.set_path(straight_path(2.0, 0.05));
    const ControlOutput again =
        ctrl.compute(Pose2D(0, 0, 0), 0.8, nullptr, nullptr);
    CHECK(again.mode == Mode::Tracking);
    CHECK(again.command.v > 0.0);
  }
}

TEST_CASE("gross misalignment at standstill rotates in place first") {
  ControllerConfig cfg;
  Controller ctrl{cfg};
  ctrl.set_path(straight_path(10.0, 0.05));

  SUBCASE("at rest, facing away") {
    const ControlOutput out =
        ctrl.compute(Pose2D(0, 0, 2.0), 0.0, nullptr, nullptr);
    CHECK(out.mode == Mode::RotatingToHeading);
    CHECK(out.command.v == 0.0);
    CHECK(out.command.omega < 0.0);  // shortest way back is clockwise
    CHECK(out.command.omega == -cfg.omega_max);  // error ~ -2 rad, gain 2
  }
  SUBCASE("already moving: steer, do not spin") {
    const ControlOutput out =
        ctrl.compute(Pose2D(0, 0, 2.0), 0.5, nullptr, nullptr);
    CHECK(out.mode == Mode::Tracking);
    CHECK(out.command.v > 0.0);
    CHECK(out.command.omega < 0.0);
  }
}

TEST_CASE("proximity regulation composes into the command pipeline") {
  // 5 m x 5 m map, one obstacle 0.25 m to the robot's left.
  OccupancyGrid grid(100, 100, 0.05, 0.0, 0.0);
  std::vector<PathPoint> pts;
  for (int i = 0; i <= 60; ++i) pts.push_back({0.525 + i * 0.05, 0.525});
  grid.set_occupied(30, 15, true);  // center (1.525, 0.775)
  const DistanceField field(grid);

  ControllerConfig cfg;  // regulated variant, alpha 0.5, d_prox 0.5
  Controller ctrl{cfg};
  ctrl.set_path(Path(pts));
  const Pose2D pose(1.525, 0.525, 0.0);
  const ControlOutput out = ctrl.compute(pose, 0.8, &grid, &field);

  CHECK(out.mode == Mode::Tracking);
  CHECK(out.breakdown.d_O == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(out.breakdown.v_proximity == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(out.breakdown.v_curvature == cfg.v_desired);  // straight line

  // The stages compose bitwise: each recorded value is the stage function
  // applied to the previous stage's record.
  CHECK(out.breakdown.v_curvature ==
        curvature_heuristic(cfg.v_desired, out.breakdown.kappa, cfg.r_min));
  CHECK(out.breakdown.v_proximity ==
        proximity_heuristic(cfg.v_desired, out.breakdown.d_O, cfg.d_prox,
                            cfg.alpha));
  CHECK(out.breakdown.v_combined ==
        combine_regulation(out.breakdown.v_curvature,
                           out.breakdown.v_proximity));
  CHECK(out.breakdown.v_final ==
        apply_speed_floor(out.breakdown.v_goal_scaled, cfg.v_min_floor));
  CHECK(out.command.v == out.breakdown.v_final);
  CHECK(out.command.omega == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("curvature regulation slows the regulated variant into corners") {
  // Right-angle corner; the aim point sits around the bend.
  std::vector<PathPoint> pts;
  for (int i = 0; i <= 40; ++i) pts.push_back({i * 0.05, 0.0});
  for (int i = 1; i <= 40; ++i) pts.push_back({2.0, i * 0.05});
  ControllerConfig cfg;
  cfg.use_interpolation = true;

  // Mid-corner, already at speed so the adaptive lookahead is long.
  Controller warm{cfg};
  warm.set_path(Path(pts));
  Pose2D pose(1.6, 0.0, 0.0);
  ControlOutput out = warm.compute(pose, 0.8, nullptr, nullptr);
  out = warm.compute(pose, 0.8, nullptr, nullptr);  // lookahead now speed-fed

  CHECK(out.mode == Mode::Tracking);
  CHECK(out.breakdown.kappa > 0.0);  // corner bends left
  CHECK(std::abs(out.breakdown.kappa) > 1.0 / cfg.r_min);
  CHECK(out.breakdown.v_curvature <
        cfg.v_desired);  // heuristic active
  CHECK(out.breakdown.v_curvature ==
        curvature_heuristic(cfg.v_desired, out.breakdown.kappa, cfg.r_min));
  CHECK(out.command.v < cfg.v_desired);
  CHECK(out.command.omega > 0.0);
}

TEST_CASE("plain and adaptive variants skip speed regulation") {
  std::vector<PathPoint> pts;
  for (int i = 0; i <= 40; ++i) pts.push_back({i * 0.05, 0.0});
  for (int i = 1; i <= 40; ++i) pts.push_back({2.0, i * 0.05});
  for (Variant variant : {Variant::PP, Variant::APP}) {
    const std::string vname = variant_name(variant);
    CAPTURE(vname);
    ControllerConfig cfg;
    cfg.variant = variant;
    Controller ctrl{cfg};
    ctrl.set_path(Path(pts));
    const Pose2D pose(1.6, 0.0, 0.0);
    ControlOutput out = ctrl.compute(pose, 0.8, nullptr, nullptr);
    out = ctrl.compute(pose, 0.8, nullptr, nullptr);
    CHECK(out.mode == Mode::Tracking);
    // Unregulated: full desired speed goes into the angular-rate stage even
    // mid-corner; only the omega clamp may pull the speed down.
    CHECK(out.breakdown.v_curvature == cfg.v_desired);
    CHECK(out.breakdown.v_proximity == cfg.v_desired);
    CHECK(out.breakdown.v_final == cfg.v_desired);
  }
}

TEST_CASE("direction reversals are tracked in reverse") {
  const std::vector<PathPoint> raw{{0.0, 0.0}, {1.5, 0.0}, {0.5, 0.0}};
  const std::vector<PathPoint> pts = resample_polyline(raw, 0.05);

  SUBCASE("on the doubling-back leg the robot backs up") {
    Controller ctrl{ControllerConfig{}};
    ctrl.set_path(Path(pts));
    const ControlOutput out =
        ctrl.compute(Pose2D(1.5, 0, 0), 0.0, nullptr, nullptr);
    CHECK(out.mode == Mode::ReverseTracking);
    CHECK(out.command.v < 0.0);
    CHECK(out.command.omega == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("before the cusp the robot drives forward") {
    Controller ctrl{ControllerConfig{}};
    ctrl.set_path(Path(pts));
    const ControlOutput out =
        ctrl.compute(Pose2D(0.2, 0, 0), 0.0, nullptr, nullptr);
    CHECK(out.mode == Mode::Tracking);
    CHECK(out.command.v > 0.0);
  }
}

TEST_CASE("imminent collision stops, holds through the skid, then resumes") {
  // 5 m x 1.05 m corridor with a wall across it at x = 2.
  OccupancyGrid grid(100, 21, 0.05, 0.0, 0.0);
  for (std::size_t iy = 0; iy < grid.height(); ++iy) {
    grid.set_occupied(40, iy, true);
  }
  const DistanceField field(grid);
  std::vector<PathPoint> pts;
  for (int i = 0; i <= 90; ++i) pts.push_back({0.025 + i * 0.05, 0.525});

  ControllerConfig cfg;
  Controller ctrl{cfg};
  ctrl.set_path(Path(pts));

  // At speed, 1.5 m short of the wall: the projected arc reaches the hazard.
  const Pose2D near_wall(0.525, 0.525, 0.0);
  const ControlOutput stop = ctrl.compute(near_wall, 0.8, &grid, &field);
  CHECK(stop.mode == Mode::StoppedImminentCollision);
  CHECK(stop.command.v == 0.0);
  CHECK(stop.command.omega == 0.0);
  REQUIRE(stop.time_to_collision.has_value());
  CHECK(*stop.time_to_collision > 0.0);
  CHECK(*stop.time_to_collision <= cfg.collision_horizon);
  // This map is narrower than the projection reach, so the window guard
  // fires alongside the stop.
  CHECK(stop.rolling_window_violation);

  // Still skidding: the stop holds without reprojection.
  const ControlOutput hold = ctrl.compute(near_wall, 0.4, &grid, &field);
  CHECK(hold.mode == Mode::StoppedImminentCollision);
  CHECK(hold.command.v == 0.0);
  CHECK_FALSE(hold.time_to_collision.has_value());

  // At rest, still too close: reassessed and still stopped.
  const ControlOutput parked = ctrl.compute(near_wall, 0.0, &grid, &field);
  CHECK(parked.mode == Mode::StoppedImminentCollision);
  REQUIRE(parked.time_to_collision.has_value());

  // Pulled back out of the hazard's reach: the latch clears and tracking
  // resumes at full speed.
  const ControlOutput resume =
      ctrl.compute(Pose2D(0.2, 0.525, 0.0), 0.0, &grid, &field);
  CHECK(resume.mode == Mode::Tracking);
  CHECK(resume.command.v == cfg.v_desired);
}

TEST_CASE("disabling the collision gate drives into the hazard") {
  OccupancyGrid grid(100, 21, 0.05, 0.0, 0.0);
  for (std::size_t iy = 0; iy < grid.height(); ++iy) {
    grid.set_occupied(40, iy, true);
  }
  const DistanceField field(grid);
  std::vector<PathPoint> pts;
  for (int i = 0; i <= 90; ++i) pts.push_back({0.025 + i * 0.05, 0.525});

  ControllerConfig cfg;
  cfg.use_collision_check = false;
  Controller ctrl{cfg};
  ctrl.set_path(Path(pts));
  const ControlOutput out =
      ctrl.compute(Pose2D(0.525, 0.525, 0.0), 0.8, &grid, &field);
  CHECK(out.mode == Mode::Tracking);
  CHECK(out.command.v > 0.0);
  CHECK_FALSE(out.time_to_collision.has_value());
}

TEST_CASE("identical controllers produce bitwise identical command streams") {
  OccupancyGrid grid(200, 200, 0.05, 0.0, 0.0);
  grid.occupy_rectangle(5.0, 1.0, 5.6, 1.6);
  const DistanceField field(grid);

  std::vector<PathPoint> pts;
  for (int i = 0; i <= 180; ++i) pts.push_back({0.5 + i * 0.05, 0.8});

  ControllerConfig cfg;
  Controller a{cfg};
  Controller b{cfg};
  a.set_path(Path(pts));
  b.set_path(Path(pts));

  std::mt19937_64 rng(1515);
  std::uniform_real_distribution<double> dy(-0.05, 0.05);
  std::uniform_real_distribution<double> dtheta(-0.2, 0.2);
  std::uniform_real_distribution<double> vel(0.0, 0.8);
  for (int i = 0; i < 50; ++i) {
    const Pose2D pose(0.5 + i * 0.15, 0.8 + dy(rng), dtheta(rng));
    const double v = vel(rng);
    const ControlOutput oa = a.compute(pose, v, &grid, &field);
    const ControlOutput ob = b.compute(pose, v, &grid, &field);
    CHECK(oa.command.v == ob.command.v);
    CHECK(oa.command.omega == ob.command.omega);
    CHECK(oa.mode == ob.mode);
    CHECK(oa.breakdown.v_final == ob.breakdown.v_final);
    CHECK(oa.breakdown.kappa == ob.breakdown.kappa);
    CHECK(oa.breakdown.d_O == ob.breakdown.d_O);
  }
}
