#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "pursuit/path.hpp"
#include "pursuit/scenario.hpp"
#include "pursuit/simulator.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace pursuit;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Scenario straight_corridor_scenario(const fs::path& dir) {
  OccupancyGrid grid(160, 40, 0.05, 0.0, 0.0);  // 8 m x 2 m, all free
  grid.save((dir / "grid.txt").string());
  save_path_csv(resample_polyline({{0.5, 0.5}, {6.5, 0.5}}, 0.05),
                (dir / "path.csv").string());
  testsupport::write_file(dir / "scenario.ini",
                          "[scenario]\n"
                          "name = corridor\n"
                          "grid = grid.txt\n"
                          "path = path.csv\n"
                          "start = 0.5 0.5 0\n");
  return load_scenario((dir / "scenario.ini").string());
}

void check_plant_limits(const TrajectoryLog& log, double v_max, double a_max,
                        double omega_max, double dt) {
  double prev_v = 0.0;
  for (const auto& r : log.records) {
    CHECK(std::abs(r.achieved_v) <= v_max + 1e-12);
    CHECK(std::abs(r.achieved_v - prev_v) <= a_max * dt + 1e-12);
    CHECK(std::abs(r.achieved_omega) <= omega_max + 1e-12);
    prev_v = r.achieved_v;
  }
}

}  // namespace

TEST_CASE("end reason names are stable identifiers") {
  CHECK(end_reason_name(EndReason::GoalReached) == "goal_reached");
  CHECK(end_reason_name(EndReason::ObstacleStop) == "obstacle_stop");
  CHECK(end_reason_name(EndReason::Collision) == "collision");
  CHECK(end_reason_name(EndReason::Timeout) == "timeout");
  CHECK(end_reason_name(EndReason::NoValidPath) == "no_valid_path");
}

TEST_CASE("plant slews speed, clamps turn rate, follows exact arcs") {
  SUBCASE("launch from rest is acceleration-limited") {
    SimState rest;
    const SimState next =
        step_kinematics(rest, VelocityCommand{0.8, 0.0}, 0.05, 0.2, 3.2);
    CHECK(next.v == 0.2 * 0.05);  // one acceleration step, not the command
    CHECK(next.omega == 0.0);
    const SimState back =
        step_kinematics(rest, VelocityCommand{-0.8, 0.0}, 0.05, 0.2, 3.2);
    CHECK(back.v == -(0.2 * 0.05));
  }
  SUBCASE("steady cruise realizes the command exactly") {
    SimState cruise;
    cruise.pose = Pose2D(1.0, 2.0, 0.0);
    cruise.v = 0.8;
    const SimState next =
        step_kinematics(cruise, VelocityCommand{0.8, 0.0}, 0.05, 0.2, 3.2);
    CHECK(next.v == 0.8);
    CHECK(next.pose.x == doctest::Approx(1.04).epsilon(1e-12));
    CHECK(next.pose.y == 2.0);
  }
  SUBCASE("braking from 0.2 m/s takes exactly twenty 20 Hz steps") {
    SimState state;
    state.v = 0.2;
    int steps = 0;
    while (state.v > 0.0 && steps < 100) {
      state = step_kinematics(state, VelocityCommand{0.0, 0.0}, 0.05, 0.2, 3.2);
      ++steps;
      if (steps == 19) CHECK(state.v > 0.0);
    }
    CHECK(steps == 20);
    CHECK(state.v == 0.0);  // exact snap onto the command, no creep past it
  }
  SUBCASE("turn rate is clamped instantly, both signs") {
    SimState state;
    CHECK(step_kinematics(state, VelocityCommand{0.0, 5.0}, 0.05, 0.2, 3.2)
              .omega == 3.2);
    CHECK(step_kinematics(state, VelocityCommand{0.0, -5.0}, 0.05, 0.2, 3.2)
              .omega == -3.2);
  }
  SUBCASE("pose advances along the closed-form arc of the achieved rates") {
    SimState state;
    state.pose = Pose2D(0.4, -0.2, 0.7);
    state.v = 0.5;
    const SimState next =
        step_kinematics(state, VelocityCommand{0.6, 1.1}, 0.05, 0.2, 3.2);
    const Pose2D expect = advance_unicycle(state.pose, next.v, next.omega, 0.05);
    CHECK(next.pose.x == expect.x);
    CHECK(next.pose.y == expect.y);
    CHECK(next.pose.theta == expect.theta);
  }
  SUBCASE("non-positive dt is rejected") {
    SimState state;
    CHECK_THROWS_AS(
        step_kinematics(state, VelocityCommand{0.0, 0.0}, 0.0, 0.2, 3.2),
        std::invalid_argument);
  }
}

TEST_CASE("straight corridor run reaches the goal within plant limits") {
  const auto dir = testsupport::work_dir("sim_corridor");
  const Scenario sc = straight_corridor_scenario(dir);
  const AppConfig cfg;

  const RunResult run = run_scenario(sc, cfg);
  CHECK(run.end_reason == EndReason::GoalReached);
  CHECK(run.metrics.success);
  CHECK(run.log.records.back().mode == Mode::GoalReached);

  // 6 m leg, 0.25 m arrival tolerance.
  CHECK(run.metrics.distance_traveled > 5.5);
  CHECK(run.metrics.distance_traveled < 6.1);
  CHECK(run.metrics.time > 7.0);
  CHECK(run.metrics.time < 13.0);
  CHECK(run.metrics.average_speed > 0.4);
  CHECK(run.metrics.average_speed < 0.8);
  CHECK(run.metrics.collisions == 0);
  CHECK(run.metrics.min_distance_to_obstacle == kInf);  // empty map
  CHECK(run.metrics.average_distance_to_path < 0.01);   // dead straight
  CHECK_FALSE(run.metrics.stopped_distance_to_obstacle.has_value());

  check_plant_limits(run.log, cfg.controller.v_max, cfg.sim.a_max,
                     cfg.controller.omega_max, cfg.sim.dt);

  // Log timestamps are the fixed control period.
  for (std::size_t i = 0; i < run.log.records.size(); ++i) {
    CHECK(run.log.records[i].t ==
          doctest::Approx(double(i + 1) * cfg.sim.dt).epsilon(1e-12));
  }

  // Straight-line consistency: path length equals integrated speed.
  double integrated = 0.0;
  for (const auto& r : run.log.records) {
    integrated += std::abs(r.achieved_v) * cfg.sim.dt;
  }
  CHECK(std::abs(integrated - run.metrics.distance_traveled) < 1e-6);

  CHECK(run.reference.size() > 100);
  CHECK(run.reference.front().x == 0.5);
  CHECK(run.reference.back().x == 6.5);
  REQUIRE(run.final_grid.has_value());
  CHECK(run.final_grid->width() == 160);
}

TEST_CASE("identical runs produce byte-identical logs and metrics") {
  const auto dir = testsupport::work_dir("sim_repeat");
  const Scenario sc = straight_corridor_scenario(dir);
  const AppConfig cfg;
  const RunResult a = run_scenario(sc, cfg);
  const RunResult b = run_scenario(sc, cfg);
  CHECK(trajectory_to_csv(a.log) == trajectory_to_csv(b.log));
  CHECK(metrics_to_text(a.metrics) == metrics_to_text(b.metrics));
  CHECK(a.end_reason == b.end_reason);
}

TEST_CASE("the duration limit turns into a timeout") {
  const auto dir = testsupport::work_dir("sim_timeout");
  const Scenario sc = straight_corridor_scenario(dir);
  AppConfig cfg;
  cfg.sim.duration_limit = 1.0;
  const RunResult run = run_scenario(sc, cfg);
  CHECK(run.end_reason == EndReason::Timeout);
  CHECK_FALSE(run.metrics.success);
  CHECK(run.log.records.size() == 20);  // 1 s at 20 Hz
  CHECK(run.metrics.time == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("corner-event world ends in a held stop short of the obstacle") {
  const auto dir = testsupport::work_dir("sim_corner_stop");
  const std::string file = generate_scenario(ScenarioKind::BlindCorner,
                                             GeneratorParams{}, dir.string());
  const Scenario sc = load_scenario(file);
  const AppConfig cfg = load_config((dir / "config.ini").string());

  const RunResult run = run_scenario(sc, cfg);
  CHECK(run.end_reason == EndReason::ObstacleStop);
  CHECK_FALSE(run.metrics.success);
  CHECK(run.metrics.collisions == 0);
  REQUIRE(run.metrics.stopped_distance_to_obstacle.has_value());
  CHECK(*run.metrics.stopped_distance_to_obstacle > 0.0);
  // The robot is at rest at the end, and has been for the persistence window.
  CHECK(run.log.records.back().achieved_v == 0.0);
  CHECK(run.log.records.back().mode == Mode::StoppedImminentCollision);

  // The triggered obstacle is in the final world model.
  REQUIRE(run.final_grid.has_value());
  const auto site = run.final_grid->cell_at(5.0, 1.0);
  REQUIRE(site.has_value());
  CHECK(run.final_grid->occupied(site->first, site->second));

  check_plant_limits(run.log, cfg.controller.v_max, cfg.sim.a_max,
                     cfg.controller.omega_max, cfg.sim.dt);
}

TEST_CASE("a run with no world model ends immediately as no_valid_path") {
  // A scenario whose start pose is outside the grid is rejected up front.
  const auto dir = testsupport::work_dir("sim_bad_start");
  OccupancyGrid grid(20, 20, 0.05, 0.0, 0.0);
  grid.save((dir / "grid.txt").string());
  save_path_csv(resample_polyline({{0.1, 0.1}, {0.9, 0.1}}, 0.05),
                (dir / "path.csv").string());
  testsupport::write_file(dir / "scenario.ini",
                          "[scenario]\n"
                          "name = bad\n"
                          "grid = grid.txt\n"
                          "path = path.csv\n"
                          "start = 5 5 0\n");
  const Scenario sc = load_scenario((dir / "scenario.ini").string());
  CHECK_THROWS(run_scenario(sc, AppConfig{}));

  // A path that starts nowhere near the robot is rejected too.
  testsupport::write_file(dir / "scenario2.ini",
                          "[scenario]\n"
                          "name = far\n"
                          "grid = grid.txt\n"
                          "path = far.csv\n"
                          "start = 0.1 0.1 0\n");
  save_path_csv(resample_polyline({{8.0, 8.0}, {9.0, 8.0}}, 0.05),
                (dir / "far.csv").string());
  CHECK_THROWS(run_scenario(load_scenario((dir / "scenario2.ini").string()),
                            AppConfig{}));
}

TEST_CASE("metrics digest crafted logs exactly") {
  const std::vector<PathPoint> reference{{0.0, 0.0}, {2.0, 0.0}};
  const Pose2D start(0.0, 0.0, 0.0);

  SUBCASE("empty log yields zeroed metrics") {
    const MetricsReport m = compute_metrics(TrajectoryLog{}, reference, start,
                                            0.15, EndReason::ObstacleStop);
    CHECK(m.time == 0.0);
    CHECK(m.distance_traveled == 0.0);
    CHECK(m.collisions == 0);
    CHECK(m.min_distance_to_obstacle == kInf);
    CHECK_FALSE(m.stopped_distance_to_obstacle.has_value());
    CHECK_FALSE(m.success);
  }
  SUBCASE("distance, time, and speed from two records") {
    TrajectoryLog log;
    LogRecord r1;
    r1.t = 0.05;
    r1.pose = Pose2D(0.02, 0.0, 0.0);
    r1.d_O = 1.0;
    LogRecord r2;
    r2.t = 0.10;
    r2.pose = Pose2D(0.06, 0.0, 0.0);
    r2.d_O = 0.5;
    log.records = {r1, r2};
    const MetricsReport m =
        compute_metrics(log, reference, start, 0.15, EndReason::Timeout);
    CHECK(m.time == 0.10);
    CHECK(m.distance_traveled == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(m.average_speed == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(m.collisions == 0);
    CHECK(m.min_distance_to_obstacle == 0.5);
    CHECK(m.average_distance_to_obstacle == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(m.average_distance_to_path == 0.0);  // both poses on the reference
    CHECK_FALSE(m.success);
  }
  SUBCASE("a constant lateral offset is averaged as-is") {
    TrajectoryLog log;
    for (int i = 1; i <= 4; ++i) {
      LogRecord r;
      r.t = 0.05 * i;
      r.pose = Pose2D(0.3 * i, 0.1, 0.0);
      r.d_O = 9.0;
      log.records.push_back(r);
    }
    const MetricsReport m =
        compute_metrics(log, reference, start, 0.15, EndReason::GoalReached);
    CHECK(m.average_distance_to_path == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(m.success);
    CHECK_FALSE(m.stopped_distance_to_obstacle.has_value());
  }
  SUBCASE("contact counting and the final stopped margin") {
    TrajectoryLog log;
    LogRecord r1;
    r1.t = 0.05;
    r1.pose = Pose2D(0.1, 0.0, 0.0);
    r1.d_O = 0.1;  // closer than the robot radius: a contact
    LogRecord r2;
    r2.t = 0.10;
    r2.pose = Pose2D(0.2, 0.0, 0.0);
    r2.d_O = 0.5;
    log.records = {r1, r2};
    const MetricsReport m =
        compute_metrics(log, reference, start, 0.15, EndReason::ObstacleStop);
    CHECK(m.collisions == 1);
    CHECK(m.min_distance_to_obstacle == 0.1);
    REQUIRE(m.stopped_distance_to_obstacle.has_value());
    CHECK(*m.stopped_distance_to_obstacle ==
          doctest::Approx(0.35).epsilon(1e-12));
    CHECK_FALSE(m.success);
  }
}

TEST_CASE("point-to-polyline distance projects onto segments") {
  const std::vector<PathPoint> line{{0.0, 0.0}, {1.0, 0.0}};
  CHECK(distance_to_polyline({0.5, 0.3}, line) ==
        doctest::Approx(0.3).epsilon(1e-12));
  CHECK(distance_to_polyline({2.0, 0.0}, line) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(distance_to_polyline({-1.0, 0.0}, line) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(distance_to_polyline({0.25, 0.0}, line) == 0.0);

  const std::vector<PathPoint> single{{1.0, 1.0}};
  CHECK(distance_to_polyline({1.0, 1.0}, single) == 0.0);
  CHECK(distance_to_polyline({0.0, 0.0}, single) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // Zero-length segments collapse to their vertex.
  const std::vector<PathPoint> pinched{{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
  CHECK(distance_to_polyline({0.5, 0.2}, pinched) ==
        doctest::Approx(0.2).epsilon(1e-12));

  CHECK_THROWS_AS(distance_to_polyline({0.0, 0.0}, {}),
                  std::invalid_argument);
}

TEST_CASE("polyline distance agrees with a dense-sampling oracle") {
  std::mt19937_64 rng(1616);
  std::uniform_real_distribution<double> vertex(0.0, 5.0);
  std::uniform_real_distribution<double> probe(-1.0, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PathPoint> poly;
    for (int i = 0; i < 5; ++i) poly.push_back({vertex(rng), vertex(rng)});
    const PathPoint point{probe(rng), probe(rng)};
    const double got = distance_to_polyline(point, poly);
    const double sampled = oracles::sampled_distance_to_polyline(point, poly);
    // Sampling can only overestimate the true minimum, and by no more than
    // one half sample spacing.
    CHECK(sampled >= got - 1e-12);
    CHECK(sampled - got <= 2e-4);
  }
}
