#include "pursuit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pursuit/grid.hpp"
#include "pursuit/path.hpp"
#include "text_util.hpp"

namespace pursuit {

namespace {

constexpr double kStopPersistence = 2.0;  // seconds a stop must hold to end
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SimState step_kinematics(const SimState& state, const VelocityCommand& cmd,
                         double dt, double a_max, double omega_max) {
  if (!(dt > 0.0)) throw std::invalid_argument("plant: dt must be > 0");
  SimState next = state;
  const double dv = cmd.v - state.v;
  const double max_dv = a_max * dt;
  next.v = std::abs(dv) <= max_dv ? cmd.v : state.v + std::copysign(max_dv, dv);
  next.omega = std::clamp(cmd.omega, -omega_max, omega_max);
  next.pose = advance_unicycle(state.pose, next.v, next.omega, dt);
  return next;
}

std::string trajectory_csv_header() {
  return "t,x,y,theta,cmd_v,cmd_omega,achieved_v,achieved_omega,v_desired,"
         "v_curvature,v_proximity,v_combined,v_goal_scaled,v_final,kappa,d_O,"
         "status";
}

std::string trajectory_to_csv(const TrajectoryLog& log) {
  std::string out = trajectory_csv_header() + "\n";
  for (const auto& r : log.records) {
    out += format_double(r.t) + ',';
    out += format_double(r.pose.x) + ',';
    out += format_double(r.pose.y) + ',';
    out += format_double(r.pose.theta) + ',';
    out += format_double(r.cmd_v) + ',';
    out += format_double(r.cmd_omega) + ',';
    out += format_double(r.achieved_v) + ',';
    out += format_double(r.achieved_omega) + ',';
    out += format_double(r.breakdown.v_desired) + ',';
    out += format_double(r.breakdown.v_curvature) + ',';
    out += format_double(r.breakdown.v_proximity) + ',';
    out += format_double(r.breakdown.v_combined) + ',';
    out += format_double(r.breakdown.v_goal_scaled) + ',';
    out += format_double(r.breakdown.v_final) + ',';
    out += format_double(r.breakdown.kappa) + ',';
    out += format_double(r.d_O) + ',';
    out += mode_name(r.mode) + '\n';
  }
  return out;
}

std::string end_reason_name(EndReason reason) {
  switch (reason) {
    case EndReason::GoalReached:
      return "goal_reached";
    case EndReason::ObstacleStop:
      return "obstacle_stop";
    case EndReason::Collision:
      return "collision";
    case EndReason::Timeout:
      return "timeout";
    case EndReason::NoValidPath:
      return "no_valid_path";
  }
  return "unknown";
}

std::string metrics_to_text(const MetricsReport& m) {
  std::string out;
  out += "time = " + format_double(m.time) + "\n";
  out += "distance_traveled = " + format_double(m.distance_traveled) + "\n";
  out += "collisions = " + std::to_string(m.collisions) + "\n";
  out += "average_speed = " + format_double(m.average_speed) + "\n";
  out += "min_distance_to_obstacle = " +
         format_double(m.min_distance_to_obstacle) + "\n";
  out += "average_distance_to_obstacle = " +
         format_double(m.average_distance_to_obstacle) + "\n";
  out += "average_distance_to_path = " +
         format_double(m.average_distance_to_path) + "\n";
  if (m.stopped_distance_to_obstacle.has_value()) {
    out += "stopped_distance_to_obstacle = " +
           format_double(*m.stopped_distance_to_obstacle) + "\n";
  }
  out += std::string("success = ") + (m.success ? "true" : "false") + "\n";
  return out;
}

double distance_to_polyline(const PathPoint& point,
                            const std::vector<PathPoint>& polyline) {
  if (polyline.empty()) {
    throw std::invalid_argument("distance to polyline: empty polyline");
  }
  double best = euclidean_distance(point, polyline.front());
  for (std::size_t s = 0; s + 1 < polyline.size(); ++s) {
    const PathPoint& a = polyline[s];
    const PathPoint& b = polyline[s + 1];
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    PathPoint nearest = a;
    if (len2 > 0.0) {
      const double t = std::clamp(
          ((point.x - a.x) * dx + (point.y - a.y) * dy) / len2, 0.0, 1.0);
      nearest = PathPoint{a.x + t * dx, a.y + t * dy};
    }
    best = std::min(best, euclidean_distance(point, nearest));
  }
  return best;
}

MetricsReport compute_metrics(const TrajectoryLog& log,
                              const std::vector<PathPoint>& reference,
                              const Pose2D& start, double robot_radius,
                              EndReason end_reason) {
  MetricsReport m;
  m.success = end_reason == EndReason::GoalReached;
  m.min_distance_to_obstacle = kInf;
  if (log.records.empty()) return m;

  m.time = log.records.back().t;
  double prev_x = start.x, prev_y = start.y;
  double d_obs_sum = 0.0, d_path_sum = 0.0;
  for (const auto& r : log.records) {
    const double dx = r.pose.x - prev_x, dy = r.pose.y - prev_y;
    m.distance_traveled += std::sqrt(dx * dx + dy * dy);
    prev_x = r.pose.x;
    prev_y = r.pose.y;
    if (r.d_O < robot_radius) ++m.collisions;
    m.min_distance_to_obstacle = std::min(m.min_distance_to_obstacle, r.d_O);
    d_obs_sum += r.d_O;
    d_path_sum +=
        distance_to_polyline(PathPoint{r.pose.x, r.pose.y}, reference);
  }
  const double n = double(log.records.size());
  m.average_distance_to_obstacle = d_obs_sum / n;
  m.average_distance_to_path = d_path_sum / n;
  if (m.time > 0.0) m.average_speed = m.distance_traveled / m.time;
  if (end_reason == EndReason::ObstacleStop) {
    m.stopped_distance_to_obstacle = log.records.back().d_O - robot_radius;
  }
  return m;
}

RunResult run_scenario(const Scenario& scenario, const AppConfig& config) {
  ControllerConfig ctrl_cfg = config.controller;
  if (scenario.goal_xy_tolerance) {
    ctrl_cfg.goal_xy_tolerance = *scenario.goal_xy_tolerance;
  }
  if (scenario.goal_yaw_tolerance) {
    ctrl_cfg.goal_yaw_tolerance = *scenario.goal_yaw_tolerance;
  }
  ctrl_cfg.validate();
  config.sim.validate();

  OccupancyGrid grid = OccupancyGrid::load(scenario.grid_file);
  Path path = load_path_csv(scenario.path_file);

  if (!grid.contains(scenario.start.x, scenario.start.y)) {
    throw std::runtime_error(scenario.name + ": start pose outside the grid");
  }
  if (euclidean_distance(scenario.start, path.point(0)) >
      2.0 * std::max(ctrl_cfg.lookahead_max, ctrl_cfg.fixed_lookahead)) {
    throw std::runtime_error(scenario.name +
                             ": path does not begin near the start pose");
  }

  std::vector<PathPoint> reference = path.points();
  Controller controller(ctrl_cfg);
  controller.set_path(std::move(path));

  DistanceField field(grid);
  std::vector<char> fired(scenario.events.size(), 0);

  SimState state;
  state.pose = scenario.start;
  PathPoint prev_pos{state.pose.x, state.pose.y};

  RunResult result;
  result.end_reason = EndReason::Timeout;

  const auto max_steps =
      std::size_t(std::ceil(config.sim.duration_limit / config.sim.dt));
  const auto stop_steps_needed =
      std::size_t(std::ceil(kStopPersistence / config.sim.dt));
  std::size_t stop_streak = 0;

  for (std::size_t i = 0; i < max_steps; ++i) {
    // World changes triggered by the robot's last motion.
    const PathPoint cur_pos{state.pose.x, state.pose.y};
    bool grid_changed = false;
    for (std::size_t e = 0; e < scenario.events.size(); ++e) {
      if (fired[e]) continue;
      const auto& ev = scenario.events[e];
      if (segments_intersect(prev_pos, cur_pos, ev.trigger_a, ev.trigger_b)) {
        grid.occupy_rectangle(ev.rect_min.x, ev.rect_min.y, ev.rect_max.x,
                              ev.rect_max.y);
        fired[e] = 1;
        grid_changed = true;
      }
    }
    if (grid_changed) field = DistanceField(grid);

    const ControlOutput out =
        controller.compute(state.pose, state.v, &grid, &field);
    if (out.mode == Mode::NoValidPath) {
      result.end_reason = EndReason::NoValidPath;
      break;
    }

    prev_pos = cur_pos;
    state = step_kinematics(state, out.command, config.sim.dt,
                            config.sim.a_max, ctrl_cfg.omega_max);

    LogRecord rec;
    rec.t = double(i + 1) * config.sim.dt;
    rec.pose = state.pose;
    rec.cmd_v = out.command.v;
    rec.cmd_omega = out.command.omega;
    rec.achieved_v = state.v;
    rec.achieved_omega = state.omega;
    rec.breakdown = out.breakdown;
    rec.mode = out.mode;
    rec.d_O = distance_to_obstacle(field, state.pose).value_or(0.0);
    rec.rolling_window_violation = out.rolling_window_violation;
    result.log.records.push_back(rec);

    if (rec.d_O < ctrl_cfg.robot_radius) {
      result.end_reason = EndReason::Collision;
      break;
    }
    if (out.mode == Mode::GoalReached) {
      result.end_reason = EndReason::GoalReached;
      break;
    }
    // A stop counts only once the plant has actually braked to rest; the
    // command goes to zero immediately but the platform skids for a while.
    const bool at_rest = std::abs(state.v) <= 1e-12;
    stop_streak = (out.mode == Mode::StoppedImminentCollision && at_rest)
                      ? stop_streak + 1
                      : 0;
    if (stop_streak >= stop_steps_needed) {
      result.end_reason = EndReason::ObstacleStop;
      break;
    }
  }

  result.metrics = compute_metrics(result.log, reference, scenario.start,
                                   ctrl_cfg.robot_radius, result.end_reason);
  result.final_grid = std::move(grid);
  result.reference = std::move(reference);
  return result;
}

}  // namespace pursuit
