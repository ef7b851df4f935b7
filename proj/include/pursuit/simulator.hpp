#ifndef PURSUIT_SIMULATOR_HPP
#define PURSUIT_SIMULATOR_HPP

#include <optional>
#include <string>
#include <vector>

#include "pursuit/config.hpp"
#include "pursuit/controller.hpp"
#include "pursuit/geometry.hpp"
#include "pursuit/grid.hpp"
#include "pursuit/scenario.hpp"

namespace pursuit {

struct SimState {
  Pose2D pose{0.0, 0.0, 0.0};
  double v = 0.0;
  double omega = 0.0;
};

/// Kinematic differential-drive plant: linear speed slews toward the command
/// at a_max, the angular rate follows instantly (clamped), and the pose
/// advances along the exact constant-curvature arc.
SimState step_kinematics(const SimState& state, const VelocityCommand& cmd,
                         double dt, double a_max, double omega_max);

struct LogRecord {
  double t = 0.0;
  Pose2D pose{0.0, 0.0, 0.0};
  double cmd_v = 0.0;
  double cmd_omega = 0.0;
  double achieved_v = 0.0;
  double achieved_omega = 0.0;
  RegulationBreakdown breakdown;
  Mode mode = Mode::NoValidPath;
  double d_O = 0.0;
  bool rolling_window_violation = false;
};

struct TrajectoryLog {
  std::vector<LogRecord> records;
};

/// Fixed column order:
/// t,x,y,theta,cmd_v,cmd_omega,achieved_v,achieved_omega,v_desired,
/// v_curvature,v_proximity,v_combined,v_goal_scaled,v_final,kappa,d_O,status
std::string trajectory_csv_header();
std::string trajectory_to_csv(const TrajectoryLog& log);

enum class EndReason {
  GoalReached,
  ObstacleStop,  // imminent-collision stop held for the persistence window
  Collision,
  Timeout,
  NoValidPath,
};

std::string end_reason_name(EndReason reason);

struct MetricsReport {
  double time = 0.0;
  double distance_traveled = 0.0;
  int collisions = 0;
  double average_speed = 0.0;
  double min_distance_to_obstacle = 0.0;
  double average_distance_to_obstacle = 0.0;
  double average_distance_to_path = 0.0;
  std::optional<double> stopped_distance_to_obstacle;
  bool success = false;
};

std::string metrics_to_text(const MetricsReport& metrics);

/// Distance from a point to a piecewise-linear path (nearest point on any
/// segment, not nearest vertex).
double distance_to_polyline(const PathPoint& point,
                            const std::vector<PathPoint>& polyline);

MetricsReport compute_metrics(const TrajectoryLog& log,
                              const std::vector<PathPoint>& reference,
                              const Pose2D& start, double robot_radius,
                              EndReason end_reason);

struct RunResult {
  TrajectoryLog log;
  MetricsReport metrics;
  EndReason end_reason = EndReason::Timeout;
  // Occupancy at the end of the run (including any event-spawned obstacles),
  // so callers can render what the robot actually faced.
  std::optional<OccupancyGrid> final_grid;
  std::vector<PathPoint> reference;  // tracked path, for plotting
};

/// Deterministic closed-loop run of one scenario under one configuration.
RunResult run_scenario(const Scenario& scenario, const AppConfig& config);

}  // namespace pursuit

#endif  // PURSUIT_SIMULATOR_HPP
