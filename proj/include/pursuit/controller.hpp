#ifndef PURSUIT_CONTROLLER_HPP
#define PURSUIT_CONTROLLER_HPP

#include <optional>
#include <string>

#include "pursuit/config.hpp"
#include "pursuit/geometry.hpp"
#include "pursuit/grid.hpp"
#include "pursuit/path.hpp"

namespace pursuit {

enum class Mode {
  Tracking,
  ReverseTracking,
  RotatingToHeading,
  RotatingToGoal,
  GoalReached,
  StoppedImminentCollision,
  NoValidPath,
};

std::string mode_name(Mode mode);

/// Stage-by-stage record of how the linear speed was regulated this cycle.
/// v_final is the post-floor speed magnitude; the commanded speed may be
/// smaller after the angular-rate clamp rescales it.
struct RegulationBreakdown {
  double v_desired = 0.0;
  double v_curvature = 0.0;
  double v_proximity = 0.0;
  double v_combined = 0.0;
  double v_goal_scaled = 0.0;
  double v_final = 0.0;
  double kappa = 0.0;
  double d_O = 0.0;
};

struct ControlOutput {
  VelocityCommand command{0.0, 0.0};
  Mode mode = Mode::NoValidPath;
  RegulationBreakdown breakdown;
  /// Timestamp of the projected collision that stopped the robot, when mode
  /// is StoppedImminentCollision.
  std::optional<double> time_to_collision;
  /// The commanded motion could leave the mapped window within the horizon.
  bool rolling_window_violation = false;
};

/// Curvature steering the robot through the lookahead point (robot frame).
/// Absent when the point is closer than 1e-6 m (degenerate geometry).
std::optional<double> compute_curvature(const PathPoint& lookahead_local);

/// Slows the robot when the commanded turn radius drops below r_min.
double curvature_heuristic(double v, double kappa, double r_min);

/// Slows the robot linearly in obstacle distance inside the d_prox band.
double proximity_heuristic(double v, double d_O, double d_prox, double alpha);

/// Combines the two regulated speeds: the stronger reduction wins.
double combine_regulation(double v_curvature, double v_proximity);

/// Linear slowdown inside slowdown_radius of the goal, floored so the robot
/// keeps making progress.
double goal_approach_scaling(double v, double dist_to_goal,
                             double slowdown_radius, double v_min_floor);

double apply_speed_floor(double v, double v_min_floor);

/// Turns the regulated (signed) speed into a command; when the angular rate
/// would exceed omega_max it is clamped and the speed rescaled so the
/// commanded curvature is preserved exactly.
VelocityCommand angular_velocity(double v_regulated, double kappa,
                                 double omega_max);

/// In-place rotation toward an angular error (proportional, clamped).
VelocityCommand rotate_in_place(double angle_error, double omega_max,
                                double gain);

/// One tracking session: owns the path and its prune cursor plus the
/// goal-reached latch. Not shareable across threads mid-cycle.
class Controller {
 public:
  explicit Controller(ControllerConfig cfg);

  /// Installs a new path and resets all session state.
  void set_path(Path path);
  bool has_path() const { return path_.has_value(); }
  const Path* path() const { return path_ ? &*path_ : nullptr; }
  const ControllerConfig& config() const { return cfg_; }

  /// One control cycle. current_v is the measured (signed) linear speed,
  /// used to gate near-standstill behaviors. The adaptive lookahead follows
  /// the previously commanded speed instead, so a regulated slowdown
  /// immediately pulls the lookahead point closer.
  /// grid/field may be null when no world model exists (disables the
  /// proximity heuristic and the collision gate).
  ControlOutput compute(const Pose2D& pose, double current_v,
                        const OccupancyGrid* grid, const DistanceField* field);

 private:
  ControlOutput compute_cycle(const Pose2D& pose, double current_v,
                              const OccupancyGrid* grid,
                              const DistanceField* field);
  ControlOutput rotation_output(double angle_error, Mode mode,
                                const RegulationBreakdown& breakdown) const;

  ControllerConfig cfg_;
  std::optional<Path> path_;
  bool goal_reached_ = false;
  // An imminent-collision stop holds until cruise speed would be safe again.
  bool stop_latch_ = false;
  // Magnitude of the last commanded linear speed; drives the adaptive
  // lookahead so regulation and lookahead selection reinforce each other.
  double last_commanded_speed_ = 0.0;
};

}  // namespace pursuit

#endif  // PURSUIT_CONTROLLER_HPP
