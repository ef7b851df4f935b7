#include "pursuit/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pursuit {

namespace {

constexpr double kDegenerateLookahead = 1e-6;  // meters
constexpr double kRotateGain = 2.0;            // 1/s, proportional rotation
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::Tracking:
      return "tracking";
    case Mode::ReverseTracking:
      return "reverse_tracking";
    case Mode::RotatingToHeading:
      return "rotating_to_heading";
    case Mode::RotatingToGoal:
      return "rotating_to_goal";
    case Mode::GoalReached:
      return "goal_reached";
    case Mode::StoppedImminentCollision:
      return "stopped_imminent_collision";
    case Mode::NoValidPath:
      return "no_valid_path";
  }
  return "unknown";
}

std::optional<double> compute_curvature(const PathPoint& lookahead_local) {
  const double l2 = lookahead_local.x * lookahead_local.x +
                    lookahead_local.y * lookahead_local.y;
  if (l2 <= kDegenerateLookahead * kDegenerateLookahead) return std::nullopt;
  return 2.0 * lookahead_local.y / l2;
}

double curvature_heuristic(double v, double kappa, double r_min) {
  const double abs_kappa = std::abs(kappa);
  if (abs_kappa <= 1.0 / r_min) return v;  // turn radius at least r_min
  return v / (r_min * abs_kappa);
}

double proximity_heuristic(double v, double d_O, double d_prox, double alpha) {
  if (d_O > d_prox) return v;
  return v * alpha * d_O / d_prox;
}

double combine_regulation(double v_curvature, double v_proximity) {
  return std::min(v_curvature, v_proximity);
}

double goal_approach_scaling(double v, double dist_to_goal,
                             double slowdown_radius, double v_min_floor) {
  if (dist_to_goal >= slowdown_radius) return v;
  return std::max(v * dist_to_goal / slowdown_radius, v_min_floor);
}

double apply_speed_floor(double v, double v_min_floor) {
  return std::max(v, v_min_floor);
}

VelocityCommand angular_velocity(double v_regulated, double kappa,
                                 double omega_max) {
  double omega = v_regulated * kappa;
  double v = v_regulated;
  if (std::abs(omega) > omega_max) {
    omega = std::copysign(omega_max, omega);
    v = omega / kappa;  // preserve the commanded curvature exactly
  }
  return VelocityCommand{v, omega};
}

VelocityCommand rotate_in_place(double angle_error, double omega_max,
                                double gain) {
  const double omega =
      std::clamp(gain * angle_error, -omega_max, omega_max);
  return VelocityCommand{0.0, omega};
}

Controller::Controller(ControllerConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

void Controller::set_path(Path path) {
  path_ = std::move(path);
  goal_reached_ = false;
  stop_latch_ = false;
  last_commanded_speed_ = 0.0;
}

ControlOutput Controller::rotation_output(
    double angle_error, Mode mode, const RegulationBreakdown& breakdown) const {
  ControlOutput out;
  out.command = rotate_in_place(angle_error, cfg_.omega_max, kRotateGain);
  out.mode = mode;
  out.breakdown = breakdown;
  return out;
}

ControlOutput Controller::compute(const Pose2D& pose, double current_v,
                                  const OccupancyGrid* grid,
                                  const DistanceField* field) {
  ControlOutput out = compute_cycle(pose, current_v, grid, field);
  last_commanded_speed_ = std::abs(out.command.v);
  return out;
}

ControlOutput Controller::compute_cycle(const Pose2D& pose, double current_v,
                                        const OccupancyGrid* grid,
                                        const DistanceField* field) {
  ControlOutput out;
  if (!path_) {
    out.mode = Mode::NoValidPath;
    return out;
  }

  // Obstacle distance at the robot: out-of-bounds is treated as contact
  // (maximally conservative); no world model means no obstacle anywhere.
  double d_obs = kInf;
  if (field != nullptr) {
    d_obs = distance_to_obstacle(*field, pose).value_or(0.0);
  }

  RegulationBreakdown breakdown;
  breakdown.d_O = d_obs;

  if (goal_reached_) {
    out.mode = Mode::GoalReached;
    out.breakdown = breakdown;
    return out;
  }

  // Goal behaviors take precedence over tracking.
  const double dist_to_goal = euclidean_distance(pose, path_->goal());
  if (dist_to_goal <= cfg_.goal_xy_tolerance) {
    const auto goal_heading = path_->goal_heading();
    if (!goal_heading.has_value()) {
      goal_reached_ = true;
      out.mode = Mode::GoalReached;
      out.breakdown = breakdown;
      return out;
    }
    const double yaw_error = normalize_angle(*goal_heading - pose.theta);
    if (std::abs(yaw_error) <= cfg_.goal_yaw_tolerance) {
      goal_reached_ = true;
      out.mode = Mode::GoalReached;
      out.breakdown = breakdown;
      return out;
    }
    return rotation_output(yaw_error, Mode::RotatingToGoal, breakdown);
  }

  // Progress bookkeeping: pruned points never come back.
  const std::size_t closest = find_closest_index(*path_, pose);
  path_->prune_passed(closest);

  // The commanded speed drives the lookahead so a regulated slowdown
  // immediately pulls the aim point closer; growth is capped by the measured
  // speed so the window re-extends only as the robot actually speeds up.
  const double lookahead_speed =
      std::min(std::abs(current_v), last_commanded_speed_);
  const double lookahead =
      lookahead_distance(cfg_.variant, lookahead_speed, cfg_);
  LocalPathView view =
      build_local_view(*path_, pose, lookahead, cfg_.far_prune_factor);

  // A direction reversal inside the view truncates the usable lookahead so a
  // single command never mixes forward and reverse geometry.
  const CuspInfo cusp = detect_cusp(view);
  double effective_lookahead = lookahead;
  if (cusp.present) {
    effective_lookahead = std::min(lookahead, cusp.arc_distance_to_cusp);
    view.points.resize(cusp.cusp_index + 1);
    view.source_indices.resize(cusp.cusp_index + 1);
  }
  const int direction = path_->direction_at(closest);

  const PathPoint lookahead_local =
      select_lookahead_point(view, effective_lookahead, cfg_.use_interpolation);

  const auto kappa_opt = compute_curvature(lookahead_local);
  if (!kappa_opt.has_value()) {
    // Degenerate geometry (lookahead on top of the robot): align with the
    // local path direction instead of steering.
    double target = pose.theta;
    if (closest + 1 < path_->size()) {
      const auto& a = path_->point(closest);
      const auto& b = path_->point(closest + 1);
      target = std::atan2(b.y - a.y, b.x - a.x);
      if (direction < 0) target = normalize_angle(target + M_PI);
    } else if (path_->goal_heading().has_value()) {
      target = *path_->goal_heading();
    }
    return rotation_output(normalize_angle(target - pose.theta),
                           Mode::RotatingToHeading, breakdown);
  }
  const double kappa = *kappa_opt;
  breakdown.kappa = kappa;

  // Gross misalignment is fixed by rotating in place before setting off;
  // only near standstill, so corners passed at speed never trigger it.
  double bearing = std::atan2(lookahead_local.y, lookahead_local.x);
  if (direction < 0) bearing = normalize_angle(bearing - M_PI);
  if (std::abs(current_v) <= cfg_.v_min_floor &&
      std::abs(bearing) > cfg_.rotate_to_heading_threshold &&
      dist_to_goal > cfg_.slowdown_radius) {
    return rotation_output(bearing, Mode::RotatingToHeading, breakdown);
  }

  // Velocity regulation pipeline.
  breakdown.v_desired = cfg_.v_desired;
  if (cfg_.variant == Variant::RPP) {
    breakdown.v_curvature =
        curvature_heuristic(cfg_.v_desired, kappa, cfg_.r_min);
    breakdown.v_proximity =
        proximity_heuristic(cfg_.v_desired, d_obs, cfg_.d_prox, cfg_.alpha);
  } else {
    breakdown.v_curvature = cfg_.v_desired;
    breakdown.v_proximity = cfg_.v_desired;
  }
  breakdown.v_combined =
      combine_regulation(breakdown.v_curvature, breakdown.v_proximity);
  breakdown.v_goal_scaled = goal_approach_scaling(
      breakdown.v_combined, dist_to_goal, cfg_.slowdown_radius,
      cfg_.v_min_floor);
  breakdown.v_final = apply_speed_floor(breakdown.v_goal_scaled,
                                        cfg_.v_min_floor);

  out.command = angular_velocity(direction * breakdown.v_final, kappa,
                                 cfg_.omega_max);
  out.mode = direction < 0 ? Mode::ReverseTracking : Mode::Tracking;
  out.breakdown = breakdown;

  // Collision gate: stop rather than issue a command that is projected to
  // hit something within the horizon.
  if (cfg_.use_collision_check && grid != nullptr && field != nullptr) {
    // A tripped stop holds while the platform is still braking: re-steering
    // mid-skid would fight the stop and can drag the slide into the hazard.
    if (stop_latch_ && std::abs(current_v) > 1e-12) {
      out.command = VelocityCommand{0.0, 0.0};
      out.mode = Mode::StoppedImminentCollision;
      return out;
    }
    const ArcProjection arc =
        project_arc(pose, out.command.v, out.command.omega,
                    cfg_.collision_horizon, grid->resolution(),
                    cfg_.robot_radius);
    CollisionCheck hit = check_collision(*field, arc, cfg_.robot_radius);
    // Resume hysteresis: a stop clears only once cruising at the desired
    // speed would also be safe. A regulated crawl shortens the projection,
    // which would otherwise let the robot creep up on whatever stopped it.
    if (!hit.time_to_collision.has_value() && stop_latch_) {
      const VelocityCommand probe =
          angular_velocity(direction * cfg_.v_desired, kappa, cfg_.omega_max);
      const ArcProjection probe_arc =
          project_arc(pose, probe.v, probe.omega, cfg_.collision_horizon,
                      grid->resolution(), cfg_.robot_radius);
      const CollisionCheck probe_hit =
          check_collision(*field, probe_arc, cfg_.robot_radius);
      if (probe_hit.time_to_collision.has_value()) hit = probe_hit;
    }
    const auto window_warning = rolling_window_guard(
        out.command.v, cfg_.collision_horizon, pose, *grid);
    out.rolling_window_violation =
        hit.out_of_bounds || window_warning.has_value();
    if (hit.time_to_collision.has_value()) {
      stop_latch_ = true;
      out.command = VelocityCommand{0.0, 0.0};
      out.mode = Mode::StoppedImminentCollision;
      out.time_to_collision = hit.time_to_collision;
    } else {
      stop_latch_ = false;
    }
  }
  return out;
}

}  // namespace pursuit
