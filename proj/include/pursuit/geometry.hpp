#ifndef PURSUIT_GEOMETRY_HPP_
#define PURSUIT_GEOMETRY_HPP_

#include <cmath>

namespace pursuit {

/// Planar robot pose. theta is kept in (-pi, pi].
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2D() = default;
  Pose2D(double x_, double y_, double theta_);
};

/// A single reference-path vertex, world frame unless stated otherwise.
struct PathPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Linear and angular velocity pair sent to the base. v < 0 means reversing.
struct VelocityCommand {
  double v = 0.0;
  double omega = 0.0;
};

/// Wraps an angle into (-pi, pi]. Throws std::invalid_argument on non-finite input.
double normalize_angle(double a);

/// Expresses a world-frame point in the robot's base frame.
PathPoint to_robot_frame(const Pose2D& pose, const PathPoint& p);

/// Inverse of to_robot_frame: robot-frame point back to world frame.
PathPoint to_world_frame(const Pose2D& pose, const PathPoint& p);

double euclidean_distance(const PathPoint& a, const PathPoint& b);

inline double euclidean_distance(const Pose2D& pose, const PathPoint& p) {
  return std::hypot(pose.x - p.x, pose.y - p.y);
}

}  // namespace pursuit

#endif  // PURSUIT_GEOMETRY_HPP_
