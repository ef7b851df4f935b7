#include "pursuit/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace pursuit {

double normalize_angle(double a) {
  if (!std::isfinite(a)) {
    throw std::invalid_argument("normalize_angle: non-finite angle");
  }
  // remainder() returns in [-pi, pi]; fold -pi onto +pi.
  double r = std::remainder(a, 2.0 * M_PI);
  if (r <= -M_PI) {
    r = M_PI;
  }
  return r;
}

Pose2D::Pose2D(double x_, double y_, double theta_)
    : x(x_), y(y_), theta(normalize_angle(theta_)) {}

PathPoint to_robot_frame(const Pose2D& pose, const PathPoint& p) {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  const double dx = p.x - pose.x;
  const double dy = p.y - pose.y;
  return PathPoint{c * dx + s * dy, -s * dx + c * dy};
}

PathPoint to_world_frame(const Pose2D& pose, const PathPoint& p) {
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  return PathPoint{pose.x + c * p.x - s * p.y, pose.y + s * p.x + c * p.y};
}

double euclidean_distance(const PathPoint& a, const PathPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace pursuit
