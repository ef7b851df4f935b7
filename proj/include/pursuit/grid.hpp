#ifndef PURSUIT_GRID_HPP
#define PURSUIT_GRID_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pursuit/geometry.hpp"

namespace pursuit {

/// Axis-aligned occupancy grid. Cell (0, 0) is the minimum-x, minimum-y cell
/// and `origin` is its outer corner; cell (ix, iy) covers
/// [origin + i*res, origin + (i+1)*res) on each axis.
class OccupancyGrid {
 public:
  OccupancyGrid(std::size_t width, std::size_t height, double resolution,
                double origin_x, double origin_y);

  static OccupancyGrid from_text(const std::string& text,
                                 const std::string& origin_label);
  static OccupancyGrid load(const std::string& filename);
  std::string to_text() const;
  void save(const std::string& filename) const;

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  double resolution() const { return resolution_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  double max_x() const { return origin_x_ + resolution_ * double(width_); }
  double max_y() const { return origin_y_ + resolution_ * double(height_); }

  bool occupied(std::size_t ix, std::size_t iy) const;
  void set_occupied(std::size_t ix, std::size_t iy, bool value);

  bool contains(double x, double y) const;
  /// Cell containing the world point; absent when out of bounds.
  std::optional<std::pair<std::size_t, std::size_t>> cell_at(double x,
                                                             double y) const;
  double cell_center_x(std::size_t ix) const;
  double cell_center_y(std::size_t iy) const;

  /// Marks occupied every cell whose center lies in [x0,x1]x[y0,y1]
  /// (corners in either order).
  void occupy_rectangle(double x0, double y0, double x1, double y1);
  /// Same cell selection, explicit occupancy value (false carves free space).
  void set_rectangle(double x0, double y0, double x1, double y1,
                     bool occupied_value);

  /// Shortest distance from a point to the grid boundary rectangle
  /// (negative when the point lies outside).
  double distance_to_edge(double x, double y) const;

 private:
  std::size_t index(std::size_t ix, std::size_t iy) const {
    return iy * width_ + ix;
  }
  std::size_t width_;
  std::size_t height_;
  double resolution_;
  double origin_x_;
  double origin_y_;
  std::vector<std::uint8_t> cells_;
};

/// Exact Euclidean distance (between cell centers) to the nearest occupied
/// cell, for every cell. Occupied cells read 0; a grid with no obstacles
/// reads +infinity everywhere.
class DistanceField {
 public:
  explicit DistanceField(const OccupancyGrid& grid);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  double resolution() const { return resolution_; }

  double distance_at_cell(std::size_t ix, std::size_t iy) const;
  /// Distance for the cell containing the world point; absent out of bounds
  /// (callers treat that as contact).
  std::optional<double> distance_at(double x, double y) const;

 private:
  std::size_t width_;
  std::size_t height_;
  double resolution_;
  double origin_x_;
  double origin_y_;
  std::vector<double> distance_;
};

/// Distance from the robot pose to the nearest obstacle, per the field;
/// absent when the pose is outside the grid.
std::optional<double> distance_to_obstacle(const DistanceField& field,
                                           const Pose2D& pose);

/// Closed-form constant-velocity unicycle advance over time t (straight
/// line below |omega| = 1e-9, circular arc otherwise). Shared by arc
/// projection and the simulator plant so both trace identical geometry.
Pose2D advance_unicycle(const Pose2D& pose, double v, double omega, double t);

/// Constant-velocity forward rollout of a command.
struct ArcProjection {
  std::vector<Pose2D> poses;
  std::vector<double> timestamps;
  double spacing = 0.0;  // arc-length gap between samples, <= grid resolution
};

/// Closed-form unicycle rollout of (v, omega) over `horizon`, sampled so
/// consecutive positions are at most `resolution` apart (pure rotation is
/// sampled by angle so the robot_radius disc is covered).
ArcProjection project_arc(const Pose2D& pose, double v, double omega,
                          double horizon, double resolution,
                          double robot_radius);

struct CollisionCheck {
  std::optional<double> time_to_collision;
  /// Set when a sample left the grid: the projection outran the mapped
  /// window, which is treated as colliding at that sample.
  bool out_of_bounds = false;
};

/// First arc sample closer to an obstacle than robot_radius (or out of
/// bounds) and its timestamp.
CollisionCheck check_collision(const DistanceField& field,
                               const ArcProjection& arc, double robot_radius);

/// Warns when the commanded speed could carry the robot past the grid edge
/// within the collision horizon.
std::optional<std::string> rolling_window_guard(double v, double horizon,
                                                const Pose2D& pose,
                                                const OccupancyGrid& grid);

}  // namespace pursuit

#endif  // PURSUIT_GRID_HPP
