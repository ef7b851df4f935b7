#ifndef PURSUIT_PATH_HPP
#define PURSUIT_PATH_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/config.hpp"
#include "pursuit/geometry.hpp"

namespace pursuit {

/// Windowed robot-frame slice of the stored path, rebuilt every control
/// cycle. points[0] is the closest path point in the robot frame; the slice
/// is contiguous in the stored path so neighbouring view points are
/// neighbouring path points.
struct LocalPathView {
  std::vector<PathPoint> points;
  std::vector<std::size_t> source_indices;
};

/// Result of scanning a view for a direction reversal.
struct CuspInfo {
  bool present = false;
  double arc_distance_to_cusp = 0.0;
  std::size_t cusp_index = 0;  // index within the view, valid when present
};

/// Ordered waypoints plus the permanent prune cursor for one tracking
/// session. Consecutive duplicate points are dropped on construction.
class Path {
 public:
  explicit Path(std::vector<PathPoint> points);

  std::size_t size() const { return points_.size(); }
  const PathPoint& point(std::size_t i) const { return points_.at(i); }
  const std::vector<PathPoint>& points() const { return points_; }

  std::size_t prune_cursor() const { return prune_cursor_; }

  /// Permanently discards progress before closest_index. The cursor only
  /// moves forward; regression throws.
  void prune_passed(std::size_t closest_index);

  /// Arc length along the polyline between two vertex indices (from <= to).
  double arc_length_between(std::size_t from, std::size_t to) const;
  double total_length() const;

  /// Drive direction of segment i (points i -> i+1): +1 forward, -1 reverse.
  /// The first segment is driven forward; direction flips at every cusp.
  int segment_direction(std::size_t segment_index) const;

  /// Drive direction applicable when the robot's closest point is vertex i:
  /// the direction of the outgoing segment (or the final segment at the end).
  int direction_at(std::size_t point_index) const;

  const PathPoint& goal() const { return points_.back(); }

  /// Heading the robot should hold at the goal: the direction of travel along
  /// the final segment (flipped by pi when that segment is driven in
  /// reverse). Absent for single-point paths.
  std::optional<double> goal_heading() const { return goal_heading_; }

 private:
  std::vector<PathPoint> points_;
  std::vector<double> cumulative_length_;
  std::vector<int> segment_directions_;
  std::optional<double> goal_heading_;
  std::size_t prune_cursor_ = 0;
};

/// Index i >= prune_cursor minimizing the distance from pose to point i;
/// ties go to the lowest index.
std::size_t find_closest_index(const Path& path, const Pose2D& pose);

/// Contiguous robot-frame window starting at the prune cursor: points are
/// taken while their distance from the closest point stays within
/// far_prune_factor * lookahead; the first point beyond that ends the view.
LocalPathView build_local_view(const Path& path, const Pose2D& pose,
                               double lookahead, double far_prune_factor);

/// Lookahead distance for the cycle: fixed for PP, speed-scaled and clamped
/// to [lookahead_min, lookahead_max] otherwise. speed is a magnitude.
double lookahead_distance(Variant variant, double speed,
                          const ControllerConfig& cfg);

/// First view point at least `lookahead` from the view's closest point; with
/// interpolation, the exact circle crossing on the preceding segment. Falls
/// back to the last view point when nothing is far enough.
PathPoint select_lookahead_point(const LocalPathView& view, double lookahead,
                                 bool use_interpolation);

/// First interior view point where consecutive segments reverse direction
/// (strictly negative dot product; right angles do not count).
CuspInfo detect_cusp(const LocalPathView& view);

/// Loads a path from CSV with header `x,y`, one point per row, meters.
Path load_path_csv(const std::string& filename);

/// Writes points in the same CSV format load_path_csv reads.
void save_path_csv(const std::vector<PathPoint>& points,
                   const std::string& filename);

/// Re-samples a polyline at roughly `spacing` intervals, keeping every
/// original vertex so corners stay exact.
std::vector<PathPoint> resample_polyline(const std::vector<PathPoint>& vertices,
                                         double spacing);

}  // namespace pursuit

#endif  // PURSUIT_PATH_HPP
