#include "pursuit/path.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ini.hpp"
#include "text_util.hpp"

namespace pursuit {

namespace {
// Consecutive points closer than this carry no usable direction: the
// segment's orientation after a frame transform is rounding noise, which
// would poison cusp detection and direction parity.
constexpr double kMinSegmentLength = 1e-9;

// A reversal requires the segment directions' dot product to be negative
// beyond rounding noise, measured relative to the segment lengths. An exact
// right angle has dot = 0 in world coordinates but picks up ~1e-14 relative
// error once the points are in the robot frame; a genuine cusp is at -1.
constexpr double kCuspDotTolerance = 1e-9;

bool is_reversal(double ax, double ay, double bx, double by) {
  const double dot = ax * bx + ay * by;
  const double scale = std::sqrt((ax * ax + ay * ay) * (bx * bx + by * by));
  return dot < -kCuspDotTolerance * scale;
}
}  // namespace

Path::Path(std::vector<PathPoint> points) {
  points_.reserve(points.size());
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("path: point coordinates must be finite");
    }
    if (!points_.empty() &&
        euclidean_distance(points_.back(), p) < kMinSegmentLength) {
      continue;
    }
    points_.push_back(p);
  }
  if (points_.empty()) {
    throw std::invalid_argument("path: must contain at least one point");
  }

  cumulative_length_.resize(points_.size());
  cumulative_length_[0] = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    cumulative_length_[i] = cumulative_length_[i - 1] +
                            euclidean_distance(points_[i - 1], points_[i]);
  }

  const std::size_t n_segments = points_.size() > 0 ? points_.size() - 1 : 0;
  segment_directions_.resize(n_segments);
  int dir = 1;
  for (std::size_t s = 0; s < n_segments; ++s) {
    if (s > 0 && is_reversal(points_[s].x - points_[s - 1].x,
                             points_[s].y - points_[s - 1].y,
                             points_[s + 1].x - points_[s].x,
                             points_[s + 1].y - points_[s].y)) {
      dir = -dir;
    }
    segment_directions_[s] = dir;
  }

  if (points_.size() >= 2) {
    const auto& a = points_[points_.size() - 2];
    const auto& b = points_.back();
    double heading = std::atan2(b.y - a.y, b.x - a.x);
    if (segment_directions_.back() < 0) {
      heading = normalize_angle(heading + M_PI);
    }
    goal_heading_ = heading;
  }
}

void Path::prune_passed(std::size_t closest_index) {
  if (closest_index < prune_cursor_) {
    throw std::invalid_argument("path: prune cursor cannot move backwards");
  }
  if (closest_index >= points_.size()) {
    throw std::invalid_argument("path: prune index out of range");
  }
  prune_cursor_ = closest_index;
}

double Path::arc_length_between(std::size_t from, std::size_t to) const {
  if (from > to || to >= points_.size()) {
    throw std::invalid_argument("path: bad arc length index range");
  }
  return cumulative_length_[to] - cumulative_length_[from];
}

double Path::total_length() const {
  return cumulative_length_.back();
}

int Path::segment_direction(std::size_t segment_index) const {
  if (segment_index >= segment_directions_.size()) {
    throw std::invalid_argument("path: segment index out of range");
  }
  return segment_directions_[segment_index];
}

int Path::direction_at(std::size_t point_index) const {
  if (point_index >= points_.size()) {
    throw std::invalid_argument("path: point index out of range");
  }
  if (segment_directions_.empty()) return 1;
  if (point_index >= segment_directions_.size()) {
    return segment_directions_.back();
  }
  return segment_directions_[point_index];
}

std::size_t find_closest_index(const Path& path, const Pose2D& pose) {
  if (path.size() == 0) {
    throw std::runtime_error("path: no live points for closest-point search");
  }
  std::size_t best = path.prune_cursor();
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = path.prune_cursor(); i < path.size(); ++i) {
    const double d = euclidean_distance(pose, path.point(i));
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

LocalPathView build_local_view(const Path& path, const Pose2D& pose,
                               double lookahead, double far_prune_factor) {
  LocalPathView view;
  const std::size_t start = path.prune_cursor();
  const PathPoint& anchor = path.point(start);
  const double window = far_prune_factor * lookahead;
  for (std::size_t i = start; i < path.size(); ++i) {
    if (i > start && euclidean_distance(anchor, path.point(i)) > window) {
      break;
    }
    view.points.push_back(to_robot_frame(pose, path.point(i)));
    view.source_indices.push_back(i);
  }
  return view;
}

double lookahead_distance(Variant variant, double speed,
                          const ControllerConfig& cfg) {
  if (variant == Variant::PP) return cfg.fixed_lookahead;
  return std::clamp(std::abs(speed) * cfg.lookahead_gain, cfg.lookahead_min,
                    cfg.lookahead_max);
}

PathPoint select_lookahead_point(const LocalPathView& view, double lookahead,
                                 bool use_interpolation) {
  if (view.points.empty()) {
    throw std::invalid_argument("lookahead selection requires a nonempty view");
  }
  const PathPoint& anchor = view.points.front();
  for (std::size_t i = 0; i < view.points.size(); ++i) {
    if (euclidean_distance(anchor, view.points[i]) < lookahead) continue;
    if (!use_interpolation || i == 0) return view.points[i];
    // Crossing of segment (prev, here) with the circle of radius `lookahead`
    // about the anchor; prev is inside, here is outside, so exactly one
    // outward crossing exists in [0, 1].
    const PathPoint& a = view.points[i - 1];
    const PathPoint& b = view.points[i];
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double fx = a.x - anchor.x, fy = a.y - anchor.y;
    const double qa = dx * dx + dy * dy;
    if (qa == 0.0) return b;
    const double qb = 2.0 * (fx * dx + fy * dy);
    const double qc = fx * fx + fy * fy - lookahead * lookahead;
    const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
    const double t = (-qb + std::sqrt(disc)) / (2.0 * qa);
    return PathPoint{a.x + t * dx, a.y + t * dy};
  }
  return view.points.back();
}

CuspInfo detect_cusp(const LocalPathView& view) {
  CuspInfo info;
  if (view.points.size() < 3) return info;
  // Directions of segments shorter than kMinSegmentLength are rounding noise
  // after the frame transform; carry the last meaningful direction across
  // them instead of testing against them.
  double arc = 0.0;
  bool have_prev = false;
  double px = 0.0, py = 0.0;
  for (std::size_t k = 0; k + 1 < view.points.size(); ++k) {
    const double sx = view.points[k + 1].x - view.points[k].x;
    const double sy = view.points[k + 1].y - view.points[k].y;
    const double len = std::sqrt(sx * sx + sy * sy);
    if (len < kMinSegmentLength) {
      arc += len;
      continue;
    }
    if (have_prev && is_reversal(px, py, sx, sy)) {
      info.present = true;
      info.cusp_index = k;
      info.arc_distance_to_cusp = arc;
      return info;
    }
    have_prev = true;
    px = sx;
    py = sy;
    arc += len;
  }
  return info;
}

Path load_path_csv(const std::string& filename) {
  const std::string text = ini::read_file(filename);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(filename + ": empty path file");
  }
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t b = s.find_first_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b);
  };
  if (strip(line) != "x,y") {
    throw std::runtime_error(filename + ": expected header 'x,y'");
  }
  std::vector<PathPoint> points;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error(filename + ":" + std::to_string(lineno) +
                               ": expected 'x,y' row");
    }
    const std::string ctx = filename + ":" + std::to_string(lineno);
    points.push_back(PathPoint{ini::to_double(line.substr(0, comma), ctx),
                               ini::to_double(line.substr(comma + 1), ctx)});
  }
  if (points.empty()) {
    throw std::runtime_error(filename + ": path has no points");
  }
  return Path(std::move(points));
}

void save_path_csv(const std::vector<PathPoint>& points,
                   const std::string& filename) {
  std::ofstream out(filename, std::ios::binary);
  if (!out) throw std::runtime_error(filename + ": cannot open for writing");
  out << "x,y\n";
  for (const auto& p : points) {
    out << format_double(p.x) << ',' << format_double(p.y) << '\n';
  }
  if (!out) throw std::runtime_error(filename + ": write failed");
}

std::vector<PathPoint> resample_polyline(const std::vector<PathPoint>& vertices,
                                         double spacing) {
  if (!(spacing > 0.0)) {
    throw std::invalid_argument("resample: spacing must be > 0");
  }
  std::vector<PathPoint> out;
  if (vertices.empty()) return out;
  out.push_back(vertices.front());
  for (std::size_t s = 0; s + 1 < vertices.size(); ++s) {
    const PathPoint& a = vertices[s];
    const PathPoint& b = vertices[s + 1];
    const double len = euclidean_distance(a, b);
    // Integer subdivision count, so interior points are exact fractions of
    // the segment and never land within rounding error of a vertex.
    const auto pieces =
        std::max<std::size_t>(1, std::size_t(std::ceil(len / spacing - 1e-9)));
    for (std::size_t k = 1; k < pieces; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(pieces);
      out.push_back(PathPoint{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
    }
    out.push_back(b);
  }
  return out;
}

}  // namespace pursuit
