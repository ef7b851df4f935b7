#include "pursuit/grid.hpp"

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

constexpr double kInf = std::numeric_limits<double>::infinity();
// Squared-cell-distance sentinel for "no obstacle seen"; far larger than any
// reachable squared distance yet small enough that sentinel + q^2 stays exact
// in a double.
constexpr double kFarAway = 1e12;

}  // namespace

OccupancyGrid::OccupancyGrid(std::size_t width, std::size_t height,
                             double resolution, double origin_x,
                             double origin_y)
    : width_(width),
      height_(height),
      resolution_(resolution),
      origin_x_(origin_x),
      origin_y_(origin_y),
      cells_(width * height, 0) {
  if (width_ == 0 || height_ == 0) {
    throw std::invalid_argument("grid: dimensions must be positive");
  }
  if (!(resolution_ > 0.0)) {
    throw std::invalid_argument("grid: resolution must be > 0");
  }
}

OccupancyGrid OccupancyGrid::from_text(const std::string& text,
                                       const std::string& origin_label) {
  std::istringstream in(text);
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line)) {
      throw std::runtime_error(origin_label + ": missing " + what);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line("resolution line");
  double resolution = 0.0;
  {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag >> resolution) || tag != "resolution") {
      throw std::runtime_error(origin_label + ": expected 'resolution <m>'");
    }
  }
  next_line("origin line");
  double ox = 0.0, oy = 0.0;
  {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag >> ox >> oy) || tag != "origin") {
      throw std::runtime_error(origin_label + ": expected 'origin <x> <y>'");
    }
  }

  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(line);
  }
  if (rows.empty()) {
    throw std::runtime_error(origin_label + ": grid has no rows");
  }
  const std::size_t width = rows.front().size();
  OccupancyGrid grid(width, rows.size(), resolution, ox, oy);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw std::runtime_error(origin_label + ": ragged grid row " +
                               std::to_string(r + 3));
    }
    const std::size_t iy = rows.size() - 1 - r;  // row 0 is the max-y row
    for (std::size_t ix = 0; ix < width; ++ix) {
      const char c = rows[r][ix];
      if (c == '#') {
        grid.set_occupied(ix, iy, true);
      } else if (c != '.') {
        throw std::runtime_error(origin_label +
                                 ": grid cells must be '#' or '.'");
      }
    }
  }
  return grid;
}

OccupancyGrid OccupancyGrid::load(const std::string& filename) {
  return from_text(ini::read_file(filename), filename);
}

std::string OccupancyGrid::to_text() const {
  std::string out = "resolution " + format_double(resolution_) + "\n" +
                    "origin " + format_double(origin_x_) + " " +
                    format_double(origin_y_) + "\n";
  for (std::size_t r = 0; r < height_; ++r) {
    const std::size_t iy = height_ - 1 - r;
    for (std::size_t ix = 0; ix < width_; ++ix) {
      out += occupied(ix, iy) ? '#' : '.';
    }
    out += '\n';
  }
  return out;
}

void OccupancyGrid::save(const std::string& filename) const {
  std::ofstream out(filename, std::ios::binary);
  if (!out) throw std::runtime_error(filename + ": cannot open for writing");
  out << to_text();
  if (!out) throw std::runtime_error(filename + ": write failed");
}

bool OccupancyGrid::occupied(std::size_t ix, std::size_t iy) const {
  if (ix >= width_ || iy >= height_) {
    throw std::out_of_range("grid: cell index out of range");
  }
  return cells_[index(ix, iy)] != 0;
}

void OccupancyGrid::set_occupied(std::size_t ix, std::size_t iy, bool value) {
  if (ix >= width_ || iy >= height_) {
    throw std::out_of_range("grid: cell index out of range");
  }
  cells_[index(ix, iy)] = value ? 1 : 0;
}

bool OccupancyGrid::contains(double x, double y) const {
  return x >= origin_x_ && x < max_x() && y >= origin_y_ && y < max_y();
}

std::optional<std::pair<std::size_t, std::size_t>> OccupancyGrid::cell_at(
    double x, double y) const {
  if (!contains(x, y)) return std::nullopt;
  auto clamp_index = [](double v, std::size_t n) {
    const auto i = static_cast<std::size_t>(std::max(0.0, v));
    return std::min(i, n - 1);
  };
  return std::make_pair(
      clamp_index(std::floor((x - origin_x_) / resolution_), width_),
      clamp_index(std::floor((y - origin_y_) / resolution_), height_));
}

double OccupancyGrid::cell_center_x(std::size_t ix) const {
  return origin_x_ + (double(ix) + 0.5) * resolution_;
}

double OccupancyGrid::cell_center_y(std::size_t iy) const {
  return origin_y_ + (double(iy) + 0.5) * resolution_;
}

void OccupancyGrid::occupy_rectangle(double x0, double y0, double x1,
                                     double y1) {
  set_rectangle(x0, y0, x1, y1, true);
}

void OccupancyGrid::set_rectangle(double x0, double y0, double x1, double y1,
                                  bool occupied_value) {
  const double xmin = std::min(x0, x1), xmax = std::max(x0, x1);
  const double ymin = std::min(y0, y1), ymax = std::max(y0, y1);
  const std::uint8_t value = occupied_value ? 1 : 0;
  for (std::size_t iy = 0; iy < height_; ++iy) {
    const double cy = cell_center_y(iy);
    if (cy < ymin || cy > ymax) continue;
    for (std::size_t ix = 0; ix < width_; ++ix) {
      const double cx = cell_center_x(ix);
      if (cx >= xmin && cx <= xmax) cells_[index(ix, iy)] = value;
    }
  }
}

double OccupancyGrid::distance_to_edge(double x, double y) const {
  return std::min(std::min(x - origin_x_, max_x() - x),
                  std::min(y - origin_y_, max_y() - y));
}

namespace {

// One-dimensional squared-distance transform (lower envelope of parabolas).
// Values are integer-valued doubles, so results are exact.
void transform_1d(const std::vector<double>& f, std::vector<double>& d,
                  std::vector<int>& v, std::vector<double>& z,
                  std::size_t n) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < int(n); ++q) {
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) /
          (2.0 * q - 2.0 * p);
      if (s <= z[k] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < int(n); ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = double(q) - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

DistanceField::DistanceField(const OccupancyGrid& grid)
    : width_(grid.width()),
      height_(grid.height()),
      resolution_(grid.resolution()),
      origin_x_(grid.origin_x()),
      origin_y_(grid.origin_y()),
      distance_(width_ * height_) {
  const std::size_t n = std::max(width_, height_);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  // Column pass: squared distance to the nearest occupied cell in the same
  // column.
  std::vector<double> interim(width_ * height_);
  for (std::size_t ix = 0; ix < width_; ++ix) {
    for (std::size_t iy = 0; iy < height_; ++iy) {
      f[iy] = grid.occupied(ix, iy) ? 0.0 : kFarAway;
    }
    transform_1d(f, d, v, z, height_);
    for (std::size_t iy = 0; iy < height_; ++iy) {
      interim[iy * width_ + ix] = d[iy];
    }
  }
  // Row pass combines columns into the full 2D squared distance.
  for (std::size_t iy = 0; iy < height_; ++iy) {
    for (std::size_t ix = 0; ix < width_; ++ix) {
      f[ix] = interim[iy * width_ + ix];
    }
    transform_1d(f, d, v, z, width_);
    for (std::size_t ix = 0; ix < width_; ++ix) {
      const double sq = d[ix];
      distance_[iy * width_ + ix] =
          sq >= kFarAway ? kInf : resolution_ * std::sqrt(sq);
    }
  }
}

double DistanceField::distance_at_cell(std::size_t ix, std::size_t iy) const {
  if (ix >= width_ || iy >= height_) {
    throw std::out_of_range("distance field: cell index out of range");
  }
  return distance_[iy * width_ + ix];
}

std::optional<double> DistanceField::distance_at(double x, double y) const {
  if (x < origin_x_ || y < origin_y_ ||
      x >= origin_x_ + resolution_ * double(width_) ||
      y >= origin_y_ + resolution_ * double(height_)) {
    return std::nullopt;
  }
  const auto ix = std::min(
      std::size_t(std::max(0.0, std::floor((x - origin_x_) / resolution_))),
      width_ - 1);
  const auto iy = std::min(
      std::size_t(std::max(0.0, std::floor((y - origin_y_) / resolution_))),
      height_ - 1);
  return distance_[iy * width_ + ix];
}

std::optional<double> distance_to_obstacle(const DistanceField& field,
                                           const Pose2D& pose) {
  return field.distance_at(pose.x, pose.y);
}

Pose2D advance_unicycle(const Pose2D& pose, double v, double omega, double t) {
  if (std::abs(omega) < 1e-9) {
    return Pose2D(pose.x + v * t * std::cos(pose.theta),
                  pose.y + v * t * std::sin(pose.theta),
                  normalize_angle(pose.theta + omega * t));
  }
  const double r = v / omega;
  const double th = pose.theta + omega * t;
  return Pose2D(pose.x + r * (std::sin(th) - std::sin(pose.theta)),
                pose.y - r * (std::cos(th) - std::cos(pose.theta)),
                normalize_angle(th));
}

ArcProjection project_arc(const Pose2D& pose, double v, double omega,
                          double horizon, double resolution,
                          double robot_radius) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("arc projection: horizon must be > 0");
  }
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("arc projection: resolution must be > 0");
  }
  std::size_t n = 1;
  n = std::max(n, std::size_t(std::ceil(std::abs(v) * horizon / resolution)));
  if (std::abs(v) < 1e-12 && std::abs(omega) >= 1e-9 && robot_radius > 0.0) {
    // Pure rotation: sample by swept angle so the footprint disc is covered.
    n = std::max(n, std::size_t(std::ceil(std::abs(omega) * horizon *
                                          robot_radius / resolution)));
  }
  n = std::min(n, std::size_t(1000000));

  ArcProjection arc;
  const double dt = horizon / double(n);
  arc.spacing = std::abs(v) * dt;
  arc.poses.reserve(n + 1);
  arc.timestamps.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = double(i) * dt;
    arc.poses.push_back(advance_unicycle(pose, v, omega, t));
    arc.timestamps.push_back(t);
  }
  return arc;
}

CollisionCheck check_collision(const DistanceField& field,
                               const ArcProjection& arc, double robot_radius) {
  if (arc.poses.empty()) {
    throw std::invalid_argument("collision check: empty arc");
  }
  CollisionCheck result;
  for (std::size_t i = 0; i < arc.poses.size(); ++i) {
    const auto d = field.distance_at(arc.poses[i].x, arc.poses[i].y);
    if (!d.has_value()) {
      // Outran the mapped window: conservatively a collision.
      result.time_to_collision = arc.timestamps[i];
      result.out_of_bounds = true;
      return result;
    }
    if (*d < robot_radius) {
      result.time_to_collision = arc.timestamps[i];
      return result;
    }
  }
  return result;
}

std::optional<std::string> rolling_window_guard(double v, double horizon,
                                                const Pose2D& pose,
                                                const OccupancyGrid& grid) {
  if (std::abs(v) <= 0.0) return std::nullopt;
  const double reach = std::abs(v) * horizon;
  const double edge = grid.distance_to_edge(pose.x, pose.y);
  if (reach <= edge) return std::nullopt;
  return "projection reach " + format_double(reach) +
         " m exceeds distance " + format_double(edge) +
         " m to the mapped window edge";
}

}  // namespace pursuit
