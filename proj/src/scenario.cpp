#include "pursuit/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "ini.hpp"
#include "pursuit/config.hpp"
#include "pursuit/grid.hpp"
#include "pursuit/path.hpp"
#include "text_util.hpp"

namespace fs = std::filesystem;

namespace pursuit {

Scenario load_scenario(const std::string& filename) {
  Scenario sc;
  bool have_scenario = false;
  for (const auto& section : ini::parse_file(filename)) {
    if (section.name == "scenario") {
      have_scenario = true;
      for (const auto& [key, value] : section.entries) {
        const std::string ctx = filename + ": scenario." + key;
        if (key == "name") {
          sc.name = value;
        } else if (key == "grid") {
          sc.grid_file = value;
        } else if (key == "path") {
          sc.path_file = value;
        } else if (key == "start") {
          const auto v = ini::to_doubles(value, 3, ctx);
          sc.start = Pose2D(v[0], v[1], v[2]);
        } else if (key == "goal_xy_tolerance") {
          sc.goal_xy_tolerance = ini::to_double(value, ctx);
        } else if (key == "goal_yaw_tolerance") {
          sc.goal_yaw_tolerance = ini::to_double(value, ctx);
        } else {
          throw std::runtime_error(ctx + ": unknown key");
        }
      }
    } else if (section.name == "event") {
      ScenarioEvent ev;
      bool have_trigger = false, have_occupy = false;
      for (const auto& [key, value] : section.entries) {
        const std::string ctx = filename + ": event." + key;
        if (key == "trigger") {
          const auto v = ini::to_doubles(value, 4, ctx);
          ev.trigger_a = PathPoint{v[0], v[1]};
          ev.trigger_b = PathPoint{v[2], v[3]};
          have_trigger = true;
        } else if (key == "occupy") {
          const auto v = ini::to_doubles(value, 4, ctx);
          ev.rect_min = PathPoint{std::min(v[0], v[2]), std::min(v[1], v[3])};
          ev.rect_max = PathPoint{std::max(v[0], v[2]), std::max(v[1], v[3])};
          have_occupy = true;
        } else {
          throw std::runtime_error(ctx + ": unknown key");
        }
      }
      if (!have_trigger || !have_occupy) {
        throw std::runtime_error(filename +
                                 ": event needs both trigger and occupy");
      }
      sc.events.push_back(ev);
    } else {
      throw std::runtime_error(filename + ": unknown section [" + section.name +
                               "]");
    }
  }
  if (!have_scenario) {
    throw std::runtime_error(filename + ": missing [scenario] section");
  }
  if (sc.grid_file.empty() || sc.path_file.empty()) {
    throw std::runtime_error(filename + ": scenario needs grid and path");
  }
  const fs::path dir = fs::path(filename).parent_path();
  sc.grid_file = (dir / sc.grid_file).string();
  sc.path_file = (dir / sc.path_file).string();
  return sc;
}

std::string scenario_to_text(const Scenario& sc) {
  std::string out = "[scenario]\n";
  out += "name = " + sc.name + "\n";
  out += "grid = " + sc.grid_file + "\n";
  out += "path = " + sc.path_file + "\n";
  out += "start = " + format_double(sc.start.x) + " " +
         format_double(sc.start.y) + " " + format_double(sc.start.theta) +
         "\n";
  if (sc.goal_xy_tolerance) {
    out += "goal_xy_tolerance = " + format_double(*sc.goal_xy_tolerance) + "\n";
  }
  if (sc.goal_yaw_tolerance) {
    out +=
        "goal_yaw_tolerance = " + format_double(*sc.goal_yaw_tolerance) + "\n";
  }
  for (const auto& ev : sc.events) {
    out += "\n[event]\n";
    out += "trigger = " + format_double(ev.trigger_a.x) + " " +
           format_double(ev.trigger_a.y) + " " + format_double(ev.trigger_b.x) +
           " " + format_double(ev.trigger_b.y) + "\n";
    out += "occupy = " + format_double(ev.rect_min.x) + " " +
           format_double(ev.rect_min.y) + " " + format_double(ev.rect_max.x) +
           " " + format_double(ev.rect_max.y) + "\n";
  }
  return out;
}

namespace {

double cross3(const PathPoint& o, const PathPoint& a, const PathPoint& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const PathPoint& a, const PathPoint& b, const PathPoint& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

bool segments_intersect(const PathPoint& a, const PathPoint& b,
                        const PathPoint& c, const PathPoint& d) {
  const int d1 = sign_of(cross3(a, b, c));
  const int d2 = sign_of(cross3(a, b, d));
  const int d3 = sign_of(cross3(c, d, a));
  const int d4 = sign_of(cross3(c, d, b));
  if (d1 != d2 && d3 != d4) return true;
  if (d1 == 0 && on_segment(a, b, c)) return true;
  if (d2 == 0 && on_segment(a, b, d)) return true;
  if (d3 == 0 && on_segment(c, d, a)) return true;
  if (d4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  if (name == "step_path") return ScenarioKind::StepPath;
  if (name == "blind_corner") return ScenarioKind::BlindCorner;
  if (name == "slalom") return ScenarioKind::Slalom;
  if (name == "waypoint_route") return ScenarioKind::WaypointRoute;
  throw std::invalid_argument(
      "unknown scenario kind '" + name +
      "' (expected step_path, blind_corner, slalom, or waypoint_route)");
}

std::string scenario_kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::StepPath:
      return "step_path";
    case ScenarioKind::BlindCorner:
      return "blind_corner";
    case ScenarioKind::Slalom:
      return "slalom";
    case ScenarioKind::WaypointRoute:
      return "waypoint_route";
  }
  return "unknown";
}

namespace {

struct GeneratedWorld {
  OccupancyGrid grid;
  std::vector<PathPoint> path;
  Scenario scenario;
  AppConfig config;
};

OccupancyGrid empty_grid_around(double xmin, double ymin, double xmax,
                                double ymax, double margin, double resolution) {
  const double x0 = xmin - margin, y0 = ymin - margin;
  const auto w = std::size_t(std::ceil((xmax + margin - x0) / resolution));
  const auto h = std::size_t(std::ceil((ymax + margin - y0) / resolution));
  return OccupancyGrid(w, h, resolution, x0, y0);
}

OccupancyGrid solid_grid_around(double xmin, double ymin, double xmax,
                                double ymax, double margin, double resolution) {
  OccupancyGrid grid =
      empty_grid_around(xmin, ymin, xmax, ymax, margin, resolution);
  grid.set_rectangle(grid.origin_x() - 1.0, grid.origin_y() - 1.0,
                     grid.max_x() + 1.0, grid.max_y() + 1.0, true);
  return grid;
}

GeneratedWorld make_step_path(const GeneratorParams& p) {
  if (p.step_cycles < 1) {
    throw std::invalid_argument("step_path: need at least one cycle");
  }
  std::vector<PathPoint> vertices;
  double x = 0.0;
  vertices.push_back({x, 0.0});
  for (int c = 0; c < p.step_cycles; ++c) {
    x += p.step_run;
    vertices.push_back({x, 0.0});
    vertices.push_back({x, p.step_amplitude});
    x += p.step_run;
    vertices.push_back({x, p.step_amplitude});
    vertices.push_back({x, 0.0});
  }
  x += p.step_run;
  vertices.push_back({x, 0.0});

  GeneratedWorld world{
      empty_grid_around(0.0, 0.0, x, p.step_amplitude, p.margin, p.resolution),
      resample_polyline(vertices, p.point_spacing),
      Scenario{},
      AppConfig{}};
  world.scenario.name = "step_path";
  world.scenario.start = Pose2D(0.0, 0.0, 0.0);
  // Square-wave reference study runs faster than the other worlds and leans
  // on the sharp-turn slowdown. It models a small, responsive research base
  // (not the sluggish service-robot plant of the corridor worlds), so
  // commanded slowdowns are actually realized before each corner.
  world.config.controller.v_desired = 1.0;
  world.config.controller.v_max = 1.0;
  world.config.controller.r_min = 1.5;
  world.config.controller.use_interpolation = true;
  world.config.sim.a_max = 0.8;
  return world;
}

GeneratedWorld make_blind_corner(const GeneratorParams& p) {
  const double w = p.corridor_width;
  if (w < 2.0 * p.robot_radius) {
    throw std::invalid_argument("blind_corner: corridor narrower than robot");
  }
  if (p.obstacle_size >= w) {
    throw std::invalid_argument("blind_corner: obstacle wider than corridor");
  }
  const double apex_x = p.inbound_length;  // corner on the path centerline
  const double lead = 1.0;                 // corridor behind the start pose
  const double right_wall = apex_x + w / 2.0;
  const double stub_end = right_wall + p.corner_overrun;

  OccupancyGrid grid =
      solid_grid_around(-lead, -w / 2.0, stub_end, p.outbound_length, p.margin,
                        p.resolution);
  // Inbound corridor continues into a dead-end stub past the junction.
  grid.set_rectangle(-lead, -w / 2.0, stub_end, w / 2.0, false);
  // Outbound corridor.
  grid.set_rectangle(apex_x - w / 2.0, -w / 2.0, right_wall, p.outbound_length,
                     false);

  const double goal_y = p.outbound_length - 0.75;
  std::vector<PathPoint> vertices = {
      {0.0, 0.0}, {apex_x, 0.0}, {apex_x, goal_y}};

  GeneratedWorld world{std::move(grid),
                       resample_polyline(vertices, p.point_spacing),
                       Scenario{},
                       AppConfig{}};
  world.scenario.name = "blind_corner";
  world.scenario.start = Pose2D(0.0, 0.0, 0.0);
  ScenarioEvent ev;
  const double trig_x = apex_x - p.trigger_before_corner;
  ev.trigger_a = PathPoint{trig_x, -w / 2.0};
  ev.trigger_b = PathPoint{trig_x, w / 2.0};
  const double half = p.obstacle_size / 2.0;
  ev.rect_min = PathPoint{apex_x - half, p.obstacle_past_corner - half};
  ev.rect_max = PathPoint{apex_x + half, p.obstacle_past_corner + half};
  world.scenario.events.push_back(ev);
  // Service-robot speeds, and a turn tight enough that the regulated variant
  // slows well before the junction; in a corridor this narrow the proximity
  // slowdown is active the whole way, which is the point of the exercise.
  world.config.controller.v_desired = 0.8;
  world.config.controller.v_max = 0.8;
  world.config.controller.r_min = 0.9;
  // Around a blind corner the projection needs to reach past the robot's
  // braking distance at cruise speed.
  world.config.controller.collision_horizon = 3.0;
  return world;
}

GeneratedWorld make_slalom(const GeneratorParams& p) {
  if (p.slalom_count < 1) {
    throw std::invalid_argument("slalom: need at least one obstacle");
  }
  const double gap = p.slalom_width - p.slalom_obstacle;
  if (gap < 2.0 * p.robot_radius) {
    throw std::invalid_argument("slalom: gap narrower than robot");
  }
  const double lead = 2.0;
  const double total =
      lead + p.slalom_spacing * double(p.slalom_count - 1) + lead;
  const double mid_y = p.slalom_width / 2.0;

  OccupancyGrid grid = solid_grid_around(0.0, 0.0, total, p.slalom_width,
                                         p.margin, p.resolution);
  grid.set_rectangle(-1.0, 0.0, total + 1.0, p.slalom_width, false);

  std::vector<PathPoint> vertices;
  vertices.push_back({0.0, mid_y});
  const double half = p.slalom_obstacle / 2.0;
  for (int k = 0; k < p.slalom_count; ++k) {
    const double cx = lead + p.slalom_spacing * double(k);
    const bool bottom = (k % 2 == 0);
    if (bottom) {
      grid.occupy_rectangle(cx - half, 0.0, cx + half, p.slalom_obstacle);
      vertices.push_back({cx, p.slalom_obstacle + gap / 2.0});
    } else {
      grid.occupy_rectangle(cx - half, p.slalom_width - p.slalom_obstacle,
                            cx + half, p.slalom_width);
      vertices.push_back({cx, gap / 2.0});
    }
  }
  vertices.push_back({total, mid_y});

  GeneratedWorld world{std::move(grid),
                       resample_polyline(vertices, p.point_spacing),
                       Scenario{},
                       AppConfig{}};
  world.scenario.name = "slalom";
  world.scenario.start = Pose2D(0.0, mid_y, 0.0);
  // Tight weaving: a long projection would flag obstacles the steering is
  // already avoiding.
  world.config.controller.collision_horizon = 1.2;
  return world;
}

GeneratedWorld make_waypoint_route(const GeneratorParams& p) {
  std::vector<PathPoint> waypoints = p.waypoints;
  if (waypoints.empty()) {
    waypoints = {{0.0, 0.0}, {5.0, 0.0}, {8.0, 3.0},
                 {8.0, 7.0}, {3.0, 7.0}, {0.0, 3.0}};
  }
  if (waypoints.size() < 2) {
    throw std::invalid_argument("waypoint_route: need at least two waypoints");
  }
  double xmin = waypoints[0].x, xmax = waypoints[0].x;
  double ymin = waypoints[0].y, ymax = waypoints[0].y;
  for (const auto& wp : waypoints) {
    xmin = std::min(xmin, wp.x);
    xmax = std::max(xmax, wp.x);
    ymin = std::min(ymin, wp.y);
    ymax = std::max(ymax, wp.y);
  }
  const double heading = std::atan2(waypoints[1].y - waypoints[0].y,
                                    waypoints[1].x - waypoints[0].x);

  GeneratedWorld world{
      empty_grid_around(xmin, ymin, xmax, ymax, p.margin, p.resolution),
      resample_polyline(waypoints, p.point_spacing),
      Scenario{},
      AppConfig{}};
  world.scenario.name = "waypoint_route";
  world.scenario.start = Pose2D(waypoints[0].x, waypoints[0].y, heading);
  return world;
}

}  // namespace

std::string generate_scenario(ScenarioKind kind, const GeneratorParams& params,
                              const std::string& out_dir) {
  GeneratedWorld world = [&] {
    switch (kind) {
      case ScenarioKind::StepPath:
        return make_step_path(params);
      case ScenarioKind::BlindCorner:
        return make_blind_corner(params);
      case ScenarioKind::Slalom:
        return make_slalom(params);
      case ScenarioKind::WaypointRoute:
        return make_waypoint_route(params);
    }
    throw std::invalid_argument("unknown scenario kind");
  }();

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  world.grid.save((dir / "grid.txt").string());
  save_path_csv(world.path, (dir / "path.csv").string());

  world.scenario.grid_file = "grid.txt";
  world.scenario.path_file = "path.csv";
  const std::string scenario_file = (dir / "scenario.ini").string();
  {
    std::ofstream out(scenario_file, std::ios::binary);
    if (!out) {
      throw std::runtime_error(scenario_file + ": cannot open for writing");
    }
    out << scenario_to_text(world.scenario);
  }
  {
    const std::string config_file = (dir / "config.ini").string();
    std::ofstream out(config_file, std::ios::binary);
    if (!out) {
      throw std::runtime_error(config_file + ": cannot open for writing");
    }
    out << config_to_text(world.config);
  }
  return scenario_file;
}

}  // namespace pursuit
