#ifndef PURSUIT_SCENARIO_HPP
#define PURSUIT_SCENARIO_HPP

#include <optional>
#include <string>
#include <vector>

#include "pursuit/geometry.hpp"

namespace pursuit {

/// A one-shot world change: when the robot's motion crosses the trigger
/// segment, the rectangle is marked occupied in the grid.
struct ScenarioEvent {
  PathPoint trigger_a{0.0, 0.0};
  PathPoint trigger_b{0.0, 0.0};
  PathPoint rect_min{0.0, 0.0};
  PathPoint rect_max{0.0, 0.0};
};

struct Scenario {
  std::string name;
  std::string grid_file;  // resolved relative to the scenario file
  std::string path_file;
  Pose2D start{0.0, 0.0, 0.0};
  std::optional<double> goal_xy_tolerance;
  std::optional<double> goal_yaw_tolerance;
  std::vector<ScenarioEvent> events;
};

Scenario load_scenario(const std::string& filename);
std::string scenario_to_text(const Scenario& scenario);

/// True when closed segments [a,b] and [c,d] share at least one point.
bool segments_intersect(const PathPoint& a, const PathPoint& b,
                        const PathPoint& c, const PathPoint& d);

enum class ScenarioKind { StepPath, BlindCorner, Slalom, WaypointRoute };

ScenarioKind parse_scenario_kind(const std::string& name);
std::string scenario_kind_name(ScenarioKind kind);

/// Geometry knobs for the scenario generators. Defaults reproduce the
/// benchmark suite; fields are grouped by the kind that reads them.
struct GeneratorParams {
  double resolution = 0.05;     // grid cell size, m
  double point_spacing = 0.05;  // path sampling, m
  double robot_radius = 0.15;   // for feasibility checks
  double margin = 2.0;          // free/occupied border around the action, m

  // step_path: square-wave reference on an empty map.
  double step_run = 2.0;        // straight run between steps, m
  double step_amplitude = 1.2;  // step height, m
  int step_cycles = 2;          // up/down pairs

  // blind_corner: L-shaped corridor; an obstacle spawns around the corner
  // when the robot crosses a trigger line on the inbound leg.
  double corridor_width = 1.0;
  double inbound_length = 5.0;
  double outbound_length = 4.0;
  double corner_overrun = 1.2;        // dead-end stub past the junction, m
  double trigger_before_corner = 1.0; // trigger line distance from apex, m
  double obstacle_size = 0.5;         // spawned square side, m
  double obstacle_past_corner = 1.0;  // square center distance past apex, m

  // slalom: narrow corridor with alternating wall blocks.
  double slalom_width = 1.5;
  double slalom_obstacle = 0.7;  // block side, m
  double slalom_spacing = 2.5;   // block center spacing along the corridor, m
  int slalom_count = 4;

  // waypoint_route: straight segments through these points on an empty map
  // (a default route is used when empty).
  std::vector<PathPoint> waypoints;
};

/// Writes grid.txt, path.csv, scenario.ini, and config.ini into out_dir and
/// returns the scenario file path. Geometry that cannot be driven (gaps
/// narrower than the robot) is rejected.
std::string generate_scenario(ScenarioKind kind, const GeneratorParams& params,
                              const std::string& out_dir);

}  // namespace pursuit

#endif  // PURSUIT_SCENARIO_HPP
