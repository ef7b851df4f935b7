#ifndef PURSUIT_CONFIG_HPP_
#define PURSUIT_CONFIG_HPP_

#include <string>
#include <vector>

namespace pursuit {

enum class Variant { PP, APP, RPP };

std::string variant_name(Variant v);
Variant parse_variant(const std::string& name);  // accepts pp/app/rpp, any case

/// Every tunable of the PP/APP/RPP controller family. Defaults follow the
/// reference hardware setup where one exists; the rest are documented
/// toolkit choices.
struct ControllerConfig {
  Variant variant = Variant::RPP;

  // speed limits [m/s]
  double v_desired = 0.8;
  double v_max = 0.8;
  double v_min_floor = 0.1;
  double omega_max = 3.2;  // [rad/s]

  // lookahead selection
  double lookahead_gain = 1.0;   // l_t [s], APP/RPP: L = v * l_t
  double lookahead_min = 0.25;   // [m]
  double lookahead_max = 1.2;    // [m]
  double fixed_lookahead = 1.2;  // [m], PP only

  // regulation heuristics (RPP)
  double r_min = 1.5;   // [m] minimum turn radius before slowing
  double alpha = 0.5;   // proximity gain, (0, 1]
  double d_prox = 0.5;  // [m] obstacle distance below which to slow

  bool use_interpolation = false;
  bool use_collision_check = true;
  double collision_horizon = 2.0;  // [s]

  // goal behaviors
  double goal_xy_tolerance = 0.25;   // [m]
  double goal_yaw_tolerance = 0.25;  // [rad]
  double slowdown_radius = 1.0;      // [m]

  double rotate_to_heading_threshold = 1.0;  // [rad]
  double robot_radius = 0.15;                // [m]
  double far_prune_factor = 2.0;  // windowing multiple of the lookahead

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

/// Kinematic plant settings for the simulator.
struct SimConfig {
  double dt = 0.05;             // [s], 20 Hz
  double a_max = 0.2;           // [m/s^2]
  double duration_limit = 120;  // [s]

  void validate() const;
};

struct AppConfig {
  ControllerConfig controller;
  SimConfig sim;
};

/// Loads a [controller]/[simulator] key=value file. Unknown sections or keys
/// are errors; missing keys keep their defaults. Validates before returning.
AppConfig load_config(const std::string& filename);

/// Writes the full configuration in the same format load_config reads.
std::string config_to_text(const AppConfig& cfg);

/// Assigns a numeric controller field by its config-file name. Returns false
/// if no such field exists (variant and boolean switches are not settable
/// this way). Used by the parameter sweep.
bool set_controller_field(ControllerConfig& cfg, const std::string& key,
                          double value);

/// Names accepted by set_controller_field, in config-file order.
std::vector<std::string> controller_field_names();

}  // namespace pursuit

#endif  // PURSUIT_CONFIG_HPP_
