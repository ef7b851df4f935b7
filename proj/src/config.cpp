#include "pursuit/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ini.hpp"
#include "text_util.hpp"

namespace pursuit {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::PP:
      return "pp";
    case Variant::APP:
      return "app";
    case Variant::RPP:
      return "rpp";
  }
  return "rpp";
}

Variant parse_variant(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "pp") return Variant::PP;
  if (s == "app") return Variant::APP;
  if (s == "rpp") return Variant::RPP;
  throw std::invalid_argument("unknown variant '" + name +
                              "' (expected pp, app, or rpp)");
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw std::invalid_argument("config: " + what);
  }
}

// All numeric controller fields by their file/config name. Also the sweep
// command's notion of what can be swept.
const std::map<std::string, double ControllerConfig::*>& controller_fields() {
  static const std::map<std::string, double ControllerConfig::*> fields = {
      {"v_desired", &ControllerConfig::v_desired},
      {"v_max", &ControllerConfig::v_max},
      {"v_min_floor", &ControllerConfig::v_min_floor},
      {"omega_max", &ControllerConfig::omega_max},
      {"lookahead_gain", &ControllerConfig::lookahead_gain},
      {"lookahead_min", &ControllerConfig::lookahead_min},
      {"lookahead_max", &ControllerConfig::lookahead_max},
      {"fixed_lookahead", &ControllerConfig::fixed_lookahead},
      {"r_min", &ControllerConfig::r_min},
      {"alpha", &ControllerConfig::alpha},
      {"d_prox", &ControllerConfig::d_prox},
      {"collision_horizon", &ControllerConfig::collision_horizon},
      {"goal_xy_tolerance", &ControllerConfig::goal_xy_tolerance},
      {"goal_yaw_tolerance", &ControllerConfig::goal_yaw_tolerance},
      {"slowdown_radius", &ControllerConfig::slowdown_radius},
      {"rotate_to_heading_threshold",
       &ControllerConfig::rotate_to_heading_threshold},
      {"robot_radius", &ControllerConfig::robot_radius},
      {"far_prune_factor", &ControllerConfig::far_prune_factor},
  };
  return fields;
}

}  // namespace

void ControllerConfig::validate() const {
  require(v_min_floor > 0.0, "v_min_floor must be > 0");
  require(v_min_floor <= v_desired, "v_min_floor must be <= v_desired");
  require(v_desired <= v_max, "v_desired must be <= v_max");
  require(omega_max > 0.0, "omega_max must be > 0");
  require(lookahead_min > 0.0, "lookahead_min must be > 0");
  require(lookahead_min <= lookahead_max,
          "lookahead_min must be <= lookahead_max");
  require(fixed_lookahead > 0.0, "fixed_lookahead must be > 0");
  require(lookahead_gain > 0.0, "lookahead_gain must be > 0");
  require(alpha > 0.0 && alpha <= 1.0, "alpha must be in (0, 1]");
  require(r_min > 0.0, "r_min must be > 0");
  require(d_prox > 0.0, "d_prox must be > 0");
  require(collision_horizon > 0.0, "collision_horizon must be > 0");
  require(far_prune_factor >= 1.0, "far_prune_factor must be >= 1");
  require(goal_xy_tolerance > 0.0, "goal_xy_tolerance must be > 0");
  require(goal_yaw_tolerance > 0.0, "goal_yaw_tolerance must be > 0");
  require(slowdown_radius > 0.0, "slowdown_radius must be > 0");
  require(rotate_to_heading_threshold > 0.0,
          "rotate_to_heading_threshold must be > 0");
  require(robot_radius > 0.0, "robot_radius must be > 0");
}

void SimConfig::validate() const {
  require(dt > 0.0, "dt must be > 0");
  require(a_max > 0.0, "a_max must be > 0");
  require(duration_limit > 0.0, "duration_limit must be > 0");
}

AppConfig load_config(const std::string& filename) {
  AppConfig cfg;
  for (const auto& section : ini::parse_file(filename)) {
    if (section.name == "controller") {
      for (const auto& [key, value] : section.entries) {
        const std::string ctx = filename + ": controller." + key;
        if (key == "variant") {
          cfg.controller.variant = parse_variant(value);
        } else if (key == "use_interpolation") {
          cfg.controller.use_interpolation = ini::to_bool(value, ctx);
        } else if (key == "use_collision_check") {
          cfg.controller.use_collision_check = ini::to_bool(value, ctx);
        } else if (auto it = controller_fields().find(key);
                   it != controller_fields().end()) {
          cfg.controller.*(it->second) = ini::to_double(value, ctx);
        } else {
          throw std::runtime_error(ctx + ": unknown key");
        }
      }
    } else if (section.name == "simulator") {
      for (const auto& [key, value] : section.entries) {
        const std::string ctx = filename + ": simulator." + key;
        if (key == "dt") {
          cfg.sim.dt = ini::to_double(value, ctx);
        } else if (key == "a_max") {
          cfg.sim.a_max = ini::to_double(value, ctx);
        } else if (key == "duration_limit") {
          cfg.sim.duration_limit = ini::to_double(value, ctx);
        } else {
          throw std::runtime_error(ctx + ": unknown key");
        }
      }
    } else {
      throw std::runtime_error(filename + ": unknown section [" + section.name +
                               "]");
    }
  }
  cfg.controller.validate();
  cfg.sim.validate();
  return cfg;
}

bool set_controller_field(ControllerConfig& cfg, const std::string& key,
                          double value) {
  auto it = controller_fields().find(key);
  if (it == controller_fields().end()) return false;
  cfg.*(it->second) = value;
  return true;
}

std::vector<std::string> controller_field_names() {
  std::vector<std::string> names;
  names.reserve(controller_fields().size());
  for (const auto& [name, member] : controller_fields()) {
    names.push_back(name);
  }
  return names;
}

std::string config_to_text(const AppConfig& cfg) {
  std::ostringstream out;
  out << "[controller]\n";
  out << "variant = " << variant_name(cfg.controller.variant) << "\n";
  for (const auto& [name, member] : controller_fields()) {
    out << name << " = " << format_double(cfg.controller.*member) << "\n";
  }
  out << "use_interpolation = "
      << (cfg.controller.use_interpolation ? "true" : "false") << "\n";
  out << "use_collision_check = "
      << (cfg.controller.use_collision_check ? "true" : "false") << "\n";
  out << "\n[simulator]\n";
  out << "dt = " << format_double(cfg.sim.dt) << "\n";
  out << "a_max = " << format_double(cfg.sim.a_max) << "\n";
  out << "duration_limit = " << format_double(cfg.sim.duration_limit) << "\n";
  return out.str();
}

}  // namespace pursuit
