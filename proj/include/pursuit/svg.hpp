#ifndef PURSUIT_SVG_HPP
#define PURSUIT_SVG_HPP

#include <string>
#include <vector>

#include "pursuit/geometry.hpp"
#include "pursuit/grid.hpp"
#include "pursuit/simulator.hpp"

namespace pursuit {

/// Color for a speed magnitude on the fixed five-stop ramp over [0, v_max]
/// (blue = slow through red = fast), as "#rrggbb".
std::string speed_color(double speed, double v_max);

/// Deterministic plot of one run: obstacles dark, reference path gray, the
/// driven trajectory colored by achieved speed, start/goal markers, and a
/// speed legend. No timestamps or other run-to-run noise.
std::string render_plot_svg(const OccupancyGrid& grid,
                            const std::vector<PathPoint>& reference,
                            const TrajectoryLog& log, double v_max);

}  // namespace pursuit

#endif  // PURSUIT_SVG_HPP
