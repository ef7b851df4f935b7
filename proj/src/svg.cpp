#include "pursuit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace pursuit {

namespace {

struct Rgb {
  double r, g, b;
};

// Blue -> light blue -> pale yellow -> orange -> red.
constexpr Rgb kRamp[5] = {{0x2c, 0x7b, 0xb6},
                          {0xab, 0xd9, 0xe9},
                          {0xff, 0xff, 0xbf},
                          {0xfd, 0xae, 0x61},
                          {0xd7, 0x19, 0x1c}};

std::string hex_color(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", int(std::lround(c.r)),
                int(std::lround(c.g)), int(std::lround(c.b)));
  return buf;
}

// Plot coordinates: two decimals is plenty at ~60 px/m and keeps files small.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string speed_color(double speed, double v_max) {
  double f = v_max > 0.0 ? std::abs(speed) / v_max : 0.0;
  f = std::clamp(f, 0.0, 1.0);
  const double scaled = f * 4.0;
  const int lo = std::min(3, int(scaled));
  const double t = scaled - double(lo);
  const Rgb& a = kRamp[lo];
  const Rgb& b = kRamp[lo + 1];
  return hex_color({a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t,
                    a.b + (b.b - a.b) * t});
}

std::string render_plot_svg(const OccupancyGrid& grid,
                            const std::vector<PathPoint>& reference,
                            const TrajectoryLog& log, double v_max) {
  const double world_w = grid.max_x() - grid.origin_x();
  const double world_h = grid.max_y() - grid.origin_y();
  const double svg_w = 800.0;
  const double scale = svg_w / world_w;
  const double svg_h = world_h * scale;

  auto sx = [&](double x) { return (x - grid.origin_x()) * scale; };
  auto sy = [&](double y) { return (grid.max_y() - y) * scale; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + px(svg_w) +
         " " + px(svg_h + 40.0) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + px(svg_w) + "\" height=\"" +
         px(svg_h + 40.0) + "\" fill=\"#ffffff\"/>\n";

  // Occupied cells, merged into horizontal runs to keep the file compact.
  out += "<g fill=\"#37474f\">\n";
  for (std::size_t iy = 0; iy < grid.height(); ++iy) {
    std::size_t ix = 0;
    while (ix < grid.width()) {
      if (!grid.occupied(ix, iy)) {
        ++ix;
        continue;
      }
      std::size_t end = ix;
      while (end < grid.width() && grid.occupied(end, iy)) ++end;
      const double x0 = grid.origin_x() + double(ix) * grid.resolution();
      const double x1 = grid.origin_x() + double(end) * grid.resolution();
      const double y1 = grid.origin_y() + double(iy + 1) * grid.resolution();
      out += "<rect x=\"" + px(sx(x0)) + "\" y=\"" + px(sy(y1)) +
             "\" width=\"" + px((x1 - x0) * scale) + "\" height=\"" +
             px(grid.resolution() * scale) + "\"/>\n";
      ix = end;
    }
  }
  out += "</g>\n";

  if (!reference.empty()) {
    out += "<polyline fill=\"none\" stroke=\"#9e9e9e\" stroke-width=\"2\" "
           "points=\"";
    for (const auto& p : reference) {
      out += px(sx(p.x)) + "," + px(sy(p.y)) + " ";
    }
    out += "\"/>\n";
  }

  // Driven trajectory, one segment per step, colored by achieved speed.
  out += "<g fill=\"none\" stroke-width=\"3\" stroke-linecap=\"round\">\n";
  for (std::size_t i = 1; i < log.records.size(); ++i) {
    const auto& a = log.records[i - 1].pose;
    const auto& b = log.records[i].pose;
    out += "<line x1=\"" + px(sx(a.x)) + "\" y1=\"" + px(sy(a.y)) +
           "\" x2=\"" + px(sx(b.x)) + "\" y2=\"" + px(sy(b.y)) +
           "\" stroke=\"" + speed_color(log.records[i].achieved_v, v_max) +
           "\"/>\n";
  }
  out += "</g>\n";

  if (!log.records.empty()) {
    const auto& s = log.records.front().pose;
    out += "<circle cx=\"" + px(sx(s.x)) + "\" cy=\"" + px(sy(s.y)) +
           "\" r=\"5\" fill=\"none\" stroke=\"#2e7d32\" stroke-width=\"2\"/>\n";
  }
  if (!reference.empty()) {
    const auto& g = reference.back();
    out += "<circle cx=\"" + px(sx(g.x)) + "\" cy=\"" + px(sy(g.y)) +
           "\" r=\"5\" fill=\"none\" stroke=\"#424242\" stroke-width=\"2\"/>\n";
  }

  // Speed legend along the bottom edge.
  const double bar_w = 40.0;
  for (int i = 0; i < 5; ++i) {
    out += "<rect x=\"" + px(10.0 + bar_w * i) + "\" y=\"" + px(svg_h + 10.0) +
           "\" width=\"" + px(bar_w) + "\" height=\"12\" fill=\"" +
           speed_color(v_max * double(i) / 4.0, v_max) + "\"/>\n";
  }
  out += "<text x=\"" + px(10.0) + "\" y=\"" + px(svg_h + 36.0) +
         "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">speed "
         "0 to " +
         px(v_max) + " m/s</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace pursuit
