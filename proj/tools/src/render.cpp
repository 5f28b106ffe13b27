#include <cstdio>
#include <limits>
#include <sstream>

#include "drivesim/cli/cli.hpp"

namespace drivesim::cli {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  // Avoid "-0.000000" so equal geometry always prints the same bytes.
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::string_view road_color(RoadKind kind) {
  switch (kind) {
    case RoadKind::kRoadEdge: return "#202020";
    case RoadKind::kLane: return "#9bb7d4";
    case RoadKind::kRoadLine: return "#d9b44a";
    case RoadKind::kCrosswalk: return "#b0b0b0";
    case RoadKind::kSpeedBump: return "#e07b39";
    case RoadKind::kStopSign: return "#c62828";
    case RoadKind::kDriveway: return "#8d6e63";
  }
  return "#000000";
}

std::string_view agent_color(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::kVehicle: return "#1e88e5";
    case ObjectKind::kPedestrian: return "#43a047";
    case ObjectKind::kCyclist: return "#8e24aa";
  }
  return "#000000";
}

struct Bounds {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(Vec2 p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  bool empty() const { return min_x > max_x; }
};

constexpr double kMargin = 5.0;
constexpr double kGoalRadius = 0.75;

}  // namespace

std::string render_svg(std::span<const RoadElement> roads, std::span<const RenderAgent> agents) {
  Bounds b;
  for (const RoadElement& road : roads) {
    for (Vec2 p : road.geometry) b.add(p);
  }
  for (const RenderAgent& a : agents) {
    for (Vec2 c : a.box.corners()) b.add(c);
    b.add(a.goal);
  }
  if (b.empty()) b = {-10.0, -10.0, 10.0, 10.0};
  const double x0 = b.min_x - kMargin;
  const double y0 = b.min_y - kMargin;
  const double w = b.max_x - b.min_x + 2.0 * kMargin;
  const double h = b.max_y - b.min_y + 2.0 * kMargin;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << num(x0) << ' '
      << num(-(y0 + h)) << ' ' << num(w) << ' ' << num(h) << "\">\n"
      << "<rect x=\"" << num(x0) << "\" y=\"" << num(-(y0 + h)) << "\" width=\"" << num(w)
      << "\" height=\"" << num(h) << "\" fill=\"#f7f7f2\"/>\n"
      << "<g transform=\"scale(1,-1)\">\n";
  for (const RoadElement& road : roads) {
    const std::string_view kind = to_string(road.kind);
    if (road.geometry.size() == 1) {
      svg << "<circle class=\"road " << kind << "\" data-id=\"" << road.id << "\" cx=\""
          << num(road.geometry[0].x) << "\" cy=\"" << num(road.geometry[0].y)
          << "\" r=\"0.800000\" fill=\"" << road_color(road.kind) << "\"/>\n";
      continue;
    }
    svg << "<polyline class=\"road " << kind << "\" data-id=\"" << road.id << "\" points=\"";
    for (std::size_t k = 0; k < road.geometry.size(); ++k) {
      svg << (k ? " " : "") << num(road.geometry[k].x) << ',' << num(road.geometry[k].y);
    }
    svg << "\" fill=\"none\" stroke=\"" << road_color(road.kind)
        << "\" stroke-width=\"" << (road.kind == RoadKind::kRoadEdge ? "0.400000" : "0.150000")
        << "\"/>\n";
  }
  for (const RenderAgent& a : agents) {
    svg << "<circle class=\"goal\" data-id=\"" << a.id << "\" cx=\"" << num(a.goal.x)
        << "\" cy=\"" << num(a.goal.y) << "\" r=\"" << num(kGoalRadius)
        << "\" fill=\"none\" stroke=\"" << agent_color(a.kind) << "\" stroke-width=\"0.150000\"/>\n";
  }
  for (const RenderAgent& a : agents) {
    svg << "<polygon class=\"agent " << to_string(a.kind) << "\" data-id=\"" << a.id
        << "\" points=\"";
    const auto corners = a.box.corners();
    for (std::size_t k = 0; k < corners.size(); ++k) {
      svg << (k ? " " : "") << num(corners[k].x) << ',' << num(corners[k].y);
    }
    svg << "\" fill=\"" << agent_color(a.kind) << "\" fill-opacity=\"0.7\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace drivesim::cli
