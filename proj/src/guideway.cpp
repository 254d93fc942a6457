#include "crossguard/guideway.hpp"

namespace crossguard::geom {

const char* to_string(Approach a) {
  switch (a) {
    case Approach::North: return "N";
    case Approach::East: return "E";
    case Approach::South: return "S";
    case Approach::West: return "W";
  }
  return "?";
}

const char* to_string(Turn t) {
  switch (t) {
    case Turn::Left: return "left";
    case Turn::Through: return "through";
    case Turn::Right: return "right";
  }
  return "?";
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Vehicle: return "veh";
    case Mode::Bicycle: return "bike";
    case Mode::Pedestrian: return "ped";
  }
  return "?";
}

Approach approach_from_string(const std::string& s) {
  if (s == "N") return Approach::North;
  if (s == "E") return Approach::East;
  if (s == "S") return Approach::South;
  if (s == "W") return Approach::West;
  throw GeometryError("unknown approach: " + s);
}

Turn turn_from_string(const std::string& s) {
  if (s == "left") return Turn::Left;
  if (s == "through") return Turn::Through;
  if (s == "right") return Turn::Right;
  throw GeometryError("unknown turn: " + s);
}

Mode mode_from_string(const std::string& s) {
  if (s == "veh") return Mode::Vehicle;
  if (s == "bike") return Mode::Bicycle;
  if (s == "ped") return Mode::Pedestrian;
  throw GeometryError("unknown mode: " + s);
}

std::string Movement::id() const {
  std::string out = to_string(mode);
  out += ":";
  out += to_string(approach);
  if (mode != Mode::Pedestrian) {
    out += ":";
    out += to_string(turn);
  }
  return out;
}

Guideway make_guideway(Movement movement, Polyline centerline, double width,
                       double stop_bar_arc, std::string entry_lane_id,
                       std::string exit_lane_id) {
  if (width <= 0.0) throw GeometryError("guideway width must be positive");
  Guideway g;
  g.id = movement.id();
  g.movement = movement;
  g.width = width;
  g.polygon = thicken(centerline, width);
  g.centerline = std::move(centerline);
  g.stop_bar_arc = stop_bar_arc;
  g.entry_lane_id = std::move(entry_lane_id);
  g.exit_lane_id = std::move(exit_lane_id);
  return g;
}

}  // namespace crossguard::geom
