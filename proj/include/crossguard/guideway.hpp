#ifndef CROSSGUARD_GUIDEWAY_HPP
#define CROSSGUARD_GUIDEWAY_HPP

#include <optional>
#include <string>

#include "crossguard/geometry.hpp"

namespace crossguard::geom {

enum class Approach { North, East, South, West };
enum class Turn { Left, Through, Right };
enum class Mode { Vehicle, Bicycle, Pedestrian };

/// How the signal treats a movement. Numbered phases are protected; right
/// turns are permissive (may roll on red after yielding); lefts with a
/// permissive window alongside their approach ball are protected-permissive.
enum class Protection { Protected, Permissive, ProtectedPermissive };

const char* to_string(Approach a);
const char* to_string(Turn t);
const char* to_string(Mode m);
Approach approach_from_string(const std::string& s);
Turn turn_from_string(const std::string& s);
Mode mode_from_string(const std::string& s);

struct Movement {
  Approach approach = Approach::South;
  Turn turn = Turn::Through;
  Mode mode = Mode::Vehicle;
  std::optional<std::string> phase_label;  // "phi1".."phi8", "P2"/"P4"/"P6"/"P8"
  Protection protection = Protection::Protected;

  std::string id() const;  // e.g. "veh:S:right", "ped:S"
};

struct Guideway {
  std::string id;
  Movement movement;
  Polyline centerline;   // starts at the stop bar minus any approach runway
  double width = 0.0;    // ft
  Polygon polygon;       // thicken(centerline, width)
  double stop_bar_arc = 0.0;  // arc position of the stop bar on the centerline
  std::string entry_lane_id;
  std::string exit_lane_id;
};

Guideway make_guideway(Movement movement, Polyline centerline, double width,
                       double stop_bar_arc, std::string entry_lane_id,
                       std::string exit_lane_id);

}  // namespace crossguard::geom

#endif
