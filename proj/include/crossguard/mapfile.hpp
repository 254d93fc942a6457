#ifndef CROSSGUARD_MAPFILE_HPP
#define CROSSGUARD_MAPFILE_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crossguard/guideway.hpp"
#include "crossguard/signal_state.hpp"

namespace crossguard::cli {

class MapError : public std::runtime_error {
public:
  explicit MapError(const std::string& what) : std::runtime_error(what) {}
};

struct LaneSpec {
  std::string id;
  geom::Mode mode = geom::Mode::Vehicle;
  bool is_entry = true;
  geom::Point2D point;    // stop-bar center (entry) or lane end (exit)
  geom::Point2D heading;  // unit travel direction
  double width = 12.0;
};

struct MovementSpec {
  geom::Movement movement;
  std::string entry_lane;
  std::string exit_lane;
  std::string tag;  // disambiguates parallel guideways of one movement
  std::string guideway_id() const;
};

struct CrosswalkSpec {
  geom::Approach leg = geom::Approach::South;
  geom::Point2D a;
  geom::Point2D b;
  double width = 8.0;
  std::string label;  // "P2".."P8"
};

/// One named full-signal state; movements not listed are red / dont-walk and
/// permissive movements inherit their approach ball.
struct StateSpec {
  std::string id;
  std::map<std::string, sig::Indication> go;
};

struct IntersectionMapFile {
  int schema_version = 1;
  std::string name;
  double runway = 0.0;  // straight approach prepended to vehicle/bike guideways
  std::vector<LaneSpec> lanes;
  std::vector<MovementSpec> movements;
  std::vector<CrosswalkSpec> crosswalks;
  sig::SignalFaces faces;
  std::vector<StateSpec> states;
  sig::PhasePlan plan;

  const LaneSpec* lane(const std::string& id) const;
};

IntersectionMapFile parse_map(std::istream& is);
IntersectionMapFile parse_map_file(const std::string& path);
void write_map(const IntersectionMapFile& map, std::ostream& os);

/// Built-in fixtures: "fourleg-basic" and "tempe". Returns nullopt otherwise.
std::optional<IntersectionMapFile> builtin_map(const std::string& name);

}  // namespace crossguard::cli

#endif
