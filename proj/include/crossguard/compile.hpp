#ifndef CROSSGUARD_COMPILE_HPP
#define CROSSGUARD_COMPILE_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "crossguard/conflict.hpp"
#include "crossguard/mapfile.hpp"
#include "crossguard/signal_state.hpp"

namespace crossguard::cli {

/// Speeds and curvature limits used to derive guideway geometry, traversal
/// times tau, and blind-zone extents.
struct CompileProfile {
  double v_max_vehicle = 50.0;   // ft/s, threat speed on vehicle guideways
  double v_max_bicycle = 15.0;
  double v_max_pedestrian = 6.0;
  double design_vehicle_through = 44.0;  // ft/s
  double design_vehicle_turn = 15.0;
  double design_bicycle_through = 12.0;
  double design_bicycle_turn = 10.0;
  double design_pedestrian = 4.0;
  double max_curvature_vehicle = 1.0 / 25.0;  // 1/ft
  double max_curvature_bicycle = 1.0 / 10.0;
  double guideway_width_vehicle = 11.0;  // ft
  double guideway_width_bicycle = 4.0;
  double tau_speed_factor = 0.8;

  double v_max(geom::Mode m) const;
  double design_speed(const geom::Movement& m) const;
};

struct CompiledIntersection {
  std::string name;
  CompileProfile profile;
  std::vector<geom::Guideway> guideways;           // sorted by id
  std::vector<geom::ConflictZone> zones;           // all pairs, sorted by id
  std::vector<geom::BlindZone> blind_zones;        // two per zone
  std::map<std::string, double> tau;               // per guideway id
  sig::ConflictMatrix matrix;                      // over movement ids
  sig::SignalFaces faces;
  sig::PhaseCatalog catalog;
  sig::PhasePlan plan;

  const geom::Guideway& guideway(const std::string& id) const;
  const geom::ConflictZone& zone(const std::string& id) const;
  const geom::BlindZone& blind(const std::string& zone_id,
                               const std::string& threat_guideway) const;
  /// Zones touching one guideway.
  std::vector<const geom::ConflictZone*> zones_of(const std::string& guideway_id) const;
  const std::string& movement_of(const std::string& guideway_id) const;
};

CompiledIntersection compile(const IntersectionMapFile& map,
                             const CompileProfile& profile = {});

/// Canonical text form of the compiled artifact; byte-identical for
/// identical inputs.
void write_compiled(const CompiledIntersection& c, std::ostream& os);

}  // namespace crossguard::cli

#endif
