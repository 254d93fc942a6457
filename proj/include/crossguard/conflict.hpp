#ifndef CROSSGUARD_CONFLICT_HPP
#define CROSSGUARD_CONFLICT_HPP

#include <string>
#include <vector>

#include "crossguard/guideway.hpp"

namespace crossguard::geom {

struct ArcInterval {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
};

/// Region where two guideways overlap, with the arc-length window each
/// centerline spends inside it.
struct ConflictZone {
  std::string id;
  std::string guideway_a;
  std::string guideway_b;
  Polygon polygon;
  ArcInterval interval_a;
  ArcInterval interval_b;

  const ArcInterval& interval_on(const std::string& guideway_id) const;
  const std::string& other_guideway(const std::string& guideway_id) const;
};

/// One zone per connected component of the polygon intersection; empty when
/// the guideways are disjoint. Symmetric in its arguments up to role swap.
std::vector<ConflictZone> conflict_zones(const Guideway& a, const Guideway& b);

/// Backward-reachable stretch of a threat guideway upstream of a conflict zone.
struct BlindZone {
  std::string id;
  std::string conflict_zone_id;
  std::string threat_guideway;
  ArcInterval interval;  // on the threat centerline, ends at the zone entry
  Polygon polygon;       // empty when the interval has zero length
  double tau = 0.0;      // s
  double v_max = 0.0;    // ft/s
};

BlindZone blind_zone(const ConflictZone& zone, const Guideway& threat,
                     double v_max, double tau);

}  // namespace crossguard::geom

#endif
