#include "crossguard/conflict.hpp"

#include <algorithm>
#include <cmath>

namespace crossguard::geom {

namespace {

// Arc window the centerline spends inside the polygon, bracketing entry/exit.
ArcInterval centerline_window(const Polyline& cl, const Polygon& poly) {
  const auto& pts = cl.points();
  const auto& arc = cl.arc();
  std::ptrdiff_t first = -1, last = -1;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (poly.contains(pts[i])) {
      if (first < 0) first = static_cast<std::ptrdiff_t>(i);
      last = static_cast<std::ptrdiff_t>(i);
    }
  }
  if (first < 0) {
    // centerline misses the polygon (offset-only overlap): degenerate window
    // at the closest approach
    double s = cl.project(poly.centroid());
    return {s, s};
  }
  auto refine = [&](std::size_t out_i, std::size_t in_i) {
    Point2D a = pts[out_i], b = pts[in_i];
    double sa = arc[out_i], sb = arc[in_i];
    for (int it = 0; it < 30; ++it) {
      Point2D m = (a + b) * 0.5;
      double sm = (sa + sb) * 0.5;
      if (poly.contains(m)) {
        b = m;
        sb = sm;
      } else {
        a = m;
        sa = sm;
      }
    }
    return (sa + sb) * 0.5;
  };
  double entry = (first == 0) ? arc[0]
                              : refine(static_cast<std::size_t>(first - 1),
                                       static_cast<std::size_t>(first));
  double exit = (last == static_cast<std::ptrdiff_t>(pts.size()) - 1)
                    ? arc.back()
                    : refine(static_cast<std::size_t>(last + 1),
                             static_cast<std::size_t>(last));
  return {entry, exit};
}

}  // namespace

const ArcInterval& ConflictZone::interval_on(const std::string& guideway_id) const {
  if (guideway_id == guideway_a) return interval_a;
  if (guideway_id == guideway_b) return interval_b;
  throw GeometryError("guideway " + guideway_id + " not part of zone " + id);
}

const std::string& ConflictZone::other_guideway(const std::string& guideway_id) const {
  if (guideway_id == guideway_a) return guideway_b;
  if (guideway_id == guideway_b) return guideway_a;
  throw GeometryError("guideway " + guideway_id + " not part of zone " + id);
}

std::vector<ConflictZone> conflict_zones(const Guideway& a, const Guideway& b) {
  if (a.id == b.id) throw GeometryError("conflict_zones: a guideway cannot conflict with itself");
  // canonical evaluation order so (a,b) and (b,a) yield identical polygons
  const Guideway& lo = (a.id < b.id) ? a : b;
  const Guideway& hi = (a.id < b.id) ? b : a;
  auto pieces = intersect(lo.polygon, hi.polygon);
  std::vector<ConflictZone> zones;
  for (auto& piece : pieces) {
    if (piece.area() < 1e-6) continue;
    ConflictZone z;
    z.polygon = std::move(piece);
    ArcInterval wlo = centerline_window(lo.centerline, z.polygon);
    ArcInterval whi = centerline_window(hi.centerline, z.polygon);
    z.guideway_a = a.id;
    z.guideway_b = b.id;
    z.interval_a = (a.id == lo.id) ? wlo : whi;
    z.interval_b = (a.id == lo.id) ? whi : wlo;
    zones.push_back(std::move(z));
  }
  std::sort(zones.begin(), zones.end(), [&](const ConflictZone& x, const ConflictZone& y) {
    return x.interval_on(lo.id).start < y.interval_on(lo.id).start;
  });
  for (std::size_t i = 0; i < zones.size(); ++i)
    zones[i].id = "cz:" + lo.id + "+" + hi.id + ":" + std::to_string(i);
  return zones;
}

BlindZone blind_zone(const ConflictZone& zone, const Guideway& threat,
                     double v_max, double tau) {
  if (v_max <= 0.0) throw GeometryError("blind_zone: v_max must be positive");
  if (tau < 0.0) throw GeometryError("blind_zone: tau must be nonnegative");
  double entry = zone.interval_on(threat.id).start;
  double start = std::max(0.0, entry - v_max * tau);
  BlindZone bz;
  bz.id = "bz:" + zone.id + ":" + threat.id;
  bz.conflict_zone_id = zone.id;
  bz.threat_guideway = threat.id;
  bz.interval = {start, entry};
  bz.tau = tau;
  bz.v_max = v_max;
  if (entry - start > 1e-9)
    bz.polygon = thicken(threat.centerline.slice(start, entry), threat.width);
  return bz;
}

}  // namespace crossguard::geom
