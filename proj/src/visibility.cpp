#include "crossguard/visibility.hpp"

#include <algorithm>
#include <cmath>

namespace crossguard::geom {

namespace {

// Shadow cast by one simple polygon: for every edge facing the viewpoint,
// the quad from the edge out to beyond `range`, plus the body itself.
std::vector<Polygon> obstacle_shadow(Point2D view, const Polygon& obstacle, double range) {
  std::vector<Polygon> parts;
  const auto& v = obstacle.vertices();
  std::size_t n = v.size();
  double far = range * 3.0 + 1.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    Point2D a = v[j], b = v[i];
    // CCW polygon: interior on the left of a->b; edge faces the viewpoint
    // when the viewpoint is on the right.
    if (cross(b - a, view - a) >= -1e-12) continue;
    Point2D da = normalized(a - view), db = normalized(b - view);
    parts.push_back(Polygon({a, b, view + db * far, view + da * far}));
  }
  parts.push_back(obstacle);
  return parts;
}

Polygon range_disk(Point2D c, double r, int segments = 64) {
  std::vector<Point2D> pts;
  pts.reserve(segments);
  for (int i = 0; i < segments; ++i) {
    double ang = 2.0 * M_PI * i / segments;
    pts.push_back({c.x + r * std::cos(ang), c.y + r * std::sin(ang)});
  }
  return Polygon(std::move(pts));
}

}  // namespace

bool ShadowRegion::point_occluded(Point2D p) const {
  if (distance(p, viewpoint) > range) return false;
  for (const auto& poly : occluded)
    if (poly.contains(p)) return true;
  return false;
}

ShadowRegion shadow_region(Point2D viewpoint, const std::vector<Polygon>& obstacles,
                           double range) {
  if (range <= 0.0) throw GeometryError("shadow_region: range must be positive");
  for (const auto& ob : obstacles)
    if (ob.contains(viewpoint))
      throw GeometryError("shadow_region: viewpoint inside an obstacle");
  ShadowRegion out;
  out.viewpoint = viewpoint;
  out.obstacles = obstacles;
  out.range = range;
  std::vector<Polygon> shadow_parts;
  for (const auto& ob : obstacles) {
    auto parts = obstacle_shadow(viewpoint, ob, range);
    shadow_parts.insert(shadow_parts.end(), parts.begin(), parts.end());
  }
  if (shadow_parts.empty()) return out;
  auto merged = unite(shadow_parts);
  Polygon disk = range_disk(viewpoint, range);
  std::vector<Polygon> disk_set{disk};
  out.occluded = intersect(merged, disk_set);
  return out;
}

double visible_fraction(Point2D viewpoint, const std::vector<Polygon>& obstacles,
                        const Polygon& target) {
  double total = target.area();
  if (total <= 1e-9) throw GeometryError("visible_fraction: degenerate target");
  if (obstacles.empty()) return 1.0;
  double reach = 0.0;
  for (const auto& p : target.vertices()) reach = std::max(reach, distance(p, viewpoint));
  std::vector<Polygon> shadow_parts;
  for (const auto& ob : obstacles) {
    auto parts = obstacle_shadow(viewpoint, ob, reach);
    shadow_parts.insert(shadow_parts.end(), parts.begin(), parts.end());
  }
  auto merged = unite(shadow_parts);
  auto visible = subtract(target, merged);
  double frac = polygons_area(visible) / total;
  return std::clamp(frac, 0.0, 1.0);
}

bool point_visible(Point2D viewpoint, Point2D p, const std::vector<Polygon>& obstacles) {
  for (const auto& ob : obstacles)
    if (segment_crosses_interior(viewpoint, p, ob)) return false;
  return true;
}

}  // namespace crossguard::geom
