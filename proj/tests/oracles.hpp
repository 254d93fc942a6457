// Test-only brute-force oracles, independent of the library's geometry path.
#ifndef CROSSGUARD_TESTS_ORACLES_HPP
#define CROSSGUARD_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "crossguard/geometry.hpp"

namespace oracles {

using crossguard::geom::Point2D;
using crossguard::geom::Polygon;
using crossguard::geom::Polyline;

// Even-odd point-in-polygon, written separately from the library version.
inline bool pip(Point2D p, const Polygon& poly) {
  const auto& v = poly.vertices();
  bool in = false;
  for (size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      double xi = v[i].x + (p.y - v[i].y) * (v[j].x - v[i].x) / (v[j].y - v[i].y);
      if (p.x < xi) in = !in;
    }
  }
  return in;
}

struct Box {
  double xmin = 1e30, ymin = 1e30, xmax = -1e30, ymax = -1e30;
  void grow(const Polygon& p) {
    for (auto& v : p.vertices()) {
      xmin = std::min(xmin, v.x);
      xmax = std::max(xmax, v.x);
      ymin = std::min(ymin, v.y);
      ymax = std::max(ymax, v.y);
    }
  }
};

// Grid-sampled area of the intersection of two polygon sets.
inline double grid_intersection_area(const std::vector<Polygon>& a,
                                     const std::vector<Polygon>& b, double cell) {
  Box box;
  for (auto& p : a) box.grow(p);
  double area = 0.0;
  auto in_set = [](Point2D q, const std::vector<Polygon>& set) {
    for (auto& p : set)
      if (pip(q, p)) return true;
    return false;
  };
  for (double x = box.xmin + cell / 2; x < box.xmax; x += cell)
    for (double y = box.ymin + cell / 2; y < box.ymax; y += cell) {
      Point2D q{x, y};
      if (in_set(q, a) && in_set(q, b)) area += cell * cell;
    }
  return area;
}

inline double grid_area(const std::vector<Polygon>& set, double cell) {
  Box box;
  for (auto& p : set) box.grow(p);
  double area = 0.0;
  for (double x = box.xmin + cell / 2; x < box.xmax; x += cell)
    for (double y = box.ymin + cell / 2; y < box.ymax; y += cell) {
      for (auto& p : set)
        if (pip({x, y}, p)) {
          area += cell * cell;
          break;
        }
    }
  return area;
}

// Membership in the flat-capped offset of a polyline: some segment sees the
// point within width/2 under perpendicular projection, or the point is within
// width/2 of an interior vertex (round joins).
inline bool in_flat_offset(Point2D p, const Polyline& pl, double width) {
  const auto& v = pl.points();
  double r = width / 2;
  for (size_t i = 1; i < v.size(); ++i) {
    Point2D a = v[i - 1], d = v[i] - v[i - 1];
    double len2 = d.x * d.x + d.y * d.y;
    double t = ((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len2;
    if (t < 0.0 || t > 1.0) continue;
    Point2D q{a.x + d.x * t, a.y + d.y * t};
    if (std::hypot(p.x - q.x, p.y - q.y) <= r) return true;
  }
  for (size_t i = 1; i + 1 < v.size(); ++i)
    if (std::hypot(p.x - v[i].x, p.y - v[i].y) <= r) return true;
  return false;
}

// Segment strictly crossing a polygon interior, via dense sampling.
inline bool ray_blocked(Point2D view, Point2D target, const std::vector<Polygon>& obstacles,
                        int samples = 400) {
  for (int i = 1; i < samples; ++i) {
    double t = static_cast<double>(i) / samples;
    Point2D q{view.x + (target.x - view.x) * t, view.y + (target.y - view.y) * t};
    for (auto& ob : obstacles)
      if (pip(q, ob)) return true;
  }
  return false;
}

// Grid+ray visible fraction of a target polygon.
inline double ray_visible_fraction(Point2D view, const std::vector<Polygon>& obstacles,
                                   const Polygon& target, double cell) {
  Box box;
  box.grow(target);
  long inside = 0, visible = 0;
  for (double x = box.xmin + cell / 2; x < box.xmax; x += cell)
    for (double y = box.ymin + cell / 2; y < box.ymax; y += cell) {
      Point2D q{x, y};
      if (!pip(q, target)) continue;
      ++inside;
      if (!ray_blocked(view, q, obstacles)) ++visible;
    }
  return inside == 0 ? 1.0 : static_cast<double>(visible) / inside;
}

}  // namespace oracles

#endif
