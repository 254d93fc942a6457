#ifndef CROSSGUARD_GEOMETRY_HPP
#define CROSSGUARD_GEOMETRY_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crossguard::geom {

struct Point2D {
  double x = 0.0;  // ft
  double y = 0.0;  // ft
};

inline Point2D operator+(Point2D a, Point2D b) { return {a.x + b.x, a.y + b.y}; }
inline Point2D operator-(Point2D a, Point2D b) { return {a.x - b.x, a.y - b.y}; }
inline Point2D operator*(Point2D a, double k) { return {a.x * k, a.y * k}; }
double dot(Point2D a, Point2D b);
double cross(Point2D a, Point2D b);
double norm(Point2D a);
double distance(Point2D a, Point2D b);
Point2D normalized(Point2D a);
/// Rotate by a multiple of 90 degrees CCW (exact in floating point).
Point2D rot90(Point2D p, int quarter_turns);

class GeometryError : public std::runtime_error {
public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// Open polygonal chain with cached cumulative arc length per vertex.
class Polyline {
public:
  Polyline() = default;
  explicit Polyline(std::vector<Point2D> points);

  const std::vector<Point2D>& points() const { return pts_; }
  const std::vector<double>& arc() const { return arc_; }
  double length() const { return arc_.empty() ? 0.0 : arc_.back(); }
  std::size_t size() const { return pts_.size(); }

  Point2D point_at(double s) const;    // clamped to [0, length]
  Point2D tangent_at(double s) const;  // unit tangent of containing segment
  /// Arc length of the point on the polyline closest to p.
  double project(Point2D p) const;
  /// Sub-chain between two arc positions (s0 <= s1), endpoints interpolated.
  Polyline slice(double s0, double s1) const;

private:
  std::vector<Point2D> pts_;
  std::vector<double> arc_;
};

/// Simple polygon, counterclockwise, no holes.
class Polygon {
public:
  Polygon() = default;
  explicit Polygon(std::vector<Point2D> vertices);  // reorients to CCW

  const std::vector<Point2D>& vertices() const { return vtx_; }
  bool empty() const { return vtx_.empty(); }
  double area() const;
  Point2D centroid() const;
  bool contains(Point2D p) const;  // boundary counts as inside
  static Polygon rectangle(Point2D center, double length, double width, Point2D heading);

private:
  std::vector<Point2D> vtx_;
};

double polygons_area(const std::vector<Polygon>& ps);

/// Boolean operations on polygon sets (each set a union of disjoint simple polygons).
std::vector<Polygon> intersect(const Polygon& a, const Polygon& b);
std::vector<Polygon> intersect(const std::vector<Polygon>& a, const std::vector<Polygon>& b);
std::vector<Polygon> unite(const std::vector<Polygon>& ps);
std::vector<Polygon> subtract(const Polygon& a, const std::vector<Polygon>& b);

/// True if the open segment (a,b) passes through the polygon's interior.
bool segment_crosses_interior(Point2D a, Point2D b, const Polygon& poly);

/// Offset a centerline into the polygon of points within width/2 laterally.
/// Flat end caps, round joins (16 segments per semicircle).
Polygon thicken(const Polyline& centerline, double width);

/// Fit a sampled curve between two lane-center poses respecting a curvature cap.
/// Straight when the poses are collinear; otherwise a quadratic Bezier sampled
/// at <= 1 ft spacing. Throws GeometryError when the pose pair cannot be joined
/// without exceeding max_curvature.
Polyline build_centerline(Point2D entry, Point2D entry_heading,
                          Point2D exit, Point2D exit_heading,
                          double max_curvature);

/// Largest discrete (circumscribed-circle) curvature over interior vertices.
double max_discrete_curvature(const Polyline& pl);

}  // namespace crossguard::geom

#endif
