#include "crossguard/geometry.hpp"

#include <algorithm>
#include <cmath>

#define BOOST_ALLOW_DEPRECATED_HEADERS
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/geometries.hpp>
#include <boost/geometry/geometries/point_xy.hpp>

namespace bg = boost::geometry;

namespace crossguard::geom {

namespace {

using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint>;  // clockwise, closed (boost default)
using BMulti = bg::model::multi_polygon<BPolygon>;
using BLine = bg::model::linestring<BPoint>;

BPolygon to_boost(const Polygon& p) {
  BPolygon out;
  for (const auto& v : p.vertices()) bg::append(out.outer(), BPoint(v.x, v.y));
  bg::correct(out);
  return out;
}

std::vector<Polygon> from_boost(const BMulti& m) {
  std::vector<Polygon> out;
  for (const auto& poly : m) {
    std::vector<Point2D> ring;
    const auto& outer = poly.outer();
    // boost rings are closed; drop the repeated last point
    for (std::size_t i = 0; i + 1 < outer.size(); ++i)
      ring.push_back({bg::get<0>(outer[i]), bg::get<1>(outer[i])});
    if (ring.size() >= 3) out.emplace_back(std::move(ring));
    // interior rings do not occur for the shapes this library builds
    // (strip intersections and radial shadow unions are hole-free)
  }
  return out;
}

BMulti to_boost(const std::vector<Polygon>& ps) {
  BMulti m;
  for (const auto& p : ps) m.push_back(to_boost(p));
  return m;
}

constexpr double kEps = 1e-9;

}  // namespace

double dot(Point2D a, Point2D b) { return a.x * b.x + a.y * b.y; }
double cross(Point2D a, Point2D b) { return a.x * b.y - a.y * b.x; }
double norm(Point2D a) { return std::hypot(a.x, a.y); }
double distance(Point2D a, Point2D b) { return norm(a - b); }

Point2D normalized(Point2D a) {
  double n = norm(a);
  if (n < kEps) throw GeometryError("cannot normalize zero vector");
  return {a.x / n, a.y / n};
}

Point2D rot90(Point2D p, int quarter_turns) {
  int k = ((quarter_turns % 4) + 4) % 4;
  for (int i = 0; i < k; ++i) p = Point2D{-p.y, p.x};
  return p;
}

Polyline::Polyline(std::vector<Point2D> points) : pts_(std::move(points)) {
  if (pts_.size() < 2) throw GeometryError("polyline needs at least 2 points");
  arc_.resize(pts_.size());
  arc_[0] = 0.0;
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    double d = distance(pts_[i - 1], pts_[i]);
    if (d < kEps) throw GeometryError("polyline has coincident consecutive points");
    arc_[i] = arc_[i - 1] + d;
  }
}

Point2D Polyline::point_at(double s) const {
  if (s <= 0.0) return pts_.front();
  if (s >= length()) return pts_.back();
  auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - arc_.begin());
  double t = (s - arc_[i - 1]) / (arc_[i] - arc_[i - 1]);
  return pts_[i - 1] + (pts_[i] - pts_[i - 1]) * t;
}

Point2D Polyline::tangent_at(double s) const {
  std::size_t i = 1;
  if (s > 0.0) {
    auto it = std::upper_bound(arc_.begin(), arc_.end(), std::min(s, length() - kEps));
    i = std::min(static_cast<std::size_t>(it - arc_.begin()), pts_.size() - 1);
  }
  return normalized(pts_[i] - pts_[i - 1]);
}

double Polyline::project(Point2D p) const {
  double best_s = 0.0, best_d = std::numeric_limits<double>::max();
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    Point2D a = pts_[i - 1], d = pts_[i] - pts_[i - 1];
    double len2 = dot(d, d);
    double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    Point2D q = a + d * t;
    double dist = distance(p, q);
    if (dist < best_d) {
      best_d = dist;
      best_s = arc_[i - 1] + t * std::sqrt(len2);
    }
  }
  return best_s;
}

Polyline Polyline::slice(double s0, double s1) const {
  s0 = std::clamp(s0, 0.0, length());
  s1 = std::clamp(s1, 0.0, length());
  if (s1 - s0 < kEps) throw GeometryError("degenerate polyline slice");
  std::vector<Point2D> out;
  out.push_back(point_at(s0));
  for (std::size_t i = 0; i < pts_.size(); ++i)
    if (arc_[i] > s0 + kEps && arc_[i] < s1 - kEps) out.push_back(pts_[i]);
  out.push_back(point_at(s1));
  return Polyline(std::move(out));
}

Polygon::Polygon(std::vector<Point2D> vertices) : vtx_(std::move(vertices)) {
  if (vtx_.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
  double a2 = 0.0;
  for (std::size_t i = 0; i < vtx_.size(); ++i) {
    const auto& p = vtx_[i];
    const auto& q = vtx_[(i + 1) % vtx_.size()];
    a2 += cross(p, q);
  }
  if (std::fabs(a2) < kEps) throw GeometryError("degenerate polygon");
  if (a2 < 0.0) std::reverse(vtx_.begin(), vtx_.end());
}

double Polygon::area() const {
  if (vtx_.empty()) return 0.0;
  double a2 = 0.0;
  for (std::size_t i = 0; i < vtx_.size(); ++i)
    a2 += cross(vtx_[i], vtx_[(i + 1) % vtx_.size()]);
  return 0.5 * a2;
}

Point2D Polygon::centroid() const {
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < vtx_.size(); ++i) {
    const auto& p = vtx_[i];
    const auto& q = vtx_[(i + 1) % vtx_.size()];
    double w = cross(p, q);
    a2 += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

bool Polygon::contains(Point2D p) const {
  bool in = false;
  std::size_t n = vtx_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = vtx_[j];
    const auto& b = vtx_[i];
    // on-edge check
    Point2D ab = b - a;
    double t = dot(p - a, ab);
    if (t >= 0 && t <= dot(ab, ab) && std::fabs(cross(ab, p - a)) < 1e-7 * (norm(ab) + 1.0))
      return true;
    if ((b.y > p.y) != (a.y > p.y)) {
      double xi = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < xi) in = !in;
    }
  }
  return in;
}

Polygon Polygon::rectangle(Point2D center, double length, double width, Point2D heading) {
  Point2D f = normalized(heading);
  Point2D n{-f.y, f.x};
  Point2D hl = f * (length / 2.0), hw = n * (width / 2.0);
  return Polygon({center + hl + hw, center - hl + hw, center - hl - hw, center + hl - hw});
}

double polygons_area(const std::vector<Polygon>& ps) {
  double a = 0.0;
  for (const auto& p : ps) a += p.area();
  return a;
}

std::vector<Polygon> intersect(const Polygon& a, const Polygon& b) {
  BMulti out;
  bg::intersection(to_boost(a), to_boost(b), out);
  return from_boost(out);
}

std::vector<Polygon> intersect(const std::vector<Polygon>& a, const std::vector<Polygon>& b) {
  BMulti out;
  bg::intersection(to_boost(a), to_boost(b), out);
  return from_boost(out);
}

std::vector<Polygon> unite(const std::vector<Polygon>& ps) {
  BMulti acc;
  for (const auto& p : ps) {
    BMulti next;
    bg::union_(acc, to_boost(p), next);
    acc = std::move(next);
  }
  return from_boost(acc);
}

std::vector<Polygon> subtract(const Polygon& a, const std::vector<Polygon>& b) {
  BMulti out;
  bg::difference(to_boost(a), to_boost(b), out);
  return from_boost(out);
}

bool segment_crosses_interior(Point2D a, Point2D b, const Polygon& poly) {
  // midpoint-inside or a proper edge crossing that enters the interior
  const auto& v = poly.vertices();
  std::size_t n = v.size();
  double t_enter = -1.0;
  int crossings = 0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    Point2D p = v[j], q = v[i];
    Point2D r = b - a, s = q - p;
    double den = cross(r, s);
    if (std::fabs(den) < 1e-12) continue;
    double t = cross(p - a, s) / den;
    double u = cross(p - a, r) / den;
    if (t > 1e-9 && t < 1.0 - 1e-9 && u >= -1e-12 && u <= 1.0 + 1e-12) {
      ++crossings;
      if (t_enter < 0 || t < t_enter) t_enter = t;
    }
  }
  if (crossings >= 2) return true;
  if (poly.contains(a * 0.5 + b * 0.5)) return true;
  if (crossings == 1) {
    // one crossing: interior touched iff an endpoint region lies inside
    Point2D mid_in = a + (b - a) * (t_enter * 0.5);
    Point2D mid_out = a + (b - a) * (t_enter + (1.0 - t_enter) * 0.5);
    return poly.contains(mid_in) || poly.contains(mid_out);
  }
  return false;
}

Polygon thicken(const Polyline& centerline, double width) {
  if (width <= 0.0) throw GeometryError("thicken: width must be positive");
  if (centerline.length() < kEps) throw GeometryError("thicken: degenerate centerline");
  BLine line;
  for (const auto& p : centerline.points()) line.push_back(BPoint(p.x, p.y));
  BMulti out;
  bg::strategy::buffer::distance_symmetric<double> dist(width / 2.0);
  bg::strategy::buffer::side_straight side;
  bg::strategy::buffer::join_round join(32);  // 16 segments per semicircle
  bg::strategy::buffer::end_flat end;
  bg::strategy::buffer::point_circle circle(32);
  bg::buffer(line, out, dist, side, join, end, circle);
  auto polys = from_boost(out);
  if (polys.size() != 1) throw GeometryError("thicken: offset produced no single polygon");
  return polys.front();
}

double max_discrete_curvature(const Polyline& pl) {
  const auto& p = pl.points();
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    Point2D a = p[i] - p[i - 1], b = p[i + 1] - p[i], c = p[i + 1] - p[i - 1];
    double den = norm(a) * norm(b) * norm(c);
    if (den < kEps) continue;
    worst = std::max(worst, 2.0 * std::fabs(cross(a, b)) / den);
  }
  return worst;
}

Polyline build_centerline(Point2D entry, Point2D entry_heading,
                          Point2D exit, Point2D exit_heading,
                          double max_curvature) {
  if (max_curvature <= 0.0) throw GeometryError("build_centerline: max_curvature must be positive");
  Point2D h0 = normalized(entry_heading);
  Point2D h1 = normalized(exit_heading);
  Point2D chord = exit - entry;
  double chord_len = norm(chord);
  if (chord_len < kEps) throw GeometryError("build_centerline: entry equals exit");

  double den = cross(h0, h1);
  if (std::fabs(den) < 1e-9) {
    // parallel headings: straight through, or an offset pair we cannot join
    if (dot(h0, h1) < 0.0)
      throw GeometryError("build_centerline: opposing headings (u-turn) unsupported");
    if (std::fabs(cross(h0, chord)) > 1e-6 * chord_len)
      throw GeometryError("build_centerline: parallel but offset poses exceed curvature cap");
    if (dot(h0, chord) <= 0.0)
      throw GeometryError("build_centerline: exit lies behind entry");
    return Polyline({entry, exit});
  }

  // control point at the intersection of the two heading lines
  double t = cross(chord, h1) / den;  // distance forward along entry heading
  double s = cross(h0, chord) / den;  // distance back along exit heading
  if (t <= kEps || s <= kEps)
    throw GeometryError("build_centerline: heading lines do not form a forward turn");
  Point2D ctrl = entry + h0 * t;

  int n = std::max(8, static_cast<int>(std::ceil(chord_len + t)));  // <= ~1 ft spacing
  std::vector<Point2D> pts;
  pts.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    double u = static_cast<double>(i) / n, w = 1.0 - u;
    pts.push_back(entry * (w * w) + ctrl * (2.0 * w * u) + exit * (u * u));
  }
  Polyline out(std::move(pts));
  double k = max_discrete_curvature(out);
  if (k > max_curvature * (1.0 + 1e-6))
    throw GeometryError("build_centerline: required curvature " + std::to_string(k) +
                        " exceeds cap " + std::to_string(max_curvature));
  return out;
}

}  // namespace crossguard::geom
