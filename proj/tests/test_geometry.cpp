#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "crossguard/geometry.hpp"
#include "oracles.hpp"

using namespace crossguard::geom;

TEST_CASE("polyline arc length and interpolation") {
  Polyline pl({{0, 0}, {0, 10}, {10, 10}});
  CHECK(pl.length() == doctest::Approx(20.0));
  auto p = pl.point_at(15.0);
  CHECK(p.x == doctest::Approx(5.0));
  CHECK(p.y == doctest::Approx(10.0));
  CHECK(pl.project({3, 12}) == doctest::Approx(13.0));
  CHECK_THROWS_AS(Polyline({{0, 0}}), GeometryError);
  CHECK_THROWS_AS(Polyline({{0, 0}, {0, 0}}), GeometryError);
}

TEST_CASE("polyline slice keeps interior vertices") {
  Polyline pl({{0, 0}, {0, 10}, {10, 10}});
  auto s = pl.slice(5, 15);
  CHECK(s.length() == doctest::Approx(10.0));
  CHECK(s.points().size() == 3);
}

TEST_CASE("polygon area, orientation, containment") {
  Polygon sq({{0, 0}, {4, 0}, {4, 4}, {0, 4}});
  CHECK(sq.area() == doctest::Approx(16.0));
  Polygon cw({{0, 0}, {0, 4}, {4, 4}, {4, 0}});  // given clockwise
  CHECK(cw.area() == doctest::Approx(16.0));     // reoriented
  CHECK(sq.contains({2, 2}));
  CHECK(sq.contains({0, 2}));  // boundary
  CHECK_FALSE(sq.contains({5, 2}));
  auto c = sq.centroid();
  CHECK(c.x == doctest::Approx(2.0));
  CHECK(c.y == doctest::Approx(2.0));
}

TEST_CASE("thicken straight segment gives the lane rectangle") {
  Polyline pl({{0, 0}, {0, 100}});
  Polygon p = thicken(pl, 12.0);
  CHECK(p.area() == doctest::Approx(1200.0).epsilon(0.001));
  for (double s = 0; s <= 100; s += 10) CHECK(p.contains(pl.point_at(s)));
}

TEST_CASE("thicken rejects bad input") {
  Polyline pl({{0, 0}, {0, 100}});
  CHECK_THROWS_AS(thicken(pl, 0.0), GeometryError);
  CHECK_THROWS_AS(thicken(pl, -3.0), GeometryError);
}

TEST_CASE("thicken L-shape matches the flat-cap offset oracle within 2%") {
  Polyline pl({{0, 0}, {0, 60}, {50, 60}});
  Polygon p = thicken(pl, 12.0);
  // Monte-Carlo point-in-offset oracle
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(-10, 60), uy(-10, 75);
  long n = 200000, hit_oracle = 0, agree = 0;
  for (long i = 0; i < n; ++i) {
    Point2D q{ux(rng), uy(rng)};
    bool o = oracles::in_flat_offset(q, pl, 12.0);
    bool m = p.contains(q);
    if (o) ++hit_oracle;
    if (o == m) ++agree;
  }
  double box_area = 70.0 * 85.0;
  double oracle_area = box_area * hit_oracle / n;
  CHECK(p.area() == doctest::Approx(oracle_area).epsilon(0.02));
  CHECK(static_cast<double>(agree) / n > 0.995);
}

TEST_CASE("offset containment invariant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point2D> pts{{0, 0}};
    Point2D dir{1, 0};
    for (int k = 0; k < 3; ++k) {
      dir = normalized({dir.x + 0.6 * u(rng), dir.y + 0.6 * u(rng)});
      pts.push_back(pts.back() + dir * (20.0 + 10.0 * u(rng)));
    }
    Polyline pl(pts);
    double w = 8.0;
    Polygon poly = thicken(pl, w);
    for (double s = 0; s < pl.length(); s += 1.0)
      CHECK(poly.contains(pl.point_at(s)));
    // every polygon vertex within w/2 + eps of the centerline
    for (const auto& v : poly.vertices()) {
      double s = pl.project(v);
      CHECK(distance(v, pl.point_at(s)) <= w / 2 + 0.1);
    }
  }
}

TEST_CASE("build_centerline straight through") {
  auto pl = build_centerline({0, 0}, {0, 1}, {0, 100}, {0, 1}, 1.0 / 25.0);
  CHECK(pl.size() == 2);
  CHECK(pl.length() == doctest::Approx(100.0));
  CHECK(max_discrete_curvature(pl) == doctest::Approx(0.0));
}

TEST_CASE("build_centerline perpendicular turn respects curvature cap") {
  // 30 ft offset right turn, cap 1/20
  auto pl = build_centerline({0, -30}, {0, 1}, {30, 0}, {1, 0}, 1.0 / 20.0);
  CHECK(max_discrete_curvature(pl) <= 0.05 + 1e-9);
  CHECK(distance(pl.points().front(), {0, -30}) < 1e-9);
  CHECK(distance(pl.points().back(), {30, 0}) < 1e-9);
  // tangency at both ends
  auto t0 = pl.tangent_at(0.0);
  CHECK(t0.y == doctest::Approx(1.0).epsilon(1e-3));
  auto t1 = pl.tangent_at(pl.length());
  CHECK(t1.x == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("build_centerline rejects infeasible turns") {
  // radius-5 turn against a 20 ft minimum radius
  CHECK_THROWS_AS(build_centerline({0, -5}, {0, 1}, {5, 0}, {1, 0}, 1.0 / 20.0),
                  GeometryError);
  // u-turn
  CHECK_THROWS_AS(build_centerline({0, 0}, {0, 1}, {10, 0}, {0, -1}, 1.0),
                  GeometryError);
  // parallel offset poses
  CHECK_THROWS_AS(build_centerline({0, 0}, {0, 1}, {10, 100}, {0, 1}, 1.0 / 25.0),
                  GeometryError);
}

TEST_CASE("boolean helpers") {
  Polygon a({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  Polygon b({{5, 5}, {15, 5}, {15, 15}, {5, 15}});
  auto inter = intersect(a, b);
  REQUIRE(inter.size() == 1);
  CHECK(inter[0].area() == doctest::Approx(25.0));
  auto uni = unite({a, b});
  CHECK(polygons_area(uni) == doctest::Approx(175.0));
  auto diff = subtract(a, {b});
  CHECK(polygons_area(diff) == doctest::Approx(75.0));
  Polygon far({{100, 100}, {110, 100}, {110, 110}, {100, 110}});
  CHECK(intersect(a, far).empty());
}

TEST_CASE("segment_crosses_interior") {
  Polygon sq({{0, 0}, {10, 0}, {10, 10}, {0, 10}});
  CHECK(segment_crosses_interior({-5, 5}, {15, 5}, sq));
  CHECK_FALSE(segment_crosses_interior({-5, 15}, {15, 15}, sq));
  CHECK_FALSE(segment_crosses_interior({-5, 10}, {15, 10}, sq));  // grazing edge
  CHECK(segment_crosses_interior({5, 5}, {15, 5}, sq));           // endpoint inside
}

TEST_CASE("rot90 exactness") {
  Point2D p{3.25, -1.5};
  auto q = rot90(p, 4);
  CHECK(q.x == p.x);
  CHECK(q.y == p.y);
  auto r = rot90(p, 1);
  CHECK(r.x == 1.5);
  CHECK(r.y == 3.25);
}
