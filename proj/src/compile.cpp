#include "crossguard/compile.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

namespace crossguard::cli {

using geom::Guideway;
using geom::Mode;
using geom::Movement;
using geom::Point2D;
using geom::Polyline;
using geom::Protection;
using geom::Turn;
using sig::Indication;

double CompileProfile::v_max(Mode m) const {
  switch (m) {
    case Mode::Vehicle: return v_max_vehicle;
    case Mode::Bicycle: return v_max_bicycle;
    case Mode::Pedestrian: return v_max_pedestrian;
  }
  return v_max_vehicle;
}

double CompileProfile::design_speed(const Movement& m) const {
  switch (m.mode) {
    case Mode::Vehicle:
      return m.turn == Turn::Through ? design_vehicle_through : design_vehicle_turn;
    case Mode::Bicycle:
      return m.turn == Turn::Through ? design_bicycle_through : design_bicycle_turn;
    case Mode::Pedestrian: return design_pedestrian;
  }
  return design_vehicle_turn;
}

const Guideway& CompiledIntersection::guideway(const std::string& id) const {
  for (const auto& g : guideways)
    if (g.id == id) return g;
  throw MapError("unknown guideway " + id);
}

const geom::ConflictZone& CompiledIntersection::zone(const std::string& id) const {
  for (const auto& z : zones)
    if (z.id == id) return z;
  throw MapError("unknown conflict zone " + id);
}

const geom::BlindZone& CompiledIntersection::blind(const std::string& zone_id,
                                                   const std::string& threat_guideway) const {
  for (const auto& b : blind_zones)
    if (b.conflict_zone_id == zone_id && b.threat_guideway == threat_guideway) return b;
  throw MapError("no blind zone for " + zone_id + " threat " + threat_guideway);
}

std::vector<const geom::ConflictZone*> CompiledIntersection::zones_of(
    const std::string& guideway_id) const {
  std::vector<const geom::ConflictZone*> out;
  for (const auto& z : zones)
    if (z.guideway_a == guideway_id || z.guideway_b == guideway_id) out.push_back(&z);
  return out;
}

const std::string& CompiledIntersection::movement_of(const std::string& guideway_id) const {
  return guideway(guideway_id).movement.id();  // movement id, tag stripped
}

namespace {

void validate_map(const IntersectionMapFile& map) {
  std::set<std::string> lane_ids;
  for (const auto& l : map.lanes) {
    if (!lane_ids.insert(l.id).second) throw MapError("duplicate lane id " + l.id);
    if (l.width <= 0) throw MapError("lane " + l.id + " has nonpositive width");
  }
  std::set<std::string> gw_ids;
  for (const auto& m : map.movements) {
    if (!map.lane(m.entry_lane))
      throw MapError("movement " + m.movement.id() + " references missing entry lane '" +
                     m.entry_lane + "'");
    if (!map.lane(m.exit_lane))
      throw MapError("movement " + m.movement.id() + " references missing exit lane '" +
                     m.exit_lane + "'");
    if (!gw_ids.insert(m.guideway_id()).second)
      throw MapError("duplicate guideway " + m.guideway_id());
    if (m.movement.mode == Mode::Pedestrian)
      throw MapError("pedestrian movements come from crosswalk lines");
  }
  for (const auto& c : map.crosswalks) {
    if (c.width <= 0) throw MapError("crosswalk width must be positive");
    if (c.label.empty()) throw MapError("crosswalk needs a label");
  }
}

}  // namespace

CompiledIntersection compile(const IntersectionMapFile& map, const CompileProfile& profile) {
  validate_map(map);
  CompiledIntersection c;
  c.name = map.name;
  c.profile = profile;

  for (const auto& spec : map.movements) {
    const LaneSpec* in = map.lane(spec.entry_lane);
    const LaneSpec* out = map.lane(spec.exit_lane);
    double cap = spec.movement.mode == Mode::Bicycle ? profile.max_curvature_bicycle
                                                     : profile.max_curvature_vehicle;
    Polyline core = geom::build_centerline(in->point, in->heading, out->point, out->heading, cap);
    std::vector<Point2D> pts;
    if (map.runway > 0)
      pts.push_back(in->point - geom::normalized(in->heading) * map.runway);
    for (const auto& p : core.points()) pts.push_back(p);
    double width = spec.movement.mode == Mode::Bicycle ? profile.guideway_width_bicycle
                                                       : profile.guideway_width_vehicle;
    Guideway g = geom::make_guideway(spec.movement, Polyline(std::move(pts)), width,
                                     map.runway, spec.entry_lane, spec.exit_lane);
    g.id = spec.guideway_id();
    c.guideways.push_back(std::move(g));
  }
  for (const auto& cw : map.crosswalks) {
    Movement m{cw.leg, Turn::Through, Mode::Pedestrian, cw.label, Protection::Protected};
    Guideway g = geom::make_guideway(m, Polyline({cw.a, cw.b}), cw.width, 0.0, "", "");
    c.guideways.push_back(std::move(g));
  }
  std::sort(c.guideways.begin(), c.guideways.end(),
            [](const Guideway& a, const Guideway& b) { return a.id < b.id; });

  for (std::size_t i = 0; i < c.guideways.size(); ++i)
    for (std::size_t j = i + 1; j < c.guideways.size(); ++j) {
      auto zs = geom::conflict_zones(c.guideways[i], c.guideways[j]);
      for (auto& z : zs) c.zones.push_back(std::move(z));
    }
  std::sort(c.zones.begin(), c.zones.end(),
            [](const geom::ConflictZone& a, const geom::ConflictZone& b) { return a.id < b.id; });

  // traversal time to clear the furthest zone, from the stop bar
  for (const auto& g : c.guideways) {
    double furthest = g.centerline.length();
    double worst = 0.0;
    for (const auto* z : c.zones_of(g.id))
      worst = std::max(worst, z->interval_on(g.id).end - g.stop_bar_arc);
    if (worst <= 0.0) worst = furthest - g.stop_bar_arc;
    double v = profile.tau_speed_factor * profile.design_speed(g.movement);
    c.tau[g.id] = worst / v;
  }

  for (const auto& z : c.zones) {
    const Guideway& ga = c.guideway(z.guideway_a);
    const Guideway& gb = c.guideway(z.guideway_b);
    c.blind_zones.push_back(
        geom::blind_zone(z, gb, profile.v_max(gb.movement.mode), c.tau.at(ga.id)));
    c.blind_zones.push_back(
        geom::blind_zone(z, ga, profile.v_max(ga.movement.mode), c.tau.at(gb.id)));
  }

  // conflict matrix over movement ids (parallel guideways of one movement OR)
  {
    std::vector<Movement> movements;
    std::set<std::string> seen;
    for (const auto& g : c.guideways)
      if (seen.insert(g.movement.id()).second) movements.push_back(g.movement);
    std::size_t n = movements.size();
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) idx[movements[i].id()] = i;
    std::vector<std::vector<bool>> bits(n, std::vector<bool>(n, false));
    for (const auto& z : c.zones) {
      const auto& ma = c.movement_of(z.guideway_a);
      const auto& mb = c.movement_of(z.guideway_b);
      if (ma == mb) continue;
      bits[idx[ma]][idx[mb]] = bits[idx[mb]][idx[ma]] = true;
    }
    c.matrix = sig::ConflictMatrix(std::move(movements), std::move(bits));
  }

  c.faces = map.faces;

  // expand state specs into full phase states
  for (const auto& st : map.states) {
    sig::PhaseState ps;
    ps.id = st.id;
    for (const auto& mv : c.matrix.movements())
      ps.indications[mv.id()] =
          mv.mode == Mode::Pedestrian ? Indication::DontWalk : Indication::Red;
    // permissive movements with no arrow of their own follow the approach ball
    for (const auto& mv : c.matrix.movements()) {
      if (mv.protection != Protection::Permissive) continue;
      for (const auto& other : c.matrix.movements()) {
        if (other.approach == mv.approach && other.turn == Turn::Through &&
            other.mode == mv.mode && st.go.count(other.id()))
          ps.indications[mv.id()] = st.go.at(other.id());
      }
    }
    for (const auto& [mid, ind] : st.go) {
      if (!c.matrix.has(mid)) throw MapError("state " + st.id + " names unknown movement " + mid);
      ps.indications[mid] = ind;
    }
    auto bad = sig::validate_phase(ps, c.matrix);
    if (!bad.empty())
      throw MapError("state " + st.id + " gives right-of-way to conflicting movements " +
                     bad.front().first + " and " + bad.front().second);
    c.catalog.states.push_back(std::move(ps));
  }
  for (const auto& e : map.plan.entries)
    if (!c.catalog.has(e.state_id)) throw MapError("plan references unknown state " + e.state_id);
  c.plan = map.plan;

  // tied crosswalks must really be tied: walk only under a green ball
  for (const auto& f : c.faces.faces)
    for (const auto& ped : f.tied_pedestrian)
      for (const auto& st : c.catalog.states) {
        bool ball_green = false;
        for (const auto& b : f.ball_movements)
          if (st.at(b) == Indication::Green) ball_green = true;
        if (st.at(ped) == Indication::Walk && !ball_green)
          throw MapError("crosswalk " + ped + " declared tied to " +
                         std::string(geom::to_string(f.approach)) +
                         " but walks in state " + st.id + " without its ball");
      }
  return c;
}

void write_compiled(const CompiledIntersection& c, std::ostream& os) {
  char buf[256];
  os << "crossguard-compiled 1\n";
  os << "name " << c.name << "\n";
  auto put_poly = [&](const geom::Polygon& p) {
    for (const auto& v : p.vertices()) {
      std::snprintf(buf, sizeof buf, " %.3f,%.3f", v.x, v.y);
      os << buf;
    }
    os << "\n";
  };
  for (const auto& g : c.guideways) {
    std::snprintf(buf, sizeof buf, "guideway %s movement %s width %.3f stopbar %.3f tau %.3f\n",
                  g.id.c_str(), g.movement.id().c_str(), g.width, g.stop_bar_arc,
                  c.tau.at(g.id));
    os << buf;
    os << "  centerline";
    for (const auto& p : g.centerline.points()) {
      std::snprintf(buf, sizeof buf, " %.3f,%.3f", p.x, p.y);
      os << buf;
    }
    os << "\n  polygon";
    put_poly(g.polygon);
  }
  for (const auto& z : c.zones) {
    std::snprintf(buf, sizeof buf,
                  "zone %s a %s %.3f %.3f b %s %.3f %.3f area %.3f\n", z.id.c_str(),
                  z.guideway_a.c_str(), z.interval_a.start, z.interval_a.end,
                  z.guideway_b.c_str(), z.interval_b.start, z.interval_b.end,
                  z.polygon.area());
    os << buf;
    os << "  polygon";
    put_poly(z.polygon);
  }
  for (const auto& b : c.blind_zones) {
    std::snprintf(buf, sizeof buf,
                  "blindzone %s zone %s threat %s interval %.3f %.3f vmax %.3f tau %.3f\n",
                  b.id.c_str(), b.conflict_zone_id.c_str(), b.threat_guideway.c_str(),
                  b.interval.start, b.interval.end, b.v_max, b.tau);
    os << buf;
  }
  const auto& mvs = c.matrix.movements();
  for (const auto& a : mvs) {
    os << "conflicts " << a.id();
    for (const auto& b : mvs)
      if (a.id() != b.id() && c.matrix.conflicts(a.id(), b.id())) os << " " << b.id();
    os << "\n";
  }
  for (const auto& st : c.catalog.states) {
    os << "state " << st.id;
    for (const auto& [mid, ind] : st.indications)
      if (sig::is_go(ind)) os << " " << mid << "=" << sig::to_string(ind);
    os << "\n";
  }
  os << "plan";
  for (const auto& e : c.plan.entries) {
    std::snprintf(buf, sizeof buf, " %s:%g:%g", e.state_id.c_str(), e.duration, e.yellow_tail);
    os << buf;
  }
  os << "\n";
}

}  // namespace crossguard::cli
