#include "crossguard/resolve.hpp"

#include <algorithm>

#include "crossguard/visibility.hpp"

namespace crossguard::resolve {

using geom::Protection;
using sig::Indication;

namespace {

constexpr double kSightThreshold = 0.995;  // blind zone must be this visible

bool is_stop(Indication i) { return i == Indication::Red || i == Indication::DontWalk; }

using Known = std::map<std::string, Indication>;

// Conflict-monitor exclusion: a numbered phase cannot be going while a
// distinct numbered phase it conflicts with is known to be going.
bool excluded_by_known_go(const std::string& m_id, const Known& known,
                          const sig::ConflictMatrix& matrix) {
  const auto& m = matrix.movement(m_id);
  if (!m.phase_label) return false;
  for (const auto& [g_id, ind] : known) {
    if (!sig::is_go(ind) || g_id == m_id) continue;
    const auto& g = matrix.movement(g_id);
    if (!g.phase_label || *g.phase_label == *m.phase_label) continue;
    if (matrix.conflicts(m_id, g_id)) return true;
  }
  return false;
}

const geom::Movement* approach_through(const sig::ConflictMatrix& matrix,
                                       const geom::Movement& of) {
  const geom::Movement* fallback = nullptr;
  for (const auto& m : matrix.movements()) {
    if (m.approach != of.approach || m.turn != geom::Turn::Through) continue;
    if (m.mode == of.mode) return &m;
    if (!fallback) fallback = &m;
  }
  return fallback;
}

// Can the movement legally enter the intersection, for all the ego knows?
bool can_move(const std::string& m_id, const Known& known, const sig::ConflictMatrix& matrix) {
  const auto& m = matrix.movement(m_id);
  auto it = known.find(m_id);
  if (it != known.end()) {
    if (sig::is_go(it->second)) return true;
    // a stopped permissive movement may still roll (right turn on red)
    return m.protection == Protection::Permissive;
  }
  switch (m.protection) {
    case Protection::Permissive:
      return true;
    case Protection::Protected:
      return !excluded_by_known_go(m_id, known, matrix);
    case Protection::ProtectedPermissive: {
      bool arrow_possible = !excluded_by_known_go(m_id, known, matrix);
      bool window_possible = true;  // permissive window while the approach ball is green
      if (const auto* thru = approach_through(matrix, m)) {
        auto w = known.find(thru->id());
        if (w != known.end())
          window_possible = sig::is_go(w->second);
        else
          window_possible = !excluded_by_known_go(thru->id(), known, matrix);
      }
      return arrow_possible || window_possible;
    }
  }
  return true;
}

// What the ego's signal face pins down.
Known known_from_face(const EgoContext& ego, const sig::SignalFaces& faces) {
  Known known;
  const sig::SignalFace& face = faces.at(ego.approach);
  auto ball = ego.approach_ball;
  auto arrow = ego.approach_arrow;
  bool ego_on_ball = std::find(face.ball_movements.begin(), face.ball_movements.end(),
                               ego.movement) != face.ball_movements.end();
  bool ego_on_arrow = std::find(face.arrow_movements.begin(), face.arrow_movements.end(),
                                ego.movement) != face.arrow_movements.end();
  if (!ball && ego_on_ball) ball = ego.own_indication;
  if (!arrow && ego_on_arrow) arrow = ego.own_indication;
  if (!ball && !ego_on_arrow) ball = ego.own_indication;  // unlisted movements ride the ball
  if (ball) {
    for (const auto& id : face.ball_movements) known[id] = *ball;
    if (is_stop(*ball))
      for (const auto& id : face.tied_pedestrian) known[id] = Indication::DontWalk;
  }
  if (arrow)
    for (const auto& id : face.arrow_movements) known[id] = *arrow;
  return known;
}

}  // namespace

const char* to_string(ZoneOccupancy s) {
  switch (s) {
    case ZoneOccupancy::Clear: return "clear";
    case ZoneOccupancy::Occupied: return "occupied";
    case ZoneOccupancy::Unknown: return "unknown";
  }
  return "?";
}

ZoneOccupancy zone_occupancy_from_string(const std::string& s) {
  if (s == "clear") return ZoneOccupancy::Clear;
  if (s == "occupied") return ZoneOccupancy::Occupied;
  if (s == "unknown") return ZoneOccupancy::Unknown;
  throw ResolveError("unknown occupancy: " + s);
}

std::vector<ConflictStatus> step3_part1(const EgoContext& ego,
                                        const sig::ConflictMatrix& matrix,
                                        const sig::SignalFaces& faces,
                                        const std::vector<ZoneRef>& zones) {
  Known known = known_from_face(ego, faces);
  std::vector<ConflictStatus> out;
  out.reserve(zones.size());
  for (const auto& z : zones) {
    ConflictStatus st;
    st.zone_id = z.zone->id;
    st.opposing_movement = z.opposing_movement;
    if (!can_move(z.opposing_movement, known, matrix)) {
      st.status = Status::ResolvedClear;
      st.reason = Reason::OwnSignal;
    }
    out.push_back(std::move(st));
  }
  return out;
}

namespace {

double distance_to_polygon(geom::Point2D p, const geom::Polygon& poly) {
  if (poly.contains(p)) return 0.0;
  double best = std::numeric_limits<double>::max();
  const auto& v = poly.vertices();
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    geom::Point2D a = v[j], d = v[i] - v[j];
    double len2 = geom::dot(d, d);
    double t = len2 > 0 ? std::clamp(geom::dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, geom::distance(p, a + d * t));
  }
  return best;
}

}  // namespace

void step3_part2(std::vector<ConflictStatus>& statuses, const EgoContext& ego,
                 const std::vector<ZoneRef>& zones) {
  for (auto& st : statuses) {
    if (st.status != Status::Unresolved) continue;
    const ZoneRef* zr = nullptr;
    for (const auto& z : zones)
      if (z.zone->id == st.zone_id) zr = &z;
    if (!zr || !zr->blind) continue;
    const geom::BlindZone& bz = *zr->blind;
    const geom::Polygon& zone_poly = zr->zone->polygon;
    // a visible user inside the zone, or moving inside the blind zone (or
    // near the zone, under the no-I2V caution margin), is a live threat
    bool threat_seen = false;
    for (const auto& a : ego.visible_agents) {
      if (zone_poly.contains(a.position)) {
        threat_seen = true;
        break;
      }
      bool moving = a.speed > 1.0;
      bool on_threat_path = a.guideway.empty() || a.guideway == bz.threat_guideway;
      if (moving && on_threat_path && !bz.polygon.empty() && bz.polygon.contains(a.position)) {
        threat_seen = true;
        break;
      }
      if (moving && ego.caution_margin > 0.0 &&
          distance_to_polygon(a.position, zone_poly) <= ego.caution_margin) {
        threat_seen = true;
        break;
      }
    }
    if (threat_seen) {
      st.status = Status::ResolvedThreat;
      st.reason = Reason::Sight;
      continue;
    }
    double f_zone = geom::visible_fraction(ego.viewpoint, ego.obstacle_polygons, zone_poly);
    double f_blind =
        bz.polygon.empty()
            ? 1.0
            : geom::visible_fraction(ego.viewpoint, ego.obstacle_polygons, bz.polygon);
    if (f_zone >= kSightThreshold && f_blind >= kSightThreshold) {
      st.status = Status::ResolvedClear;
      st.reason = Reason::Sight;
    }
  }
}

void step3_part3(std::vector<ConflictStatus>& statuses, const SpatInput& spat,
                 const sig::ConflictMatrix& matrix, const std::vector<ZoneRef>& zones) {
  (void)zones;
  Known full;
  for (const auto& [id, ind] : spat.state.indications) full[id] = ind;
  for (auto& st : statuses) {
    if (st.status != Status::Unresolved) continue;
    if (!can_move(st.opposing_movement, full, matrix)) {
      st.status = Status::ResolvedClear;
      st.reason = Reason::Spat;
    }
  }
}

namespace {

Decision decide(const std::vector<ConflictStatus>& statuses, const EgoContext& ego,
                const std::optional<SpatInput>& spat, const IcaReport* ica,
                bool ica_occupied, bool ica_unknown) {
  Decision d;
  for (const auto& st : statuses)
    if (st.status == Status::Unresolved) d.unresolved.push_back(st.zone_id);
  std::optional<double> remaining;
  if (spat) remaining = spat->estimate.expected_remaining;
  if (d.unresolved.empty()) {
    bool any_threat = std::any_of(statuses.begin(), statuses.end(), [](const ConflictStatus& s) {
      return s.status == Status::ResolvedThreat;
    });
    d.action = any_threat ? Action::ProceedCollisionAvoidance : Action::Proceed;
    // the yellow-interval dilemma: do not start on a yellow that cannot
    // cover the traversal
    if (ego.own_indication == Indication::Yellow && remaining && *remaining < ego.tau) {
      d.action = Action::WaitForPhase;
      d.wait_time = remaining;
    }
    return d;
  }
  if (ica) {
    if (ica_occupied) {
      d.action = Action::WaitForPhase;  // wait for the signal, the zone is taken
      d.wait_time = remaining;
    } else {
      d.action = ica_unknown ? Action::WaitForIca : Action::WaitForPhase;
      d.wait_time = remaining;
    }
  } else if (spat) {
    d.action = Action::WaitForIca;  // SPaT consumed; occupancy is the missing piece
    d.wait_time = remaining;
  } else {
    d.action = Action::WaitForPhase;  // no estimate available
  }
  return d;
}

}  // namespace

Decision step4_ica(std::vector<ConflictStatus>& statuses, const IcaReport& ica,
                   const std::vector<ZoneRef>& zones, const EgoContext& ego,
                   const std::optional<SpatInput>& spat) {
  bool occupied = false, unknown = false;
  for (auto& st : statuses) {
    if (st.status != Status::Unresolved) continue;
    const ZoneRef* zr = nullptr;
    for (const auto& z : zones)
      if (z.zone->id == st.zone_id) zr = &z;
    if (!zr || !zr->blind) throw ResolveError("no blind zone for " + st.zone_id);
    auto it = ica.entries.find(zr->blind->id);
    if (it == ica.entries.end())
      throw ResolveError("ICA report misses blind zone " + zr->blind->id);
    switch (it->second) {
      case ZoneOccupancy::Clear:
        st.status = Status::ResolvedClear;
        st.reason = Reason::Ica;
        break;
      case ZoneOccupancy::Occupied:
        occupied = true;
        break;
      case ZoneOccupancy::Unknown:
        unknown = true;
        break;
    }
  }
  return decide(statuses, ego, spat, &ica, occupied, unknown);
}

std::pair<Decision, std::vector<ConflictStatus>> resolve(const ResolveRequest& request) {
  if (!request.matrix || !request.faces)
    throw ResolveError("resolve needs a conflict matrix and signal faces");
  auto statuses = step3_part1(request.ego, *request.matrix, *request.faces, request.zones);
  step3_part2(statuses, request.ego, request.zones);
  if (request.spat)
    step3_part3(statuses, *request.spat, *request.matrix, request.zones);
  Decision d;
  if (request.ica) {
    d = step4_ica(statuses, *request.ica, request.zones, request.ego, request.spat);
  } else {
    d = decide(statuses, request.ego, request.spat, nullptr, false, false);
  }
  return {std::move(d), std::move(statuses)};
}

double stopping_distance(double speed, double decel) {
  if (speed < 0) throw ResolveError("negative speed");
  if (decel <= 0) throw ResolveError("deceleration must be positive");
  return speed * speed / (2.0 * decel);
}

std::optional<ViolatorWarning> violator_alert(const ViolatorTrack& track,
                                              const sig::PhaseState& phase,
                                              const sig::SpatEstimate& spat,
                                              double decel_max,
                                              const sig::ConflictMatrix& matrix,
                                              const sig::PhaseCatalog* catalog) {
  if (track.speed <= 0.0) return std::nullopt;  // stationary: no intrusion predicted
  Indication now = phase.at(track.movement);
  if (!is_stop(now)) return std::nullopt;
  double entry_time = track.distance_to_stopbar / track.speed;
  bool red_at_entry = entry_time <= spat.expected_remaining;
  if (!red_at_entry) {
    // the phase changes first; red persists only if the successor also stops us
    if (catalog && !spat.next_phase_id.empty() && catalog->has(spat.next_phase_id))
      red_at_entry = is_stop(catalog->state(spat.next_phase_id).at(track.movement));
    else
      red_at_entry = true;  // no successor knowledge: assume the red holds
  }
  if (!red_at_entry) return std::nullopt;
  if (stopping_distance(track.speed, decel_max) <= track.distance_to_stopbar)
    return std::nullopt;  // can still stop legally
  ViolatorWarning w;
  w.lead_time = entry_time;
  for (const auto& m : matrix.movements())
    if (m.id() != track.movement && matrix.conflicts(track.movement, m.id()) &&
        sig::is_go(phase.at(m.id())))
      w.conflicting_movements.push_back(m.id());
  return w;
}

}  // namespace crossguard::resolve
