#include "crossguard/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "crossguard/visibility.hpp"

namespace crossguard::sim {

using geom::Guideway;
using geom::Mode;
using geom::Point2D;
using geom::Polygon;
using resolve::ZoneOccupancy;
using sig::Indication;

namespace {

constexpr double kPerceptionRange = 600.0;  // ft
constexpr double kStopMargin = 2.0;         // nose distance held before a stop point
constexpr double kFollowGap = 8.0;          // ft bumper gap

char tbuf[512];

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  std::vsnprintf(tbuf, sizeof tbuf, format, args);
  va_end(args);
  return tbuf;
}

// Speed allowed to be able to stop `dist` ahead using `decel`.
double stop_envelope(double dist, double decel) {
  if (dist <= 0) return 0.0;
  return std::sqrt(2.0 * decel * dist);
}

}  // namespace

const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::SignalCompliant: return "signal_compliant";
    case ControllerKind::EgoResolver: return "ego_resolver";
    case ControllerKind::Scripted: return "scripted";
    case ControllerKind::Violator: return "violator";
  }
  return "?";
}

ControllerKind controller_from_string(const std::string& s) {
  if (s == "signal_compliant") return ControllerKind::SignalCompliant;
  if (s == "ego_resolver") return ControllerKind::EgoResolver;
  if (s == "scripted") return ControllerKind::Scripted;
  if (s == "violator") return ControllerKind::Violator;
  throw SimError("unknown controller: " + s);
}

AgentSpec AgentSpec::defaults_for(Mode mode) {
  AgentSpec a;
  a.mode = mode;
  switch (mode) {
    case Mode::Vehicle:
      a.length = 15;
      a.width = 6;
      a.target_speed = 44;
      a.eye_offset = 4.5;
      break;
    case Mode::Bicycle:
      a.length = 6;
      a.width = 2;
      a.target_speed = 12;
      a.accel_max = 4;
      a.decel_comfort = 6;
      a.decel_max = 12;
      a.eye_offset = 1.5;
      break;
    case Mode::Pedestrian:
      a.length = 2;
      a.width = 2;
      a.target_speed = 4;
      a.accel_max = 4;
      a.decel_comfort = 4;
      a.decel_max = 8;
      a.eye_offset = 0;
      break;
  }
  return a;
}

Point2D AgentState::position(const Guideway& g) const { return g.centerline.point_at(s); }
Point2D AgentState::heading(const Guideway& g) const { return g.centerline.tangent_at(s); }
Polygon AgentState::footprint(const Guideway& g) const {
  return Polygon::rectangle(position(g), spec.length, spec.width, heading(g));
}

World::World(std::shared_ptr<const cli::CompiledIntersection> compiled, Scenario scenario)
    : compiled_(std::move(compiled)), scenario_(std::move(scenario)) {
  if (scenario_.dt <= 0) throw SimError("scenario dt must be positive");
  for (const auto& spec : scenario_.agents) {
    const Guideway& g = compiled_->guideway(spec.guideway);  // throws on bad ref
    AgentState st;
    st.spec = spec;
    if (st.spec.hold_arc < 0) st.spec.hold_arc = g.stop_bar_arc;
    st.s = spec.s0;
    st.v = spec.v0;
    agents_.push_back(std::move(st));
  }
  // sensor coverage per blind zone, as arc intervals on the threat guideway
  for (const auto& bz : compiled_->blind_zones) {
    auto& cover = sensor_coverage_[bz.id];
    for (const auto& sensor : scenario_.sensors) {
      if (sensor.kind == SensorSpec::Kind::AdvanceLoop) {
        if (sensor.guideway != bz.threat_guideway) continue;
        const Guideway& g = compiled_->guideway(sensor.guideway);
        cover.emplace_back(g.stop_bar_arc - sensor.offset, g.stop_bar_arc);
      } else {
        const Guideway& g = compiled_->guideway(bz.threat_guideway);
        // sample the blind-zone interval against the detector region
        double lo = 1e30, hi = -1e30;
        for (double s = bz.interval.start; s <= bz.interval.end + 1e-9; s += 1.0) {
          if (sensor.polygon.contains(g.centerline.point_at(s))) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
          }
        }
        if (hi >= lo) cover.emplace_back(lo, hi);
      }
    }
  }
  if (scenario_.i2v_enabled) {
    bus_handle_ = bus_.subscribe();
    auto spat_provider = [this](std::int64_t) -> std::optional<i2v::SpatMessage> {
      double plan_t = t_ + scenario_.plan_offset;
      auto [state_id, elapsed] = compiled_->plan.at(plan_t);
      auto est = sig::spat_estimate(compiled_->plan, state_id, std::min(elapsed, 1e9));
      sig::PhaseState ps = phase_now();
      i2v::SpatMessage m;
      m.current_phase_id = state_id;
      m.expected_remaining_ms = static_cast<std::int64_t>(est.expected_remaining * 1000 + 0.5);
      m.q10_ms = static_cast<std::int64_t>(est.quantile_remaining.at(0.1) * 1000 + 0.5);
      m.q50_ms = static_cast<std::int64_t>(est.quantile_remaining.at(0.5) * 1000 + 0.5);
      m.q90_ms = static_cast<std::int64_t>(est.quantile_remaining.at(0.9) * 1000 + 0.5);
      m.next_phase_id = est.next_phase_id;
      for (const auto& [mid, ind] : ps.indications) m.movements.emplace_back(mid, ind);
      return m;
    };
    auto ica_provider = [this](std::int64_t) -> std::optional<i2v::IcaMessage> {
      i2v::IcaMessage m;
      for (const auto& [bz, status] : sensor_readout()) m.entries.emplace_back(bz, status);
      return m;
    };
    broadcaster_ = std::make_unique<i2v::Broadcaster>(compiled_->name, 100, spat_provider,
                                                      ica_provider, bus_.sink());
  }
  trace_ += fmt("SCENARIO %s map %s i2v %s dt %.3f seed %llu\n", scenario_.name.c_str(),
                scenario_.map_name.c_str(), scenario_.i2v_enabled ? "on" : "off", scenario_.dt,
                static_cast<unsigned long long>(scenario_.seed));
}

sig::PhaseState World::phase_now() const {
  return sig::plan_state_at(compiled_->plan, compiled_->catalog, t_ + scenario_.plan_offset);
}

resolve::EgoContext World::perception(const AgentState& agent) const {
  const Guideway& g = compiled_->guideway(agent.spec.guideway);
  resolve::EgoContext ctx;
  ctx.movement = g.movement.id();
  ctx.approach = g.movement.approach;
  Point2D h = agent.heading(g);
  ctx.viewpoint = agent.position(g) + h * agent.spec.eye_offset;
  sig::PhaseState ps = phase_now();
  ctx.own_indication = ps.at(ctx.movement);
  const sig::SignalFace& face = compiled_->faces.at(ctx.approach);
  auto face_ind = [&](const std::vector<std::string>& ids) -> std::optional<Indication> {
    for (const auto& id : ids)
      if (ps.indications.count(id)) return ps.at(id);
    return std::nullopt;
  };
  ctx.approach_ball = face_ind(face.ball_movements);
  ctx.approach_arrow = face_ind(face.arrow_movements);
  ctx.tau = compiled_->tau.at(agent.spec.guideway);
  for (const auto& other : agents_) {
    if (other.done || other.spec.id == agent.spec.id) continue;
    const Guideway& og = compiled_->guideway(other.spec.guideway);
    ctx.obstacle_polygons.push_back(other.footprint(og));
  }
  std::size_t obstacle_idx = 0;
  for (const auto& other : agents_) {
    if (other.done || other.spec.id == agent.spec.id) continue;
    const Guideway& og = compiled_->guideway(other.spec.guideway);
    Point2D center = other.position(og);
    bool in_range = geom::distance(center, ctx.viewpoint) <= kPerceptionRange;
    if (in_range) {
      // occluders: everyone else's footprint
      bool blocked = false;
      for (std::size_t k = 0; k < ctx.obstacle_polygons.size() && !blocked; ++k) {
        if (k == obstacle_idx) continue;
        if (geom::segment_crosses_interior(ctx.viewpoint, center, ctx.obstacle_polygons[k]))
          blocked = true;
      }
      if (!blocked)
        ctx.visible_agents.push_back({other.spec.id, center, other.spec.guideway});
    }
    ++obstacle_idx;
  }
  return ctx;
}

std::map<std::string, ZoneOccupancy> World::sensor_readout() const {
  std::map<std::string, ZoneOccupancy> out;
  for (const auto& bz : compiled_->blind_zones) {
    const auto& cover = sensor_coverage_.at(bz.id);
    double zone_len = bz.interval.length();
    // coverage-complete when the union of covered intervals spans the zone
    double covered = 0.0;
    if (zone_len > 0) {
      const double step = 0.5;
      int hit = 0, total = 0;
      for (double s = bz.interval.start + step / 2; s < bz.interval.end; s += step) {
        ++total;
        for (const auto& [lo, hi] : cover)
          if (s >= lo && s <= hi) {
            ++hit;
            break;
          }
      }
      covered = total ? static_cast<double>(hit) / total : 1.0;
    } else {
      covered = cover.empty() ? 0.0 : 1.0;
    }
    if (cover.empty() || covered < 0.99) {
      out[bz.id] = ZoneOccupancy::Unknown;
      continue;
    }
    bool occupied = false;
    for (const auto& agent : agents_) {
      if (agent.done) continue;
      if (agent.spec.guideway != bz.threat_guideway) continue;
      double lo_a = agent.s - agent.spec.length / 2, hi_a = agent.s + agent.spec.length / 2;
      if (hi_a >= bz.interval.start && lo_a <= bz.interval.end) {
        for (const auto& [lo, hi] : cover)
          if (hi_a >= lo && lo_a <= hi) {
            occupied = true;
            break;
          }
      }
      if (occupied) break;
    }
    // zone detectors also see foreign footprints standing on them
    if (!occupied) {
      for (const auto& sensor : scenario_.sensors) {
        if (sensor.kind != SensorSpec::Kind::ZoneDetector) continue;
        if (sensor.polygon.empty() || bz.polygon.empty()) continue;
        if (geom::intersect(sensor.polygon, bz.polygon).empty()) continue;
        for (const auto& agent : agents_) {
          if (agent.done) continue;
          const Guideway& g = compiled_->guideway(agent.spec.guideway);
          if (!geom::intersect(sensor.polygon, agent.footprint(g)).empty()) {
            occupied = true;
            break;
          }
        }
        if (occupied) break;
      }
    }
    out[bz.id] = occupied ? ZoneOccupancy::Occupied : ZoneOccupancy::Clear;
  }
  return out;
}

void World::deliver_messages() {
  if (!scenario_.i2v_enabled) return;
  bus_.set_now(static_cast<std::int64_t>(t_ * 1000));
  for (auto& received : bus_.drain(bus_handle_)) {
    const i2v::Message& m = received.message;
    trace_ += fmt("MSG %.3f %s seq %llu%s\n", t_, i2v::type_of(m),
                  static_cast<unsigned long long>(i2v::seq_of(m)),
                  received.stale ? " stale" : "");
    if (const auto* spat = std::get_if<i2v::SpatMessage>(&m)) {
      resolve::SpatInput in;
      in.state.id = spat->current_phase_id;
      in.state.timestamp = spat->timestamp_ms / 1000.0;
      for (const auto& [mid, ind] : spat->movements) in.state.indications[mid] = ind;
      in.estimate.current_phase_id = spat->current_phase_id;
      in.estimate.expected_remaining = spat->expected_remaining_ms / 1000.0;
      in.estimate.quantile_remaining = {{0.1, spat->q10_ms / 1000.0},
                                        {0.5, spat->q50_ms / 1000.0},
                                        {0.9, spat->q90_ms / 1000.0}};
      in.estimate.next_phase_id = spat->next_phase_id;
      latest_spat_ = std::move(in);
    } else if (const auto* ica = std::get_if<i2v::IcaMessage>(&m)) {
      resolve::IcaReport rep;
      rep.timestamp = ica->timestamp_ms / 1000.0;
      for (const auto& [bz, st] : ica->entries) rep.entries[bz] = st;
      latest_ica_ = std::move(rep);
    } else if (const auto* alert = std::get_if<i2v::AlertMessage>(&m)) {
      for (auto& agent : agents_) {
        if (agent.done || !agent.spec.connected) continue;
        const Guideway& g = compiled_->guideway(agent.spec.guideway);
        for (const auto& cm : alert->conflicting_movements)
          if (cm == g.movement.id()) agent.alerted = true;
      }
    }
  }
}

void World::broadcast_if_due() {
  if (!broadcaster_) return;
  std::int64_t now_ms = static_cast<std::int64_t>(std::llround(t_ * 1000));
  if (now_ms % 100 == 0) broadcaster_->tick(now_ms);
}

void World::check_violators() {
  if (!scenario_.i2v_enabled) return;
  sig::PhaseState ps = phase_now();
  for (auto& agent : agents_) {
    if (agent.done || agent.spec.controller != ControllerKind::Violator || agent.warned)
      continue;
    const Guideway& g = compiled_->guideway(agent.spec.guideway);
    double nose = agent.s + agent.spec.length / 2;
    if (nose >= g.stop_bar_arc) continue;  // already in
    resolve::ViolatorTrack track;
    track.distance_to_stopbar = g.stop_bar_arc - nose;
    track.speed = agent.v;
    track.movement = g.movement.id();
    double plan_t = t_ + scenario_.plan_offset;
    auto [state_id, elapsed] = compiled_->plan.at(plan_t);
    sig::SpatEstimate est = sig::spat_estimate(compiled_->plan, state_id, elapsed);
    auto warning = resolve::violator_alert(track, ps, est, scenario_.violator_decel_max,
                                           compiled_->matrix, &compiled_->catalog);
    if (!warning) continue;
    agent.warned = true;
    metrics_.warnings.push_back({t_, track.movement, warning->lead_time});
    trace_ += fmt("WARN %.3f %s lead %.3f\n", t_, track.movement.c_str(), warning->lead_time);
    i2v::AlertMessage alert;
    alert.movement = track.movement;
    alert.lead_time_ms = static_cast<std::int64_t>(warning->lead_time * 1000 + 0.5);
    alert.conflicting_movements = warning->conflicting_movements;
    alert.intersection_id = compiled_->name;
    alert.timestamp_ms = static_cast<std::int64_t>(t_ * 1000);
    bus_.publish(alert, static_cast<std::int64_t>(t_ * 1000));
  }
}

namespace {

// target speed to track a stop point, comfort braking
double approach_target(double cruise, double dist_to_stop, double decel) {
  return std::min(cruise, stop_envelope(dist_to_stop - kStopMargin, decel));
}

}  // namespace

void World::control_agents() {
  sig::PhaseState ps = phase_now();
  for (auto& agent : agents_) {
    if (agent.done) continue;
    const Guideway& g = compiled_->guideway(agent.spec.guideway);
    double nose = agent.s + agent.spec.length / 2;
    double target = agent.spec.target_speed;

    switch (agent.spec.controller) {
      case ControllerKind::Violator:
        break;  // full speed, signal ignored
      case ControllerKind::Scripted: {
        for (const auto& step : agent.spec.script)
          if (t_ + 1e-9 >= step.at) target = step.target;
        break;
      }
      case ControllerKind::SignalCompliant: {
        Indication own = ps.at(g.movement.id());
        if (nose < g.stop_bar_arc) {
          double dist = g.stop_bar_arc - nose;
          bool stop = false;
          if (own == Indication::Red || own == Indication::DontWalk) stop = true;
          if (own == Indication::Yellow) {
            // stop only if a comfortable stop fits before the bar
            stop = resolve::stopping_distance(agent.v, agent.spec.decel_comfort) <= dist;
          }
          if (stop) target = approach_target(target, dist, agent.spec.decel_comfort);
        }
        break;
      }
      case ControllerKind::EgoResolver: {
        double hold = agent.spec.hold_arc;
        if (!agent.committed && nose < hold + 0.5) {
          resolve::ResolveRequest req;
          req.ego = perception(agent);
          for (const auto* z : compiled_->zones_of(agent.spec.guideway)) {
            const std::string& threat = z->other_guideway(agent.spec.guideway);
            resolve::ZoneRef zr;
            zr.zone = z;
            zr.blind = &compiled_->blind(z->id, threat);
            zr.opposing_movement = compiled_->movement_of(threat);
            req.zones.push_back(zr);
          }
          req.matrix = &compiled_->matrix;
          req.faces = &compiled_->faces;
          if (agent.spec.connected) {
            req.spat = latest_spat_;
            req.ica = latest_ica_;
          }
          auto [decision, statuses] = resolve::resolve(req);
          bool any_threat = std::any_of(
              statuses.begin(), statuses.end(), [](const resolve::ConflictStatus& s) {
                return s.status == resolve::Status::ResolvedThreat;
              });
          bool ica_occupied = false;
          if (req.ica) {
            for (const auto& zr : req.zones) {
              auto it = req.ica->entries.find(zr.blind->id);
              if (it != req.ica->entries.end() && it->second == ZoneOccupancy::Occupied)
                ica_occupied = true;
            }
          }
          bool go = decision.action == resolve::Action::Proceed;
          if (!go && agent.spec.optimistic && !any_threat && !ica_occupied) {
            // the optimist error: after a stop, occluded-unknown reads as clear
            bool waited = agent.stopped_since >= 0 && t_ - agent.stopped_since >= 1.0;
            if (waited && decision.action != resolve::Action::Proceed) go = true;
          }
          std::string action =
              go ? "proceed"
                 : (decision.action == resolve::Action::ProceedCollisionAvoidance
                        ? "hold_threat"
                        : (decision.action == resolve::Action::WaitForIca ? "wait_for_ica"
                                                                          : "wait_for_phase"));
          if (action != agent.last_action) {
            std::string zones;
            for (const auto& zid : decision.unresolved) zones += " " + zid;
            trace_ += fmt("DEC %.3f %s %s%s\n", t_, agent.spec.id.c_str(), action.c_str(),
                          zones.c_str());
            agent.last_action = action;
          }
          if (go) {
            agent.committed = true;
          } else {
            target = approach_target(agent.spec.target_speed, hold - nose,
                                     agent.spec.decel_comfort);
            if (agent.v < 0.5 && agent.stopped_since < 0) agent.stopped_since = t_;
          }
        } else if (!agent.committed) {
          agent.committed = true;  // rolled past the hold point
        }
        // anticipation: stop for a phase that will end before arrival
        if (!agent.committed && false) {}
        if (agent.committed && agent.spec.connected && latest_spat_ && nose < g.stop_bar_arc) {
          Indication own = ps.at(g.movement.id());
          double dist = g.stop_bar_arc - nose;
          double arrival = agent.v > 1.0 ? dist / agent.v : 1e9;
          bool ending = latest_spat_->estimate.expected_remaining < arrival;
          bool zone_threat = false;
          if (latest_ica_) {
            for (const auto* z : compiled_->zones_of(agent.spec.guideway)) {
              const std::string& threat = z->other_guideway(agent.spec.guideway);
              auto it = latest_ica_->entries.find(compiled_->blind(z->id, threat).id);
              if (it != latest_ica_->entries.end() && it->second != ZoneOccupancy::Clear)
                zone_threat = true;
            }
          }
          if (sig::is_go(own) && ending && zone_threat) {
            // phase dying and the blind zones are not reported clear: stand down
            target = approach_target(target, dist, agent.spec.decel_comfort);
            if (agent.last_action != "yield_spat") {
              trace_ += fmt("DEC %.3f %s yield_spat\n", t_, agent.spec.id.c_str());
              agent.last_action = "yield_spat";
            }
          }
        }
        break;
      }
    }

    if (agent.alerted) {
      // brake alert from a violator warning: stop before the box
      double dist = g.stop_bar_arc - nose;
      if (dist > 0)
        target = approach_target(target, dist, agent.spec.decel_max);
      else
        target = 0.0;
      if (agent.last_action != "brake_alert") {
        trace_ += fmt("DEC %.3f %s brake_alert\n", t_, agent.spec.id.c_str());
        agent.last_action = "brake_alert";
      }
    }

    // leader following on the same guideway
    if (agent.spec.mode != Mode::Pedestrian) {
      for (const auto& other : agents_) {
        if (other.done || other.spec.id == agent.spec.id) continue;
        if (other.spec.guideway != agent.spec.guideway || other.s <= agent.s) continue;
        double gap = (other.s - other.spec.length / 2) - nose;
        if (gap < kFollowGap + 40.0) {
          double allowed = other.v + stop_envelope(std::max(0.0, gap - kFollowGap),
                                                   agent.spec.decel_comfort);
          target = std::min(target, allowed);
        }
      }
    }

    double want = (target - agent.v) / scenario_.dt;
    agent.a = std::clamp(want, -agent.spec.decel_max, agent.spec.accel_max);
  }
}

void World::integrate() {
  for (auto& agent : agents_) {
    if (agent.done) continue;
    const Guideway& g = compiled_->guideway(agent.spec.guideway);
    double dt = scenario_.dt;
    double v1 = std::max(0.0, agent.v + agent.a * dt);
    double dv = v1 - agent.v;
    agent.s += agent.v * dt + 0.5 * dv * dt;
    agent.v = v1;
    if (agent.v < 0.3) metrics_.delay[agent.spec.id] += dt;
    if (agent.s >= g.centerline.length()) {
      agent.done = true;
      trace_ += fmt("DONE %.3f %s\n", t_, agent.spec.id.c_str());
    }
  }
}

void World::detect_collisions() {
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (agents_[i].done) continue;
    const Guideway& gi = compiled_->guideway(agents_[i].spec.guideway);
    Point2D pi = agents_[i].position(gi);
    double ri = std::hypot(agents_[i].spec.length, agents_[i].spec.width) / 2;
    for (std::size_t j = i + 1; j < agents_.size(); ++j) {
      if (agents_[j].done) continue;
      const Guideway& gj = compiled_->guideway(agents_[j].spec.guideway);
      Point2D pj = agents_[j].position(gj);
      double rj = std::hypot(agents_[j].spec.length, agents_[j].spec.width) / 2;
      double d = geom::distance(pi, pj);
      // time-to-collision proxy from closing speed on center distance
      double closing = agents_[i].v + agents_[j].v;
      if (closing > 1.0 && d > ri + rj)
        metrics_.min_ttc = std::min(metrics_.min_ttc, (d - ri - rj) / closing);
      if (d > ri + rj) continue;
      auto pair = std::minmax(agents_[i].spec.id, agents_[j].spec.id);
      if (std::find(collided_pairs_.begin(), collided_pairs_.end(),
                    std::pair(pair.first, pair.second)) != collided_pairs_.end())
        continue;
      auto overlap =
          geom::intersect(agents_[i].footprint(gi), agents_[j].footprint(gj));
      if (overlap.empty()) continue;
      collided_pairs_.emplace_back(pair.first, pair.second);
      Point2D where = overlap.front().centroid();
      metrics_.collisions.push_back({t_, pair.first, pair.second, where});
      trace_ += fmt("COLLISION %.3f %s %s %.3f %.3f\n", t_, pair.first.c_str(),
                    pair.second.c_str(), where.x, where.y);
    }
  }
}

void World::emit_agent_trace() {
  sig::PhaseState ps = phase_now();
  if (ps.id != last_phase_id_) {
    trace_ += fmt("PHASE %.3f %s\n", t_, ps.id.c_str());
    last_phase_id_ = ps.id;
  }
  for (const auto& agent : agents_) {
    if (agent.done) continue;
    trace_ += fmt("A %.3f %s %s %.3f %.3f %.3f\n", t_, agent.spec.id.c_str(),
                  agent.spec.guideway.c_str(), agent.s, agent.v, agent.a);
  }
}

void World::step() {
  broadcast_if_due();
  deliver_messages();
  check_violators();
  emit_agent_trace();
  control_agents();
  integrate();
  t_ = (tick_ + 1) * scenario_.dt;
  ++tick_;
  detect_collisions();
}

void World::run_all() {
  while (t_ < scenario_.duration - 1e-9) step();
}

RunResult run(const Scenario& scenario,
              std::shared_ptr<const cli::CompiledIntersection> compiled) {
  World w(std::move(compiled), scenario);
  w.run_all();
  return {w.trace(), w.metrics()};
}

RunResult run(const Scenario& scenario) {
  auto map = cli::builtin_map(scenario.map_name);
  if (!map) throw SimError("unknown map " + scenario.map_name);
  auto compiled = std::make_shared<cli::CompiledIntersection>(cli::compile(*map));
  return run(scenario, std::move(compiled));
}

Scenario parse_scenario(std::istream& is) {
  Scenario sc;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    auto fail = [&](const std::string& why) {
      throw SimError("scenario line " + std::to_string(lineno) + ": " + why);
    };
    if (kw == "scenario") ls >> sc.name;
    else if (kw == "map") ls >> sc.map_name;
    else if (kw == "i2v") {
      std::string v;
      ls >> v;
      sc.i2v_enabled = (v == "on");
    } else if (kw == "duration") ls >> sc.duration;
    else if (kw == "dt") ls >> sc.dt;
    else if (kw == "seed") ls >> sc.seed;
    else if (kw == "plan_offset") ls >> sc.plan_offset;
    else if (kw == "violator_decel_max") ls >> sc.violator_decel_max;
    else if (kw == "agent") {
      std::string id, mode, gw, ctrl;
      double s0, v0;
      if (!(ls >> id >> mode >> gw >> s0 >> v0 >> ctrl)) fail("malformed agent");
      AgentSpec a = AgentSpec::defaults_for(geom::mode_from_string(mode));
      a.id = id;
      a.guideway = gw;
      a.s0 = s0;
      a.v0 = v0;
      a.controller = controller_from_string(ctrl);
      std::string word;
      while (ls >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos) fail("agent option needs key=value: " + word);
        std::string k = word.substr(0, eq), v = word.substr(eq + 1);
        if (k == "target") a.target_speed = std::stod(v);
        else if (k == "accel") a.accel_max = std::stod(v);
        else if (k == "decel") a.decel_comfort = std::stod(v);
        else if (k == "decel_max") a.decel_max = std::stod(v);
        else if (k == "length") a.length = std::stod(v);
        else if (k == "width") a.width = std::stod(v);
        else if (k == "connected") a.connected = (v == "true");
        else if (k == "optimistic") a.optimistic = (v == "true");
        else if (k == "hold") a.hold_arc = std::stod(v);
        else if (k == "script") {
          for (const auto& part : [&] {
                 std::vector<std::string> ps;
                 std::string cur;
                 for (char c : v) {
                   if (c == ';') {
                     ps.push_back(cur);
                     cur.clear();
                   } else cur += c;
                 }
                 if (!cur.empty()) ps.push_back(cur);
                 return ps;
               }()) {
            auto colon = part.find(':');
            if (colon == std::string::npos) fail("script step needs t:v");
            a.script.push_back({std::stod(part.substr(0, colon)),
                                std::stod(part.substr(colon + 1))});
          }
        } else fail("unknown agent option " + k);
      }
      sc.agents.push_back(std::move(a));
    } else if (kw == "sensor") {
      SensorSpec s;
      std::string kind;
      if (!(ls >> kind >> s.id)) fail("malformed sensor");
      if (kind == "loop") {
        s.kind = SensorSpec::Kind::AdvanceLoop;
        if (!(ls >> s.guideway >> s.offset)) fail("loop sensor needs guideway offset");
      } else if (kind == "zone") {
        s.kind = SensorSpec::Kind::ZoneDetector;
        std::vector<geom::Point2D> pts;
        std::string word;
        while (ls >> word) {
          auto comma = word.find(',');
          if (comma == std::string::npos) fail("zone vertex needs x,y");
          pts.push_back({std::stod(word.substr(0, comma)), std::stod(word.substr(comma + 1))});
        }
        if (pts.size() < 3) fail("zone sensor needs a polygon");
        s.polygon = geom::Polygon(pts);
      } else fail("unknown sensor kind " + kind);
      sc.sensors.push_back(std::move(s));
    } else fail("unknown keyword " + kw);
  }
  if (sc.name.empty()) throw SimError("scenario missing name");
  return sc;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SimError("cannot open scenario file " + path);
  return parse_scenario(f);
}

void write_scenario(const Scenario& sc, std::ostream& os) {
  char buf[512];
  os << "scenario " << sc.name << "\n";
  os << "map " << sc.map_name << "\n";
  os << "i2v " << (sc.i2v_enabled ? "on" : "off") << "\n";
  std::snprintf(buf, sizeof buf, "duration %g\ndt %g\nseed %llu\nplan_offset %g\n",
                sc.duration, sc.dt, static_cast<unsigned long long>(sc.seed), sc.plan_offset);
  os << buf;
  std::snprintf(buf, sizeof buf, "violator_decel_max %g\n", sc.violator_decel_max);
  os << buf;
  for (const auto& a : sc.agents) {
    std::snprintf(buf, sizeof buf, "agent %s %s %s %g %g %s target=%g", a.id.c_str(),
                  geom::to_string(a.mode), a.guideway.c_str(), a.s0, a.v0,
                  to_string(a.controller), a.target_speed);
    os << buf;
    if (a.hold_arc >= 0) os << " hold=" << a.hold_arc;
    if (a.optimistic) os << " optimistic=true";
    if (!a.connected) os << " connected=false";
    if (!a.script.empty()) {
      os << " script=";
      for (std::size_t i = 0; i < a.script.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%g:%g", i ? ";" : "", a.script[i].at,
                      a.script[i].target);
        os << buf;
      }
    }
    os << "\n";
  }
  for (const auto& s : sc.sensors) {
    if (s.kind == SensorSpec::Kind::AdvanceLoop) {
      std::snprintf(buf, sizeof buf, "sensor loop %s %s %g\n", s.id.c_str(),
                    s.guideway.c_str(), s.offset);
      os << buf;
    } else {
      os << "sensor zone " << s.id;
      for (const auto& v : s.polygon.vertices()) {
        std::snprintf(buf, sizeof buf, " %g,%g", v.x, v.y);
        os << buf;
      }
      os << "\n";
    }
  }
}

}  // namespace crossguard::sim
