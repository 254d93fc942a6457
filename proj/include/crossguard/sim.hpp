#ifndef CROSSGUARD_SIM_HPP
#define CROSSGUARD_SIM_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crossguard/compile.hpp"
#include "crossguard/i2v_transport.hpp"
#include "crossguard/resolve.hpp"

namespace crossguard::sim {

class SimError : public std::runtime_error {
public:
  explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

enum class ControllerKind { SignalCompliant, EgoResolver, Scripted, Violator };
const char* to_string(ControllerKind k);
ControllerKind controller_from_string(const std::string& s);

struct ScriptStep {
  double at = 0.0;      // s
  double target = 0.0;  // ft/s
};

struct AgentSpec {
  std::string id;
  geom::Mode mode = geom::Mode::Vehicle;
  std::string guideway;
  double s0 = 0.0;
  double v0 = 0.0;
  ControllerKind controller = ControllerKind::SignalCompliant;
  double target_speed = 44.0;   // ft/s cruise
  double accel_max = 6.0;       // ft/s^2
  double decel_comfort = 8.0;   // ft/s^2 service braking
  double decel_max = 32.0;      // ft/s^2 emergency
  double length = 15.0;         // footprint, ft
  double width = 6.0;
  double eye_offset = 4.5;      // ft forward of center
  bool connected = true;        // receives I2V when the scenario enables it
  bool optimistic = false;      // ego_resolver: treat occluded-unknown as clear
  double hold_arc = -1.0;       // ego_resolver: nose hold point; default stop bar
  std::vector<ScriptStep> script;

  static AgentSpec defaults_for(geom::Mode mode);
};

struct SensorSpec {
  enum class Kind { AdvanceLoop, ZoneDetector };
  Kind kind = Kind::AdvanceLoop;
  std::string id;
  std::string guideway;   // loop: guideway it instruments
  double offset = 200.0;  // loop: ft upstream of the stop bar
  geom::Polygon polygon;  // zone detector region
};

struct Scenario {
  std::string name;
  std::string map_name = "fourleg-basic";
  bool i2v_enabled = false;
  double duration = 60.0;
  double dt = 0.05;
  std::uint64_t seed = 1;
  double plan_offset = 0.0;  // plan time at world t=0
  double violator_decel_max = 10.0;  // braking assumed feasible for violators
  std::vector<AgentSpec> agents;
  std::vector<SensorSpec> sensors;
};

struct CollisionEvent {
  double time = 0.0;
  std::string agent_a;
  std::string agent_b;
  geom::Point2D location;
};

struct WarningEvent {
  double time = 0.0;
  std::string movement;
  double lead_time = 0.0;
};

struct Metrics {
  std::vector<CollisionEvent> collisions;
  std::map<std::string, double> delay;  // s stopped per agent
  double min_ttc = std::numeric_limits<double>::infinity();
  std::vector<WarningEvent> warnings;

  std::size_t collision_count() const { return collisions.size(); }
};

struct AgentState {
  AgentSpec spec;
  double s = 0.0;
  double v = 0.0;
  double a = 0.0;
  bool done = false;
  bool committed = false;
  bool alerted = false;       // received a brake alert
  bool warned = false;        // violator already reported
  double stopped_since = -1;  // ego: time the hold began
  std::string last_action;

  geom::Point2D position(const geom::Guideway& g) const;
  geom::Point2D heading(const geom::Guideway& g) const;
  geom::Polygon footprint(const geom::Guideway& g) const;
};

class World {
public:
  World(std::shared_ptr<const cli::CompiledIntersection> compiled, Scenario scenario);

  void step();
  void run_all();

  double time() const { return t_; }
  const Metrics& metrics() const { return metrics_; }
  const std::string& trace() const { return trace_; }
  const std::vector<AgentState>& agents() const { return agents_; }
  const cli::CompiledIntersection& compiled() const { return *compiled_; }

  sig::PhaseState phase_now() const;
  resolve::EgoContext perception(const AgentState& agent) const;
  std::map<std::string, resolve::ZoneOccupancy> sensor_readout() const;

private:
  friend struct ControllerOps;
  std::shared_ptr<const cli::CompiledIntersection> compiled_;
  Scenario scenario_;
  std::vector<AgentState> agents_;
  double t_ = 0.0;
  std::uint64_t tick_ = 0;
  Metrics metrics_;
  std::string trace_;
  i2v::Bus bus_;
  i2v::Bus::Handle bus_handle_ = 0;
  std::unique_ptr<i2v::Broadcaster> broadcaster_;
  std::optional<resolve::SpatInput> latest_spat_;
  std::optional<resolve::IcaReport> latest_ica_;
  std::vector<std::pair<std::string, std::string>> collided_pairs_;
  std::map<std::string, std::vector<std::pair<double, double>>> sensor_coverage_;
  std::string last_phase_id_;

  void deliver_messages();
  void control_agents();
  void integrate();
  void detect_collisions();
  void emit_agent_trace();
  void broadcast_if_due();
  void check_violators();
};

struct RunResult {
  std::string trace;
  Metrics metrics;
};

/// Deterministic run: identical (scenario, seed) gives identical trace bytes.
RunResult run(const Scenario& scenario);
RunResult run(const Scenario& scenario,
              std::shared_ptr<const cli::CompiledIntersection> compiled);

Scenario parse_scenario(std::istream& is);
Scenario parse_scenario_file(const std::string& path);
void write_scenario(const Scenario& s, std::ostream& os);

}  // namespace crossguard::sim

#endif
