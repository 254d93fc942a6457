#ifndef CROSSGUARD_RESOLVE_HPP
#define CROSSGUARD_RESOLVE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crossguard/conflict.hpp"
#include "crossguard/signal_state.hpp"

namespace crossguard::resolve {

class ResolveError : public std::runtime_error {
public:
  explicit ResolveError(const std::string& what) : std::runtime_error(what) {}
};

struct VisibleAgent {
  std::string id;
  geom::Point2D position;
  std::string guideway;  // empty when unknown
  double speed = 0.0;    // ft/s
};

/// Everything the ego knows first-hand: its movement, signal face, view of
/// the intersection, and the time it needs to clear its furthest zone.
struct EgoContext {
  std::string movement;  // ego movement id
  geom::Approach approach = geom::Approach::South;
  geom::Point2D viewpoint;
  sig::Indication own_indication = sig::Indication::Red;
  std::optional<sig::Indication> approach_ball;   // face ball display, if read
  std::optional<sig::Indication> approach_arrow;  // face arrow display, if read
  std::vector<VisibleAgent> visible_agents;
  std::vector<geom::Polygon> obstacle_polygons;
  double tau = 1.0;  // s
  // without I2V, a moving agent this close to a zone is still treated as a
  // threat: the walking-direction / intent uncertainty of section-3 scenario 2
  double caution_margin = 0.0;  // ft
};

enum class Status { ResolvedClear, ResolvedThreat, Unresolved };
enum class Reason { OwnSignal, Sight, Spat, Ica, None };

struct ConflictStatus {
  std::string zone_id;
  std::string opposing_movement;
  Status status = Status::Unresolved;
  Reason reason = Reason::None;
};

enum class Action { Proceed, ProceedCollisionAvoidance, WaitForPhase, WaitForIca, BrakeAlert };

struct Decision {
  Action action = Action::WaitForPhase;
  std::optional<double> wait_time;  // SPaT expected remaining, when known
  std::vector<std::string> unresolved;  // zone ids
};

/// A conflict zone as seen from the ego guideway.
struct ZoneRef {
  const geom::ConflictZone* zone = nullptr;
  const geom::BlindZone* blind = nullptr;  // threat side, ego's tau
  std::string opposing_movement;
};

enum class ZoneOccupancy { Clear, Occupied, Unknown };
const char* to_string(ZoneOccupancy s);
ZoneOccupancy zone_occupancy_from_string(const std::string& s);

struct IcaReport {
  double timestamp = 0.0;
  std::map<std::string, ZoneOccupancy> entries;  // keyed by blind zone id
};

struct SpatInput {
  sig::PhaseState state;
  sig::SpatEstimate estimate;
};

/// Part 1: own-signal filtering. Marks resolved_clear every zone whose
/// opposing movement cannot move given the ego face couplings and the
/// conflict-monitor invariant.
std::vector<ConflictStatus> step3_part1(const EgoContext& ego,
                                        const sig::ConflictMatrix& matrix,
                                        const sig::SignalFaces& faces,
                                        const std::vector<ZoneRef>& zones);

/// Part 2: line-of-sight filtering over precomputed blind zones.
void step3_part2(std::vector<ConflictStatus>& statuses, const EgoContext& ego,
                 const std::vector<ZoneRef>& zones);

/// Part 3: SPaT filtering with the full phase state.
void step3_part3(std::vector<ConflictStatus>& statuses, const SpatInput& spat,
                 const sig::ConflictMatrix& matrix, const std::vector<ZoneRef>& zones);

/// Step 4: blind-zone occupancy from the ICA report, then the decision.
Decision step4_ica(std::vector<ConflictStatus>& statuses, const IcaReport& ica,
                   const std::vector<ZoneRef>& zones, const EgoContext& ego,
                   const std::optional<SpatInput>& spat);

struct ResolveRequest {
  EgoContext ego;
  std::vector<ZoneRef> zones;
  const sig::ConflictMatrix* matrix = nullptr;
  const sig::SignalFaces* faces = nullptr;
  std::optional<SpatInput> spat;
  std::optional<IcaReport> ica;
};

/// The full pipeline: Part 1 -> Part 2 -> Part 3 (if SPaT) -> Step 4 (if ICA).
std::pair<Decision, std::vector<ConflictStatus>> resolve(const ResolveRequest& request);

/// v^2 / (2 decel), ft.
double stopping_distance(double speed, double decel);

struct ViolatorTrack {
  double distance_to_stopbar = 0.0;  // ft
  double speed = 0.0;                // ft/s
  std::string movement;
};

struct ViolatorWarning {
  double lead_time = 0.0;  // s until intersection entry
  std::vector<std::string> conflicting_movements;
};

/// Warning iff the track faces red now and at its entry time and cannot stop.
std::optional<ViolatorWarning> violator_alert(const ViolatorTrack& track,
                                              const sig::PhaseState& phase,
                                              const sig::SpatEstimate& spat,
                                              double decel_max,
                                              const sig::ConflictMatrix& matrix,
                                              const sig::PhaseCatalog* catalog);

}  // namespace crossguard::resolve

#endif
