#ifndef CROSSGUARD_SIGNAL_STATE_HPP
#define CROSSGUARD_SIGNAL_STATE_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crossguard/guideway.hpp"

namespace crossguard::sig {

enum class Indication { Green, Yellow, Red, Walk, DontWalk };

const char* to_string(Indication i);
Indication indication_from_string(const std::string& s);
/// Green, yellow and walk all grant right-of-way.
bool is_go(Indication i);

class SignalError : public std::runtime_error {
public:
  explicit SignalError(const std::string& what) : std::runtime_error(what) {}
};

/// Symmetric geometric-conflict matrix plus the movement metadata the
/// conflict-monitor rules need (labels, protection, mode).
class ConflictMatrix {
public:
  ConflictMatrix() = default;
  ConflictMatrix(std::vector<geom::Movement> movements, std::vector<std::vector<bool>> bits);

  bool conflicts(const std::string& a, const std::string& b) const;
  const geom::Movement& movement(const std::string& id) const;
  bool has(const std::string& id) const;
  const std::vector<geom::Movement>& movements() const { return movements_; }

private:
  std::vector<geom::Movement> movements_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<bool>> bits_;
};

/// Entry (i,j) true iff the guideways' polygons overlap.
ConflictMatrix conflict_matrix_from_geometry(const std::vector<geom::Guideway>& guideways);

/// Full signal assignment across all movements at one instant.
struct PhaseState {
  std::string id;  // catalog state name; empty for ad-hoc states
  double timestamp = 0.0;
  std::map<std::string, Indication> indications;

  Indication at(const std::string& movement_id) const;
};

/// Conflict-monitor check: pairs of distinct numbered phases that are
/// simultaneously given right-of-way despite a geometric conflict. Permissive
/// (unnumbered) movements and vehicle/bicycle pairs of one phase are exempt.
std::vector<std::pair<std::string, std::string>> validate_phase(const PhaseState& state,
                                                                const ConflictMatrix& matrix);

struct PhaseRecord {
  std::string phase_id;
  double start = 0.0;  // s
  double end = 0.0;    // s
};

/// Append-only, time-ordered log of completed phase intervals.
struct PhaseLog {
  std::vector<PhaseRecord> records;

  void append(PhaseRecord r);
  void write(std::ostream& os) const;  // "phase_id start_s end_s", 3 decimals
  static PhaseLog read(std::istream& is);
};

struct SpatEstimate {
  std::string current_phase_id;
  double elapsed = 0.0;
  double expected_remaining = 0.0;
  std::map<double, double> quantile_remaining;  // {0.1, 0.5, 0.9} -> s
  std::string next_phase_id;
};

/// Fixed-time signal plan: ordered (state id, duration) entries cycled.
/// During the last yellow_tail seconds of an entry, vehicle movements that
/// lose right-of-way in the next entry display yellow instead of green.
struct PhasePlan {
  struct Entry {
    std::string state_id;
    double duration = 0.0;
    double yellow_tail = 0.0;
  };
  std::vector<Entry> entries;

  double cycle_length() const;
  /// State id and elapsed time within it at absolute time t.
  std::pair<std::string, double> at(double t) const;
  PhaseLog to_log(double t_begin, double t_end) const;
};

/// Empirical conditional estimate from history: remaining duration given the
/// phase already lasted `elapsed`. Throws SignalError when the log carries no
/// usable instance.
SpatEstimate spat_estimate(const PhaseLog& log, const std::string& current_phase_id,
                           double elapsed);

/// Deterministic estimate from a fixed-time plan: the exact remainder.
SpatEstimate spat_estimate(const PhasePlan& plan, const std::string& current_phase_id,
                           double elapsed);

/// Catalog of the controller's legal full-phase states.
struct PhaseCatalog {
  std::vector<PhaseState> states;

  const PhaseState& state(const std::string& id) const;
  bool has(const std::string& id) const;
};

/// Instantaneous full-phase state under a fixed-time plan, with yellow tails
/// applied. The emitted state keeps the catalog state's id.
PhaseState plan_state_at(const PhasePlan& plan, const PhaseCatalog& catalog, double t);

/// All catalog states consistent with every observed indication. An empty
/// result signals an inconsistent observation. The matrix is used to assert
/// catalog legality in debug builds only.
std::vector<PhaseState> enumerate_compatible_configs(
    const std::map<std::string, Indication>& observed, const ConflictMatrix& matrix,
    const PhaseCatalog& catalog);

/// What one approach's signal face implies for movement indications: the ball
/// drives through/right movements, the arrow the left movements, and the tied
/// crosswalk goes dont-walk whenever the ball is red.
struct SignalFace {
  geom::Approach approach = geom::Approach::South;
  std::vector<std::string> ball_movements;
  std::vector<std::string> arrow_movements;
  std::vector<std::string> tied_pedestrian;  // walk only while ball green
};

struct SignalFaces {
  std::vector<SignalFace> faces;
  const SignalFace& at(geom::Approach a) const;
};

}  // namespace crossguard::sig

#endif
