#include "crossguard/signal_state.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "crossguard/conflict.hpp"

namespace crossguard::sig {

const char* to_string(Indication i) {
  switch (i) {
    case Indication::Green: return "green";
    case Indication::Yellow: return "yellow";
    case Indication::Red: return "red";
    case Indication::Walk: return "walk";
    case Indication::DontWalk: return "dont_walk";
  }
  return "?";
}

Indication indication_from_string(const std::string& s) {
  if (s == "green") return Indication::Green;
  if (s == "yellow") return Indication::Yellow;
  if (s == "red") return Indication::Red;
  if (s == "walk") return Indication::Walk;
  if (s == "dont_walk") return Indication::DontWalk;
  throw SignalError("unknown indication: " + s);
}

bool is_go(Indication i) {
  return i == Indication::Green || i == Indication::Yellow || i == Indication::Walk;
}

ConflictMatrix::ConflictMatrix(std::vector<geom::Movement> movements,
                               std::vector<std::vector<bool>> bits)
    : movements_(std::move(movements)), bits_(std::move(bits)) {
  for (std::size_t i = 0; i < movements_.size(); ++i) index_[movements_[i].id()] = i;
  if (bits_.size() != movements_.size())
    throw SignalError("conflict matrix dimension mismatch");
}

bool ConflictMatrix::conflicts(const std::string& a, const std::string& b) const {
  auto ia = index_.find(a), ib = index_.find(b);
  if (ia == index_.end()) throw SignalError("unknown movement: " + a);
  if (ib == index_.end()) throw SignalError("unknown movement: " + b);
  return bits_[ia->second][ib->second];
}

const geom::Movement& ConflictMatrix::movement(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw SignalError("unknown movement: " + id);
  return movements_[it->second];
}

bool ConflictMatrix::has(const std::string& id) const { return index_.count(id) > 0; }

ConflictMatrix conflict_matrix_from_geometry(const std::vector<geom::Guideway>& guideways) {
  // parallel guideways of one movement aggregate: the movements conflict when
  // any guideway pair overlaps
  std::vector<geom::Movement> movements;
  std::map<std::string, std::size_t> idx;
  for (const auto& g : guideways) {
    if (idx.count(g.movement.id())) continue;
    idx[g.movement.id()] = movements.size();
    movements.push_back(g.movement);
  }
  std::size_t n = movements.size();
  std::vector<std::vector<bool>> bits(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < guideways.size(); ++i)
    for (std::size_t j = i + 1; j < guideways.size(); ++j) {
      std::size_t a = idx[guideways[i].movement.id()];
      std::size_t b = idx[guideways[j].movement.id()];
      if (a == b || bits[a][b]) continue;
      if (!geom::conflict_zones(guideways[i], guideways[j]).empty())
        bits[a][b] = bits[b][a] = true;
    }
  return ConflictMatrix(std::move(movements), std::move(bits));
}

Indication PhaseState::at(const std::string& movement_id) const {
  auto it = indications.find(movement_id);
  if (it == indications.end()) throw SignalError("phase state misses movement " + movement_id);
  return it->second;
}

std::vector<std::pair<std::string, std::string>> validate_phase(const PhaseState& state,
                                                                const ConflictMatrix& matrix) {
  std::vector<std::pair<std::string, std::string>> bad;
  std::vector<std::string> going;
  for (const auto& [id, ind] : state.indications) {
    if (!matrix.has(id)) throw SignalError("phase state names unknown movement " + id);
    if (is_go(ind)) going.push_back(id);
  }
  for (std::size_t i = 0; i < going.size(); ++i)
    for (std::size_t j = i + 1; j < going.size(); ++j) {
      const auto& ma = matrix.movement(going[i]);
      const auto& mb = matrix.movement(going[j]);
      if (!ma.phase_label || !mb.phase_label) continue;  // permissive, yields
      if (*ma.phase_label == *mb.phase_label) continue;  // one signal stream
      if (matrix.conflicts(going[i], going[j])) bad.emplace_back(going[i], going[j]);
    }
  return bad;
}

void PhaseLog::append(PhaseRecord r) {
  if (r.end <= r.start) throw SignalError("phase record with nonpositive duration");
  if (!records.empty() && r.start < records.back().end - 1e-9)
    throw SignalError("phase records overlap");
  records.push_back(std::move(r));
}

void PhaseLog::write(std::ostream& os) const {
  char buf[128];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%s %.3f %.3f\n", r.phase_id.c_str(), r.start, r.end);
    os << buf;
  }
}

PhaseLog PhaseLog::read(std::istream& is) {
  PhaseLog log;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    PhaseRecord r;
    if (!(ls >> r.phase_id >> r.start >> r.end))
      throw SignalError("malformed phase log line: " + line);
    log.append(std::move(r));
  }
  return log;
}

double PhasePlan::cycle_length() const {
  double c = 0.0;
  for (const auto& e : entries) c += e.duration;
  return c;
}

std::pair<std::string, double> PhasePlan::at(double t) const {
  if (entries.empty()) throw SignalError("empty phase plan");
  double cycle = cycle_length();
  double u = std::fmod(t, cycle);
  if (u < 0) u += cycle;
  for (const auto& e : entries) {
    if (u < e.duration) return {e.state_id, u};
    u -= e.duration;
  }
  return {entries.back().state_id, entries.back().duration};
}

PhaseLog PhasePlan::to_log(double t_begin, double t_end) const {
  PhaseLog log;
  double t = t_begin;
  auto [id, elapsed] = at(t_begin);
  t -= elapsed;
  std::size_t idx = 0;
  while (entries[idx].state_id != id) ++idx;
  while (t < t_end) {
    double dur = entries[idx].duration;
    if (t + dur <= t_end && t >= t_begin)
      log.append({entries[idx].state_id, t, t + dur});
    t += dur;
    idx = (idx + 1) % entries.size();
  }
  return log;
}

SpatEstimate spat_estimate(const PhaseLog& log, const std::string& current_phase_id,
                           double elapsed) {
  if (elapsed < 0) throw SignalError("negative elapsed time");
  std::vector<double> remaining;
  for (const auto& r : log.records) {
    if (r.phase_id != current_phase_id) continue;
    double d = r.end - r.start;
    if (d > elapsed) remaining.push_back(d - elapsed);
  }
  if (remaining.empty())
    throw SignalError("spat estimate unavailable: no logged " + current_phase_id +
                      " instance longer than elapsed");
  std::sort(remaining.begin(), remaining.end());
  SpatEstimate est;
  est.current_phase_id = current_phase_id;
  est.elapsed = elapsed;
  double sum = 0.0;
  for (double v : remaining) sum += v;
  est.expected_remaining = sum / remaining.size();
  for (double q : {0.1, 0.5, 0.9}) {
    // smallest order statistic with cumulative frequency >= q
    std::size_t k = static_cast<std::size_t>(std::ceil(q * remaining.size()));
    k = std::max<std::size_t>(k, 1);
    est.quantile_remaining[q] = remaining[k - 1];
  }
  // most frequent successor, ties to the lexicographically smallest id
  std::map<std::string, int> succ;
  for (std::size_t i = 0; i + 1 < log.records.size(); ++i)
    if (log.records[i].phase_id == current_phase_id)
      ++succ[log.records[i + 1].phase_id];
  int best = 0;
  for (const auto& [id, n] : succ)
    if (n > best) {
      best = n;
      est.next_phase_id = id;
    }
  return est;
}

SpatEstimate spat_estimate(const PhasePlan& plan, const std::string& current_phase_id,
                           double elapsed) {
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    const auto& e = plan.entries[i];
    if (e.state_id != current_phase_id) continue;
    if (elapsed >= e.duration)
      throw SignalError("elapsed exceeds planned duration of " + current_phase_id);
    SpatEstimate est;
    est.current_phase_id = current_phase_id;
    est.elapsed = elapsed;
    est.expected_remaining = e.duration - elapsed;
    for (double q : {0.1, 0.5, 0.9}) est.quantile_remaining[q] = est.expected_remaining;
    est.next_phase_id = plan.entries[(i + 1) % plan.entries.size()].state_id;
    return est;
  }
  throw SignalError("phase " + current_phase_id + " not in plan");
}

PhaseState plan_state_at(const PhasePlan& plan, const PhaseCatalog& catalog, double t) {
  auto [id, elapsed] = plan.at(t);
  std::size_t idx = 0;
  while (plan.entries[idx].state_id != id) ++idx;
  const auto& entry = plan.entries[idx];
  const auto& next = catalog.state(plan.entries[(idx + 1) % plan.entries.size()].state_id);
  PhaseState out = catalog.state(id);
  out.timestamp = t;
  if (entry.yellow_tail > 0.0 && elapsed >= entry.duration - entry.yellow_tail) {
    for (auto& [mid, ind] : out.indications)
      if (ind == Indication::Green && next.at(mid) == Indication::Red)
        ind = Indication::Yellow;
  }
  return out;
}

const PhaseState& PhaseCatalog::state(const std::string& id) const {
  for (const auto& s : states)
    if (s.id == id) return s;
  throw SignalError("unknown catalog state: " + id);
}

bool PhaseCatalog::has(const std::string& id) const {
  for (const auto& s : states)
    if (s.id == id) return true;
  return false;
}

std::vector<PhaseState> enumerate_compatible_configs(
    const std::map<std::string, Indication>& observed, const ConflictMatrix& matrix,
    const PhaseCatalog& catalog) {
#ifndef NDEBUG
  for (const auto& s : catalog.states) assert(validate_phase(s, matrix).empty());
#else
  (void)matrix;
#endif
  std::vector<PhaseState> out;
  for (const auto& s : catalog.states) {
    bool ok = true;
    for (const auto& [id, ind] : observed) {
      if (s.at(id) != ind) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(s);
  }
  return out;
}

const SignalFace& SignalFaces::at(geom::Approach a) const {
  for (const auto& f : faces)
    if (f.approach == a) return f;
  throw SignalError("no signal face for approach");
}

}  // namespace crossguard::sig
