#ifndef CROSSGUARD_I2V_HPP
#define CROSSGUARD_I2V_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "crossguard/geometry.hpp"
#include "crossguard/resolve.hpp"
#include "crossguard/signal_state.hpp"

namespace crossguard::i2v {

class CodecError : public std::runtime_error {
public:
  explicit CodecError(const std::string& what) : std::runtime_error(what) {}
};

/// Full signal phase plus the time-to-change estimate, broadcast every tick.
struct SpatMessage {
  std::string intersection_id;
  std::uint64_t seq = 0;
  std::int64_t timestamp_ms = 0;
  std::string current_phase_id;
  std::int64_t expected_remaining_ms = 0;
  std::int64_t q10_ms = 0;
  std::int64_t q50_ms = 0;
  std::int64_t q90_ms = 0;
  std::string next_phase_id;
  std::vector<std::pair<std::string, sig::Indication>> movements;  // sorted by id

  bool operator==(const SpatMessage&) const = default;
};

/// Blind-zone occupancy, the step-4 collision-avoidance message.
struct IcaMessage {
  std::string intersection_id;
  std::uint64_t seq = 0;
  std::int64_t timestamp_ms = 0;
  std::vector<std::pair<std::string, resolve::ZoneOccupancy>> entries;  // sorted by id

  bool operator==(const IcaMessage&) const = default;
};

struct NamedPolygon {
  std::string id;
  std::vector<geom::Point2D> vertices;

  bool operator==(const NamedPolygon& o) const;
};

/// Static intersection description a connected user may download.
struct MapMessage {
  std::string intersection_id;
  int version = 1;
  std::vector<NamedPolygon> guideways;
  std::vector<NamedPolygon> zones;
  std::vector<NamedPolygon> blind_zones;

  bool operator==(const MapMessage&) const = default;
};

/// Red-light violator warning to conflicting right-of-way movements.
struct AlertMessage {
  std::string intersection_id;
  std::uint64_t seq = 0;
  std::int64_t timestamp_ms = 0;
  std::string movement;  // the violating track's movement
  std::int64_t lead_time_ms = 0;
  std::vector<std::string> conflicting_movements;

  bool operator==(const AlertMessage&) const = default;
};

using Message = std::variant<SpatMessage, IcaMessage, MapMessage, AlertMessage>;

/// Canonical wire form: "CGW1 <TYPE> <length>\n" + ordered key=value lines +
/// a blank terminator. Encoding is a pure function of content.
std::string encode(const Message& msg);

/// Strict decode; throws CodecError on any malformed, truncated or
/// duplicate-id input. decode(encode(m)) == m.
Message decode(const std::string& bytes);

const std::string& intersection_of(const Message& m);
std::uint64_t seq_of(const Message& m);
std::int64_t timestamp_of(const Message& m);
const char* type_of(const Message& m);

}  // namespace crossguard::i2v

#endif
