#include "crossguard/i2v.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <set>
#include <sstream>

namespace crossguard::i2v {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put(std::string& out, const std::string& key, const std::string& value) {
  out += key;
  out += '=';
  out += value;
  out += '\n';
}

void put_u64(std::string& out, const std::string& key, std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%" PRIu64, v);
  put(out, key, buf);
}

void put_i64(std::string& out, const std::string& key, std::int64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%" PRId64, v);
  put(out, key, buf);
}

std::string polygon_value(const NamedPolygon& p) {
  std::string v = p.id + ":";
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    if (i) v += ';';
    v += fmt_double(p.vertices[i].x) + "," + fmt_double(p.vertices[i].y);
  }
  return v;
}

struct BodyReader {
  std::vector<std::pair<std::string, std::string>> lines;
  std::size_t pos = 0;

  explicit BodyReader(const std::string& body) {
    std::size_t at = 0;
    while (at < body.size()) {
      auto nl = body.find('\n', at);
      if (nl == std::string::npos) throw CodecError("body line without newline");
      std::string line = body.substr(at, nl - at);
      at = nl + 1;
      if (line.empty()) {
        if (at != body.size()) throw CodecError("content after body terminator");
        return;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) throw CodecError("body line without '=': " + line);
      lines.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    throw CodecError("missing blank body terminator");
  }

  std::string expect(const std::string& key) {
    if (pos >= lines.size()) throw CodecError("missing field " + key);
    if (lines[pos].first != key)
      throw CodecError("expected field " + key + ", found " + lines[pos].first);
    return lines[pos++].second;
  }
  bool peek(const std::string& key) const {
    return pos < lines.size() && lines[pos].first == key;
  }
  std::string take(const std::string& key) { return expect(key); }
  bool done() const { return pos == lines.size(); }
};

std::uint64_t parse_u64(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw CodecError("bad unsigned integer: " + s);
  return std::stoull(s);
}

std::int64_t parse_i64(const std::string& s) {
  std::size_t skip = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (s.size() == skip || s.find_first_not_of("0123456789", skip) != std::string::npos)
    throw CodecError("bad integer: " + s);
  return std::stoll(s);
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw CodecError("bad number: " + s);
  return v;
}

NamedPolygon parse_polygon(const std::string& v) {
  auto colon = v.find(':');
  if (colon == std::string::npos) throw CodecError("polygon value without id");
  NamedPolygon p;
  p.id = v.substr(0, colon);
  std::string rest = v.substr(colon + 1);
  std::size_t at = 0;
  while (at < rest.size()) {
    auto semi = rest.find(';', at);
    std::string pair = rest.substr(at, semi == std::string::npos ? std::string::npos : semi - at);
    at = semi == std::string::npos ? rest.size() : semi + 1;
    auto comma = pair.find(',');
    if (comma == std::string::npos) throw CodecError("polygon vertex without comma");
    p.vertices.push_back({parse_double(pair.substr(0, comma)), parse_double(pair.substr(comma + 1))});
  }
  return p;
}

template <typename T>
void check_sorted_unique(const std::vector<std::pair<std::string, T>>& entries,
                         const char* what) {
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i - 1].first == entries[i].first)
      throw CodecError(std::string("duplicate ") + what + " id: " + entries[i].first);
  }
  std::set<std::string> seen;
  for (const auto& [id, v] : entries)
    if (!seen.insert(id).second)
      throw CodecError(std::string("duplicate ") + what + " id: " + id);
}

std::string encode_body(const SpatMessage& m) {
  if (m.expected_remaining_ms < 0) throw CodecError("negative expected_remaining_ms");
  auto sorted = m.movements;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  check_sorted_unique(sorted, "movement");
  std::string b;
  put(b, "intersection", m.intersection_id);
  put_u64(b, "seq", m.seq);
  put_i64(b, "timestamp_ms", m.timestamp_ms);
  put(b, "phase", m.current_phase_id);
  put_i64(b, "expected_remaining_ms", m.expected_remaining_ms);
  put_i64(b, "q10_ms", m.q10_ms);
  put_i64(b, "q50_ms", m.q50_ms);
  put_i64(b, "q90_ms", m.q90_ms);
  put(b, "next_phase", m.next_phase_id);
  for (const auto& [id, ind] : sorted) put(b, "movement", id + ":" + sig::to_string(ind));
  return b;
}

std::string encode_body(const IcaMessage& m) {
  auto sorted = m.entries;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  check_sorted_unique(sorted, "blind zone");
  std::string b;
  put(b, "intersection", m.intersection_id);
  put_u64(b, "seq", m.seq);
  put_i64(b, "timestamp_ms", m.timestamp_ms);
  for (const auto& [id, st] : sorted) put(b, "zone", id + ":" + resolve::to_string(st));
  return b;
}

std::string encode_body(const MapMessage& m) {
  std::string b;
  put(b, "intersection", m.intersection_id);
  put_i64(b, "version", m.version);
  for (const auto& g : m.guideways) put(b, "guideway", polygon_value(g));
  for (const auto& z : m.zones) put(b, "zone", polygon_value(z));
  for (const auto& z : m.blind_zones) put(b, "blindzone", polygon_value(z));
  return b;
}

std::string encode_body(const AlertMessage& m) {
  std::string b;
  put(b, "intersection", m.intersection_id);
  put_u64(b, "seq", m.seq);
  put_i64(b, "timestamp_ms", m.timestamp_ms);
  put(b, "movement", m.movement);
  put_i64(b, "lead_time_ms", m.lead_time_ms);
  for (const auto& c : m.conflicting_movements) put(b, "conflicting", c);
  return b;
}

SpatMessage decode_spat(BodyReader& r) {
  SpatMessage m;
  m.intersection_id = r.expect("intersection");
  m.seq = parse_u64(r.expect("seq"));
  m.timestamp_ms = parse_i64(r.expect("timestamp_ms"));
  m.current_phase_id = r.expect("phase");
  m.expected_remaining_ms = parse_i64(r.expect("expected_remaining_ms"));
  if (m.expected_remaining_ms < 0) throw CodecError("negative expected_remaining_ms");
  m.q10_ms = parse_i64(r.expect("q10_ms"));
  m.q50_ms = parse_i64(r.expect("q50_ms"));
  m.q90_ms = parse_i64(r.expect("q90_ms"));
  m.next_phase_id = r.expect("next_phase");
  while (r.peek("movement")) {
    std::string v = r.take("movement");
    auto colon = v.rfind(':');
    if (colon == std::string::npos) throw CodecError("movement entry without indication");
    m.movements.emplace_back(v.substr(0, colon),
                             sig::indication_from_string(v.substr(colon + 1)));
  }
  check_sorted_unique(m.movements, "movement");
  return m;
}

IcaMessage decode_ica(BodyReader& r) {
  IcaMessage m;
  m.intersection_id = r.expect("intersection");
  m.seq = parse_u64(r.expect("seq"));
  m.timestamp_ms = parse_i64(r.expect("timestamp_ms"));
  while (r.peek("zone")) {
    std::string v = r.take("zone");
    auto colon = v.rfind(':');
    if (colon == std::string::npos) throw CodecError("zone entry without status");
    m.entries.emplace_back(v.substr(0, colon),
                           resolve::zone_occupancy_from_string(v.substr(colon + 1)));
  }
  check_sorted_unique(m.entries, "blind zone");
  return m;
}

MapMessage decode_map(BodyReader& r) {
  MapMessage m;
  m.intersection_id = r.expect("intersection");
  m.version = static_cast<int>(parse_i64(r.expect("version")));
  while (r.peek("guideway")) m.guideways.push_back(parse_polygon(r.take("guideway")));
  while (r.peek("zone")) m.zones.push_back(parse_polygon(r.take("zone")));
  while (r.peek("blindzone")) m.blind_zones.push_back(parse_polygon(r.take("blindzone")));
  return m;
}

AlertMessage decode_alert(BodyReader& r) {
  AlertMessage m;
  m.intersection_id = r.expect("intersection");
  m.seq = parse_u64(r.expect("seq"));
  m.timestamp_ms = parse_i64(r.expect("timestamp_ms"));
  m.movement = r.expect("movement");
  m.lead_time_ms = parse_i64(r.expect("lead_time_ms"));
  while (r.peek("conflicting")) m.conflicting_movements.push_back(r.take("conflicting"));
  return m;
}

}  // namespace

bool NamedPolygon::operator==(const NamedPolygon& o) const {
  if (id != o.id || vertices.size() != o.vertices.size()) return false;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].x != o.vertices[i].x || vertices[i].y != o.vertices[i].y) return false;
  return true;
}

std::string encode(const Message& msg) {
  std::string body = std::visit([](const auto& m) { return encode_body(m); }, msg);
  body += '\n';  // blank terminator line
  char header[64];
  std::snprintf(header, sizeof header, "CGW1 %s %zu\n", type_of(msg), body.size());
  return std::string(header) + body;
}

Message decode(const std::string& bytes) {
  auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw CodecError("missing header line");
  std::istringstream hs(bytes.substr(0, nl));
  std::string magic, type;
  std::size_t length = 0;
  if (!(hs >> magic >> type >> length)) throw CodecError("malformed header");
  if (magic != "CGW1") throw CodecError("unknown version tag " + magic);
  std::string rest = bytes.substr(nl + 1);
  if (rest.size() < length) throw CodecError("truncated payload");
  if (rest.size() > length) throw CodecError("trailing bytes after payload");
  BodyReader r(rest);
  Message out;
  if (type == "SPAT") out = decode_spat(r);
  else if (type == "ICA") out = decode_ica(r);
  else if (type == "MAP") out = decode_map(r);
  else if (type == "ALERT") out = decode_alert(r);
  else throw CodecError("unknown message type " + type);
  if (!r.done()) throw CodecError("unexpected extra field " + r.lines[r.pos].first);
  return out;
}

const std::string& intersection_of(const Message& m) {
  return std::visit([](const auto& x) -> const std::string& { return x.intersection_id; }, m);
}

std::uint64_t seq_of(const Message& m) {
  if (std::holds_alternative<MapMessage>(m)) return 0;
  return std::visit(
      [](const auto& x) -> std::uint64_t {
        if constexpr (requires { x.seq; }) return x.seq;
        else return 0;
      },
      m);
}

std::int64_t timestamp_of(const Message& m) {
  return std::visit(
      [](const auto& x) -> std::int64_t {
        if constexpr (requires { x.timestamp_ms; }) return x.timestamp_ms;
        else return 0;
      },
      m);
}

const char* type_of(const Message& m) {
  if (std::holds_alternative<SpatMessage>(m)) return "SPAT";
  if (std::holds_alternative<IcaMessage>(m)) return "ICA";
  if (std::holds_alternative<MapMessage>(m)) return "MAP";
  return "ALERT";
}

}  // namespace crossguard::i2v
