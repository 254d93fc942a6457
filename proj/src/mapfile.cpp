#include "crossguard/mapfile.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace crossguard::cli {

using geom::Approach;
using geom::Mode;
using geom::Movement;
using geom::Point2D;
using geom::Protection;
using geom::Turn;
using sig::Indication;

std::string MovementSpec::guideway_id() const {
  std::string id = movement.id();
  if (!tag.empty()) id += "#" + tag;
  return id;
}

const LaneSpec* IntersectionMapFile::lane(const std::string& id) const {
  for (const auto& l : lanes)
    if (l.id == id) return &l;
  return nullptr;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

Protection protection_from_string(const std::string& s) {
  if (s == "protected") return Protection::Protected;
  if (s == "permissive") return Protection::Permissive;
  if (s == "protected_permissive") return Protection::ProtectedPermissive;
  throw MapError("unknown protection: " + s);
}

const char* protection_to_string(Protection p) {
  switch (p) {
    case Protection::Protected: return "protected";
    case Protection::Permissive: return "permissive";
    case Protection::ProtectedPermissive: return "protected_permissive";
  }
  return "?";
}

}  // namespace

IntersectionMapFile parse_map(std::istream& is) {
  IntersectionMapFile map;
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    auto fail = [&](const std::string& why) {
      throw MapError("map line " + std::to_string(lineno) + ": " + why);
    };
    if (kw == "crossguard-map") {
      ls >> map.schema_version;
      if (map.schema_version != 1) fail("unsupported schema version");
      header = true;
    } else if (!header) {
      fail("missing crossguard-map header");
    } else if (kw == "name") {
      ls >> map.name;
    } else if (kw == "runway") {
      ls >> map.runway;
    } else if (kw == "lane") {
      LaneSpec l;
      std::string mode, kind;
      if (!(ls >> l.id >> kind >> mode >> l.point.x >> l.point.y >> l.heading.x >>
            l.heading.y >> l.width))
        fail("malformed lane");
      l.mode = geom::mode_from_string(mode);
      l.is_entry = (kind == "entry");
      if (!l.is_entry && kind != "exit") fail("lane kind must be entry|exit");
      map.lanes.push_back(l);
    } else if (kw == "movement") {
      MovementSpec m;
      std::string mode, approach, turn, word;
      if (!(ls >> mode >> approach >> turn >> m.entry_lane >> m.exit_lane))
        fail("malformed movement");
      m.movement.mode = geom::mode_from_string(mode);
      m.movement.approach = geom::approach_from_string(approach);
      m.movement.turn = geom::turn_from_string(turn);
      m.movement.protection =
          m.movement.turn == Turn::Right ? Protection::Permissive : Protection::Protected;
      while (ls >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos) fail("movement option needs key=value: " + word);
        std::string k = word.substr(0, eq), v = word.substr(eq + 1);
        if (k == "label") m.movement.phase_label = v;
        else if (k == "protection") m.movement.protection = protection_from_string(v);
        else if (k == "tag") m.tag = v;
        else fail("unknown movement option " + k);
      }
      map.movements.push_back(m);
    } else if (kw == "crosswalk") {
      CrosswalkSpec c;
      std::string leg, word;
      if (!(ls >> leg >> c.a.x >> c.a.y >> c.b.x >> c.b.y >> c.width))
        fail("malformed crosswalk");
      c.leg = geom::approach_from_string(leg);
      while (ls >> word) {
        auto eq = word.find('=');
        if (eq != std::string::npos && word.substr(0, eq) == "label")
          c.label = word.substr(eq + 1);
        else
          fail("unknown crosswalk option " + word);
      }
      map.crosswalks.push_back(c);
    } else if (kw == "face") {
      sig::SignalFace f;
      std::string approach, word;
      if (!(ls >> approach)) fail("malformed face");
      f.approach = geom::approach_from_string(approach);
      while (ls >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos) fail("face option needs key=value");
        std::string k = word.substr(0, eq);
        auto ids = split(word.substr(eq + 1), ',');
        if (k == "ball") f.ball_movements = ids;
        else if (k == "arrow") f.arrow_movements = ids;
        else if (k == "tied") f.tied_pedestrian = ids;
        else fail("unknown face option " + k);
      }
      map.faces.faces.push_back(std::move(f));
    } else if (kw == "state") {
      StateSpec st;
      if (!(ls >> st.id)) fail("malformed state");
      std::string word;
      while (ls >> word) {
        for (const auto& item : split(word, ',')) {
          auto eq = item.find('=');
          if (eq == std::string::npos) fail("state entry needs movement=indication");
          st.go[item.substr(0, eq)] = sig::indication_from_string(item.substr(eq + 1));
        }
      }
      map.states.push_back(std::move(st));
    } else if (kw == "plan") {
      std::string word;
      while (ls >> word) {
        auto parts = split(word, ':');
        if (parts.size() < 2 || parts.size() > 3) fail("plan entry needs state:dur[:yellow]");
        sig::PhasePlan::Entry e;
        e.state_id = parts[0];
        e.duration = std::stod(parts[1]);
        if (parts.size() == 3) e.yellow_tail = std::stod(parts[2]);
        map.plan.entries.push_back(std::move(e));
      }
    } else {
      fail("unknown keyword " + kw);
    }
  }
  if (!header) throw MapError("missing crossguard-map header");
  return map;
}

IntersectionMapFile parse_map_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MapError("cannot open map file " + path);
  return parse_map(f);
}

void write_map(const IntersectionMapFile& map, std::ostream& os) {
  char buf[256];
  os << "crossguard-map " << map.schema_version << "\n";
  os << "name " << map.name << "\n";
  std::snprintf(buf, sizeof buf, "runway %.3f\n", map.runway);
  os << buf;
  for (const auto& l : map.lanes) {
    std::snprintf(buf, sizeof buf, "lane %s %s %s %.3f %.3f %.3f %.3f %.3f\n", l.id.c_str(),
                  l.is_entry ? "entry" : "exit", geom::to_string(l.mode), l.point.x, l.point.y,
                  l.heading.x, l.heading.y, l.width);
    os << buf;
  }
  for (const auto& m : map.movements) {
    os << "movement " << geom::to_string(m.movement.mode) << " "
       << geom::to_string(m.movement.approach) << " " << geom::to_string(m.movement.turn)
       << " " << m.entry_lane << " " << m.exit_lane;
    if (m.movement.phase_label) os << " label=" << *m.movement.phase_label;
    os << " protection=" << protection_to_string(m.movement.protection);
    if (!m.tag.empty()) os << " tag=" << m.tag;
    os << "\n";
  }
  for (const auto& c : map.crosswalks) {
    std::snprintf(buf, sizeof buf, "crosswalk %s %.3f %.3f %.3f %.3f %.3f label=%s\n",
                  geom::to_string(c.leg), c.a.x, c.a.y, c.b.x, c.b.y, c.width,
                  c.label.c_str());
    os << buf;
  }
  for (const auto& f : map.faces.faces) {
    os << "face " << geom::to_string(f.approach);
    auto join = [&](const char* key, const std::vector<std::string>& ids) {
      if (ids.empty()) return;
      os << " " << key << "=";
      for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? "," : "") << ids[i];
    };
    join("ball", f.ball_movements);
    join("arrow", f.arrow_movements);
    join("tied", f.tied_pedestrian);
    os << "\n";
  }
  for (const auto& st : map.states) {
    os << "state " << st.id;
    for (const auto& [mid, ind] : st.go) os << " " << mid << "=" << sig::to_string(ind);
    os << "\n";
  }
  if (!map.plan.entries.empty()) {
    os << "plan";
    for (const auto& e : map.plan.entries) {
      std::snprintf(buf, sizeof buf, " %s:%g", e.state_id.c_str(), e.duration);
      os << buf;
      if (e.yellow_tail > 0) {
        std::snprintf(buf, sizeof buf, ":%g", e.yellow_tail);
        os << buf;
      }
    }
    os << "\n";
  }
}

namespace {

// fourleg-basic: four symmetric legs. Per approach (local frame, entering
// +y, stop bar at y=-51): vehicle left lane center x=6, through x=18, bike
// lane x=26.5 between through and the right-turn pocket at x=35. Exit lanes
// end 20 ft past the far crosswalk. Crosswalk band spans y in [-51,-41].
IntersectionMapFile fourleg_basic() {
  IntersectionMapFile map;
  map.name = "fourleg-basic";
  map.runway = 250.0;
  const char* APP = "SENW";  // rotating the south leg CCW visits east, north, west
  auto lane_id = [&](int k, const std::string& n) { return std::string(1, APP[k]) + "_" + n; };
  for (int k = 0; k < 4; ++k) {
    auto R = [&](Point2D p) { return geom::rot90(p, k); };
    Point2D in_h = R({0, 1}), out_h = R({0, -1});
    auto add_lane = [&](const std::string& n, Mode mode, Point2D p, Point2D h, double w) {
      map.lanes.push_back({lane_id(k, n), mode, n.rfind("in_", 0) == 0, p, h, w});
    };
    add_lane("in_left", Mode::Vehicle, R({6, -51}), in_h, 12);
    add_lane("in_thru", Mode::Vehicle, R({18, -51}), in_h, 12);
    add_lane("in_bike", Mode::Bicycle, R({26.5, -51}), in_h, 5);
    add_lane("in_right", Mode::Vehicle, R({35, -51}), in_h, 12);
    add_lane("out_inner", Mode::Vehicle, R({-6, -71}), out_h, 12);
    add_lane("out_middle", Mode::Vehicle, R({-18, -71}), out_h, 12);
    add_lane("out_bike", Mode::Bicycle, R({-26.5, -71}), out_h, 5);
    add_lane("out_curb", Mode::Vehicle, R({-35, -71}), out_h, 12);
  }
  // phase numbering: phi6/phi1 south, phi2/phi5 north, phi8/phi3 west,
  // phi4/phi7 east; P8 south crosswalk, P6 east, P4 north, P2 west.
  const char* thru_label[4] = {"phi6", "phi4", "phi2", "phi8"};  // S,E,N,W
  const char* left_label[4] = {"phi1", "phi7", "phi5", "phi3"};
  const char* ped_label[4] = {"P8", "P6", "P4", "P2"};
  auto appr = [&](int k) { return geom::approach_from_string(std::string(1, APP[k])); };
  for (int k = 0; k < 4; ++k) {
    int left_leg = (k + 3) % 4, right_leg = (k + 1) % 4;
    auto mv = [&](Mode mode, Turn turn, const std::string& in, const std::string& out,
                  std::optional<std::string> label, Protection prot) {
      MovementSpec m;
      m.movement = {appr(k), turn, mode, std::move(label), prot};
      m.entry_lane = in;
      m.exit_lane = out;
      map.movements.push_back(std::move(m));
    };
    mv(Mode::Vehicle, Turn::Through, lane_id(k, "in_thru"), lane_id((k + 2) % 4, "out_middle"),
       thru_label[k], Protection::Protected);
    mv(Mode::Vehicle, Turn::Left, lane_id(k, "in_left"), lane_id(left_leg, "out_inner"),
       left_label[k], Protection::ProtectedPermissive);
    mv(Mode::Vehicle, Turn::Right, lane_id(k, "in_right"), lane_id(right_leg, "out_inner"),
       std::nullopt, Protection::Permissive);
    mv(Mode::Bicycle, Turn::Through, lane_id(k, "in_bike"), lane_id((k + 2) % 4, "out_bike"),
       thru_label[k], Protection::Protected);
    mv(Mode::Bicycle, Turn::Left, lane_id(k, "in_left"), lane_id(left_leg, "out_bike"),
       left_label[k], Protection::ProtectedPermissive);
    mv(Mode::Bicycle, Turn::Right, lane_id(k, "in_bike"), lane_id(right_leg, "out_bike"),
       std::nullopt, Protection::Permissive);
    map.crosswalks.push_back(
        {appr(k), geom::rot90({-45, -46}, k), geom::rot90({45, -46}, k), 8.0, ped_label[k]});
  }
  // signal faces; the tied crosswalk is the one whose walk runs only with
  // this approach's ball (no LPI on the north-south crossing)
  auto face = [&](const char* a, const char* tied) {
    sig::SignalFace f;
    f.approach = geom::approach_from_string(a);
    std::string A(a);
    f.ball_movements = {"veh:" + A + ":through", "bike:" + A + ":through",
                        "veh:" + A + ":right", "bike:" + A + ":right"};
    f.arrow_movements = {"veh:" + A + ":left", "bike:" + A + ":left"};
    if (tied) f.tied_pedestrian = {std::string("ped:") + tied};
    map.faces.faces.push_back(std::move(f));
  };
  face("S", "E");  // P6 walks only while phi6 is green
  face("N", "W");  // P2 walks only while phi2 is green
  face("E", nullptr);  // P4/P8 have a leading pedestrian interval: no tie
  face("W", nullptr);
  auto G = Indication::Green, W = Indication::Walk;
  map.states = {
      {"ns-left",
       {{"veh:S:left", G}, {"bike:S:left", G}, {"veh:N:left", G}, {"bike:N:left", G}}},
      {"ns-through",
       {{"veh:S:through", G}, {"bike:S:through", G}, {"veh:N:through", G},
        {"bike:N:through", G}, {"ped:E", W}, {"ped:W", W}}},
      {"ns-ped-clear",
       {{"veh:S:through", G}, {"bike:S:through", G}, {"veh:N:through", G},
        {"bike:N:through", G}}},
      {"ns-lag",
       {{"veh:S:left", G}, {"bike:S:left", G}, {"veh:S:through", G}, {"bike:S:through", G},
        {"ped:E", W}}},
      {"ew-left",
       {{"veh:W:left", G}, {"bike:W:left", G}, {"veh:E:left", G}, {"bike:E:left", G}}},
      {"ew-lpi", {{"ped:N", W}, {"ped:S", W}}},
      {"ew-through",
       {{"veh:W:through", G}, {"bike:W:through", G}, {"veh:E:through", G},
        {"bike:E:through", G}, {"ped:N", W}, {"ped:S", W}}},
      {"ew-lag",
       {{"veh:W:left", G}, {"bike:W:left", G}, {"veh:W:through", G}, {"bike:W:through", G},
        {"ped:S", W}}},
  };
  map.plan.entries = {{"ns-left", 12, 3},      {"ns-through", 24, 0}, {"ns-ped-clear", 6, 4},
                      {"ns-lag", 8, 4},        {"ew-left", 10, 3},    {"ew-lpi", 4, 0},
                      {"ew-through", 22, 4},   {"ew-lag", 8, 4}};
  return map;
}

// tempe: the section-5 replay frame. Honda = left turn from the north
// (entry lane x=-6); Volvo = through from the south in lane 3 (x=30, the
// curb lane); lanes 1-2 (x=6, 18) hold the stopped queues G1, G2. The east
// crosswalk carries the walk timer the Honda entered against.
IntersectionMapFile tempe() {
  IntersectionMapFile map;
  map.name = "tempe";
  map.runway = 700.0;
  auto add_lane = [&](const std::string& id, Mode mode, bool entry, Point2D p, Point2D h,
                      double w) { map.lanes.push_back({id, mode, entry, p, h, w}); };
  // north-south street: NB lanes x in [0,36], SB lanes x in [-36,0]
  add_lane("S_in_1", Mode::Vehicle, true, {6, -35}, {0, 1}, 12);
  add_lane("S_in_2", Mode::Vehicle, true, {18, -35}, {0, 1}, 12);
  add_lane("S_in_3", Mode::Vehicle, true, {30, -35}, {0, 1}, 12);
  add_lane("N_in_left", Mode::Vehicle, true, {-6, 35}, {0, -1}, 12);
  add_lane("N_in_thru", Mode::Vehicle, true, {-18, 35}, {0, -1}, 12);
  add_lane("N_out_1", Mode::Vehicle, false, {6, 54}, {0, 1}, 12);
  add_lane("N_out_2", Mode::Vehicle, false, {18, 54}, {0, 1}, 12);
  add_lane("N_out_3", Mode::Vehicle, false, {30, 54}, {0, 1}, 12);
  add_lane("S_out_thru", Mode::Vehicle, false, {-18, -54}, {0, -1}, 12);
  // east-west street: EB exit lanes y in [-24,0]
  add_lane("E_out_inner", Mode::Vehicle, false, {66, -6}, {1, 0}, 12);
  auto mv = [&](Mode mode, const char* a, Turn t, const std::string& in,
                const std::string& out, std::optional<std::string> label, Protection prot,
                const std::string& tag) {
    MovementSpec m;
    m.movement = {geom::approach_from_string(a), t, mode, std::move(label), prot};
    m.entry_lane = in;
    m.exit_lane = out;
    m.tag = tag;
    map.movements.push_back(std::move(m));
  };
  mv(Mode::Vehicle, "S", Turn::Through, "S_in_1", "N_out_1", "phi6", Protection::Protected, "1");
  mv(Mode::Vehicle, "S", Turn::Through, "S_in_2", "N_out_2", "phi6", Protection::Protected, "2");
  mv(Mode::Vehicle, "S", Turn::Through, "S_in_3", "N_out_3", "phi6", Protection::Protected, "3");
  mv(Mode::Vehicle, "N", Turn::Through, "N_in_thru", "S_out_thru", "phi2",
     Protection::Protected, "");
  // the Honda's permissive left: no protected arrow phase at this signal
  mv(Mode::Vehicle, "N", Turn::Left, "N_in_left", "E_out_inner", std::nullopt,
     Protection::Permissive, "");
  map.crosswalks.push_back({Approach::East, {41, -28}, {41, 28}, 8.0, "P6"});
  auto face = [&](const char* a, std::vector<std::string> ball, std::vector<std::string> arrow,
                  std::vector<std::string> tied) {
    sig::SignalFace f;
    f.approach = geom::approach_from_string(a);
    f.ball_movements = std::move(ball);
    f.arrow_movements = std::move(arrow);
    f.tied_pedestrian = std::move(tied);
    map.faces.faces.push_back(std::move(f));
  };
  face("S", {"veh:S:through"}, {}, {"ped:E"});
  face("N", {"veh:N:through", "veh:N:left"}, {}, {"ped:E"});
  auto G = Indication::Green, W = Indication::Walk;
  map.states = {
      {"ns-walk",
       {{"veh:S:through", G}, {"veh:N:through", G}, {"veh:N:left", G}, {"ped:E", W}}},
      {"ns-clear", {{"veh:S:through", G}, {"veh:N:through", G}, {"veh:N:left", G}}},
      {"cross", {}},
  };
  map.plan.entries = {{"ns-walk", 20, 0}, {"ns-clear", 9, 4}, {"cross", 29, 0}};
  return map;
}

}  // namespace

std::optional<IntersectionMapFile> builtin_map(const std::string& name) {
  if (name == "fourleg-basic") return fourleg_basic();
  if (name == "tempe") return tempe();
  return std::nullopt;
}

}  // namespace crossguard::cli
