#include "navishare/mapstore.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace navishare::mapstore {

namespace {

bool is_identity_pose(const geom::Pose& p) {
  return p.position.norm() < 1e-9 &&
         std::abs(std::abs(p.orientation.dot(Eigen::Quaterniond::Identity())) - 1.0) < 1e-9;
}

geom::Pose slerp_pose(const geom::Pose& a, const geom::Pose& b, double t) {
  geom::Pose p;
  p.position = a.position + t * (b.position - a.position);
  p.orientation = a.orientation.slerp(t, b.orientation).normalized();
  p.frame = a.frame;
  return p;
}

nlohmann::json pose_to_json(const geom::Pose& p) {
  return {
      {"frame", p.frame},
      {"orientation",
       {p.orientation.w(), p.orientation.x(), p.orientation.y(), p.orientation.z()}},
      {"position", {p.position.x(), p.position.y(), p.position.z()}},
  };
}

geom::Pose pose_from_json(const nlohmann::json& j) {
  geom::Pose p;
  p.frame = j.at("frame").get<std::string>();
  const auto& q = j.at("orientation");
  p.orientation = Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(),
                                     q.at(2).get<double>(), q.at(3).get<double>())
                      .normalized();
  const auto& pos = j.at("position");
  p.position = {pos.at(0).get<double>(), pos.at(1).get<double>(), pos.at(2).get<double>()};
  return p;
}

nlohmann::json geo_to_json(const geom::GeoPose& g) {
  return {
      {"altitude", g.altitude},
      {"ci_horizontal", g.ci_horizontal},
      {"ci_vertical", g.ci_vertical},
      {"ci_yaw", g.ci_yaw},
      {"latitude", g.latitude},
      {"longitude", g.longitude},
      {"yaw", g.yaw},
  };
}

geom::GeoPose geo_from_json(const nlohmann::json& j) {
  geom::GeoPose g;
  g.latitude = j.at("latitude").get<double>();
  g.longitude = j.at("longitude").get<double>();
  g.altitude = j.at("altitude").get<double>();
  g.yaw = j.at("yaw").get<double>();
  g.ci_horizontal = j.at("ci_horizontal").get<double>();
  g.ci_yaw = j.at("ci_yaw").get<double>();
  g.ci_vertical = j.at("ci_vertical").get<double>();
  return g;
}

nlohmann::json trail_to_json(const BreadcrumbTrail& t) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : t.points) {
    pts.push_back({p.position.x(), p.position.y(), p.position.z(),
                   p.orientation.w(), p.orientation.x(), p.orientation.y(),
                   p.orientation.z()});
  }
  return {{"frame", t.frame()}, {"points", pts}, {"spacing", t.spacing}};
}

BreadcrumbTrail trail_from_json(const nlohmann::json& j) {
  BreadcrumbTrail t;
  t.spacing = j.at("spacing").get<double>();
  const std::string frame = j.at("frame").get<std::string>();
  for (const auto& row : j.at("points")) {
    geom::Pose p;
    p.position = {row.at(0).get<double>(), row.at(1).get<double>(), row.at(2).get<double>()};
    p.orientation = Eigen::Quaterniond(row.at(3).get<double>(), row.at(4).get<double>(),
                                       row.at(5).get<double>(), row.at(6).get<double>())
                        .normalized();
    p.frame = frame;
    t.points.push_back(std::move(p));
  }
  return t;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

std::string BreadcrumbTrail::frame() const {
  return points.empty() ? std::string{} : points.front().frame;
}

double path_length(const BreadcrumbTrail& trail) {
  if (trail.points.size() < 2)
    throw std::invalid_argument("path_length: trail needs at least 2 points");
  double total = 0.0;
  for (size_t i = 1; i < trail.points.size(); ++i)
    total += (trail.points[i].position - trail.points[i - 1].position).norm();
  return total;
}

BreadcrumbTrail resample_trail(const std::vector<geom::Pose>& points, double spacing) {
  if (spacing <= 0.0)
    throw std::invalid_argument("resample_trail: spacing must be positive");
  if (points.size() < 2)
    throw std::invalid_argument("resample_trail: need at least 2 input points");

  std::vector<geom::Pose> dedup;
  dedup.push_back(points.front());
  for (size_t i = 1; i < points.size(); ++i) {
    if ((points[i].position - dedup.back().position).norm() > 1e-12)
      dedup.push_back(points[i]);
  }
  if (dedup.size() < 2) dedup.push_back(points.back());

  BreadcrumbTrail out;
  out.spacing = spacing;
  out.points.push_back(dedup.front());
  for (size_t i = 1; i < dedup.size(); ++i) {
    const double len = (dedup[i].position - dedup[i - 1].position).norm();
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-12)));
    for (int k = 1; k < pieces; ++k)
      out.points.push_back(
          slerp_pose(dedup[i - 1], dedup[i], static_cast<double>(k) / pieces));
    out.points.push_back(dedup[i]);
  }
  return out;
}

BreadcrumbTrail Connection::travel_trail(Direction dir) const {
  if (dir == Direction::Forward) return forward_trail;
  if (reverse_trail) return *reverse_trail;
  BreadcrumbTrail t = forward_trail;
  std::reverse(t.points.begin(), t.points.end());
  return t;
}

double Connection::travel_length(Direction dir) const {
  if (dir == Direction::Reverse && reverse_trail)
    return path_length(*reverse_trail);
  return length;
}

std::string MapGraph::fresh_anchor_id() const {
  for (int n = 1;; ++n) {
    std::string id = "a" + std::to_string(anchors.size() + static_cast<size_t>(n));
    if (!anchors.count(id)) return id;
  }
}

std::string MapGraph::fresh_connection_id() const {
  for (int n = 1;; ++n) {
    std::string id = "c" + std::to_string(connections.size() + static_cast<size_t>(n));
    if (!connections.count(id)) return id;
  }
}

std::string add_anchor(MapGraph& map, const Anchor& a) {
  if (a.id.empty()) throw std::invalid_argument("add_anchor: empty id");
  if (map.anchors.count(a.id))
    throw std::invalid_argument("add_anchor: duplicate id '" + a.id + "'");
  if (a.kind == AnchorKind::Outdoor) {
    if (!a.geo)
      throw std::invalid_argument("add_anchor: outdoor anchor '" + a.id +
                                  "' requires a geo pose");
    geom::validate(*a.geo);
  } else if (a.geo) {
    throw std::invalid_argument("add_anchor: indoor anchor '" + a.id +
                                "' must not carry a geo pose");
  }
  if (a.quality < 0.0 || a.quality > 1.0)
    throw std::invalid_argument("add_anchor: quality out of [0,1] for '" + a.id + "'");
  Anchor stored = a;
  stored.reference_pose = geom::Pose::identity(a.frame);
  map.anchors.emplace(stored.id, std::move(stored));
  map.adjacency.try_emplace(a.id);
  return a.id;
}

std::string add_connection(MapGraph& map, const Connection& rec) {
  if (rec.id.empty()) throw std::invalid_argument("add_connection: empty id");
  if (map.connections.count(rec.id))
    throw std::invalid_argument("add_connection: duplicate id '" + rec.id + "'");
  if (rec.from_anchor == rec.to_anchor)
    throw std::invalid_argument("add_connection: self-loop on '" + rec.from_anchor + "'");
  for (const auto& end : {rec.from_anchor, rec.to_anchor}) {
    if (!map.anchors.count(end))
      throw std::invalid_argument("add_connection: missing endpoint anchor '" + end + "'");
  }
  if (rec.forward_trail.points.size() < 2)
    throw std::invalid_argument("add_connection: trail needs at least 2 points");

  Connection c = rec;
  c.forward_trail = resample_trail(rec.forward_trail.points, rec.forward_trail.spacing);
  if (c.reverse_trail)
    c.reverse_trail = resample_trail(c.reverse_trail->points, c.reverse_trail->spacing);
  c.length = path_length(c.forward_trail);

  const double start_gap =
      (c.forward_trail.points.front().position - c.from_pose_in_trail_frame.position).norm();
  if (start_gap > kStartAttachTolerance)
    throw std::invalid_argument("add_connection: trail start " +
                                std::to_string(start_gap) +
                                " m from the start anchor pose");
  const double end_gap =
      (c.forward_trail.points.back().position - c.to_pose_in_trail_frame.position).norm();
  if (end_gap > kRelocalizationRadius)
    throw std::invalid_argument(
        "add_connection: trail end outside the relocalization radius of the end anchor");

  map.adjacency[c.from_anchor].emplace_back(c.id, Direction::Forward);
  map.adjacency[c.to_anchor].emplace_back(c.id, Direction::Reverse);
  for (auto& [_, edges] : map.adjacency) std::sort(edges.begin(), edges.end());
  map.connections.emplace(c.id, std::move(c));
  return rec.id;
}

std::map<std::string, std::vector<std::pair<std::string, Direction>>>
build_adjacency(const MapGraph& map) {
  std::map<std::string, std::vector<std::pair<std::string, Direction>>> adj;
  for (const auto& [id, _] : map.anchors) adj.try_emplace(id);
  for (const auto& [cid, c] : map.connections) {
    adj[c.from_anchor].emplace_back(cid, Direction::Forward);
    adj[c.to_anchor].emplace_back(cid, Direction::Reverse);
  }
  for (auto& [_, edges] : adj) std::sort(edges.begin(), edges.end());
  return adj;
}

std::vector<std::string> nearby_anchors(const MapGraph& map,
                                        const geom::GeoPose& coarse,
                                        double radius_m) {
  if (radius_m <= 0.0)
    throw std::invalid_argument("nearby_anchors: radius must be positive");

  std::map<std::string, double> dist;  // qualifying anchors, with sort distance
  std::deque<std::pair<std::string, double>> frontier;
  for (const auto& [id, a] : map.anchors) {
    if (a.kind != AnchorKind::Outdoor) continue;
    const double d = geom::haversine_distance(*a.geo, coarse);
    if (d <= radius_m) {
      dist[id] = d;
      frontier.emplace_back(id, d);
    }
  }
  // Indoor anchors qualify by reachability; they sort by the distance of
  // the closest qualifying outdoor anchor that reaches them.
  while (!frontier.empty()) {
    auto [id, d] = frontier.front();
    frontier.pop_front();
    auto it = map.adjacency.find(id);
    if (it == map.adjacency.end()) continue;
    for (const auto& [cid, dir] : it->second) {
      const auto& c = map.connections.at(cid);
      const std::string& next = dir == Direction::Forward ? c.to_anchor : c.from_anchor;
      if (map.anchors.at(next).kind == AnchorKind::Outdoor) continue;
      auto found = dist.find(next);
      if (found == dist.end() || d < found->second) {
        dist[next] = d;
        frontier.emplace_back(next, d);
      }
    }
  }

  std::vector<std::string> out;
  for (const auto& [id, _] : dist) out.push_back(id);
  std::sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a < b;
  });
  return out;
}

nlohmann::json to_json(const MapGraph& map) {
  nlohmann::json anchors = nlohmann::json::object();
  for (const auto& [id, a] : map.anchors) {
    nlohmann::json ja = {
        {"created_at", a.created_at},
        {"frame", a.frame},
        {"kind", a.kind == AnchorKind::Outdoor ? "outdoor" : "indoor"},
        {"name", a.name},
        {"notes", a.notes},
        {"quality", a.quality},
        {"reference_pose", pose_to_json(a.reference_pose)},
    };
    if (a.geo) ja["geo"] = geo_to_json(*a.geo);
    anchors[id] = std::move(ja);
  }
  nlohmann::json connections = nlohmann::json::object();
  for (const auto& [id, c] : map.connections) {
    nlohmann::json jc = {
        {"forward_trail", trail_to_json(c.forward_trail)},
        {"from_anchor", c.from_anchor},
        {"from_pose", pose_to_json(c.from_pose_in_trail_frame)},
        {"length", c.length},
        {"path_anchor_ids", c.path_anchor_ids},
        {"to_anchor", c.to_anchor},
        {"to_pose", pose_to_json(c.to_pose_in_trail_frame)},
    };
    if (c.reverse_trail) jc["reverse_trail"] = trail_to_json(*c.reverse_trail);
    connections[id] = std::move(jc);
  }
  return {{"anchors", anchors},
          {"connections", connections},
          {"format_version", map.format_version}};
}

MapGraph from_json(const nlohmann::json& doc) {
  MapGraph map;
  map.format_version = doc.at("format_version").get<int>();
  if (map.format_version != kFormatVersion)
    throw std::runtime_error("unknown format_version " +
                             std::to_string(map.format_version));
  for (const auto& [id, ja] : doc.at("anchors").items()) {
    Anchor a;
    a.id = id;
    const std::string kind = ja.at("kind").get<std::string>();
    if (kind != "indoor" && kind != "outdoor")
      throw std::runtime_error("anchor '" + id + "': unknown kind '" + kind + "'");
    a.kind = kind == "outdoor" ? AnchorKind::Outdoor : AnchorKind::Indoor;
    a.frame = ja.at("frame").get<std::string>();
    a.reference_pose = pose_from_json(ja.at("reference_pose"));
    if (ja.contains("geo")) a.geo = geo_from_json(ja.at("geo"));
    a.quality = ja.at("quality").get<double>();
    a.name = ja.at("name").get<std::string>();
    a.notes = ja.at("notes").get<std::string>();
    a.created_at = ja.at("created_at").get<std::int64_t>();
    map.anchors.emplace(id, std::move(a));
  }
  for (const auto& [id, jc] : doc.at("connections").items()) {
    Connection c;
    c.id = id;
    c.from_anchor = jc.at("from_anchor").get<std::string>();
    c.to_anchor = jc.at("to_anchor").get<std::string>();
    c.forward_trail = trail_from_json(jc.at("forward_trail"));
    if (jc.contains("reverse_trail"))
      c.reverse_trail = trail_from_json(jc.at("reverse_trail"));
    c.path_anchor_ids = jc.at("path_anchor_ids").get<std::vector<std::string>>();
    c.length = jc.at("length").get<double>();
    c.from_pose_in_trail_frame = pose_from_json(jc.at("from_pose"));
    c.to_pose_in_trail_frame = pose_from_json(jc.at("to_pose"));
    map.connections.emplace(id, std::move(c));
  }
  map.adjacency = build_adjacency(map);

  auto problems = validate(map);
  if (!problems.empty()) throw std::runtime_error(problems.front());
  return map;
}

std::string serialize(const MapGraph& map) { return canon::dump(to_json(map)); }

MapGraph deserialize(const std::string& bytes) {
  return from_json(canon::parse(bytes));
}

namespace {

bool pose_equal(const geom::Pose& a, const geom::Pose& b, double tol = 1e-8) {
  return a.frame == b.frame && (a.position - b.position).norm() <= tol &&
         std::abs(std::abs(a.orientation.dot(b.orientation)) - 1.0) <= tol;
}

bool trail_equal(const BreadcrumbTrail& a, const BreadcrumbTrail& b) {
  if (a.points.size() != b.points.size() || !near(a.spacing, b.spacing, 1e-8))
    return false;
  for (size_t i = 0; i < a.points.size(); ++i)
    if (!pose_equal(a.points[i], b.points[i])) return false;
  return true;
}

}  // namespace

bool structurally_equal(const Anchor& a, const Anchor& b) {
  if (a.id != b.id || a.kind != b.kind || a.frame != b.frame || a.name != b.name ||
      a.notes != b.notes || !near(a.quality, b.quality, 1e-8))
    return false;
  if (a.geo.has_value() != b.geo.has_value()) return false;
  if (a.geo) {
    if (!near(a.geo->latitude, b.geo->latitude, 1e-8) ||
        !near(a.geo->longitude, b.geo->longitude, 1e-8) ||
        !near(a.geo->altitude, b.geo->altitude, 1e-8) ||
        !near(a.geo->yaw, b.geo->yaw, 1e-8) ||
        !near(a.geo->ci_horizontal, b.geo->ci_horizontal, 1e-8) ||
        !near(a.geo->ci_yaw, b.geo->ci_yaw, 1e-8) ||
        !near(a.geo->ci_vertical, b.geo->ci_vertical, 1e-8))
      return false;
  }
  return pose_equal(a.reference_pose, b.reference_pose);
}

bool structurally_equal(const Connection& a, const Connection& b) {
  if (a.id != b.id || a.from_anchor != b.from_anchor || a.to_anchor != b.to_anchor ||
      a.path_anchor_ids != b.path_anchor_ids || !near(a.length, b.length, 1e-6))
    return false;
  if (a.reverse_trail.has_value() != b.reverse_trail.has_value()) return false;
  if (!trail_equal(a.forward_trail, b.forward_trail)) return false;
  if (a.reverse_trail && !trail_equal(*a.reverse_trail, *b.reverse_trail)) return false;
  return pose_equal(a.from_pose_in_trail_frame, b.from_pose_in_trail_frame) &&
         pose_equal(a.to_pose_in_trail_frame, b.to_pose_in_trail_frame);
}

bool structurally_equal(const MapGraph& a, const MapGraph& b) {
  if (a.format_version != b.format_version || a.anchors.size() != b.anchors.size() ||
      a.connections.size() != b.connections.size())
    return false;
  for (const auto& [id, anchor] : a.anchors) {
    auto it = b.anchors.find(id);
    if (it == b.anchors.end() || !structurally_equal(anchor, it->second)) return false;
  }
  for (const auto& [id, conn] : a.connections) {
    auto it = b.connections.find(id);
    if (it == b.connections.end() || !structurally_equal(conn, it->second)) return false;
  }
  return true;
}

std::vector<std::string> validate(const MapGraph& map) {
  std::vector<std::string> problems;
  for (const auto& [id, a] : map.anchors) {
    if (a.kind == AnchorKind::Outdoor && !a.geo)
      problems.push_back("anchor '" + id + "': outdoor anchor without geo pose");
    if (a.kind == AnchorKind::Indoor && a.geo)
      problems.push_back("anchor '" + id + "': indoor anchor carries a geo pose");
    if (a.geo) {
      try {
        geom::validate(*a.geo);
      } catch (const std::exception& e) {
        problems.push_back("anchor '" + id + "': " + e.what());
      }
    }
    if (a.quality < 0.0 || a.quality > 1.0)
      problems.push_back("anchor '" + id + "': quality out of [0,1]");
    if (!is_identity_pose(a.reference_pose))
      problems.push_back("anchor '" + id + "': reference pose is not the identity");
    if (a.reference_pose.frame != a.frame)
      problems.push_back("anchor '" + id + "': reference pose frame mismatch");
  }
  for (const auto& [id, c] : map.connections) {
    if (!map.anchors.count(c.from_anchor))
      problems.push_back("connection '" + id + "': dangling endpoint '" + c.from_anchor + "'");
    if (!map.anchors.count(c.to_anchor))
      problems.push_back("connection '" + id + "': dangling endpoint '" + c.to_anchor + "'");
    if (c.from_anchor == c.to_anchor)
      problems.push_back("connection '" + id + "': self-loop");
    if (c.forward_trail.points.size() < 2) {
      problems.push_back("connection '" + id + "': trail has fewer than 2 points");
      continue;
    }
    for (size_t i = 1; i < c.forward_trail.points.size(); ++i) {
      if (c.forward_trail.points[i].frame != c.forward_trail.points.front().frame) {
        problems.push_back("connection '" + id + "': trail spans multiple frames");
        break;
      }
      const double d = (c.forward_trail.points[i].position -
                        c.forward_trail.points[i - 1].position)
                           .norm();
      if (d > c.forward_trail.spacing + 1e-6) {
        problems.push_back("connection '" + id + "': breadcrumb spacing exceeded");
        break;
      }
    }
    if (!near(c.length, path_length(c.forward_trail), 1e-6))
      problems.push_back("connection '" + id + "': length disagrees with its trail");
    if ((c.forward_trail.points.front().position - c.from_pose_in_trail_frame.position)
            .norm() > kStartAttachTolerance)
      problems.push_back("connection '" + id + "': trail start detached from the start anchor");
    if ((c.forward_trail.points.back().position - c.to_pose_in_trail_frame.position)
            .norm() > kRelocalizationRadius)
      problems.push_back("connection '" + id +
                         "': trail end outside the end anchor's relocalization radius");
  }
  return problems;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_number(const std::string& s, int row, const std::string& field) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("poi row " + std::to_string(row) + ": bad " + field +
                             " '" + s + "'");
  }
}

}  // namespace

std::vector<Anchor> import_poi(const std::string& csv_text, const PoiDefaults& defaults) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("poi import: empty document");
  auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "name" || header[1] != "lat" || header[2] != "lon")
    throw std::runtime_error("poi import: header must start with name,lat,lon");

  std::vector<Anchor> out;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() < 3)
      throw std::runtime_error("poi row " + std::to_string(row) + ": missing fields");
    Anchor a;
    a.id = "poi" + std::to_string(row);
    a.kind = AnchorKind::Outdoor;
    a.frame = "poi" + std::to_string(row);
    a.reference_pose = geom::Pose::identity(a.frame);
    a.name = fields[0];
    a.quality = defaults.quality;
    geom::GeoPose g;
    g.latitude = parse_number(fields[1], row, "lat");
    g.longitude = parse_number(fields[2], row, "lon");
    if (fields.size() > 3 && !fields[3].empty())
      g.altitude = parse_number(fields[3], row, "alt");
    if (fields.size() > 4 && !fields[4].empty())
      g.yaw = geom::normalize_angle_360(parse_number(fields[4], row, "yaw"));
    g.ci_horizontal = defaults.ci_horizontal;
    g.ci_yaw = defaults.ci_yaw;
    g.ci_vertical = defaults.ci_vertical;
    try {
      geom::validate(g);
    } catch (const std::exception& e) {
      throw std::runtime_error("poi row " + std::to_string(row) + ": " + e.what());
    }
    a.geo = g;
    out.push_back(std::move(a));
  }
  return out;
}

namespace {

// BFS over the frame graph induced by connection endpoint poses,
// starting from pre-seeded frame placements.
void expand_frames(const MapGraph& map, std::map<std::string, geom::Pose>& placed,
                   std::deque<std::string>& frontier) {
  auto visit = [&](const std::string& known_frame, const std::string& new_frame,
                   const geom::Pose& new_in_known) {
    if (placed.count(new_frame)) return;
    placed[new_frame] = geom::compose(placed.at(known_frame), new_in_known);
    frontier.push_back(new_frame);
  };

  while (!frontier.empty()) {
    const std::string frame = frontier.front();
    frontier.pop_front();
    for (const auto& [cid, c] : map.connections) {
      const std::string trail_frame = c.forward_trail.frame();
      const std::string from_frame = map.anchors.at(c.from_anchor).frame;
      const std::string to_frame = map.anchors.at(c.to_anchor).frame;
      // T(trail <- anchor frame) is the anchor's pose in the trail frame.
      if (frame == trail_frame) {
        visit(trail_frame, from_frame, c.from_pose_in_trail_frame);
        visit(trail_frame, to_frame, c.to_pose_in_trail_frame);
      } else if (frame == from_frame) {
        visit(from_frame, trail_frame, geom::invert(c.from_pose_in_trail_frame));
      } else if (frame == to_frame) {
        visit(to_frame, trail_frame, geom::invert(c.to_pose_in_trail_frame));
      }
    }
  }
}

// Poses of every session/trail frame within a shared ENU frame, found by
// multi-source BFS from the geo-referenced anchors.
std::map<std::string, geom::Pose> place_frames(const MapGraph& map,
                                               const geom::GeoPose& origin,
                                               const std::optional<std::string>& seed_anchor) {
  std::map<std::string, geom::Pose> enu;  // frame id -> T(enu <- frame)
  std::deque<std::string> frontier;       // frame ids to expand

  for (const auto& [id, a] : map.anchors) {
    if (a.kind != AnchorKind::Outdoor) continue;
    if (!enu.count(a.frame)) {
      enu[a.frame] = geom::geo_to_local(*a.geo, origin);
      frontier.push_back(a.frame);
    }
  }
  if (seed_anchor && !enu.count(map.anchors.at(*seed_anchor).frame)) {
    enu[map.anchors.at(*seed_anchor).frame] = geom::Pose::identity();
    frontier.push_back(map.anchors.at(*seed_anchor).frame);
  }
  expand_frames(map, enu, frontier);
  return enu;
}

nlohmann::json lonlat(const geom::GeoPose& g) {
  return nlohmann::json::array({g.longitude, g.latitude, g.altitude});
}

}  // namespace

std::map<std::string, geom::Pose> frame_placement(const MapGraph& map,
                                                  const std::string& seed_anchor) {
  const auto it = map.anchors.find(seed_anchor);
  if (it == map.anchors.end())
    throw std::invalid_argument("frame_placement: unknown anchor '" + seed_anchor + "'");
  std::map<std::string, geom::Pose> placed;
  std::deque<std::string> frontier;
  placed[it->second.frame] = geom::Pose::identity(it->second.frame);
  frontier.push_back(it->second.frame);
  expand_frames(map, placed, frontier);
  return placed;
}

nlohmann::json export_geojson(const MapGraph& map, std::optional<geom::GeoPose> origin) {
  bool has_outdoor = false;
  for (const auto& [_, a] : map.anchors)
    if (a.kind == AnchorKind::Outdoor) has_outdoor = true;
  if (!has_outdoor && !origin)
    throw std::runtime_error(
        "export_geojson: map has no outdoor anchor and no origin was supplied");

  geom::GeoPose geo_origin;
  std::optional<std::string> seed;
  if (has_outdoor) {
    for (const auto& [_, a] : map.anchors) {
      if (a.kind == AnchorKind::Outdoor) {
        geo_origin = *a.geo;
        break;
      }
    }
  } else {
    geo_origin = *origin;
    seed = map.anchors.begin()->first;  // origin binds to the smallest anchor id
  }

  const auto frames = place_frames(map, geo_origin, seed);
  auto require_frame = [&](const std::string& f, const std::string& what) -> const geom::Pose& {
    auto it = frames.find(f);
    if (it == frames.end())
      throw std::runtime_error("export_geojson: " + what +
                               " is not connected to any geo-referenced anchor");
    return it->second;
  };

  nlohmann::json features = nlohmann::json::array();
  for (const auto& [id, a] : map.anchors) {
    const geom::Pose& t = require_frame(a.frame, "anchor '" + id + "'");
    const geom::GeoPose g = geom::local_to_geo(t, geo_origin);
    features.push_back({
        {"geometry", {{"coordinates", lonlat(g)}, {"type", "Point"}}},
        {"properties",
         {{"id", id},
          {"kind", a.kind == AnchorKind::Outdoor ? "outdoor" : "indoor"},
          {"name", a.name},
          {"quality", a.quality}}},
        {"type", "Feature"},
    });
  }
  for (const auto& [id, c] : map.connections) {
    const geom::Pose& t =
        require_frame(c.forward_trail.frame(), "connection '" + id + "'");
    nlohmann::json coords = nlohmann::json::array();
    for (const auto& p : c.forward_trail.points) {
      geom::Pose in_enu = geom::compose(t, p);
      coords.push_back(lonlat(geom::local_to_geo(in_enu, geo_origin)));
    }
    features.push_back({
        {"geometry", {{"coordinates", coords}, {"type", "LineString"}}},
        {"properties",
         {{"from", c.from_anchor},
          {"id", id},
          {"length", c.length},
          {"to", c.to_anchor}}},
        {"type", "Feature"},
    });
  }
  return {{"features", features}, {"type", "FeatureCollection"}};
}

}  // namespace navishare::mapstore
