#pragma once

#include "navishare/canonical_json.hpp"
#include "navishare/geom.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace navishare::mapstore {

constexpr int kFormatVersion = 1;
constexpr double kDefaultSpacing = 1.0;          // meters between breadcrumbs
constexpr double kRelocalizationRadius = 4.0;    // meters, anchor detection range
constexpr double kStartAttachTolerance = 0.5;    // meters, trail start vs from pose

enum class AnchorKind { Indoor, Outdoor };

struct Anchor {
  std::string id;
  AnchorKind kind = AnchorKind::Indoor;
  std::string frame;
  geom::Pose reference_pose;  // identity in its own frame by convention
  std::optional<geom::GeoPose> geo;
  double quality = 0.0;  // [0, 1]
  std::string name;
  std::string notes;
  std::int64_t created_at = 0;  // UTC seconds since epoch
};

struct BreadcrumbTrail {
  std::vector<geom::Pose> points;
  double spacing = kDefaultSpacing;

  std::string frame() const;
};

/// Sum of Euclidean distances over consecutive trail points.
/// Throws std::invalid_argument for fewer than 2 points.
double path_length(const BreadcrumbTrail& trail);

/// Arc-length resampling: every input vertex is kept, each segment is
/// subdivided into equal chords no longer than spacing. Idempotent;
/// first and last input points are preserved exactly. Consecutive
/// duplicate points are dropped first.
BreadcrumbTrail resample_trail(const std::vector<geom::Pose>& points, double spacing);

enum class Direction { Forward, Reverse };

struct Connection {
  std::string id;
  std::string from_anchor;
  std::string to_anchor;
  BreadcrumbTrail forward_trail;
  std::optional<BreadcrumbTrail> reverse_trail;
  std::vector<std::string> path_anchor_ids;
  double length = 0.0;  // meters, polyline length of forward_trail
  geom::Pose from_pose_in_trail_frame;
  geom::Pose to_pose_in_trail_frame;

  /// Trail oriented in the direction of travel; Reverse falls back to
  /// the reversed forward trail when no distinct reverse was recorded.
  BreadcrumbTrail travel_trail(Direction dir) const;
  double travel_length(Direction dir) const;
};

struct MapGraph {
  std::map<std::string, Anchor> anchors;
  std::map<std::string, Connection> connections;
  // anchor id -> (connection id, direction of travel away from the anchor)
  std::map<std::string, std::vector<std::pair<std::string, Direction>>> adjacency;
  int format_version = kFormatVersion;

  std::string fresh_anchor_id() const;
  std::string fresh_connection_id() const;
};

std::string add_anchor(MapGraph& map, const Anchor& a);
std::string add_connection(MapGraph& map, const Connection& rec);

/// Rebuilds adjacency from the connection table (sorted, deterministic).
std::map<std::string, std::vector<std::pair<std::string, Direction>>>
build_adjacency(const MapGraph& map);

/// Outdoor anchors within a haversine radius of the coarse location,
/// plus indoor anchors graph-reachable from a qualifying outdoor
/// anchor; sorted by distance then id.
std::vector<std::string> nearby_anchors(const MapGraph& map,
                                        const geom::GeoPose& coarse,
                                        double radius_m);

nlohmann::json to_json(const MapGraph& map);
MapGraph from_json(const nlohmann::json& doc);

std::string serialize(const MapGraph& map);
MapGraph deserialize(const std::string& bytes);

/// Structural equality; created_at timestamps are ignored.
bool structurally_equal(const MapGraph& a, const MapGraph& b);
bool structurally_equal(const Anchor& a, const Anchor& b);
bool structurally_equal(const Connection& a, const Connection& b);

/// Invariant audit; returns one message per violation, each naming the
/// offending anchor or connection id. Empty means valid.
std::vector<std::string> validate(const MapGraph& map);

struct PoiDefaults {
  double quality = 0.5;
  double ci_horizontal = 2.0;  // street-view annotation uncertainty, meters
  double ci_yaw = 10.0;
  double ci_vertical = 2.0;
};

/// Parses a `name,lat,lon,alt,yaw` CSV (alt/yaw optional) into outdoor
/// anchors. Malformed rows raise std::runtime_error naming row and field.
std::vector<Anchor> import_poi(const std::string& csv_text,
                               const PoiDefaults& defaults = {});

/// Pose of every session/trail frame reachable from the seed anchor,
/// expressed in the seed anchor's frame, chained through the stored
/// connection endpoint poses.
std::map<std::string, geom::Pose> frame_placement(const MapGraph& map,
                                                  const std::string& seed_anchor);

/// GeoJSON FeatureCollection: anchors as points, connections as line
/// strings. Indoor geometry is geo-referenced through the nearest
/// connected outdoor anchor; an explicit origin is required for maps
/// with no outdoor anchor (it is bound to the lexicographically
/// smallest anchor id).
nlohmann::json export_geojson(const MapGraph& map,
                              std::optional<geom::GeoPose> origin = std::nullopt);

}  // namespace navishare::mapstore
