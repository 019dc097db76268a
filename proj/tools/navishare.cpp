#include "navishare/canonical_json.hpp"
#include "navishare/guidance.hpp"
#include "navishare/mapstore.hpp"
#include "navishare/routing.hpp"
#include "navishare/simulation.hpp"
#include "navishare/workflows.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitSimulationFailure = 3;

using namespace navishare;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + out_path);
  out << content;
}

mapstore::MapGraph load_map(const std::string& path) {
  return mapstore::deserialize(read_file(path));
}

void save_map(const std::string& path, const mapstore::MapGraph& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << mapstore::serialize(map);
}

// --config paths resolve against NAVISHARE_CONFIG_DIR when set
std::string resolve_config_path(const std::string& path) {
  if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv("NAVISHARE_CONFIG_DIR"))
    return (std::filesystem::path(dir) / path).string();
  return path;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NaviShare anchor-map builder, router, and navigation simulator"};
  app.require_subcommand(1);

  std::string map_path;
  std::string out_path;
  std::string units = "meters";
  app.add_option("--units", units, "Distance display units (meters|feet)")
      ->check(CLI::IsMember({"meters", "feet"}));

  // map new
  auto* map_new = app.add_subcommand("map", "Map file operations")
                      ->require_subcommand(1);
  auto* map_new_cmd = map_new->add_subcommand("new", "Create an empty map file");
  map_new_cmd->add_option("--map", map_path, "Map file to create")->required();

  // anchor add
  auto* anchor = app.add_subcommand("anchor", "Anchor operations")->require_subcommand(1);
  auto* anchor_add = anchor->add_subcommand("add", "Add an anchor to a map");
  std::string a_id, a_name, a_notes, a_kind = "indoor", a_frame;
  double a_lat = 0, a_lon = 0, a_alt = 0, a_yaw = 0, a_quality = 1.0;
  bool a_has_geo = false;
  anchor_add->add_option("--map", map_path)->required();
  anchor_add->add_option("--id", a_id)->required();
  anchor_add->add_option("--name", a_name);
  anchor_add->add_option("--notes", a_notes);
  anchor_add->add_option("--kind", a_kind)->check(CLI::IsMember({"indoor", "outdoor"}));
  anchor_add->add_option("--frame", a_frame);
  anchor_add->add_option("--lat", a_lat)->each([&](const std::string&) { a_has_geo = true; });
  anchor_add->add_option("--lon", a_lon);
  anchor_add->add_option("--alt", a_alt);
  anchor_add->add_option("--yaw", a_yaw);
  anchor_add->add_option("--quality", a_quality);

  // poi import
  auto* poi = app.add_subcommand("poi", "Point-of-interest operations")->require_subcommand(1);
  auto* poi_import = poi->add_subcommand("import", "Import a name,lat,lon CSV as outdoor anchors");
  std::string poi_csv;
  poi_import->add_option("--map", map_path)->required();
  poi_import->add_option("--csv", poi_csv, "CSV file")->required();

  // connect
  auto* connect = app.add_subcommand("connect", "Replay a walk-event trace into a connection");
  std::string trace_path;
  std::uint64_t seed = 0;
  connect->add_option("--map", map_path)->required();
  connect->add_option("--trace", trace_path, "Walk-event trace file")->required();
  connect->add_option("--seed", seed, "Simulation seed");

  // route
  auto* route_cmd = app.add_subcommand("route", "Plan and stitch a route");
  std::string r_start, r_goal;
  route_cmd->add_option("--map", map_path)->required();
  route_cmd->add_option("--start", r_start)->required();
  route_cmd->add_option("--goal", r_goal)->required();
  route_cmd->add_option("--out", out_path);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run seeded navigation scenarios");
  std::string config_path;
  bool seed_given = false;
  simulate->add_option("--map", map_path)->required();
  simulate->add_option("--config", config_path)->required();
  simulate->add_option("--seed", seed, "Override the config seed")
      ->each([&](const std::string&) { seed_given = true; });
  simulate->add_option("--out", out_path);

  // export geojson
  auto* export_cmd = app.add_subcommand("export", "Export inspection artifacts")
                         ->require_subcommand(1);
  auto* export_geojson = export_cmd->add_subcommand("geojson", "GeoJSON FeatureCollection");
  double o_lat = 0, o_lon = 0;
  bool o_given = false;
  export_geojson->add_option("--map", map_path)->required();
  export_geojson->add_option("--origin-lat", o_lat)
      ->each([&](const std::string&) { o_given = true; });
  export_geojson->add_option("--origin-lon", o_lon);
  export_geojson->add_option("--out", out_path);

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Audit map invariants");
  validate_cmd->add_option("--map", map_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (map_new_cmd->parsed()) {
      save_map(map_path, mapstore::MapGraph{});
      return 0;
    }
    if (anchor_add->parsed()) {
      auto map = load_map(map_path);
      mapstore::Anchor a;
      a.id = a_id;
      a.kind = a_kind == "outdoor" ? mapstore::AnchorKind::Outdoor
                                   : mapstore::AnchorKind::Indoor;
      a.frame = a_frame.empty() ? "f-" + a_id : a_frame;
      a.reference_pose = geom::Pose::identity(a.frame);
      a.name = a_name;
      a.notes = a_notes;
      a.quality = a_quality;
      a.created_at = static_cast<std::int64_t>(std::time(nullptr));
      if (a.kind == mapstore::AnchorKind::Outdoor) {
        geom::GeoPose g;
        g.latitude = a_lat;
        g.longitude = a_lon;
        g.altitude = a_alt;
        g.yaw = geom::normalize_angle_360(a_yaw);
        a.geo = g;
        (void)a_has_geo;
      }
      mapstore::add_anchor(map, a);
      save_map(map_path, map);
      return 0;
    }
    if (poi_import->parsed()) {
      auto map = load_map(map_path);
      for (auto a : mapstore::import_poi(read_file(poi_csv))) {
        if (map.anchors.count(a.id)) a.id = map.fresh_anchor_id();
        mapstore::add_anchor(map, a);
      }
      save_map(map_path, map);
      return 0;
    }
    if (connect->parsed()) {
      auto map = load_map(map_path);
      const auto doc = canon::parse_file(resolve_config_path(trace_path));
      const std::string from = doc.at("from").get<std::string>();
      const std::string to = doc.at("to").get<std::string>();
      const auto events = workflows::walk_events_from_json(doc.at("events"));

      // trace replay runs against noiseless sensing in a fresh session
      sensim::WorldState world(seed);
      if (!map.anchors.count(from))
        throw std::runtime_error("connect: unknown anchor '" + from + "'");
      const auto truth = sim::derive_ground_truth(map);
      world.anchor_truth = truth.anchor_in_world;
      if (!world.anchor_truth.count(from) || !world.anchor_truth.count(to))
        throw std::runtime_error("connect: endpoints are in disconnected components; "
                                 "record the connection from a connected anchor");
      world.true_pose = world.anchor_truth.at(from);
      sensim::DriftParams no_drift{0.0, 0.0};
      sensim::RelocParams exact{mapstore::kRelocalizationRadius, 0.0, 1.0};
      sensim::TrackingSession session("replay", world, no_drift, exact);
      workflows::ConnectionRecorder recorder(from, to);
      const std::string cid =
          workflows::connect_anchors(recorder, session, world, map, events);
      save_map(map_path, map);
      std::cout << cid << "\n";
      return 0;
    }
    if (route_cmd->parsed()) {
      const auto map = load_map(map_path);
      const auto plan = routing::shortest_path(map, r_start, r_goal);
      const auto route = routing::stitch_route(
          map, plan.anchor_sequence, routing::exact_alignments(map, plan.anchor_sequence));
      nlohmann::json points = nlohmann::json::array();
      for (const auto& p : route.polyline.points)
        points.push_back({p.position.x(), p.position.y(), p.position.z()});
      nlohmann::json doc = {
          {"anchors", plan.anchor_sequence},
          {"frame", route.polyline.points.front().frame},
          {"polyline", points},
          {"total_length", route.total_length},
      };
      write_output(out_path, canon::dump(doc));
      return 0;
    }
    if (simulate->parsed()) {
      const auto map = load_map(map_path);
      auto cfg = sim::run_config_from_json(canon::parse_file(resolve_config_path(config_path)));
      if (seed_given) cfg.sensors.seed = seed;
      if (units == "feet") cfg.units = guidance::Units::Feet;
      const auto report = sim::run_simulation(map, cfg);
      write_output(out_path, canon::dump(sim::report_to_json(report)));
      bool any_failed = false;
      for (const auto& r : report.runs)
        if (!r.success && !r.unreachable) any_failed = true;
      return any_failed ? kExitSimulationFailure : 0;
    }
    if (export_geojson->parsed()) {
      const auto map = load_map(map_path);
      std::optional<geom::GeoPose> origin;
      if (o_given) {
        geom::GeoPose g;
        g.latitude = o_lat;
        g.longitude = o_lon;
        origin = g;
      }
      write_output(out_path, canon::dump(mapstore::export_geojson(map, origin)));
      return 0;
    }
    if (validate_cmd->parsed()) {
      const auto doc = canon::parse_file(map_path);
      mapstore::MapGraph map;
      try {
        map = mapstore::from_json(doc);
      } catch (const std::exception& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        return kExitConfigError;
      }
      const auto problems = mapstore::validate(map);
      for (const auto& p : problems) std::cerr << "invalid: " << p << "\n";
      if (!problems.empty()) return kExitConfigError;
      std::cout << "ok: " << map.anchors.size() << " anchors, "
                << map.connections.size() << " connections\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return 0;
}
