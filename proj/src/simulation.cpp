#include "navishare/simulation.hpp"

#include "navishare/workflows.hpp"

#include <algorithm>
#include <cmath>

namespace navishare::sim {

using mapstore::MapGraph;

RunConfig run_config_from_json(const nlohmann::json& doc) {
  RunConfig cfg;
  nlohmann::json sensors = doc.value("sensors", nlohmann::json::object());
  cfg.sensors = sensim::sim_config_from_json(sensors);
  if (doc.contains("seed")) cfg.sensors.seed = doc.at("seed").get<std::uint64_t>();
  cfg.arrival_radius = doc.value("arrival_radius", cfg.arrival_radius);
  cfg.max_events = doc.value("max_events", cfg.max_events);
  const std::string units = doc.value("units", std::string("meters"));
  if (units == "feet") {
    cfg.units = guidance::Units::Feet;
  } else if (units != "meters") {
    throw std::runtime_error("run config: units must be meters or feet");
  }
  if (!doc.contains("scenarios"))
    throw std::runtime_error("run config: missing scenarios");
  for (const auto& js : doc.at("scenarios")) {
    Scenario s;
    s.id = js.at("id").get<std::string>();
    s.start = js.at("start").get<std::string>();
    s.goal = js.at("goal").get<std::string>();
    cfg.scenarios.push_back(std::move(s));
  }
  return cfg;
}

nlohmann::json report_to_json(const SimulationReport& report) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : report.runs) {
    runs.push_back({
        {"error", r.error},
        {"events", r.events},
        {"final_distance", r.final_distance},
        {"route_length", r.route_length},
        {"scenario", r.scenario},
        {"success", r.success},
        {"unreachable", r.unreachable},
    });
  }
  return {
      {"map",
       {{"anchors", report.anchor_count}, {"connections", report.connection_count}}},
      {"runs", runs},
      {"seed", report.seed},
      {"success_rate", report.success_rate},
  };
}

GroundTruth derive_ground_truth(const MapGraph& map) {
  if (map.anchors.empty())
    throw std::runtime_error("derive_ground_truth: empty map");
  GroundTruth truth;
  truth.frame_in_world = mapstore::frame_placement(map, map.anchors.begin()->first);
  for (const auto& [id, a] : map.anchors) {
    auto it = truth.frame_in_world.find(a.frame);
    if (it == truth.frame_in_world.end()) continue;  // disconnected component
    truth.anchor_in_world[id] = it->second;
  }
  return truth;
}

namespace {

constexpr double kTick = 0.5;          // seconds per walker tick
constexpr double kStride = 0.6;        // meters per tick
constexpr double kFinalApproach = 0.35;  // meters, goal refinement stop

geom::Pose anchor_in_frame(const GroundTruth& truth, const geom::Pose& world_from_frame,
                           const std::string& anchor_id) {
  return geom::compose(geom::invert(world_from_frame), truth.anchor_in_world.at(anchor_id));
}

}  // namespace

RunRecord run_scenario(const MapGraph& map, const GroundTruth& truth,
                       const Scenario& scenario, const RunConfig& cfg) {
  RunRecord rec;
  rec.scenario = scenario.id;

  if (!truth.anchor_in_world.count(scenario.start) ||
      !truth.anchor_in_world.count(scenario.goal)) {
    rec.unreachable = true;
    rec.error = "scenario endpoints missing from the map's connected component";
    return rec;
  }

  routing::PathResult plan;
  try {
    plan = routing::shortest_path(map, scenario.start, scenario.goal);
  } catch (const std::exception& e) {
    rec.unreachable = true;
    rec.error = e.what();
    return rec;
  }
  rec.route_length = plan.cost;

  const std::uint64_t seed = sensim::hash_label(cfg.sensors.seed, scenario.id);
  sensim::WorldState world(seed);
  world.anchor_truth = truth.anchor_in_world;
  world.true_pose = truth.anchor_in_world.at(scenario.start);
  sensim::TrackingSession session("session-" + scenario.id, world, cfg.sensors.drift,
                                  cfg.sensors.reloc, cfg.sensors.ci);

  if (plan.anchor_sequence.size() == 1) {
    rec.success = true;
    return rec;
  }

  routing::Route route =
      routing::stitch_route(map, plan.anchor_sequence,
                            routing::exact_alignments(map, plan.anchor_sequence));

  // positioning: pan until the start anchor localizes
  std::optional<geom::Pose> start_loc;
  for (double t = 0.0; t < workflows::kStartLocalizeTimeout && !start_loc; t += 1.0)
    start_loc = session.try_relocalize(world, scenario.start, 1.0);
  if (!start_loc) {
    rec.error = "start anchor never localized";
    return rec;
  }

  const std::string nav_frame = route.polyline.points.front().frame;
  const geom::Pose& world_from_nav = truth.frame_in_world.at(nav_frame);
  const geom::Pose start_in_nav = anchor_in_frame(truth, world_from_nav, scenario.start);
  const geom::FrameTransform nav_from_session =
      geom::relative_transform(start_in_nav, *start_loc);

  guidance::GuidanceState gs(route, guidance::kDefaultEpsilon, cfg.arrival_radius,
                             guidance::kOnTrackTolerance, cfg.units);

  const geom::Pose goal_in_nav = anchor_in_frame(truth, world_from_nav, scenario.goal);
  bool arrived = false;
  double t = 0.0;
  while (rec.events < cfg.max_events) {
    t += kTick;
    const geom::Pose est_nav = geom::apply(nav_from_session, session.estimated_pose());
    const auto events = gs.update(est_nav, t);
    rec.events += static_cast<int>(events.size());
    for (const auto& e : events) {
      if (e.kind == guidance::EventKind::Arrival) arrived = true;
    }
    if (arrived) break;
    if (!gs.active()) break;

    const auto& kp = gs.current_keypoint();
    const geom::Pose now = geom::apply(nav_from_session, session.estimated_pose());
    const double d = (now.position - kp.position).norm();
    if (d > 1e-9) {
      const double want =
          geom::bearing(now.position.head<2>(), kp.position.head<2>());
      const double turn = geom::normalize_angle_180(want - geom::heading_of(now));
      session.step_odometry(world, {std::min(kStride, d), turn});
    }
    // anchors along the route relocalize opportunistically and reset drift
    for (const auto& a : plan.anchor_sequence) {
      if (session.try_relocalize(world, a, kTick)) break;
    }
  }

  if (arrived) {
    // the arrival was dead-reckoned; confirm it against the goal anchor and
    // hunt in an expanding square while the anchor stays silent
    bool confirmed = session.try_relocalize(world, scenario.goal, 1.0).has_value();
    int leg = 0;
    double leg_len = 2.0;
    int steps_left = 0;
    for (int k = 0; k < 800 && !confirmed; ++k) {
      if (steps_left == 0) {
        session.step_odometry(world, {0.0, 90.0});
        ++leg;
        if (leg > 1 && leg % 2 == 1) leg_len += 2.0;
        steps_left = static_cast<int>(std::ceil(leg_len / kStride));
      }
      session.step_odometry(world, {kStride, 0.0});
      --steps_left;
      confirmed = session.try_relocalize(world, scenario.goal, kTick).has_value();
    }
    // final refinement against the goal anchor itself
    for (int k = 0; k < 60; ++k) {
      session.try_relocalize(world, scenario.goal, 1.0);
      const geom::Pose now = geom::apply(nav_from_session, session.estimated_pose());
      const double d = (now.position - goal_in_nav.position).norm();
      if (d <= kFinalApproach) break;
      const double want =
          geom::bearing(now.position.head<2>(), goal_in_nav.position.head<2>());
      const double turn = geom::normalize_angle_180(want - geom::heading_of(now));
      session.step_odometry(world, {std::min(kStride, d), turn});
    }
  }

  rec.final_distance =
      (world.true_pose.position - truth.anchor_in_world.at(scenario.goal).position)
          .norm();
  rec.success = arrived && rec.final_distance <= cfg.arrival_radius;
  if (!arrived) rec.error = "guidance event budget exhausted before arrival";
  return rec;
}

SimulationReport run_simulation(const MapGraph& map, const RunConfig& cfg) {
  SimulationReport report;
  report.seed = cfg.sensors.seed;
  report.anchor_count = map.anchors.size();
  report.connection_count = map.connections.size();

  const GroundTruth truth = derive_ground_truth(map);

  std::vector<Scenario> scenarios = cfg.scenarios;
  std::sort(scenarios.begin(), scenarios.end(),
            [](const Scenario& a, const Scenario& b) { return a.id < b.id; });
  int successes = 0;
  for (const auto& s : scenarios) {
    RunRecord rec = run_scenario(map, truth, s, cfg);
    if (rec.success) ++successes;
    report.runs.push_back(std::move(rec));
  }
  report.success_rate =
      report.runs.empty() ? 0.0
                          : static_cast<double>(successes) /
                                static_cast<double>(report.runs.size());
  return report;
}

mapstore::MapGraph make_random_map(sensim::Rng& rng, const RandomMapOptions& opts) {
  if (opts.anchor_count < 2)
    throw std::invalid_argument("make_random_map: need at least 2 anchors");

  // anchor layout with minimum separation so relocalization zones stay distinct
  std::vector<Eigen::Vector3d> pos;
  while (static_cast<int>(pos.size()) < opts.anchor_count) {
    Eigen::Vector3d p{rng.uniform(0.0, opts.area), rng.uniform(0.0, opts.area), 0.0};
    bool ok = true;
    for (const auto& q : pos)
      if ((p - q).norm() < 10.0) ok = false;
    if (ok) pos.push_back(p);
  }

  mapstore::MapGraph map;
  auto anchor_id = [](int i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "a%02d", i + 1);
    return std::string(buf);
  };
  for (int i = 0; i < opts.anchor_count; ++i) {
    mapstore::Anchor a;
    a.id = anchor_id(i);
    a.kind = mapstore::AnchorKind::Indoor;
    a.frame = "f-" + a.id;
    a.reference_pose = geom::Pose::identity(a.frame);
    a.quality = 1.0;
    a.name = "anchor " + a.id;
    mapstore::add_anchor(map, a);
  }

  std::vector<std::pair<int, int>> edges;
  auto has_edge = [&](int i, int j) {
    for (const auto& [a, b] : edges)
      if ((a == i && b == j) || (a == j && b == i)) return true;
    return false;
  };
  for (int i = 1; i < opts.anchor_count; ++i) {
    const int j = static_cast<int>(rng.uniform() * i);
    edges.emplace_back(j, i);
  }
  for (int k = 0; k < opts.extra_edges; ++k) {
    const int i = static_cast<int>(rng.uniform() * opts.anchor_count);
    const int j = static_cast<int>(rng.uniform() * opts.anchor_count);
    if (i == j || has_edge(i, j)) continue;
    edges.emplace_back(i, j);
  }

  // world pose of every anchor: position, identity orientation
  auto world_pose = [&](int i) {
    geom::Pose p = geom::Pose::identity("world");
    p.position = pos[static_cast<size_t>(i)];
    return p;
  };

  int cidx = 0;
  for (const auto& [i, j] : edges) {
    ++cidx;
    char cbuf[8];
    std::snprintf(cbuf, sizeof(cbuf), "c%02d", cidx);
    const std::string cid(cbuf);
    const std::string sframe = "s-" + cid;

    geom::Pose world_from_s = geom::Pose::identity("world");
    if (opts.multi_frame) {
      world_from_s = geom::Pose::from_yaw(rng.uniform(0.0, 360.0), "world");
      world_from_s.position = {rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0), 0.0};
    }
    const geom::Pose s_from_world = geom::invert(world_from_s);

    const Eigen::Vector3d a_pos = pos[static_cast<size_t>(i)];
    const Eigen::Vector3d b_pos = pos[static_cast<size_t>(j)];
    const double heading = geom::bearing(a_pos.head<2>(), b_pos.head<2>());

    auto into_s = [&](const geom::Pose& world_p) {
      geom::Pose p = geom::compose(s_from_world, world_p);
      p.frame = sframe;
      return p;
    };

    mapstore::Connection c;
    c.id = cid;
    c.from_anchor = anchor_id(i);
    c.to_anchor = anchor_id(j);
    geom::Pose start = geom::Pose::from_yaw(heading, "world");
    start.position = a_pos;
    geom::Pose end = start;
    end.position = b_pos;
    c.forward_trail.points = {into_s(start), into_s(end)};
    c.forward_trail.spacing = opts.spacing;
    c.from_pose_in_trail_frame = into_s(world_pose(i));
    c.to_pose_in_trail_frame = into_s(world_pose(j));
    mapstore::add_connection(map, c);
  }
  return map;
}

}  // namespace navishare::sim
