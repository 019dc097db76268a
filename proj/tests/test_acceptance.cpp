// Acceptance gate: every criterion prints exactly one PASS/FAIL line and
// the process fails if any criterion does.
#include "navishare/canonical_json.hpp"
#include "navishare/guidance.hpp"
#include "navishare/routing.hpp"
#include "navishare/simulation.hpp"
#include "navishare/workflows.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

using namespace navishare;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// independent oracle: minimum cost over all anchor-simple paths
double brute_force_cost(const mapstore::MapGraph& map, const std::string& start,
                        const std::string& goal) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::string> stack = {start};
  std::function<void(const std::string&, double)> dfs = [&](const std::string& at,
                                                            double cost) {
    if (cost >= best) return;
    if (at == goal) {
      best = cost;
      return;
    }
    auto adj = map.adjacency.find(at);
    if (adj == map.adjacency.end()) return;
    for (const auto& [cid, dir] : adj->second) {
      const auto& c = map.connections.at(cid);
      const std::string& next =
          dir == mapstore::Direction::Forward ? c.to_anchor : c.from_anchor;
      if (std::find(stack.begin(), stack.end(), next) != stack.end()) continue;
      stack.push_back(next);
      dfs(next, cost + c.travel_length(dir));
      stack.pop_back();
    }
  };
  dfs(start, 0.0);
  return best;
}

// criterion 1: 200 random maps <= 8 anchors, Dijkstra == brute force, < 5 s
bool routing_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  sensim::Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    sim::RandomMapOptions opts;
    opts.anchor_count = 3 + static_cast<int>(rng.uniform() * 6);  // 3..8
    opts.extra_edges = static_cast<int>(rng.uniform() * 4);
    const auto map = sim::make_random_map(rng, opts);
    for (const auto& [goal, _] : map.anchors) {
      const std::string start = map.anchors.begin()->first;
      const double oracle = brute_force_cost(map, start, goal);
      double got;
      try {
        got = routing::shortest_path(map, start, goal).cost;
      } catch (const std::runtime_error&) {
        if (std::isinf(oracle)) continue;
        return false;
      }
      if (std::abs(got - oracle) > 1e-9) return false;
    }
  }
  return seconds_since(t0) < 5.0;
}

// criterion 2: exact stitching closes to 1e-9; noisy junctions stay within
// n_junctions * 3 sigma in >= 99% of trials
bool stitching_closure() {
  sensim::Rng rng(103);
  const double sigma = 0.2;
  int routes = 0;
  int noisy_trials = 0;
  int noisy_ok = 0;
  while (routes < 100) {
    sim::RandomMapOptions opts;
    opts.multi_frame = true;
    const auto map = sim::make_random_map(rng, opts);
    const auto truth = sim::derive_ground_truth(map);
    const auto plan = routing::shortest_path(map, "a01", "a06");
    if (plan.anchor_sequence.size() < 3) continue;  // need at least one junction
    ++routes;

    const auto exact = routing::exact_alignments(map, plan.anchor_sequence);
    const auto route = routing::stitch_route(map, plan.anchor_sequence, exact);
    const geom::Pose& world_from_nav =
        truth.frame_in_world.at(route.polyline.points.front().frame);
    const Eigen::Vector3d goal_nav =
        geom::compose(geom::invert(world_from_nav), truth.anchor_in_world.at("a06"))
            .position;
    if ((route.polyline.points.back().position - goal_nav).norm() > 1e-9) return false;

    const auto n_junctions = static_cast<double>(plan.anchor_sequence.size() - 2);
    for (int k = 0; k < 10; ++k) {
      auto noisy = exact;
      for (auto& [id, a] : noisy) {
        Eigen::Vector3d r;
        do {
          r = {rng.gaussian(sigma), rng.gaussian(sigma), rng.gaussian(sigma)};
        } while (r.norm() > 3.0 * sigma);
        a.in_next_frame.position += r;
      }
      const auto perturbed = routing::stitch_route(map, plan.anchor_sequence, noisy);
      const double err = (perturbed.polyline.points.back().position - goal_nav).norm();
      ++noisy_trials;
      if (err <= n_junctions * 3.0 * sigma + 1e-12) ++noisy_ok;
    }
  }
  return noisy_ok >= static_cast<int>(0.99 * noisy_trials);
}

// criterion 3: 1 000 points round-trip to < 1e-9 deg; distances match haversine
bool geodesy() {
  sensim::Rng rng(107);
  const geom::GeoPose origin{41.3, -72.9, 0.0, 0.0};
  for (int i = 0; i < 1000; ++i) {
    geom::GeoPose g = origin;
    g.latitude += rng.uniform(-0.008, 0.008);
    g.longitude += rng.uniform(-0.008, 0.008);
    g.altitude = rng.uniform(-30.0, 30.0);
    const geom::Pose local = geom::geo_to_local(g, origin);
    const geom::GeoPose back = geom::local_to_geo(local, origin);
    if (std::abs(back.latitude - g.latitude) >= 1e-9) return false;
    if (std::abs(back.longitude - g.longitude) >= 1e-9) return false;
    const double planar = std::hypot(local.position.x(), local.position.y());
    const double oracle = geom::haversine_distance(origin, g);
    if (oracle > 1.0 && std::abs(planar - oracle) / oracle > 1e-3) return false;
  }
  return true;
}

// criterion 4: 100 m corridor with anchors every 10 m; post-reset error
// <= 3 sigma_reloc in >= 99% of 1 000 trials, and anchors beat no anchors
// in >= 95% of paired trials
bool drift_and_reset() {
  const double sigma_reloc = 0.05;
  const sensim::DriftParams drift{0.03, 0.5};
  int reset_ok = 0;
  int paired_win = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const auto seed = static_cast<std::uint64_t>(40'000 + t);

    sensim::WorldState with(seed);
    for (int k = 0; k <= 10; ++k) {
      geom::Pose a = geom::Pose::identity("world");
      a.position = {0.0, k * 10.0, 0.0};
      with.anchor_truth["cp" + std::to_string(k)] = a;
    }
    sensim::TrackingSession ws("with", with, drift, {4.0, sigma_reloc, 1.0});
    for (int m = 1; m <= 100; ++m) {
      ws.step_odometry(with, {1.0, 0.0});
      if (m % 10 == 0) ws.try_relocalize(with, "cp" + std::to_string(m / 10), 1.0);
    }
    const double with_err = ws.drift_error(with);
    if (with_err <= 3.0 * sigma_reloc + 1e-12) ++reset_ok;

    sensim::WorldState without(seed);
    sensim::TrackingSession ns("without", without, drift, {4.0, sigma_reloc, 1.0});
    for (int m = 1; m <= 100; ++m) ns.step_odometry(without, {1.0, 0.0});
    if (ns.drift_error(without) > with_err) ++paired_win;
  }
  return reset_ok >= static_cast<int>(0.99 * trials) &&
         paired_win >= static_cast<int>(0.95 * trials);
}

// criterion 5: noiseless 100% on 100 maps; default noise >= 95%; every run
// <= 10 000 events; the whole criterion under 60 s
bool end_to_end_navigation() {
  const auto t0 = std::chrono::steady_clock::now();
  sensim::Rng rng(109);
  int noiseless_ok = 0;
  int noisy_ok = 0;
  for (int t = 0; t < 100; ++t) {
    const auto map = sim::make_random_map(rng, {});
    sim::RunConfig cfg;
    cfg.sensors.seed = 50'000 + static_cast<std::uint64_t>(t);
    cfg.scenarios.push_back({"s", "a01", "a06"});

    sim::RunConfig quiet = cfg;
    quiet.sensors.drift = {0.0, 0.0};
    quiet.sensors.reloc = {4.0, 0.0, 1.0};
    const auto clean = sim::run_simulation(map, quiet);
    if (clean.runs.at(0).success && clean.runs.at(0).events <= 10'000) ++noiseless_ok;

    const auto noisy = sim::run_simulation(map, cfg);
    if (noisy.runs.at(0).events > 10'000) return false;
    if (noisy.runs.at(0).success) ++noisy_ok;
  }
  return noiseless_ok == 100 && noisy_ok >= 95 && seconds_since(t0) < 60.0;
}

// criterion 6: the canonical keypoint instruction, exact text
bool canonical_instruction() {
  mapstore::BreadcrumbTrail polyline;
  auto push = [&](double x, double y) {
    geom::Pose p = geom::Pose::identity("nav");
    p.position = {x, y, 0.0};
    polyline.points.push_back(p);
  };
  for (int y = 0; y <= 10; ++y) push(0.0, y);
  for (int x = 1; x <= 20; ++x) push(-x, 10.0);  // turn left (west), 20 m leg
  polyline.spacing = 1.0;
  const auto kps = guidance::extract_keypoints(polyline);
  if (kps.size() != 2 || kps[0].turn != guidance::Turn::Left) return false;
  return guidance::instruction_text(kps[0].turn, kps[0].distance_to_next,
                                    guidance::Units::Meters) ==
         "Turn left and proceed 20 meters";
}

// criterion 7: committed corpus round-trips; every corrupted variant is flagged
bool format_stability() {
  const fs::path corpus = fs::path(NAVISHARE_TEST_DATA_DIR) / "corpus";
  int clean = 0;
  for (const auto& entry : fs::directory_iterator(corpus)) {
    if (!entry.is_regular_file()) continue;
    const std::string bytes = read_file(entry.path());
    mapstore::MapGraph map;
    try {
      map = mapstore::deserialize(bytes);
    } catch (const std::exception&) {
      return false;
    }
    if (mapstore::serialize(map) != bytes) return false;  // byte identity
    if (!mapstore::structurally_equal(map, mapstore::deserialize(mapstore::serialize(map))))
      return false;
    ++clean;
  }
  if (clean < 10) return false;

  int corrupted = 0;
  for (const auto& entry : fs::directory_iterator(corpus / "corrupted")) {
    if (!entry.is_regular_file()) continue;
    ++corrupted;
    bool flagged = false;
    try {
      const auto map = mapstore::from_json(canon::parse(read_file(entry.path())));
      flagged = !mapstore::validate(map).empty();
    } catch (const std::exception&) {
      flagged = true;
    }
    if (!flagged) return false;
  }
  return corrupted >= 1;
}

// criterion 8: streamlined_extend == create_anchor + connect_anchors on 100
// seeded inputs; failures leave the map byte-identical
bool workflow_equivalence() {
  sensim::Rng meta(113);
  for (int trial = 0; trial < 100; ++trial) {
    const auto seed = static_cast<std::uint64_t>(60'000 + trial);
    const int meters = 8 + static_cast<int>(meta.uniform() * 22);
    std::vector<workflows::WalkEvent> walk = {
        {workflows::WalkEvent::Kind::Pan, 1.0, 0.0, 0.0}};
    for (int i = 0; i < meters; ++i)
      walk.push_back({workflows::WalkEvent::Kind::Move, 1.0, 1.0,
                      meta.uniform(-10.0, 10.0)});

    workflows::ScanTrace scan;
    for (int t = 0; t <= 31; ++t) {
      workflows::ScanTrace::Sample s;
      s.pose = geom::Pose::from_yaw(t * 12.0, "sess");
      s.pose.position = {0.0, -std::min(1.0, t * 0.05), 0.0};
      s.timestamp = t;
      scan.samples.push_back(s);
    }
    const workflows::AnchorMeta ameta{"extension", ""};

    auto base_map = [] {
      mapstore::MapGraph m;
      mapstore::Anchor a;
      a.id = "A";
      a.kind = mapstore::AnchorKind::Indoor;
      a.frame = "f-A";
      a.reference_pose = geom::Pose::identity(a.frame);
      a.quality = 1.0;
      mapstore::add_anchor(m, a);
      return m;
    };
    auto base_world = [&] {
      sensim::WorldState w(seed);
      w.anchor_truth["A"] = geom::Pose::identity("world");
      return w;
    };

    // two-step reference: noiseless, so the walk end is exactly where the
    // truth-only replay puts it
    auto world1 = base_world();
    sensim::TrackingSession s1("sess", world1, {0.0, 0.0}, {4.0, 0.0, 1.0});
    auto map1 = base_map();
    {
      auto anchor = workflows::create_anchor(s1, scan, ameta);
      anchor.id = map1.fresh_anchor_id();
      geom::Pose end = world1.true_pose;
      for (const auto& e : walk) {
        if (e.kind != workflows::WalkEvent::Kind::Move) continue;
        end.orientation =
            (end.orientation * Eigen::Quaterniond(Eigen::AngleAxisd(
                                   -geom::deg_to_rad(e.heading_change),
                                   Eigen::Vector3d::UnitZ())))
                .normalized();
        end.position += end.orientation * Eigen::Vector3d(0.0, e.distance, 0.0);
      }
      world1.anchor_truth[anchor.id] = end;
      mapstore::add_anchor(map1, anchor);
      workflows::ConnectionRecorder r("A", anchor.id);
      workflows::connect_anchors(r, s1, world1, map1, walk);
    }

    auto world2 = base_world();
    sensim::TrackingSession s2("sess", world2, {0.0, 0.0}, {4.0, 0.0, 1.0});
    auto map2 = base_map();
    workflows::streamlined_extend(s2, world2, map2, "A", walk, scan, ameta);
    if (!mapstore::structurally_equal(map1, map2)) return false;

    // failure atomicity: short scan, and a walk that never localizes
    auto world3 = base_world();
    sensim::TrackingSession s3("sess", world3, {0.0, 0.0}, {4.0, 0.0, 1.0});
    auto map3 = base_map();
    const std::string before = mapstore::serialize(map3);
    workflows::ScanTrace short_scan = scan;
    short_scan.samples.resize(10);
    try {
      workflows::streamlined_extend(s3, world3, map3, "A", walk, short_scan, ameta);
      return false;
    } catch (const std::exception&) {
    }
    try {
      workflows::streamlined_extend(
          s3, world3, map3, "A", {{workflows::WalkEvent::Kind::Stop, 0.0, 0.0, 0.0}},
          scan, ameta);
      return false;
    } catch (const std::exception&) {
    }
    if (mapstore::serialize(map3) != before) return false;
  }
  return true;
}

// criterion 9: the simulate subcommand is byte-deterministic at fixed seed
bool simulate_determinism() {
  const fs::path dir = fs::temp_directory_path() / "navishare-acceptance";
  fs::create_directories(dir);
  sensim::Rng rng(127);
  const auto map = sim::make_random_map(rng, {});
  {
    std::ofstream out(dir / "map.json", std::ios::binary);
    out << mapstore::serialize(map);
  }
  {
    std::ofstream out(dir / "config.json", std::ios::binary);
    out << R"({"seed": 7, "scenarios": [)"
        << R"({"id": "s1", "start": "a01", "goal": "a06"},)"
        << R"({"id": "s2", "start": "a02", "goal": "a05"}]})" << "\n";
  }
  const std::string base = std::string(NAVISHARE_CLI_PATH) + " simulate --map " +
                           (dir / "map.json").string() + " --config " +
                           (dir / "config.json").string() + " --out ";
  const std::string r1 = (dir / "report1.json").string();
  const std::string r2 = (dir / "report2.json").string();
  if (std::system((base + r1).c_str()) != 0) return false;
  if (std::system((base + r2).c_str()) != 0) return false;
  const std::string b1 = read_file(r1);
  const std::string b2 = read_file(r2);
  return !b1.empty() && b1 == b2;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    bool (*run)();
  };
  const Criterion criteria[] = {
      {"1. routing oracle equivalence", routing_oracle_equivalence},
      {"2. stitching closure", stitching_closure},
      {"3. geodesy round trip", geodesy},
      {"4. drift and reset", drift_and_reset},
      {"5. end-to-end navigation", end_to_end_navigation},
      {"6. canonical instruction", canonical_instruction},
      {"7. format stability", format_stability},
      {"8. workflow equivalence", workflow_equivalence},
      {"9. simulate determinism", simulate_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    bool ok = false;
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      std::cout << c.name << ": FAIL (exception: " << e.what() << ")\n";
      ++failures;
      continue;
    }
    std::cout << c.name << (ok ? ": PASS" : ": FAIL") << "\n";
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
