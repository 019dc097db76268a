#pragma once

#include "navishare/guidance.hpp"
#include "navishare/routing.hpp"
#include "navishare/sensim.hpp"

#include <string>
#include <vector>

namespace navishare::sim {

struct Scenario {
  std::string id;
  std::string start;
  std::string goal;
};

struct RunConfig {
  sensim::SimConfig sensors;
  std::vector<Scenario> scenarios;
  double arrival_radius = guidance::kDefaultArrivalRadius;
  int max_events = 10'000;
  guidance::Units units = guidance::Units::Meters;
};

RunConfig run_config_from_json(const nlohmann::json& doc);

struct RunRecord {
  std::string scenario;
  bool success = false;
  bool unreachable = false;
  double route_length = 0.0;
  int events = 0;
  double final_distance = 0.0;  // meters from the goal anchor, ground truth
  std::string error;
};

struct SimulationReport {
  std::uint64_t seed = 0;
  size_t anchor_count = 0;
  size_t connection_count = 0;
  std::vector<RunRecord> runs;  // sorted by scenario id
  double success_rate = 0.0;
};

nlohmann::json report_to_json(const SimulationReport& report);

/// Ground truth derived from the map itself: every frame placed in the
/// frame of the lexicographically smallest anchor.
struct GroundTruth {
  std::map<std::string, geom::Pose> frame_in_world;
  std::map<std::string, geom::Pose> anchor_in_world;
};

GroundTruth derive_ground_truth(const mapstore::MapGraph& map);

/// One scenario: localize at the start anchor by panning, plan, stitch,
/// then run a scripted walker that obeys the guidance stream. Fully
/// deterministic in the derived per-scenario seed.
RunRecord run_scenario(const mapstore::MapGraph& map, const GroundTruth& truth,
                       const Scenario& scenario, const RunConfig& cfg);

SimulationReport run_simulation(const mapstore::MapGraph& map, const RunConfig& cfg);

struct RandomMapOptions {
  int anchor_count = 6;
  double area = 80.0;         // meters, square side
  int extra_edges = 2;        // beyond the spanning tree
  bool multi_frame = true;    // give every session a random rigid offset
  double spacing = 1.0;
};

/// Random connected anchor graph with per-session frames, plus its
/// ground-truth layout; used by the simulation harness and tests.
mapstore::MapGraph make_random_map(sensim::Rng& rng, const RandomMapOptions& opts);

}  // namespace navishare::sim
