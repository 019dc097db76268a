#pragma once

#include "navishare/geom.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>

namespace navishare::sensim {

/// Deterministic random source. All simulation noise flows through one
/// of these; there is no global randomness anywhere in the library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), base_seed_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller (implementation-defined std
  /// distributions are avoided so sequences are stable everywhere).
  double gaussian();
  double gaussian(double sigma);
  std::uint64_t next_u64();

  /// Stream split: derives an independent child generator, stable in
  /// the label.
  Rng child(const std::string& label) const;

 private:
  std::mt19937_64 engine_;
  std::uint64_t base_seed_ = 0;
  std::optional<double> cached_;
};

/// FNV-1a, used for deterministic seed derivation from string labels.
std::uint64_t hash_label(std::uint64_t seed, const std::string& label);

struct DriftParams {
  double sigma_pos = 0.03;  // meters of positional noise per sqrt(meter traveled)
  double sigma_yaw = 0.5;   // degrees of yaw noise per sqrt(meter traveled)
};

struct RelocParams {
  double radius = 4.0;     // meters, anchor detection range
  double sigma_reloc = 0.2;  // meters, per-axis localization noise
  double p_success = 1.0;  // probability of localizing per second in range
};

struct CiModel {
  double horizontal_0 = 10.0;  // meters at t = 0
  double horizontal_floor = 1.0;
  double yaw_0 = 25.0;  // degrees
  double yaw_floor = 2.0;
  double vertical_0 = 5.0;  // meters
  double vertical_floor = 1.0;
  double tau = 5.0;  // seconds
};

struct ConfidenceThresholds {
  double horizontal = 2.0;  // meters
  double yaw = 5.0;         // degrees
  double vertical = 3.0;    // meters
};

/// Ground truth hidden from the engine under test; only sensor
/// operations may read it.
struct WorldState {
  geom::Pose true_pose;  // in the ground-truth frame "world"
  std::map<std::string, geom::Pose> anchor_truth;
  std::optional<geom::GeoPose> geo_origin;  // geo pose of the world origin
  Rng rng;

  explicit WorldState(std::uint64_t seed);
};

struct GeoFix {
  geom::GeoPose geo;
  double elapsed = 0.0;
};

/// One tracking session: the session frame is anchored at the pose the
/// phone had when the session started, mirroring how the estimated pose
/// drifts away from truth until an anchor resets it.
class TrackingSession {
 public:
  TrackingSession(std::string session_frame, const WorldState& world,
                  DriftParams drift, RelocParams reloc, CiModel ci = {});

  const std::string& frame() const { return frame_; }
  const geom::Pose& estimated_pose() const { return estimated_; }
  const DriftParams& drift_params() const { return drift_; }
  const RelocParams& reloc_params() const { return reloc_; }

  /// True pose mapped into the session frame (test oracle access).
  geom::Pose truth_in_session(const WorldState& world) const;
  /// Positional estimation error in meters.
  double drift_error(const WorldState& world) const;

  struct Motion {
    double distance = 0.0;        // meters, >= 0
    double heading_change = 0.0;  // degrees, clockwise positive
  };

  /// Advances truth exactly and the estimate with random-walk noise
  /// (per-axis std sigma * sqrt(distance)). Turn is applied before the
  /// straight-line advance.
  geom::Pose step_odometry(WorldState& world, const Motion& motion);

  /// Attempts to localize the anchor over a dt-second window. In range,
  /// success probability is 1-(1-p_success)^dt. On success the returned
  /// anchor pose (in the session frame) carries per-axis Gaussian noise
  /// gated at a 3-sigma norm, and the accumulated drift is reset to that
  /// residual.
  std::optional<geom::Pose> try_relocalize(WorldState& world, const std::string& anchor_id,
                                           double dt);

  /// Geospatial estimate with confidence intervals shrinking as
  /// ci_floor + (ci_0 - ci_floor) * exp(-elapsed / tau).
  GeoFix geospatial_fix(WorldState& world, double elapsed);

 private:
  std::string frame_;
  geom::Pose world_from_session_;  // fixed at session start
  geom::Pose estimated_;           // in the session frame
  DriftParams drift_;
  RelocParams reloc_;
  CiModel ci_;
};

bool is_confident(const GeoFix& fix, const ConfidenceThresholds& thresholds = {});

double ci_at(double ci_0, double ci_floor, double tau, double elapsed);

struct SimConfig {
  std::uint64_t seed = 0;
  DriftParams drift;
  RelocParams reloc;
  CiModel ci;
};

SimConfig sim_config_from_json(const nlohmann::json& doc);
nlohmann::json sim_config_to_json(const SimConfig& cfg);

}  // namespace navishare::sensim
