#pragma once

#include "navishare/mapstore.hpp"
#include "navishare/sensim.hpp"

#include <optional>
#include <string>
#include <vector>

namespace navishare::workflows {

constexpr double kMinScanSeconds = 30.0;
constexpr double kPathAnchorSpacing = 10.0;      // meters of trail per path anchor
constexpr double kStartLocalizeTimeout = 60.0;   // seconds, simulated
constexpr double kGeoConfidenceTimeout = 120.0;  // seconds, simulated

/// Timed samples of the scanning motion used to build an anchor's
/// visual-spatial map.
struct ScanTrace {
  struct Sample {
    geom::Pose pose;
    double timestamp = 0.0;  // seconds, strictly increasing
  };
  std::vector<Sample> samples;

  double duration() const;
  /// Fraction of the full circle swept by the phone's heading, in [0,1].
  double angular_coverage() const;
  /// Meters moved away from the first sample (translational baseline).
  double baseline() const;
};

/// Voice prompt schedule coaching the scanning motion.
std::optional<std::string> prompt_at(double t_seconds);

/// Quality model: mean of angular coverage and capped baseline.
double scan_quality(const ScanTrace& scan);

struct AnchorMeta {
  std::string name;
  std::string notes;
};

/// Builds an indoor anchor in the session frame (reference pose is the
/// identity by convention). Rejects scans shorter than the required
/// 30-second window.
mapstore::Anchor create_anchor(const sensim::TrackingSession& session,
                               const ScanTrace& scan, const AnchorMeta& meta);

/// One step of a walk replay: panning in place or moving, both advancing
/// simulated time.
struct WalkEvent {
  enum class Kind { Pan, Move, Stop };
  Kind kind = Kind::Move;
  double dt = 1.0;                 // seconds
  double distance = 0.0;           // meters, Move only
  double heading_change = 0.0;     // degrees, Move only
};

std::vector<WalkEvent> walk_events_from_json(const nlohmann::json& doc);
nlohmann::json walk_events_to_json(const std::vector<WalkEvent>& events);

enum class RecorderState {
  SelectStart,
  LocalizingStart,
  Recording,
  EndLocalized,
  Done,
  AwaitReverseDecision,
};

/// The four-step connection workflow as a state machine. Transitions are
/// driven by connect_anchors; any illegal order throws and leaves the
/// map untouched.
class ConnectionRecorder {
 public:
  ConnectionRecorder(std::string from_anchor, std::string to_anchor);

  RecorderState state() const { return state_; }
  const std::string& from_anchor() const { return from_; }
  const std::string& to_anchor() const { return to_; }

  void begin_localizing();
  void start_localized(const geom::Pose& from_pose);
  void record_crumb(const geom::Pose& pose);
  void end_localized(const geom::Pose& to_pose);
  void finish();
  void await_reverse_decision();
  void resolve_reverse(bool recorded);

  const std::vector<geom::Pose>& raw_trail() const { return raw_trail_; }
  const geom::Pose& from_pose() const { return from_pose_; }
  const geom::Pose& to_pose() const { return to_pose_; }

 private:
  RecorderState state_ = RecorderState::SelectStart;
  std::string from_;
  std::string to_;
  std::vector<geom::Pose> raw_trail_;
  geom::Pose from_pose_;
  geom::Pose to_pose_;

  void expect(RecorderState s, const char* what) const;
};

/// Drives the recorder over a replayed walk: start localization with a
/// 60 s timeout, breadcrumb recording with one path anchor per 10 m, end
/// localization, and the optional-reverse prompt. On success the
/// connection is added to the map and its id returned; on any failure
/// the map is unchanged.
std::string connect_anchors(ConnectionRecorder& recorder,
                            sensim::TrackingSession& session, sensim::WorldState& world,
                            mapstore::MapGraph& map, const std::vector<WalkEvent>& events,
                            double spacing = mapstore::kDefaultSpacing);

struct ExtendResult {
  std::string anchor_id;
  std::string connection_id;
};

/// Streamlined single-step workflow: walk from an existing anchor, scan
/// at the end, and atomically create both the new anchor and the
/// connection. Equivalent to create_anchor followed by connect_anchors;
/// nothing is written on failure.
ExtendResult streamlined_extend(sensim::TrackingSession& session,
                                sensim::WorldState& world, mapstore::MapGraph& map,
                                const std::string& from_anchor,
                                const std::vector<WalkEvent>& walk,
                                const ScanTrace& end_scan, const AnchorMeta& meta,
                                double spacing = mapstore::kDefaultSpacing);

/// Outdoor anchor creation: polls geospatial fixes once per second until
/// the confidence gate opens (timeout 120 s), then runs the indoor
/// anchor workflow with the recorded geo pose attached.
mapstore::Anchor create_outdoor_anchor(sensim::TrackingSession& session,
                                       sensim::WorldState& world, const ScanTrace& scan,
                                       const AnchorMeta& meta,
                                       const sensim::ConfidenceThresholds& thresholds = {},
                                       double timeout_s = kGeoConfidenceTimeout);

}  // namespace navishare::workflows
