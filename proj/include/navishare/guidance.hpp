#pragma once

#include "navishare/routing.hpp"

#include <optional>
#include <string>
#include <vector>

namespace navishare::guidance {

enum class Turn {
  Straight,
  SlightLeft,
  Left,
  SharpLeft,
  SlightRight,
  Right,
  SharpRight,
  Arrive,
};

std::string turn_name(Turn t);

/// |d| < 30 straight, to 60 slight, to 120 plain, beyond sharp; negative
/// is left under clockwise-positive bearings; the 180-degree tie goes
/// right.
Turn classify_turn(double heading_change_deg);

struct Keypoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Turn turn = Turn::Straight;
  double distance_to_next = 0.0;  // meters; 0 only for the arrive keypoint
};

enum class Units { Meters, Feet };

constexpr double kDefaultEpsilon = 0.5;        // RDP tolerance, meters
constexpr double kDefaultArrivalRadius = 1.0;  // meters
constexpr double kHapticFarDistance = 5.0;     // meters, ramp start
constexpr double kOnTrackTolerance = 30.0;     // degrees
constexpr double kCueCadence = 2.0;            // seconds between on-track cues
constexpr double kOffTrackAfter = 5.0;         // seconds of sustained deviation

/// Ramer-Douglas-Peucker simplification of the route polyline; every
/// surviving interior vertex becomes a turn keypoint and the final point
/// becomes the arrive keypoint.
std::vector<Keypoint> extract_keypoints(const mapstore::BreadcrumbTrail& polyline,
                                        double epsilon = kDefaultEpsilon);

/// 2D RDP over positions, kept separate so tests can check the
/// deviation guarantee directly.
std::vector<size_t> rdp_indices(const std::vector<Eigen::Vector3d>& pts, double epsilon);

/// 0 beyond 5 m, then a linear ramp reaching 1 at the arrival radius.
double haptic_level(double distance_m, double arrival_radius = kDefaultArrivalRadius);

/// "Turn left and proceed 20 meters" / "Continue straight and proceed
/// 12 meters"; distances rounded to whole units.
std::string instruction_text(Turn turn, double distance_m, Units units);

enum class EventKind { OnTrackCue, Haptic, Instruction, Arrival, OffTrack };

struct GuidanceEvent {
  EventKind kind;
  double haptic_level = 0.0;  // [0,1], Haptic events only
  std::optional<std::string> text;  // Instruction events only

  static GuidanceEvent haptic(double level);
  static GuidanceEvent instruction(std::string text);
};

class GuidanceState {
 public:
  GuidanceState(routing::Route route, double epsilon = kDefaultEpsilon,
                double arrival_radius = kDefaultArrivalRadius,
                double on_track_tolerance = kOnTrackTolerance,
                Units units = Units::Meters);

  const std::vector<Keypoint>& keypoints() const { return keypoints_; }
  size_t current_index() const { return current_index_; }
  bool active() const { return current_index_ < keypoints_.size(); }
  double arrival_radius() const { return arrival_radius_; }
  const Keypoint& current_keypoint() const { return keypoints_.at(current_index_); }

  /// One guidance tick at simulated time t: keypoint-arrival advance and
  /// instruction, on-track cue (rate limited), haptic ramp, off-track
  /// after sustained deviation.
  std::vector<GuidanceEvent> update(const geom::Pose& estimated, double t_seconds);

  /// Manual recovery: relative bearing to the current keypoint quantized
  /// to the turn taxonomy.
  std::string get_directions(const geom::Pose& estimated);

 private:
  routing::Route route_;
  std::vector<Keypoint> keypoints_;
  size_t current_index_ = 0;
  double arrival_radius_;
  double on_track_tolerance_;
  Units units_;
  double last_cue_time_ = -1e18;
  std::optional<double> off_track_since_;
  bool off_track_reported_ = false;

  std::vector<GuidanceEvent> advance_events();
};

}  // namespace navishare::guidance
