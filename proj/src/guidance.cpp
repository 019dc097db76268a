#include "navishare/guidance.hpp"

#include <algorithm>
#include <cmath>

namespace navishare::guidance {

std::string turn_name(Turn t) {
  switch (t) {
    case Turn::Straight: return "straight";
    case Turn::SlightLeft: return "slight-left";
    case Turn::Left: return "left";
    case Turn::SharpLeft: return "sharp-left";
    case Turn::SlightRight: return "slight-right";
    case Turn::Right: return "right";
    case Turn::SharpRight: return "sharp-right";
    case Turn::Arrive: return "arrive";
  }
  return "straight";
}

Turn classify_turn(double heading_change_deg) {
  const double d = geom::normalize_angle_180(heading_change_deg);
  const double mag = std::abs(d);
  if (mag < 30.0) return Turn::Straight;
  const bool right = d > 0.0 || d == 180.0;  // 180-degree tie goes right
  if (mag <= 60.0) return right ? Turn::SlightRight : Turn::SlightLeft;
  if (mag <= 120.0) return right ? Turn::Right : Turn::Left;
  return right ? Turn::SharpRight : Turn::SharpLeft;
}

std::vector<size_t> rdp_indices(const std::vector<Eigen::Vector3d>& pts, double epsilon) {
  if (pts.size() < 2) throw std::invalid_argument("rdp: degenerate polyline");
  std::vector<size_t> keep = {0, pts.size() - 1};
  std::vector<std::pair<size_t, size_t>> stack = {{0, pts.size() - 1}};
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    if (hi <= lo + 1) continue;
    const Eigen::Vector2d a = pts[lo].head<2>();
    const Eigen::Vector2d b = pts[hi].head<2>();
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    double worst = -1.0;
    size_t worst_i = lo;
    for (size_t i = lo + 1; i < hi; ++i) {
      const Eigen::Vector2d p = pts[i].head<2>() - a;
      double d;
      if (len2 == 0.0) {
        d = p.norm();
      } else {
        const double t = std::clamp(p.dot(ab) / len2, 0.0, 1.0);
        d = (p - t * ab).norm();
      }
      if (d > worst) {
        worst = d;
        worst_i = i;
      }
    }
    if (worst > epsilon) {
      keep.push_back(worst_i);
      stack.emplace_back(lo, worst_i);
      stack.emplace_back(worst_i, hi);
    }
  }
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  return keep;
}

std::vector<Keypoint> extract_keypoints(const mapstore::BreadcrumbTrail& polyline,
                                        double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("extract_keypoints: epsilon must be positive");
  if (polyline.points.size() < 2)
    throw std::invalid_argument("extract_keypoints: degenerate polyline");

  std::vector<Eigen::Vector3d> pts;
  pts.reserve(polyline.points.size());
  for (const auto& p : polyline.points) pts.push_back(p.position);

  const auto keep = rdp_indices(pts, epsilon);
  std::vector<Keypoint> keypoints;
  // interior simplified vertices become turn keypoints; the start is not one
  for (size_t j = 1; j + 1 < keep.size(); ++j) {
    const Eigen::Vector2d prev = pts[keep[j - 1]].head<2>();
    const Eigen::Vector2d here = pts[keep[j]].head<2>();
    const Eigen::Vector2d next = pts[keep[j + 1]].head<2>();
    Keypoint kp;
    kp.position = pts[keep[j]];
    const double in_bearing = geom::bearing(prev, here);
    const double out_bearing = geom::bearing(here, next);
    kp.turn = classify_turn(geom::normalize_angle_180(out_bearing - in_bearing));
    kp.distance_to_next = (pts[keep[j + 1]] - pts[keep[j]]).norm();
    keypoints.push_back(kp);
  }
  Keypoint arrive;
  arrive.position = pts.back();
  arrive.turn = Turn::Arrive;
  arrive.distance_to_next = 0.0;
  keypoints.push_back(arrive);
  return keypoints;
}

double haptic_level(double distance_m, double arrival_radius) {
  if (distance_m < 0.0) throw std::invalid_argument("haptic_level: negative distance");
  if (distance_m >= kHapticFarDistance) return 0.0;
  const double level =
      (kHapticFarDistance - distance_m) / (kHapticFarDistance - arrival_radius);
  return std::clamp(level, 0.0, 1.0);
}

std::string instruction_text(Turn turn, double distance_m, Units units) {
  const double shown = units == Units::Feet ? distance_m * 3.28084 : distance_m;
  const long rounded = std::lround(shown);
  const std::string unit_word =
      units == Units::Feet ? (rounded == 1 ? "foot" : "feet")
                           : (rounded == 1 ? "meter" : "meters");
  const std::string tail = " and proceed " + std::to_string(rounded) + " " + unit_word;
  if (turn == Turn::Straight) return "Continue straight" + tail;
  return "Turn " + turn_name(turn) + tail;
}

GuidanceEvent GuidanceEvent::haptic(double level) {
  GuidanceEvent e{EventKind::Haptic};
  e.haptic_level = level;
  return e;
}

GuidanceEvent GuidanceEvent::instruction(std::string text) {
  GuidanceEvent e{EventKind::Instruction};
  e.text = std::move(text);
  return e;
}

GuidanceState::GuidanceState(routing::Route route, double epsilon, double arrival_radius,
                             double on_track_tolerance, Units units)
    : route_(std::move(route)),
      keypoints_(extract_keypoints(route_.polyline, epsilon)),
      arrival_radius_(arrival_radius),
      on_track_tolerance_(on_track_tolerance),
      units_(units) {}

std::vector<GuidanceEvent> GuidanceState::advance_events() {
  std::vector<GuidanceEvent> events;
  const Keypoint reached = keypoints_[current_index_];
  ++current_index_;
  if (reached.turn == Turn::Arrive) {
    events.push_back(GuidanceEvent{EventKind::Arrival});
  } else {
    events.push_back(GuidanceEvent::instruction(
        instruction_text(reached.turn, reached.distance_to_next, units_)));
  }
  return events;
}

std::vector<GuidanceEvent> GuidanceState::update(const geom::Pose& estimated,
                                                 double t_seconds) {
  std::vector<GuidanceEvent> events;
  if (!active()) return events;

  const Keypoint& kp = current_keypoint();
  const double distance = (estimated.position - kp.position).norm();
  if (distance <= arrival_radius_) {
    auto advanced = advance_events();
    events.insert(events.end(), advanced.begin(), advanced.end());
    off_track_since_.reset();
    off_track_reported_ = false;
    return events;
  }

  const double target_bearing =
      geom::bearing(estimated.position.head<2>(), kp.position.head<2>());
  const double deviation =
      std::abs(geom::normalize_angle_180(target_bearing - geom::heading_of(estimated)));

  if (deviation <= on_track_tolerance_) {
    off_track_since_.reset();
    off_track_reported_ = false;
    if (t_seconds - last_cue_time_ >= kCueCadence) {
      events.push_back(GuidanceEvent{EventKind::OnTrackCue});
      last_cue_time_ = t_seconds;
    }
  } else {
    if (!off_track_since_) off_track_since_ = t_seconds;
    if (!off_track_reported_ && t_seconds - *off_track_since_ > kOffTrackAfter) {
      events.push_back(GuidanceEvent{EventKind::OffTrack});
      off_track_reported_ = true;
    }
  }
  events.push_back(GuidanceEvent::haptic(haptic_level(distance, arrival_radius_)));
  return events;
}

std::string GuidanceState::get_directions(const geom::Pose& estimated) {
  if (!active()) return instruction_text(Turn::Straight, 0.0, units_);
  const Keypoint& kp = current_keypoint();
  const double distance = (estimated.position - kp.position).norm();
  if (distance <= arrival_radius_) {
    // standing on the keypoint: hand out the next-leg instruction
    auto events = advance_events();
    for (const auto& e : events)
      if (e.text) return *e.text;
    return "You have arrived";
  }
  const double target_bearing =
      geom::bearing(estimated.position.head<2>(), kp.position.head<2>());
  const double rel = geom::normalize_angle_180(target_bearing - geom::heading_of(estimated));
  return instruction_text(classify_turn(rel), distance, units_);
}

}  // namespace navishare::guidance
