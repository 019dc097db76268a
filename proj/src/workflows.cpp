#include "navishare/workflows.hpp"

#include <algorithm>
#include <cmath>

namespace navishare::workflows {

double ScanTrace::duration() const {
  if (samples.empty()) return 0.0;
  return samples.back().timestamp - samples.front().timestamp;
}

double ScanTrace::angular_coverage() const {
  if (samples.size() < 2) return 0.0;
  // unwrap the heading so a full sweep accumulates 360 degrees
  double unwrapped = geom::heading_of(samples.front().pose);
  double lo = unwrapped;
  double hi = unwrapped;
  double prev = unwrapped;
  for (size_t i = 1; i < samples.size(); ++i) {
    const double h = geom::heading_of(samples[i].pose);
    const double prev_wrapped = geom::normalize_angle_360(prev);
    prev += geom::normalize_angle_180(h - prev_wrapped);
    lo = std::min(lo, prev);
    hi = std::max(hi, prev);
  }
  return std::min(1.0, (hi - lo) / 360.0);
}

double ScanTrace::baseline() const {
  if (samples.empty()) return 0.0;
  double best = 0.0;
  for (const auto& s : samples)
    best = std::max(best, (s.pose.position - samples.front().pose.position).norm());
  return best;
}

std::optional<std::string> prompt_at(double t_seconds) {
  if (t_seconds < 0.0) throw std::invalid_argument("prompt_at: negative time");
  if (t_seconds < 1.0) return "Perform a 360-degree sweep with your phone";
  if (t_seconds >= 15.0 && t_seconds < 16.0)
    return "Take a step back and do a second sweep";
  return std::nullopt;
}

double scan_quality(const ScanTrace& scan) {
  return 0.5 * (scan.angular_coverage() + std::min(1.0, scan.baseline()));
}

mapstore::Anchor create_anchor(const sensim::TrackingSession& session,
                               const ScanTrace& scan, const AnchorMeta& meta) {
  for (size_t i = 1; i < scan.samples.size(); ++i) {
    if (scan.samples[i].timestamp <= scan.samples[i - 1].timestamp)
      throw std::invalid_argument("create_anchor: scan timestamps must strictly increase");
  }
  if (scan.duration() < kMinScanSeconds)
    throw std::invalid_argument(
        "create_anchor: scan too short, the mapping service needs 30 seconds of data");
  mapstore::Anchor a;
  a.kind = mapstore::AnchorKind::Indoor;
  a.frame = session.frame();
  a.reference_pose = geom::Pose::identity(a.frame);
  a.quality = scan_quality(scan);
  a.name = meta.name;
  a.notes = meta.notes;
  return a;
}

std::vector<WalkEvent> walk_events_from_json(const nlohmann::json& doc) {
  std::vector<WalkEvent> events;
  for (const auto& je : doc) {
    WalkEvent e;
    const std::string kind = je.at("type").get<std::string>();
    if (kind == "pan") {
      e.kind = WalkEvent::Kind::Pan;
      e.dt = je.at("dt").get<double>();
    } else if (kind == "move") {
      e.kind = WalkEvent::Kind::Move;
      e.dt = je.at("dt").get<double>();
      e.distance = je.at("distance").get<double>();
      e.heading_change = je.value("heading_change", 0.0);
    } else if (kind == "stop") {
      e.kind = WalkEvent::Kind::Stop;
      e.dt = 0.0;
    } else {
      throw std::runtime_error("walk trace: unknown event type '" + kind + "'");
    }
    events.push_back(e);
  }
  return events;
}

nlohmann::json walk_events_to_json(const std::vector<WalkEvent>& events) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : events) {
    switch (e.kind) {
      case WalkEvent::Kind::Pan:
        out.push_back({{"dt", e.dt}, {"type", "pan"}});
        break;
      case WalkEvent::Kind::Move:
        out.push_back({{"distance", e.distance},
                       {"dt", e.dt},
                       {"heading_change", e.heading_change},
                       {"type", "move"}});
        break;
      case WalkEvent::Kind::Stop:
        out.push_back({{"type", "stop"}});
        break;
    }
  }
  return out;
}

ConnectionRecorder::ConnectionRecorder(std::string from_anchor, std::string to_anchor)
    : from_(std::move(from_anchor)), to_(std::move(to_anchor)) {
  if (from_ == to_)
    throw std::invalid_argument("ConnectionRecorder: cannot connect an anchor to itself");
}

void ConnectionRecorder::expect(RecorderState s, const char* what) const {
  if (state_ != s)
    throw std::logic_error(std::string("ConnectionRecorder: illegal transition (") +
                           what + ")");
}

void ConnectionRecorder::begin_localizing() {
  expect(RecorderState::SelectStart, "begin_localizing");
  state_ = RecorderState::LocalizingStart;
}

void ConnectionRecorder::start_localized(const geom::Pose& from_pose) {
  expect(RecorderState::LocalizingStart, "start_localized");
  from_pose_ = from_pose;
  state_ = RecorderState::Recording;
}

void ConnectionRecorder::record_crumb(const geom::Pose& pose) {
  if (state_ != RecorderState::Recording && state_ != RecorderState::EndLocalized)
    throw std::logic_error("ConnectionRecorder: illegal transition (record_crumb)");
  raw_trail_.push_back(pose);
}

void ConnectionRecorder::end_localized(const geom::Pose& to_pose) {
  expect(RecorderState::Recording, "end_localized");
  to_pose_ = to_pose;
  state_ = RecorderState::EndLocalized;
}

void ConnectionRecorder::finish() {
  expect(RecorderState::EndLocalized, "finish");
  state_ = RecorderState::Done;
}

void ConnectionRecorder::await_reverse_decision() {
  expect(RecorderState::Done, "await_reverse_decision");
  state_ = RecorderState::AwaitReverseDecision;
}

void ConnectionRecorder::resolve_reverse(bool) {
  expect(RecorderState::AwaitReverseDecision, "resolve_reverse");
  state_ = RecorderState::Done;
}

std::string connect_anchors(ConnectionRecorder& recorder,
                            sensim::TrackingSession& session, sensim::WorldState& world,
                            mapstore::MapGraph& map, const std::vector<WalkEvent>& events,
                            double spacing) {
  if (!map.anchors.count(recorder.from_anchor()))
    throw std::invalid_argument("connect_anchors: unknown start anchor '" +
                                recorder.from_anchor() + "'");
  if (!map.anchors.count(recorder.to_anchor()))
    throw std::invalid_argument("connect_anchors: unknown end anchor '" +
                                recorder.to_anchor() + "'");

  recorder.begin_localizing();
  double localize_elapsed = 0.0;
  size_t i = 0;

  // step 1: pan until the start anchor localizes
  while (recorder.state() == RecorderState::LocalizingStart) {
    if (i >= events.size() || localize_elapsed > kStartLocalizeTimeout)
      throw std::runtime_error("connect_anchors: start anchor '" +
                               recorder.from_anchor() + "' never localized");
    const WalkEvent& e = events[i];
    if (e.kind == WalkEvent::Kind::Stop)
      throw std::runtime_error("connect_anchors: stopped before the start anchor localized");
    if (e.kind == WalkEvent::Kind::Move)
      session.step_odometry(world, {e.distance, e.heading_change});
    localize_elapsed += e.dt;
    auto loc = session.try_relocalize(world, recorder.from_anchor(), e.dt);
    ++i;
    if (loc) recorder.start_localized(*loc);
  }

  // steps 2-3: record breadcrumbs, watch for the end anchor
  recorder.record_crumb(session.estimated_pose());
  double recorded = 0.0;
  int path_anchors = 0;
  std::vector<std::string> path_anchor_ids;
  bool stopped = false;
  for (; i < events.size() && !stopped; ++i) {
    const WalkEvent& e = events[i];
    switch (e.kind) {
      case WalkEvent::Kind::Stop:
        stopped = true;
        break;
      case WalkEvent::Kind::Pan:
      case WalkEvent::Kind::Move: {
        if (e.kind == WalkEvent::Kind::Move) {
          session.step_odometry(world, {e.distance, e.heading_change});
          recorder.record_crumb(session.estimated_pose());
          recorded += e.distance;
          while (recorded >= kPathAnchorSpacing * (path_anchors + 1)) {
            ++path_anchors;
            path_anchor_ids.push_back(recorder.from_anchor() + "-" +
                                      recorder.to_anchor() + "-pa" +
                                      std::to_string(path_anchors));
          }
        }
        if (recorder.state() == RecorderState::Recording) {
          auto loc = session.try_relocalize(world, recorder.to_anchor(), e.dt);
          if (loc) recorder.end_localized(*loc);
        }
        break;
      }
    }
  }
  if (recorder.state() != RecorderState::EndLocalized)
    throw std::runtime_error("connect_anchors: end anchor '" + recorder.to_anchor() +
                             "' never localized; connection discarded");
  recorder.finish();

  mapstore::Connection c;
  c.id = map.fresh_connection_id();
  c.from_anchor = recorder.from_anchor();
  c.to_anchor = recorder.to_anchor();
  c.forward_trail.points = recorder.raw_trail();
  c.forward_trail.spacing = spacing;
  c.path_anchor_ids = std::move(path_anchor_ids);
  c.from_pose_in_trail_frame = recorder.from_pose();
  c.to_pose_in_trail_frame = recorder.to_pose();
  const std::string id = mapstore::add_connection(map, c);
  recorder.await_reverse_decision();  // step 4: offer the reverse recording
  return id;
}

ExtendResult streamlined_extend(sensim::TrackingSession& session,
                                sensim::WorldState& world, mapstore::MapGraph& map,
                                const std::string& from_anchor,
                                const std::vector<WalkEvent>& walk,
                                const ScanTrace& end_scan, const AnchorMeta& meta,
                                double spacing) {
  // the end scan is validated up front so a bad scan aborts before any walk
  mapstore::Anchor end_anchor = create_anchor(session, end_scan, meta);
  end_anchor.id = map.fresh_anchor_id();

  mapstore::MapGraph staged = map;
  mapstore::add_anchor(staged, end_anchor);
  ConnectionRecorder recorder(from_anchor, end_anchor.id);

  // Replay the walk against a staging world copy so the end anchor can
  // localize at the walk's destination; committed only on success.
  sensim::WorldState staged_world = world;
  sensim::TrackingSession staged_session = session;
  // Determine the destination by a truth-only dry run.
  {
    geom::Pose probe = staged_world.true_pose;
    for (const auto& e : walk) {
      if (e.kind != WalkEvent::Kind::Move) continue;
      probe.orientation =
          (probe.orientation * Eigen::Quaterniond(Eigen::AngleAxisd(
                                   -geom::deg_to_rad(e.heading_change),
                                   Eigen::Vector3d::UnitZ())))
              .normalized();
      probe.position += probe.orientation * Eigen::Vector3d(0.0, e.distance, 0.0);
    }
    staged_world.anchor_truth[end_anchor.id] = probe;
  }

  const std::string cid =
      connect_anchors(recorder, staged_session, staged_world, staged, walk, spacing);

  map = std::move(staged);
  world = std::move(staged_world);
  session = std::move(staged_session);
  return {end_anchor.id, cid};
}

mapstore::Anchor create_outdoor_anchor(sensim::TrackingSession& session,
                                       sensim::WorldState& world, const ScanTrace& scan,
                                       const AnchorMeta& meta,
                                       const sensim::ConfidenceThresholds& thresholds,
                                       double timeout_s) {
  std::optional<geom::GeoPose> geo;
  for (double t = 0.0; t <= timeout_s; t += 1.0) {
    sensim::GeoFix fix = session.geospatial_fix(world, t);
    if (sensim::is_confident(fix, thresholds)) {
      geo = fix.geo;
      break;
    }
  }
  if (!geo)
    throw std::runtime_error(
        "create_outdoor_anchor: geospatial confidence not reached before timeout");
  mapstore::Anchor a = create_anchor(session, scan, meta);
  a.kind = mapstore::AnchorKind::Outdoor;
  a.geo = geo;
  return a;
}

}  // namespace navishare::workflows
