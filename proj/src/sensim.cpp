#include "navishare/sensim.hpp"

#include <cmath>

namespace navishare::sensim {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

std::uint64_t hash_label(std::uint64_t seed, const std::string& label) {
  std::uint64_t h = 14695981039346656037ull ^ seed;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ull;
  }
  // final mix so nearby seeds decorrelate
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return h;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian() {
  if (cached_) {
    double v = *cached_;
    cached_.reset();
    return v;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  cached_ = r * std::sin(kTwoPi * u2);
  return r * std::cos(kTwoPi * u2);
}

double Rng::gaussian(double sigma) { return sigma * gaussian(); }

std::uint64_t Rng::next_u64() { return engine_(); }

Rng Rng::child(const std::string& label) const {
  return Rng(hash_label(base_seed_, label));
}

WorldState::WorldState(std::uint64_t seed) : rng(seed) {
  true_pose = geom::Pose::identity("world");
}

TrackingSession::TrackingSession(std::string session_frame, const WorldState& world,
                                 DriftParams drift, RelocParams reloc, CiModel ci)
    : frame_(std::move(session_frame)),
      world_from_session_(world.true_pose),
      drift_(drift),
      reloc_(reloc),
      ci_(ci) {
  world_from_session_.frame = "world";
  estimated_ = geom::Pose::identity(frame_);
}

geom::Pose TrackingSession::truth_in_session(const WorldState& world) const {
  geom::Pose p = geom::compose(geom::invert(world_from_session_), world.true_pose);
  p.frame = frame_;
  return p;
}

double TrackingSession::drift_error(const WorldState& world) const {
  return (estimated_.position - truth_in_session(world).position).norm();
}

geom::Pose TrackingSession::step_odometry(WorldState& world, const Motion& motion) {
  if (motion.distance < 0.0)
    throw std::invalid_argument("step_odometry: negative distance");

  auto advance = [](geom::Pose& p, double turn_deg, double dist) {
    p.orientation =
        (p.orientation *
         Eigen::Quaterniond(Eigen::AngleAxisd(-geom::deg_to_rad(turn_deg),
                                              Eigen::Vector3d::UnitZ())))
            .normalized();
    p.position += p.orientation * Eigen::Vector3d(0.0, dist, 0.0);
  };

  advance(world.true_pose, motion.heading_change, motion.distance);

  const double scale = std::sqrt(motion.distance);
  const double yaw_noise = world.rng.gaussian(drift_.sigma_yaw * scale);
  advance(estimated_, motion.heading_change + yaw_noise, motion.distance);
  estimated_.position.x() += world.rng.gaussian(drift_.sigma_pos * scale);
  estimated_.position.y() += world.rng.gaussian(drift_.sigma_pos * scale);
  return estimated_;
}

std::optional<geom::Pose> TrackingSession::try_relocalize(WorldState& world,
                                                          const std::string& anchor_id,
                                                          double dt) {
  auto it = world.anchor_truth.find(anchor_id);
  if (it == world.anchor_truth.end())
    throw std::invalid_argument("try_relocalize: no ground truth for anchor '" +
                                anchor_id + "'");
  const geom::Pose& anchor_world = it->second;
  const double distance = (anchor_world.position - world.true_pose.position).norm();
  if (distance > reloc_.radius) return std::nullopt;

  const double p = 1.0 - std::pow(1.0 - reloc_.p_success, dt);
  if (world.rng.uniform() >= p) return std::nullopt;

  // Measurement gate: per-axis Gaussian residual, rejected and redrawn
  // when its norm exceeds 3 sigma (gross outliers never pass validation).
  Eigen::Vector3d residual = Eigen::Vector3d::Zero();
  if (reloc_.sigma_reloc > 0.0) {
    do {
      residual = {world.rng.gaussian(reloc_.sigma_reloc),
                  world.rng.gaussian(reloc_.sigma_reloc),
                  world.rng.gaussian(reloc_.sigma_reloc)};
    } while (residual.norm() > 3.0 * reloc_.sigma_reloc);
  }

  geom::Pose anchor_in_session =
      geom::compose(geom::invert(world_from_session_), anchor_world);
  anchor_in_session.frame = frame_;
  anchor_in_session.position += residual;

  // Drift reset: the estimate is re-aligned against the measured anchor,
  // leaving only the measurement residual.
  geom::Pose truth = truth_in_session(world);
  estimated_ = truth;
  estimated_.position += residual;
  return anchor_in_session;
}

double ci_at(double ci_0, double ci_floor, double tau, double elapsed) {
  return ci_floor + (ci_0 - ci_floor) * std::exp(-elapsed / tau);
}

GeoFix TrackingSession::geospatial_fix(WorldState& world, double elapsed) {
  if (!world.geo_origin)
    throw std::runtime_error("geospatial_fix: world has no geo ground truth");
  GeoFix fix;
  fix.elapsed = elapsed;
  fix.geo.ci_horizontal = ci_at(ci_.horizontal_0, ci_.horizontal_floor, ci_.tau, elapsed);
  fix.geo.ci_yaw = ci_at(ci_.yaw_0, ci_.yaw_floor, ci_.tau, elapsed);
  fix.geo.ci_vertical = ci_at(ci_.vertical_0, ci_.vertical_floor, ci_.tau, elapsed);

  // Error drawn consistent with the current CI (CI read as a 3-sigma bound).
  geom::Pose noisy = world.true_pose;
  noisy.position.x() += world.rng.gaussian(fix.geo.ci_horizontal / 3.0);
  noisy.position.y() += world.rng.gaussian(fix.geo.ci_horizontal / 3.0);
  noisy.position.z() += world.rng.gaussian(fix.geo.ci_vertical / 3.0);
  geom::GeoPose g = geom::local_to_geo(noisy, *world.geo_origin);
  g.yaw = geom::normalize_angle_360(g.yaw + world.rng.gaussian(fix.geo.ci_yaw / 3.0));
  fix.geo.latitude = g.latitude;
  fix.geo.longitude = g.longitude;
  fix.geo.altitude = g.altitude;
  fix.geo.yaw = g.yaw;
  return fix;
}

bool is_confident(const GeoFix& fix, const ConfidenceThresholds& thresholds) {
  return fix.geo.ci_horizontal <= thresholds.horizontal &&
         fix.geo.ci_yaw <= thresholds.yaw &&
         fix.geo.ci_vertical <= thresholds.vertical;
}

SimConfig sim_config_from_json(const nlohmann::json& doc) {
  SimConfig cfg;
  cfg.seed = doc.value("seed", std::uint64_t{0});
  if (doc.contains("drift")) {
    const auto& d = doc.at("drift");
    cfg.drift.sigma_pos = d.value("sigma_pos", cfg.drift.sigma_pos);
    cfg.drift.sigma_yaw = d.value("sigma_yaw", cfg.drift.sigma_yaw);
  }
  if (doc.contains("reloc")) {
    const auto& r = doc.at("reloc");
    cfg.reloc.radius = r.value("radius", cfg.reloc.radius);
    cfg.reloc.sigma_reloc = r.value("sigma_reloc", cfg.reloc.sigma_reloc);
    cfg.reloc.p_success = r.value("p_success", cfg.reloc.p_success);
  }
  if (doc.contains("ci")) {
    const auto& c = doc.at("ci");
    cfg.ci.horizontal_0 = c.value("horizontal_0", cfg.ci.horizontal_0);
    cfg.ci.horizontal_floor = c.value("horizontal_floor", cfg.ci.horizontal_floor);
    cfg.ci.yaw_0 = c.value("yaw_0", cfg.ci.yaw_0);
    cfg.ci.yaw_floor = c.value("yaw_floor", cfg.ci.yaw_floor);
    cfg.ci.vertical_0 = c.value("vertical_0", cfg.ci.vertical_0);
    cfg.ci.vertical_floor = c.value("vertical_floor", cfg.ci.vertical_floor);
    cfg.ci.tau = c.value("tau", cfg.ci.tau);
  }
  return cfg;
}

nlohmann::json sim_config_to_json(const SimConfig& cfg) {
  return {
      {"ci",
       {{"horizontal_0", cfg.ci.horizontal_0},
        {"horizontal_floor", cfg.ci.horizontal_floor},
        {"tau", cfg.ci.tau},
        {"vertical_0", cfg.ci.vertical_0},
        {"vertical_floor", cfg.ci.vertical_floor},
        {"yaw_0", cfg.ci.yaw_0},
        {"yaw_floor", cfg.ci.yaw_floor}}},
      {"drift", {{"sigma_pos", cfg.drift.sigma_pos}, {"sigma_yaw", cfg.drift.sigma_yaw}}},
      {"reloc",
       {{"p_success", cfg.reloc.p_success},
        {"radius", cfg.reloc.radius},
        {"sigma_reloc", cfg.reloc.sigma_reloc}}},
      {"seed", cfg.seed},
  };
}

}  // namespace navishare::sensim
