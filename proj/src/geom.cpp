#include "navishare/geom.hpp"

#include <cmath>

namespace navishare::geom {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double deg_to_rad(double deg) { return deg * kPi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

double normalize_angle_360(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a < 0.0) a += 360.0;
  if (a >= 360.0) a = 0.0;  // fmod can return exactly 360 - eps rounding up
  return a;
}

double normalize_angle_180(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a > 180.0) a -= 360.0;
  if (a <= -180.0) a += 360.0;
  return a;
}

Pose Pose::identity(std::string frame_id) {
  Pose p;
  p.frame = std::move(frame_id);
  return p;
}

Pose Pose::translation(double x, double y, double z, std::string frame_id) {
  Pose p;
  p.position = {x, y, z};
  p.frame = std::move(frame_id);
  return p;
}

Pose Pose::from_yaw(double yaw_deg, std::string frame_id) {
  Pose p;
  // Clockwise-from-north yaw is a negative rotation about +z.
  p.orientation = Eigen::Quaterniond(
      Eigen::AngleAxisd(-deg_to_rad(yaw_deg), Eigen::Vector3d::UnitZ()));
  p.frame = std::move(frame_id);
  return p;
}

void validate(const GeoPose& g) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(g.latitude) || !finite(g.longitude) || !finite(g.altitude) ||
      !finite(g.yaw) || !finite(g.ci_horizontal) || !finite(g.ci_yaw) ||
      !finite(g.ci_vertical)) {
    throw std::invalid_argument("GeoPose: non-finite field");
  }
  if (g.latitude < -90.0 || g.latitude > 90.0)
    throw std::invalid_argument("GeoPose: latitude out of [-90, 90]");
  if (g.longitude < -180.0 || g.longitude >= 180.0)
    throw std::invalid_argument("GeoPose: longitude out of [-180, 180)");
  if (g.yaw < 0.0 || g.yaw >= 360.0)
    throw std::invalid_argument("GeoPose: yaw out of [0, 360)");
  if (g.ci_horizontal < 0.0 || g.ci_yaw < 0.0 || g.ci_vertical < 0.0)
    throw std::invalid_argument("GeoPose: negative confidence interval");
}

Pose compose(const Pose& a, const Pose& b) {
  Pose r;
  r.position = a.position + a.orientation * b.position;
  r.orientation = (a.orientation * b.orientation).normalized();
  r.frame = a.frame;
  return r;
}

Pose invert(const Pose& p) {
  Pose r;
  r.orientation = p.orientation.conjugate().normalized();
  r.position = -(r.orientation * p.position);
  r.frame = p.frame;
  return r;
}

FrameTransform relative_transform(const Pose& anchor_in_a, const Pose& anchor_in_b) {
  FrameTransform t;
  t.from_frame = anchor_in_b.frame;
  t.to_frame = anchor_in_a.frame;
  t.transform = compose(anchor_in_a, invert(anchor_in_b));
  t.transform.frame = t.to_frame;
  return t;
}

Pose apply(const FrameTransform& t, const Pose& p) {
  Pose r = compose(t.transform, p);
  r.frame = t.to_frame;
  return r;
}

Pose geo_to_local(const GeoPose& g, const GeoPose& origin) {
  const double east = (g.longitude - origin.longitude) *
                      std::cos(deg_to_rad(origin.latitude)) *
                      kEarthRadiusMeters * kPi / 180.0;
  const double north =
      (g.latitude - origin.latitude) * kEarthRadiusMeters * kPi / 180.0;
  const double up = g.altitude - origin.altitude;
  if (std::hypot(east, north) > kTangentPlaneLimitMeters) {
    throw std::out_of_range(
        "geo_to_local: point beyond the 10 km tangent-plane limit");
  }
  Pose p = Pose::from_yaw(g.yaw);
  p.position = {east, north, up};
  return p;
}

GeoPose local_to_geo(const Pose& p, const GeoPose& origin) {
  if (p.position.norm() > kTangentPlaneLimitMeters) {
    throw std::out_of_range(
        "local_to_geo: point beyond the 10 km tangent-plane limit");
  }
  GeoPose g;
  g.latitude =
      origin.latitude + p.position.y() / (kEarthRadiusMeters * kPi / 180.0);
  g.longitude = origin.longitude +
                p.position.x() / (std::cos(deg_to_rad(origin.latitude)) *
                                  kEarthRadiusMeters * kPi / 180.0);
  g.altitude = origin.altitude + p.position.z();
  g.yaw = normalize_angle_360(heading_of(p));
  return g;
}

double haversine_distance(const GeoPose& a, const GeoPose& b) {
  const double lat1 = deg_to_rad(a.latitude);
  const double lat2 = deg_to_rad(b.latitude);
  const double dlat = lat2 - lat1;
  const double dlon = deg_to_rad(b.longitude - a.longitude);
  const double s = std::sin(dlat / 2.0) * std::sin(dlat / 2.0) +
                   std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2.0) *
                       std::sin(dlon / 2.0);
  return 2.0 * kEarthRadiusMeters * std::asin(std::sqrt(s));
}

double bearing(const Eigen::Vector2d& from, const Eigen::Vector2d& to) {
  const Eigen::Vector2d d = to - from;
  if (d.norm() == 0.0)
    throw std::invalid_argument("bearing: coincident points");
  return normalize_angle_360(rad_to_deg(std::atan2(d.x(), d.y())));
}

double heading_of(const Pose& p) {
  const Eigen::Vector3d fwd = p.orientation * Eigen::Vector3d::UnitY();
  if (std::hypot(fwd.x(), fwd.y()) < 1e-12) return 0.0;
  return normalize_angle_360(rad_to_deg(std::atan2(fwd.x(), fwd.y())));
}

}  // namespace navishare::geom
