#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace navishare::geom {

/// Rigid transform (position + unit quaternion) expressed in a named
/// tracking-session frame. Immutable by convention; operations return
/// new values.
struct Pose {
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
  Eigen::Quaterniond orientation{Eigen::Quaterniond::Identity()};
  std::string frame;

  static Pose identity(std::string frame_id = {});
  static Pose translation(double x, double y, double z, std::string frame_id = {});
  /// Heading in degrees, clockwise from north (+y), rotated about +z (up).
  static Pose from_yaw(double yaw_deg, std::string frame_id = {});
};

/// Geographic pose: latitude/longitude in degrees, altitude in meters,
/// yaw in degrees clockwise from true north, plus per-parameter
/// confidence intervals (meters / degrees).
struct GeoPose {
  double latitude = 0.0;    // [-90, 90]
  double longitude = 0.0;   // [-180, 180)
  double altitude = 0.0;    // meters
  double yaw = 0.0;         // [0, 360), clockwise from true north
  double ci_horizontal = 0.0;  // meters
  double ci_yaw = 0.0;         // degrees
  double ci_vertical = 0.0;    // meters
};

/// Maps poses expressed in from_frame into to_frame.
struct FrameTransform {
  std::string from_frame;
  std::string to_frame;
  Pose transform;
};

constexpr double kEarthRadiusMeters = 6'371'000.0;
constexpr double kTangentPlaneLimitMeters = 10'000.0;

double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// Wraps an angle in degrees into [0, 360).
double normalize_angle_360(double deg);
/// Wraps an angle in degrees into (-180, 180].
double normalize_angle_180(double deg);

/// Validates field ranges; throws std::invalid_argument on violation.
void validate(const GeoPose& g);

Pose compose(const Pose& a, const Pose& b);
Pose invert(const Pose& p);

/// Transform taking frame-B coordinates to frame-A coordinates, built
/// from one anchor observed in both frames.
FrameTransform relative_transform(const Pose& anchor_in_a, const Pose& anchor_in_b);

/// Applies a frame transform to a pose expressed in t.from_frame.
Pose apply(const FrameTransform& t, const Pose& p);

/// East-north-up coordinates of g relative to origin on a spherical
/// Earth; orientation from yaw about the up axis. Throws
/// std::out_of_range beyond the tangent-plane limit.
Pose geo_to_local(const GeoPose& g, const GeoPose& origin);

/// Inverse of geo_to_local under the same spherical model; confidence
/// fields of the result are zeroed.
GeoPose local_to_geo(const Pose& p, const GeoPose& origin);

/// Great-circle distance between two geographic points (haversine).
double haversine_distance(const GeoPose& a, const GeoPose& b);

/// Clockwise angle from north (+y) of the direction from -> to, in
/// [0, 360) degrees. Throws std::invalid_argument for coincident points.
double bearing(const Eigen::Vector2d& from, const Eigen::Vector2d& to);

/// Heading of a pose: bearing of its forward axis (body +y) in the
/// horizontal plane, degrees clockwise from north.
double heading_of(const Pose& p);

}  // namespace navishare::geom
