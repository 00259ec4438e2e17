#pragma once

// Pinhole-camera geolocation: pixel -> angular offset -> effective viewing
// direction -> local east/north displacement -> latitude/longitude, plus the
// inverse used by the scene simulator.
//
// Conventions
//   * Image x grows to the right, image y grows downwards. Pixel centres sit at
//     integer coordinates.
//   * Bearings are compass bearings: 0 = north, clockwise positive. In terms of
//     the east-referenced mathematical angle, theta_math = 90 deg - bearing,
//     which is why east = d_h * sin(bearing) and north = d_h * cos(bearing).
//   * Pitch is positive above the horizon.
//   * Angles are degrees at the API boundary and radians internally.
//   * The Earth is a sphere; the lat/lon update is the local first-order
//     offset (d_north / R, d_east / (R cos lat)).

#include <optional>

namespace mapcore {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegPerRad = 180.0 / kPi;
inline constexpr double kRadPerDeg = kPi / 180.0;

inline constexpr double deg2rad(double deg) { return deg * kRadPerDeg; }
inline constexpr double rad2deg(double rad) { return rad * kDegPerRad; }

/// Wraps a bearing into [0, 360).
double normalize_bearing(double deg);
/// Wraps a longitude into (-180, 180].
double normalize_longitude(double deg);
/// Signed angular difference a - b wrapped into (-180, 180].
double bearing_difference(double a_deg, double b_deg);

/// Pinhole intrinsics. The principal point defaults to the image centre
/// (W/2, H/2); set it explicitly to override.
struct Intrinsics {
  double fx = 0.0;  // px
  double fy = 0.0;  // px
  int width = 0;
  int height = 0;
  std::optional<double> cx;
  std::optional<double> cy;

  double principal_x() const { return cx.value_or(width / 2.0); }
  double principal_y() const { return cy.value_or(height / 2.0); }
  bool contains(double x, double y) const {
    return x >= 0.0 && y >= 0.0 && x < width && y < height;
  }
  /// Throws Error(kConfig) unless fx, fy > 0 and W, H >= 1.
  void validate() const;
};

struct PixelCoord {
  double x = 0.0;
  double y = 0.0;
};

/// Offsets of a pixel ray from the optical axis, in radians. alpha_x > 0 is
/// right of the axis, alpha_y > 0 is above it.
struct AngularOffsets {
  double alpha_x = 0.0;
  double alpha_y = 0.0;
};

struct CameraPose {
  double lat = 0.0;      // deg
  double lon = 0.0;      // deg
  double bearing = 0.0;  // deg, compass
  double pitch = 0.0;    // deg, up positive

  /// Returns a copy with the bearing wrapped into [0, 360) and the longitude
  /// into (-180, 180]. Throws Error(kConfig) for |lat| > 90 or |pitch| >= 90.
  CameraPose normalized() const;
};

struct EffectiveAngles {
  double bearing_eff = 0.0;  // deg, compass
  double pitch_eff = 0.0;    // deg
};

struct EnuDisplacement {
  double d_east = 0.0;
  double d_north = 0.0;
  double d_horizontal = 0.0;
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

struct EarthModel {
  static constexpr double kMeanRadius = 6371008.8;
  double radius = kMeanRadius;
};

AngularOffsets pixel_to_angles(const PixelCoord& p, const Intrinsics& k);

/// Throws Error(kAboveHorizon) when |pitch_eff| >= 90 deg.
EffectiveAngles effective_angles(const CameraPose& pose, const AngularOffsets& a);

EnuDisplacement angles_to_displacement(double depth_m, const EffectiveAngles& e);

GeoPoint displacement_to_geo(const EnuDisplacement& disp, const GeoPoint& origin,
                             const EarthModel& em = {});

/// Exact inverse of displacement_to_geo: the east/north offset that carries
/// `origin` onto `target` under the same first-order spherical update.
EnuDisplacement geo_to_displacement(const GeoPoint& target, const GeoPoint& origin,
                                    const EarthModel& em = {});

struct LocatedPoint {
  GeoPoint point;
  EffectiveAngles angles;
  EnuDisplacement displacement;
};

LocatedPoint locate_pixel(const PixelCoord& p, double depth_m, const CameraPose& pose,
                          const Intrinsics& k, const EarthModel& em = {});

struct InverseLocation {
  PixelCoord pixel;
  double depth_m = 0.0;
};

/// Finds the pixel and range at which `target` is seen. `height_offset_m` is
/// the target's height above the camera; without it the target is assumed to
/// sit at camera height. Throws Error(kNotVisible) when the target lies behind
/// the camera, coincides with it, or projects outside the image.
InverseLocation inverse_locate(const GeoPoint& target, std::optional<double> height_offset_m,
                               const CameraPose& pose, const Intrinsics& k,
                               const EarthModel& em = {});

/// Haversine great-circle distance in metres.
double geo_distance(const GeoPoint& a, const GeoPoint& b, const EarthModel& em = {});

/// Compass bearing of `to` as seen from `from`, measured in the local tangent
/// plane of `from` (the same frame the forward chain uses).
double local_bearing(const GeoPoint& from, const GeoPoint& to, const EarthModel& em = {});

}  // namespace mapcore
