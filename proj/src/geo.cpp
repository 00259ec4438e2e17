#include "mapcore/geo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mapcore/error.hpp"

namespace mapcore {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBounds: return "bounds";
    case ErrorCode::kAboveHorizon: return "above-horizon";
    case ErrorCode::kInvalidDepth: return "invalid-depth";
    case ErrorCode::kDegenerateLatitude: return "degenerate-latitude";
    case ErrorCode::kNotVisible: return "not-visible";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kNoDepth: return "no-depth";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kEmptyReport: return "empty-report";
  }
  return "unknown";
}

namespace {

constexpr double kPoleLimitDeg = 89.9;

}  // namespace

double normalize_bearing(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  // fmod of a tiny negative value can round up to exactly 360
  if (r >= 360.0) r -= 360.0;
  return r;
}

double normalize_longitude(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r > 180.0) r -= 360.0;
  if (r <= -180.0) r += 360.0;
  return r;
}

double bearing_difference(double a_deg, double b_deg) {
  return normalize_longitude(a_deg - b_deg);
}

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw Error(ErrorCode::kConfig, "focal lengths must be positive");
  }
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kConfig, "image dimensions must be at least 1x1");
  }
}

CameraPose CameraPose::normalized() const {
  if (!std::isfinite(lat) || !std::isfinite(lon) || !std::isfinite(bearing) ||
      !std::isfinite(pitch)) {
    throw Error(ErrorCode::kConfig, "camera pose contains non-finite values");
  }
  if (lat < -90.0 || lat > 90.0) {
    throw Error(ErrorCode::kConfig, "latitude out of range: " + std::to_string(lat));
  }
  if (!(std::abs(pitch) < 90.0)) {
    throw Error(ErrorCode::kConfig, "pitch must lie in (-90, 90): " + std::to_string(pitch));
  }
  return CameraPose{lat, normalize_longitude(lon), normalize_bearing(bearing), pitch};
}

AngularOffsets pixel_to_angles(const PixelCoord& p, const Intrinsics& k) {
  k.validate();
  if (!k.contains(p.x, p.y)) {
    throw Error(ErrorCode::kBounds, "pixel (" + std::to_string(p.x) + ", " +
                                        std::to_string(p.y) + ") outside " +
                                        std::to_string(k.width) + "x" +
                                        std::to_string(k.height) + " image");
  }
  const double x_norm = (p.x - k.principal_x()) / k.fx;
  const double y_norm = (k.principal_y() - p.y) / k.fy;
  return {std::atan(x_norm), std::atan(y_norm)};
}

EffectiveAngles effective_angles(const CameraPose& pose, const AngularOffsets& a) {
  const double bearing_eff = normalize_bearing(pose.bearing + rad2deg(a.alpha_x));
  const double pitch_eff = pose.pitch + rad2deg(a.alpha_y);
  if (!(std::abs(pitch_eff) < 90.0)) {
    throw Error(ErrorCode::kAboveHorizon,
                "effective pitch " + std::to_string(pitch_eff) + " deg is vertical or beyond");
  }
  return {bearing_eff, pitch_eff};
}

EnuDisplacement angles_to_displacement(double depth_m, const EffectiveAngles& e) {
  if (!(depth_m > 0.0) || !std::isfinite(depth_m)) {
    throw Error(ErrorCode::kInvalidDepth, "depth must be positive: " + std::to_string(depth_m));
  }
  const double d_h = depth_m * std::cos(deg2rad(e.pitch_eff));
  const double b = deg2rad(e.bearing_eff);
  return {d_h * std::sin(b), d_h * std::cos(b), d_h};
}

GeoPoint displacement_to_geo(const EnuDisplacement& disp, const GeoPoint& origin,
                             const EarthModel& em) {
  if (!(std::abs(origin.lat) < kPoleLimitDeg)) {
    throw Error(ErrorCode::kDegenerateLatitude,
                "latitude " + std::to_string(origin.lat) + " too close to a pole");
  }
  const double dlat = disp.d_north / em.radius;
  const double dlon = disp.d_east / (em.radius * std::cos(deg2rad(origin.lat)));
  const double lat = origin.lat + kDegPerRad * dlat;
  if (lat < -90.0 || lat > 90.0) {
    throw Error(ErrorCode::kDegenerateLatitude, "displacement crosses a pole");
  }
  return {lat, normalize_longitude(origin.lon + kDegPerRad * dlon)};
}

EnuDisplacement geo_to_displacement(const GeoPoint& target, const GeoPoint& origin,
                                    const EarthModel& em) {
  if (!(std::abs(origin.lat) < kPoleLimitDeg)) {
    throw Error(ErrorCode::kDegenerateLatitude,
                "latitude " + std::to_string(origin.lat) + " too close to a pole");
  }
  const double dlat = deg2rad(target.lat - origin.lat);
  const double dlon = deg2rad(normalize_longitude(target.lon - origin.lon));
  const double north = dlat * em.radius;
  const double east = dlon * em.radius * std::cos(deg2rad(origin.lat));
  return {east, north, std::hypot(east, north)};
}

LocatedPoint locate_pixel(const PixelCoord& p, double depth_m, const CameraPose& pose,
                          const Intrinsics& k, const EarthModel& em) {
  const AngularOffsets offsets = pixel_to_angles(p, k);
  const EffectiveAngles angles = effective_angles(pose, offsets);
  const EnuDisplacement disp = angles_to_displacement(depth_m, angles);
  const GeoPoint point = displacement_to_geo(disp, GeoPoint{pose.lat, pose.lon}, em);
  return {point, angles, disp};
}

InverseLocation inverse_locate(const GeoPoint& target, std::optional<double> height_offset_m,
                               const CameraPose& pose, const Intrinsics& k,
                               const EarthModel& em) {
  const EnuDisplacement disp = geo_to_displacement(target, GeoPoint{pose.lat, pose.lon}, em);
  const double height = height_offset_m.value_or(0.0);
  if (disp.d_horizontal == 0.0) {
    throw Error(ErrorCode::kNotVisible, "target coincides with the camera position");
  }
  const double bearing_eff = rad2deg(std::atan2(disp.d_east, disp.d_north));
  const double pitch_eff = rad2deg(std::atan2(height, disp.d_horizontal));
  const double alpha_x = bearing_difference(bearing_eff, pose.bearing);
  const double alpha_y = pitch_eff - pose.pitch;
  if (!(std::abs(alpha_x) < 90.0) || !(std::abs(alpha_y) < 90.0)) {
    throw Error(ErrorCode::kNotVisible, "target is behind the camera");
  }
  const PixelCoord pixel{k.principal_x() + k.fx * std::tan(deg2rad(alpha_x)),
                         k.principal_y() - k.fy * std::tan(deg2rad(alpha_y))};
  if (!k.contains(pixel.x, pixel.y)) {
    throw Error(ErrorCode::kNotVisible, "target projects outside the image");
  }
  return {pixel, std::hypot(disp.d_horizontal, height)};
}

double geo_distance(const GeoPoint& a, const GeoPoint& b, const EarthModel& em) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double s_lat = std::sin((phi2 - phi1) / 2.0);
  const double s_lon = std::sin(deg2rad(normalize_longitude(b.lon - a.lon)) / 2.0);
  const double h = s_lat * s_lat + std::cos(phi1) * std::cos(phi2) * s_lon * s_lon;
  return 2.0 * em.radius * std::asin(std::min(1.0, std::sqrt(h)));
}

double local_bearing(const GeoPoint& from, const GeoPoint& to, const EarthModel& em) {
  const EnuDisplacement d = geo_to_displacement(to, from, em);
  return normalize_bearing(rad2deg(std::atan2(d.d_east, d.d_north)));
}

}  // namespace mapcore
