#include "mapcore/scene_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "mapcore/error.hpp"

namespace mapcore {

namespace {

constexpr float kSkyDepth = std::numeric_limits<float>::infinity();

double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// Billboard plane in the camera-centred ENU frame.
struct Plane {
  std::size_t index;
  Point3 centre;
  Point3 normal;  // horizontal, pointing away from the camera
  Point3 right;
  double half_width;
  double half_height;
};

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  int billboard = -1;  // -1 = ground
};

// Per-pixel ray directions, cached per row and column for the angular model.
class RayTable {
 public:
  RayTable(const CameraPose& pose, const Intrinsics& k, RayModel model)
      : pose_(pose), k_(k), model_(model) {
    if (model_ != RayModel::kAngular) return;
    for (int x = 0; x < k.width; ++x) {
      const double b = deg2rad(pose.bearing) + pixel_to_angles({double(x), k.principal_y()}, k).alpha_x;
      sin_b_.push_back(std::sin(b));
      cos_b_.push_back(std::cos(b));
    }
    for (int y = 0; y < k.height; ++y) {
      const double p = deg2rad(pose.pitch) + pixel_to_angles({k.principal_x(), double(y)}, k).alpha_y;
      vertical_.push_back(std::abs(p) >= kPi / 2.0);
      sin_p_.push_back(std::sin(p));
      cos_p_.push_back(std::cos(p));
    }
  }

  // nullopt for rays the angular model cannot form
  std::optional<Point3> at(int x, int y) const {
    if (model_ == RayModel::kAngular) {
      if (vertical_[y]) return std::nullopt;
      return Point3{cos_p_[y] * sin_b_[x], cos_p_[y] * cos_b_[x], sin_p_[y]};
    }
    return pixel_ray({double(x), double(y)}, pose_, k_, model_);
  }

 private:
  CameraPose pose_;
  Intrinsics k_;
  RayModel model_;
  std::vector<double> sin_b_, cos_b_, sin_p_, cos_p_;
  std::vector<bool> vertical_;
};

}  // namespace

void SceneSpec::validate() const {
  camera.intrinsics.validate();
  (void)camera.pose.normalized();
  valid_range.validate();
  if (!(camera_height_m > 0.0)) throw Error(ErrorCode::kConfig, "camera height must be positive");
  if (!(depth_noise_sigma >= 0.0)) throw Error(ErrorCode::kConfig, "noise sigma must be >= 0");
  if (cloud_stride < 1) throw Error(ErrorCode::kConfig, "cloud stride must be >= 1");
  for (const auto& b : billboards) {
    if (!(b.width_m > 0.0) || !(b.height_m > 0.0)) {
      throw Error(ErrorCode::kConfig, "billboard " + b.id + " needs positive width and height");
    }
  }
}

Point3 pixel_ray(const PixelCoord& p, const CameraPose& pose, const Intrinsics& k,
                 RayModel model) {
  if (model == RayModel::kAngular) {
    const EffectiveAngles e = effective_angles(pose, pixel_to_angles(p, k));
    const double b = deg2rad(e.bearing_eff), pe = deg2rad(e.pitch_eff);
    return {std::cos(pe) * std::sin(b), std::cos(pe) * std::cos(b), std::sin(pe)};
  }
  const Point3 cam{(p.x - k.principal_x()) / k.fx, (p.y - k.principal_y()) / k.fy, 1.0};
  const double n = std::sqrt(dot(cam, cam));
  return camera_to_enu({cam.x / n, cam.y / n, cam.z / n}, pose);
}

BBox bbox_of(const BinaryMask& mask) {
  BBox b{mask.width, mask.height, -1, -1};
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y)) continue;
      b.x0 = std::min(b.x0, x);
      b.y0 = std::min(b.y0, y);
      b.x1 = std::max(b.x1, x);
      b.y1 = std::max(b.y1, y);
    }
  }
  if (b.x1 < 0) throw Error(ErrorCode::kBounds, "empty mask has no bounding box");
  return b;
}

RenderedScene render_depth(const SceneSpec& spec, const EarthModel& em) {
  spec.validate();
  const Intrinsics& k = spec.camera.intrinsics;
  const CameraPose pose = spec.camera.pose.normalized();
  const GeoPoint camera{pose.lat, pose.lon};
  RenderedScene out;

  std::vector<Plane> planes;
  for (std::size_t i = 0; i < spec.billboards.size(); ++i) {
    const Billboard& b = spec.billboards[i];
    const EnuDisplacement d = geo_to_displacement(b.location, camera, em);
    if (d.d_horizontal == 0.0) {
      out.diagnostics.push_back("billboard " + b.id + " sits at the camera; omitted");
      continue;
    }
    const Point3 normal{d.d_east / d.d_horizontal, d.d_north / d.d_horizontal, 0.0};
    const double facing = bearing_difference(rad2deg(std::atan2(d.d_east, d.d_north)), pose.bearing);
    if (std::abs(facing) >= 90.0) {
      out.diagnostics.push_back("billboard " + b.id + " is behind the camera; omitted");
      continue;
    }
    const double up = b.base_elevation_m + b.height_m / 2.0 - spec.camera_height_m;
    planes.push_back({i, {d.d_east, d.d_north, up}, normal, {normal.y, -normal.x, 0.0},
                      b.width_m / 2.0, b.height_m / 2.0});
  }

  const std::size_t n_pixels = static_cast<std::size_t>(k.width) * k.height;
  std::vector<float> depth(n_pixels, kSkyDepth);
  std::vector<std::uint8_t> labels(n_pixels, train_id::kSky);
  std::vector<BinaryMask> masks(spec.billboards.size());
  std::vector<std::size_t> mask_pixels(spec.billboards.size(), 0);
  for (const Plane& pl : planes) masks[pl.index] = BinaryMask(k.width, k.height);

  const RayTable rays(pose, k, spec.ray_model);
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      const auto ray = rays.at(x, y);
      if (!ray) continue;
      const Point3& u = *ray;
      Hit hit;
      if (u.z < 0.0) hit = {spec.camera_height_m / -u.z, -1};
      for (const Plane& pl : planes) {
        const double denom = dot(u, pl.normal);
        if (denom <= 0.0) continue;
        const double t = dot(pl.centre, pl.normal) / denom;
        if (!(t > 0.0) || t >= hit.t) continue;
        const Point3 local{u.x * t - pl.centre.x, u.y * t - pl.centre.y, u.z * t - pl.centre.z};
        if (std::abs(dot(local, pl.right)) <= pl.half_width &&
            std::abs(local.z) <= pl.half_height) {
          hit = {t, static_cast<int>(pl.index)};
        }
      }
      if (!std::isfinite(hit.t)) continue;
      const std::size_t i = static_cast<std::size_t>(y) * k.width + x;
      depth[i] = static_cast<float>(hit.t);
      if (hit.billboard >= 0) {
        labels[i] = spec.billboards[hit.billboard].train_id;
        masks[hit.billboard].set(x, y);
        ++mask_pixels[hit.billboard];
      } else {
        labels[i] = train_id::kRoad;
      }
      if (x % spec.cloud_stride == 0 && y % spec.cloud_stride == 0) {
        out.cloud.points.push_back(
            enu_to_camera({u.x * hit.t, u.y * hit.t, u.z * hit.t}, pose));
      }
    }
  }

  out.clean_depth = DepthMap(k.width, k.height, std::move(depth), spec.valid_range,
                             DepthKind::kRange);
  out.depth = spec.depth_noise_sigma > 0.0
                  ? perturb_depth(out.clean_depth, spec.depth_noise_sigma, spec.seed)
                  : out.clean_depth;
  out.labels = SemanticMap{k.width, k.height, std::move(labels)};

  for (const Plane& pl : planes) {
    const Billboard& b = spec.billboards[pl.index];
    if (mask_pixels[pl.index] == 0) {
      out.diagnostics.push_back("billboard " + b.id + " covers no pixel; omitted");
      continue;
    }
    out.detections.push_back(Detection{b.class_id, std::move(masks[pl.index]), 1.0, b.id});
    out.truth.push_back(Reference{b.id, b.class_id, b.location});
  }
  return out;
}

DepthMap perturb_depth(const DepthMap& dm, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw Error(ErrorCode::kConfig, "noise sigma must be >= 0");
  if (sigma == 0.0) return dm;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<float> values = dm.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!dm.valid_index(i)) continue;
    values[i] = static_cast<float>(values[i] * (1.0 + sigma * gauss(rng)));
  }
  return DepthMap(dm.width(), dm.height(), std::move(values), dm.valid_range(), dm.kind());
}

SceneSpec random_scene(const RandomSceneOptions& opts, const EarthModel& em) {
  if (!(opts.min_distance_m > 0.0) || !(opts.max_distance_m > opts.min_distance_m) ||
      !(opts.min_size_m > 0.0) || !(opts.max_size_m >= opts.min_size_m) || opts.classes.empty()) {
    throw Error(ErrorCode::kConfig, "invalid random scene options");
  }
  SceneSpec spec;
  spec.camera.image_id = opts.image_id;
  spec.camera.pose = opts.pose.normalized();
  spec.camera.intrinsics = opts.intrinsics;
  spec.camera.source = "simulated";
  spec.camera_height_m = opts.camera_height_m;
  spec.seed = opts.seed;
  spec.validate();

  const CameraPose& pose = spec.camera.pose;
  const Intrinsics& k = spec.camera.intrinsics;
  const GeoPoint camera{pose.lat, pose.lon};
  // sampling box in degrees, large enough for max_distance_m
  const double lat_span = rad2deg(opts.max_distance_m / em.radius);
  const double lon_span = lat_span / std::cos(deg2rad(pose.lat));

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  struct Interval {
    double lo, hi;
  };
  std::vector<Interval> taken;
  constexpr double kMarginDeg = 0.5;
  const std::size_t max_attempts = 2000 * std::max<std::size_t>(opts.billboard_count, 1);
  for (std::size_t attempt = 0; attempt < max_attempts && spec.billboards.size() < opts.billboard_count;
       ++attempt) {
    Billboard b;
    b.location = {pose.lat + uniform(-lat_span, lat_span), pose.lon + uniform(-lon_span, lon_span)};
    const double dist = geo_distance(camera, b.location, em);
    if (dist < opts.min_distance_m || dist > opts.max_distance_m) continue;
    b.width_m = uniform(opts.min_size_m, opts.max_size_m);
    b.height_m = uniform(opts.min_size_m, opts.max_size_m);
    b.base_elevation_m = uniform(opts.min_base_m, opts.max_base_m);
    b.class_id = opts.classes[static_cast<std::size_t>(unit(rng) * opts.classes.size()) %
                              opts.classes.size()];
    // the whole board must be in view: check its four corners' directions
    const double bottom = b.base_elevation_m - opts.camera_height_m;
    const double top = bottom + b.height_m;
    try {
      (void)inverse_locate(b.location, (top + bottom) / 2.0, pose, k, em);
    } catch (const Error&) {
      continue;
    }
    const EnuDisplacement d = geo_to_displacement(b.location, camera, em);
    const double half_angle = rad2deg(std::atan(b.width_m / 2.0 / d.d_horizontal));
    const double centre_bearing = bearing_difference(
        rad2deg(std::atan2(d.d_east, d.d_north)), pose.bearing);
    const Interval span{centre_bearing - half_angle - kMarginDeg,
                        centre_bearing + half_angle + kMarginDeg};
    bool in_view = true;
    for (double side : {-1.0, 1.0}) {
      const double ax = centre_bearing + side * half_angle;
      const double edge_dist = d.d_horizontal / std::cos(deg2rad(side * half_angle));
      for (double h : {bottom, top}) {
        const double ay = rad2deg(std::atan2(h, edge_dist)) - pose.pitch;
        if (std::abs(ax) >= 89.0 || std::abs(ay) >= 89.0) {
          in_view = false;
          continue;
        }
        const double px = k.principal_x() + k.fx * std::tan(deg2rad(ax));
        const double py = k.principal_y() - k.fy * std::tan(deg2rad(ay));
        in_view = in_view && px >= 1.0 && py >= 1.0 && px <= k.width - 2.0 && py <= k.height - 2.0;
      }
    }
    if (!in_view) continue;
    const bool overlaps = std::any_of(taken.begin(), taken.end(), [&](const Interval& o) {
      return span.lo < o.hi && o.lo < span.hi;
    });
    if (overlaps) continue;
    taken.push_back(span);
    b.id = opts.id_prefix + std::to_string(spec.billboards.size());
    spec.billboards.push_back(std::move(b));
  }
  if (spec.billboards.size() < opts.billboard_count) {
    throw Error(ErrorCode::kConfig, "could only place " + std::to_string(spec.billboards.size()) +
                                        " of " + std::to_string(opts.billboard_count) +
                                        " billboards without overlap");
  }
  return spec;
}

}  // namespace mapcore
