#pragma once

// Deterministic synthetic street scenes: a flat ground plane plus
// camera-facing rectangular billboards. Rendering yields range depth,
// Cityscapes labels, a camera-frame point cloud, exact detection masks and
// the billboards' true geocoordinates.

#include <cstdint>
#include <string>
#include <vector>

#include "mapcore/dedup_match.hpp"
#include "mapcore/locate.hpp"
#include "mapcore/raster.hpp"
#include "mapcore/semantics.hpp"

namespace mapcore {

struct Billboard {
  std::string id;
  std::string class_id = "sign";
  GeoPoint location;
  double width_m = 1.0;
  double height_m = 1.0;
  /// Elevation of the bottom edge above the ground plane.
  double base_elevation_m = 0.0;
  std::uint8_t train_id = train_id::kTrafficSign;
};

/// How pixel rays are formed.
enum class RayModel {
  /// The offsets-added-to-pose model used by locate_pixel / inverse_locate.
  /// Noiseless scenes then localise to within pixel quantisation.
  kAngular,
  /// Exact pinhole rays; a rendered cloud re-projects exactly onto its pixels.
  kPinhole,
};

struct SceneSpec {
  RecordingMeta camera;
  double camera_height_m = 2.5;
  std::vector<Billboard> billboards;
  std::uint64_t seed = 0;
  /// Multiplicative depth noise (standard deviation as a fraction).
  double depth_noise_sigma = 0.0;
  RayModel ray_model = RayModel::kAngular;
  ValidRange valid_range{0.1, 200.0};
  /// Emit a cloud point for every n-th pixel in each direction.
  int cloud_stride = 1;

  /// Throws Error(kConfig) on non-positive camera height, billboard size or stride.
  void validate() const;
};

struct RenderedScene {
  DepthMap depth;        // range depth, noisy when depth_noise_sigma > 0
  DepthMap clean_depth;  // range depth without noise
  SemanticMap labels;
  PointCloud cloud;      // camera frame, from noiseless hits
  std::vector<Detection> detections;  // exact masks, id = billboard id
  std::vector<Reference> truth;       // one per detected billboard
  std::vector<std::string> diagnostics;
};

RenderedScene render_depth(const SceneSpec& spec, const EarthModel& em = {});

/// Multiplies each valid pixel by (1 + sigma * g), g ~ N(0, 1) drawn from a
/// generator seeded with `seed`. Deterministic per (dm, sigma, seed).
DepthMap perturb_depth(const DepthMap& dm, double sigma, std::uint64_t seed);

/// Unit ray direction in local ENU for a pixel under the given model.
/// Throws Error(kAboveHorizon) if the angular model yields a vertical ray.
Point3 pixel_ray(const PixelCoord& p, const CameraPose& pose, const Intrinsics& k,
                 RayModel model);

/// Tight inclusive box around the set pixels of a mask.
BBox bbox_of(const BinaryMask& mask);

struct RandomSceneOptions {
  std::string image_id = "img0";
  CameraPose pose{48.137, 11.575, 0.0, 0.0};
  Intrinsics intrinsics{960.0, 960.0, 1920, 1080, {}, {}};
  double camera_height_m = 2.5;
  std::size_t billboard_count = 10;
  double min_distance_m = 5.0;
  double max_distance_m = 30.0;
  double min_size_m = 0.5;
  double max_size_m = 0.9;
  double min_base_m = 1.5;
  double max_base_m = 2.5;
  std::vector<std::string> classes{"205", "206", "274", "283", "314"};
  std::uint64_t seed = 1;
  std::string id_prefix = "bb";
};

/// Draws billboards at random geocoordinates (sampled directly in degrees
/// around the camera, then filtered by haversine distance and visibility)
/// with non-overlapping bearing footprints so no billboard hides another.
/// Throws Error(kConfig) if the requested count cannot be placed.
SceneSpec random_scene(const RandomSceneOptions& opts, const EarthModel& em = {});

}  // namespace mapcore
