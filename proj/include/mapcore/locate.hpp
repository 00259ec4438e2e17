#pragma once

// Per-object geolocation: sample an object's distance from a depth map and
// push its pixel through the pinhole chain in geo.hpp.

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mapcore/error.hpp"
#include "mapcore/geo.hpp"
#include "mapcore/raster.hpp"

namespace mapcore {

/// Camera-object distance below which an estimate counts as reliable.
inline constexpr double kReliableDistanceM = 20.0;

/// Inclusive integer pixel bounds.
struct BBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
};

struct Detection {
  std::string class_id;
  std::variant<BBox, BinaryMask> shape;
  std::optional<double> score;
  /// Optional stable identifier (e.g. a simulator object id); record ids fall
  /// back to "<image_id>#<index>" when empty.
  std::string id;
};

struct GeoExtent {
  GeoPoint first;
  GeoPoint second;
};

struct ObjectRecord {
  std::string id;
  std::string class_id;
  GeoPoint point;
  std::optional<GeoExtent> extent;
  /// Images the record was derived from; the first entry is the source image.
  std::vector<std::string> image_ids;
  /// Camera position of the source image; needed for database matching.
  std::optional<GeoPoint> camera;
  double bearing_eff_deg = 0.0;
  double distance_m = 0.0;
  bool reliable = false;
  std::optional<double> score;
};

enum class MaskDepthStatistic { kMean, kMedian };

struct LocateOptions {
  MaskDepthStatistic mask_statistic = MaskDepthStatistic::kMean;
  EarthModel earth;
};

/// Distance estimate for a detection plus the pixel it is attributed to.
/// For boxes the pixel is the rounded box centre; for masks it is the
/// sub-pixel centroid of the mask pixels that carry valid depth.
struct DepthSample {
  double depth_m = 0.0;
  PixelCoord pixel;
};

/// Throws Error(kBounds) for malformed or out-of-image shapes and
/// Error(kNoDepth) when no pixel under the shape has valid depth.
DepthSample sample_object_depth(const DepthMap& dm, const Detection& det,
                                MaskDepthStatistic stat = MaskDepthStatistic::kMean);

inline double object_depth(const DepthMap& dm, const Detection& det,
                           MaskDepthStatistic stat = MaskDepthStatistic::kMean) {
  return sample_object_depth(dm, det, stat).depth_m;
}

/// Locates one detection. A planar depth map is converted to range first.
ObjectRecord locate_object(const Detection& det, const DepthMap& dm, const RecordingMeta& meta,
                           const LocateOptions& opts = {}, std::string record_id = {});

struct SkippedDetection {
  std::string image_id;
  std::size_t index = 0;
  std::string class_id;
  ErrorCode code = ErrorCode::kNoDepth;
  std::string reason;
};

struct ImageResult {
  std::vector<ObjectRecord> records;
  std::vector<SkippedDetection> skipped;
};

/// Locates every detection of one image. Throws Error(kConfig) when the depth
/// map and the recording intrinsics disagree on the image size; per-detection
/// failures are reported in `skipped`.
ImageResult process_image(const RecordingMeta& meta, const DepthMap& dm,
                          const std::vector<Detection>& dets, const LocateOptions& opts = {});

}  // namespace mapcore
