#pragma once

// Raster and point-cloud containers plus their on-disk formats.
//
// Depth rasters
//   PFM: "Pf\n<W> <H>\n-1.0\n" followed by W*H little-endian float32 values,
//        bottom row first (the PFM convention). Positive scale markers
//        (big-endian) are accepted on load.
//   raw: <stem>.f32 holding W*H little-endian float32 values, top row first,
//        plus a <stem>.json sidecar {"width": W, "height": H, "unit": "m"}
//        with an optional "kind": "range" | "planar".
// Label rasters: 8-bit grayscale PNG of Cityscapes train IDs.
// Masks: PNG of any bit depth, non-zero = set; written as 1-bit grayscale.
// Point clouds: ASCII "X Y Z" rows or PLY (ascii / binary_little_endian)
//   with float or double x, y, z vertex properties.
// Recording metadata: CSV with header
//   image_id,lat,lon,bearing_deg,pitch_deg,fx_px,fy_px,width,height,timestamp,source

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mapcore/geo.hpp"

namespace mapcore {

/// Depth values are valid when finite and inside (min, max].
struct ValidRange {
  double min = 0.1;
  double max = 200.0;

  bool contains(double v) const { return std::isfinite(v) && v > min && v <= max; }
  void validate() const;
};

/// What a depth value measures. Range is the Euclidean distance along the
/// pixel ray (what the geolocation chain consumes); planar is the distance
/// along the optical axis (what a z-buffered LiDAR projection yields).
enum class DepthKind { kRange, kPlanar };

std::string_view to_string(DepthKind kind);
DepthKind depth_kind_from_string(std::string_view s);

class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height, std::vector<float> values, ValidRange range = {},
           DepthKind kind = DepthKind::kRange);
  /// A width x height map with every pixel set to `fill`.
  static DepthMap filled(int width, int height, float fill, ValidRange range = {},
                         DepthKind kind = DepthKind::kRange);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<float>& values() const { return values_; }
  const ValidRange& valid_range() const { return range_; }
  DepthKind kind() const { return kind_; }

  float at(int x, int y) const { return values_[index(x, y)]; }
  float& at(int x, int y) { return values_[index(x, y)]; }
  bool valid(int x, int y) const { return range_.contains(at(x, y)); }
  bool valid_index(std::size_t i) const { return range_.contains(values_[i]); }
  std::size_t invalid_count() const;

  DepthMap with_range(ValidRange range) const;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
  ValidRange range_;
  DepthKind kind_ = DepthKind::kRange;
};

/// Per-pixel factor range / planar for a pinhole camera: sqrt(1 + xn^2 + yn^2).
double range_per_planar(const PixelCoord& p, const Intrinsics& k);
/// Converts between depth kinds using the pinhole relation. Dimensions must
/// match the intrinsics. Invalid pixels are copied unchanged.
DepthMap to_range(const DepthMap& dm, const Intrinsics& k);
DepthMap to_planar(const DepthMap& dm, const Intrinsics& k);

inline constexpr std::uint8_t kVoidLabel = 255;

struct SemanticMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;

  std::uint8_t at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1

  BinaryMask() = default;
  BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v = true) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
  std::size_t count() const;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Camera frame: X right, Y down, Z forward.
struct PointCloud {
  std::vector<Point3> points;
};

/// Rotations between the local east/north/up frame at the camera and the
/// camera frame of a pinhole camera looking along (bearing, pitch).
Point3 enu_to_camera(const Point3& enu, const CameraPose& pose);
Point3 camera_to_enu(const Point3& cam, const CameraPose& pose);
/// Transforms a cloud given as ENU offsets from the camera into the camera frame.
PointCloud enu_cloud_to_camera(const std::vector<Point3>& enu, const CameraPose& pose);

struct RecordingMeta {
  std::string image_id;
  CameraPose pose;
  Intrinsics intrinsics;
  std::optional<std::string> timestamp;
  std::string source;
};

enum class DepthFormat { kPfm, kRaw };

DepthFormat depth_format_from_string(std::string_view s);
std::string_view extension_for(DepthFormat format);

/// Loads a .pfm or a .f32 (+ .json sidecar) depth raster. PFM carries no kind
/// information, so `pfm_kind` supplies it.
DepthMap load_depth(const std::filesystem::path& path, ValidRange range = {},
                    DepthKind pfm_kind = DepthKind::kRange);
void save_depth_pfm(const DepthMap& dm, const std::filesystem::path& path);
/// Writes <path> (float32) and <path with .json extension> (sidecar).
void save_depth_raw(const DepthMap& dm, const std::filesystem::path& path);
void save_depth(const DepthMap& dm, const std::filesystem::path& path, DepthFormat format);

SemanticMap load_labels(const std::filesystem::path& path);
void save_labels(const SemanticMap& map, const std::filesystem::path& path);

BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

PointCloud load_cloud(const std::filesystem::path& path);
void save_cloud_xyz(const PointCloud& cloud, const std::filesystem::path& path);
void save_cloud_ply(const PointCloud& cloud, const std::filesystem::path& path);

std::vector<RecordingMeta> load_meta(const std::filesystem::path& path);
void save_meta(const std::vector<RecordingMeta>& rows, const std::filesystem::path& path);

}  // namespace mapcore
