#include "mapcore/locate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mapcore {

namespace {

void check_bbox(const BBox& b, const DepthMap& dm) {
  if (b.x0 > b.x1 || b.y0 > b.y1 || b.x0 < 0 || b.y0 < 0 || b.x1 >= dm.width() ||
      b.y1 >= dm.height()) {
    throw Error(ErrorCode::kBounds,
                "bbox (" + std::to_string(b.x0) + "," + std::to_string(b.y0) + "," +
                    std::to_string(b.x1) + "," + std::to_string(b.y1) +
                    ") is not well-ordered inside the image");
  }
}

// Round half up, so an even-sized box picks the lower-right of the two middle pixels.
int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

DepthSample sample_bbox(const DepthMap& dm, const BBox& b) {
  check_bbox(b, dm);
  const int cx = round_half_up((b.x0 + b.x1) / 2.0);
  const int cy = round_half_up((b.y0 + b.y1) / 2.0);
  if (dm.valid(cx, cy)) return {dm.at(cx, cy), {double(cx), double(cy)}};
  // centre pixel dead: mean of the valid pixels in the 3x3 around it
  double sum = 0.0;
  int n = 0;
  for (int y = std::max(b.y0, cy - 1); y <= std::min(b.y1, cy + 1); ++y) {
    for (int x = std::max(b.x0, cx - 1); x <= std::min(b.x1, cx + 1); ++x) {
      if (dm.valid(x, y)) {
        sum += dm.at(x, y);
        ++n;
      }
    }
  }
  if (n == 0) throw Error(ErrorCode::kNoDepth, "no valid depth at the bbox centre");
  return {sum / n, {double(cx), double(cy)}};
}

DepthSample sample_mask(const DepthMap& dm, const BinaryMask& mask, MaskDepthStatistic stat) {
  if (mask.width != dm.width() || mask.height != dm.height()) {
    throw Error(ErrorCode::kBounds, "mask dimensions differ from the depth map");
  }
  std::vector<double> depths;
  double sx = 0.0, sy = 0.0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(x, y) || !dm.valid(x, y)) continue;
      depths.push_back(dm.at(x, y));
      sx += x;
      sy += y;
    }
  }
  if (depths.empty()) throw Error(ErrorCode::kNoDepth, "no valid depth under the mask");
  const auto n = static_cast<double>(depths.size());
  double depth = 0.0;
  if (stat == MaskDepthStatistic::kMean) {
    for (double d : depths) depth += d;
    depth /= n;
  } else {
    const auto mid = depths.begin() + static_cast<std::ptrdiff_t>(depths.size() / 2);
    std::nth_element(depths.begin(), mid, depths.end());
    depth = *mid;
    if (depths.size() % 2 == 0) {
      depth = (depth + *std::max_element(depths.begin(), mid)) / 2.0;
    }
  }
  return {depth, {sx / n, sy / n}};
}

// Leftmost and rightmost valid mask columns; within each column, the valid
// pixel whose row is closest to `row`.
std::pair<PixelCoord, PixelCoord> outermost_pixels(const DepthMap& dm, const BinaryMask& mask,
                                                   double row) {
  int left = std::numeric_limits<int>::max();
  int right = -1;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y) && dm.valid(x, y)) {
        left = std::min(left, x);
        right = std::max(right, x);
      }
    }
  }
  auto pick = [&](int col) {
    int best = -1;
    for (int y = 0; y < mask.height; ++y) {
      if (!mask.at(col, y) || !dm.valid(col, y)) continue;
      if (best < 0 || std::abs(y - row) < std::abs(best - row)) best = y;
    }
    return PixelCoord{double(col), double(best)};
  };
  return {pick(left), pick(right)};
}

}  // namespace

DepthSample sample_object_depth(const DepthMap& dm, const Detection& det,
                                MaskDepthStatistic stat) {
  if (const auto* b = std::get_if<BBox>(&det.shape)) return sample_bbox(dm, *b);
  return sample_mask(dm, std::get<BinaryMask>(det.shape), stat);
}

ObjectRecord locate_object(const Detection& det, const DepthMap& depth, const RecordingMeta& meta,
                           const LocateOptions& opts, std::string record_id) {
  const DepthMap dm =
      depth.kind() == DepthKind::kPlanar ? to_range(depth, meta.intrinsics) : depth;
  const DepthSample sample = sample_object_depth(dm, det, opts.mask_statistic);
  const LocatedPoint centre =
      locate_pixel(sample.pixel, sample.depth_m, meta.pose, meta.intrinsics, opts.earth);

  ObjectRecord rec;
  rec.id = std::move(record_id);
  rec.class_id = det.class_id;
  rec.point = centre.point;
  rec.image_ids = {meta.image_id};
  rec.camera = GeoPoint{meta.pose.lat, meta.pose.lon};
  rec.bearing_eff_deg = centre.angles.bearing_eff;
  rec.distance_m = sample.depth_m;
  rec.reliable = sample.depth_m < kReliableDistanceM;
  rec.score = det.score;

  if (const auto* mask = std::get_if<BinaryMask>(&det.shape)) {
    const auto [left, right] = outermost_pixels(dm, *mask, sample.pixel.y);
    auto at = [&](const PixelCoord& p) {
      return locate_pixel(p, dm.at(int(p.x), int(p.y)), meta.pose, meta.intrinsics, opts.earth)
          .point;
    };
    GeoExtent extent{at(left), at(right)};
    const double limit = 2.0 * rec.distance_m;
    if (geo_distance(extent.first, rec.point, opts.earth) <= limit &&
        geo_distance(extent.second, rec.point, opts.earth) <= limit) {
      rec.extent = extent;
    }
  }
  return rec;
}

ImageResult process_image(const RecordingMeta& meta, const DepthMap& depth,
                          const std::vector<Detection>& dets, const LocateOptions& opts) {
  if (depth.width() != meta.intrinsics.width || depth.height() != meta.intrinsics.height) {
    throw Error(ErrorCode::kConfig,
                "image " + meta.image_id + ": depth map is " + std::to_string(depth.width()) +
                    "x" + std::to_string(depth.height()) + " but metadata says " +
                    std::to_string(meta.intrinsics.width) + "x" +
                    std::to_string(meta.intrinsics.height));
  }
  const DepthMap dm =
      depth.kind() == DepthKind::kPlanar ? to_range(depth, meta.intrinsics) : depth;
  ImageResult result;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const Detection& det = dets[i];
    std::string id = det.id.empty() ? meta.image_id + "#" + std::to_string(i) : det.id;
    try {
      result.records.push_back(locate_object(det, dm, meta, opts, std::move(id)));
    } catch (const Error& e) {
      result.skipped.push_back({meta.image_id, i, det.class_id, e.code(), e.what()});
    }
  }
  return result;
}

}  // namespace mapcore
