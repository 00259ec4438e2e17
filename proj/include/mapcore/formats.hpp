#pragma once

// Exchange formats around the locate / dedup / match stages.
//
// Detections (JSON lines, one image per line):
//   {"image_id": "...", "detections": [
//       {"class": "...", "bbox": [x0, y0, x1, y1], "score": 0.9},
//       {"class": "...", "mask_path": "masks/a.png", "id": "optional"}]}
//   bbox bounds are inclusive pixel indices; mask paths are relative to the
//   JSONL file's directory.
// Records: GeoJSON FeatureCollection of Point features, or a
//   GeometryCollection of [Point, LineString] when an extent is known, with
//   properties {id, class, image_id, image_ids, distance_m, bearing_eff_deg,
//   reliable, camera_lat, camera_lon, score}.
// References: GeoJSON Point features with {id, class} properties, or CSV
//   with header id,class,lat,lon.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapcore/dedup_match.hpp"
#include "mapcore/locate.hpp"

namespace mapcore {

struct ImageDetections {
  std::string image_id;
  std::vector<Detection> detections;
};

std::vector<ImageDetections> load_detections(const std::filesystem::path& path);
/// Writes the JSONL file; masks go to <dir of path>/<mask_subdir>/ as 1-bit PNGs.
void save_detections(const std::vector<ImageDetections>& images,
                     const std::filesystem::path& path,
                     const std::string& mask_subdir = "masks");

/// One JSONL line (with trailing newline) for an image; masks are written to
/// <base>/<mask_subdir>/<image_id>_<index>.png.
std::string detections_line(const ImageDetections& img, const std::filesystem::path& base,
                            const std::string& mask_subdir = "masks");

nlohmann::ordered_json records_to_geojson(const std::vector<ObjectRecord>& records);
std::vector<ObjectRecord> records_from_geojson(const nlohmann::json& doc);
std::vector<ObjectRecord> load_records(const std::filesystem::path& path);
void save_records(const std::vector<ObjectRecord>& records, const std::filesystem::path& path);

/// Dispatches on extension: .csv, otherwise GeoJSON.
std::vector<Reference> load_references(const std::filesystem::path& path);
void save_references_geojson(const std::vector<Reference>& refs,
                             const std::filesystem::path& path);
void save_references_csv(const std::vector<Reference>& refs, const std::filesystem::path& path);

nlohmann::ordered_json match_to_json(const MatchResult& result);
/// prediction_id,reference_id,distance_m,true_camera_distance_m,estimated_distance_m
std::string match_pairs_csv(const MatchResult& result);

/// Writes text to a file, throwing Error(kIo) on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace mapcore
