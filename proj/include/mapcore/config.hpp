#pragma once

// Pipeline configuration shared by the CLI subcommands. A TOML file uses flat
// keys spelled like the long flags (radius = 3.0, valid-range = "0.1,200",
// bins = [5, 10, 20], depth-dir = "depth"). Relative paths in a file are
// resolved against the file's directory.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mapcore/dedup_match.hpp"
#include "mapcore/eval.hpp"
#include "mapcore/geo.hpp"
#include "mapcore/locate.hpp"
#include "mapcore/raster.hpp"

namespace mapcore {

struct PipelineConfig {
  std::optional<std::filesystem::path> meta;
  std::optional<std::filesystem::path> depth_dir;
  std::optional<std::filesystem::path> truth_dir;
  std::optional<std::filesystem::path> detections;
  std::optional<std::filesystem::path> labels_dir;
  std::optional<std::filesystem::path> cloud_dir;
  std::optional<std::filesystem::path> refs;
  std::optional<std::filesystem::path> out;

  double radius_m = kDefaultDedupRadiusM;
  double max_dist_m = kDefaultMatchDistanceM;
  double bearing_tol_deg = kDefaultBearingToleranceDeg;
  std::vector<double> bins = kDepthBinEdges;
  std::vector<double> intervals = kSignIntervalEdges;
  ValidRange valid_range;
  double earth_radius_m = EarthModel::kMeanRadius;
  int workers = 1;
  bool no_timestamp = false;
  DepthFormat depth_format = DepthFormat::kPfm;
  /// Kind assumed for depth files that do not declare one (PFM).
  DepthKind depth_kind = DepthKind::kRange;
  MaskDepthStatistic mask_statistic = MaskDepthStatistic::kMean;
  Pooling pooling = Pooling::kPixel;

  EarthModel earth() const { return EarthModel{earth_radius_m}; }

  /// Throws Error(kConfig) unless every numeric parameter is positive, the
  /// valid range is ordered and bin/interval edges strictly increase.
  void validate() const;
};

/// "5,10,20" -> {5, 10, 20}. Throws Error(kConfig) on malformed input.
std::vector<double> parse_edge_list(std::string_view text);
/// "0.1,200" -> {0.1, 200}.
ValidRange parse_valid_range(std::string_view text);

/// Reads a TOML file into `cfg`, overwriting only the keys present.
/// Unknown keys and type mismatches throw Error(kConfig); an unreadable file
/// throws Error(kIo).
void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);
/// Same for TOML text; relative paths resolve against `base_dir`.
void apply_config_text(PipelineConfig& cfg, std::string_view toml_text,
                       const std::filesystem::path& base_dir = {});

}  // namespace mapcore
