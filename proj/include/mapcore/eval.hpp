#pragma once

// Depth-quality evaluation against LiDAR-derived ground truth and
// coordinate-error statistics for matched objects.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mapcore/dedup_match.hpp"
#include "mapcore/raster.hpp"
#include "mapcore/semantics.hpp"

namespace mapcore {

/// Truth-depth bin edges for depth evaluation: <5, 5-10, 10-20, >=20 m.
inline const std::vector<double> kDepthBinEdges{5.0, 10.0, 20.0};
/// Camera-object distance edges for traffic-sign coordinate errors.
inline const std::vector<double> kSignIntervalEdges{10.0, 20.0};
/// Camera-object distance edges for road-damage coordinate errors.
inline const std::vector<double> kDamageIntervalEdges{2.0, 4.0, 6.0, 8.0, 10.0};

/// Throws Error(kConfig) unless edges are finite, positive and strictly increasing.
void validate_edges(const std::vector<double>& edges);

/// Table-header labels "<e0", "e0-e1", ..., ">eN". Intervals are half-open,
/// so the last one does include eN.
std::vector<std::string> interval_labels(const std::vector<double>& edges);
/// Index of the interval containing v; intervals are [lo, hi).
std::size_t interval_index(const std::vector<double>& edges, double v);

/// Z-buffered pinhole projection of a camera-frame cloud:
/// u = cx + fx X/Z, v = cy + fy Y/Z, rounded to the nearest pixel centre.
/// Points with Z <= 0 or outside the image are dropped; the nearest Z wins.
/// Uncovered pixels hold 0 and are therefore invalid. The result is planar.
DepthMap project_cloud(const PointCloud& cloud, const Intrinsics& k, ValidRange range = {});

struct CellStats {
  std::size_t count = 0;
  double mae = 0.0;
  double are = 0.0;
  double are_median = 0.0;
};

/// Accumulates |pred - truth| and |pred - truth| / truth for one cell.
struct ErrorCell {
  std::size_t count = 0;
  double sum_abs = 0.0;
  double sum_rel = 0.0;
  std::vector<float> rel;

  void add(double abs_err, double rel_err);
  void merge(const ErrorCell& other);
  CellStats stats() const;
};

/// Cells indexed by [row][column]. Rows are the four evaluated semantic
/// groups followed by "total"; columns are the distance bins followed by
/// "total". Without a semantic map only the total row is populated.
class ErrorReport {
 public:
  static constexpr std::size_t kTotalRow = 4;

  explicit ErrorReport(std::vector<double> edges = kDepthBinEdges);

  const std::vector<double>& edges() const { return edges_; }
  std::size_t bin_count() const { return edges_.size() + 1; }
  std::size_t total_column() const { return bin_count(); }
  bool has_semantics() const { return has_semantics_; }
  std::size_t evaluated_pixels() const { return cells_[kTotalRow][total_column()].count; }
  std::size_t excluded_pixels() const { return excluded_pixels_; }

  const ErrorCell& cell(std::size_t row, std::size_t column) const { return cells_[row][column]; }
  CellStats stats(std::size_t row, std::size_t column) const { return cell(row, column).stats(); }
  CellStats total() const { return stats(kTotalRow, total_column()); }

  void add_pixel(double pred, double truth, std::optional<SemanticGroup> group);
  void note_excluded() { ++excluded_pixels_; }
  void set_has_semantics(bool v) { has_semantics_ = v; }
  /// Pools another report pixel-wise. Edges must agree.
  void merge(const ErrorReport& other);

 private:
  std::vector<double> edges_;
  bool has_semantics_ = false;
  std::size_t excluded_pixels_ = 0;
  std::vector<std::vector<ErrorCell>> cells_;
};

struct DepthErrorOptions {
  std::vector<double> bin_edges = kDepthBinEdges;
};

/// Compares predicted against true depth over pixels valid in both maps and
/// not in an excluded semantic group; bins use the true depth. Throws
/// Error(kDimension) on size mismatch, Error(kConfig) when the maps measure
/// different depth kinds and Error(kEmptyReport) when nothing is evaluated.
ErrorReport depth_errors(const DepthMap& pred, const DepthMap& truth,
                         const SemanticMap* sem = nullptr, const DepthErrorOptions& opts = {});

enum class Pooling {
  kPixel,  // every evaluated pixel weighs the same
  kImage,  // per-image cell means are averaged
};

/// Table of finished cell statistics, shaped like ErrorReport.
struct ErrorTable {
  std::vector<double> edges;
  bool has_semantics = false;
  std::size_t images = 0;
  std::vector<std::vector<CellStats>> cells;
};

ErrorTable tabulate(const ErrorReport& report);
/// Combines per-image reports. Throws Error(kEmptyReport) for an empty list.
ErrorTable aggregate(const std::vector<ErrorReport>& reports, Pooling pooling = Pooling::kPixel);

struct CoordErrorTable {
  std::size_t count = 0;
  double mean = 0.0;
  IntervalStat overall;
  std::vector<IntervalStat> intervals;
};

/// Mean position error overall and per camera-object distance interval, with
/// quartiles for box plots. Pair distances use the true camera distance when
/// known and the estimated one otherwise.
CoordErrorTable coord_error_stats(const MatchResult& matches, const std::vector<double>& edges);
CoordErrorTable coord_error_stats(std::span<const double> errors,
                                  std::span<const double> camera_distances,
                                  const std::vector<double>& edges);

/// |A and B| / |A or B|. Two empty masks score 1.0. Throws Error(kDimension)
/// when the masks differ in size.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

}  // namespace mapcore
