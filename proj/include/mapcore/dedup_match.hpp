#pragma once

// Duplicate removal across images and matching of located objects against
// annotations or an existing object database.

#include <optional>
#include <string>
#include <vector>

#include "mapcore/geo.hpp"
#include "mapcore/locate.hpp"

namespace mapcore {

inline constexpr double kDefaultDedupRadiusM = 3.0;
inline constexpr double kDefaultMatchDistanceM = 10.0;
inline constexpr double kDefaultBearingToleranceDeg = 5.0;

/// An annotated object or a database entry.
struct Reference {
  std::string id;
  std::string class_id;
  GeoPoint point;
};

enum class ClusterMode {
  /// Single linkage (union-find over pairs within the radius). Chains can
  /// exceed the radius. Repeated over cluster centroids until no two
  /// same-class centroids lie within the radius, which makes dedup idempotent.
  kTransitive,
  /// Complete linkage: a merge is accepted only if every pair of members of
  /// the merged cluster lies within the radius. Not idempotent in general.
  kStrictDiameter,
};

struct DedupOptions {
  ClusterMode mode = ClusterMode::kTransitive;
  EarthModel earth;
};

/// Merges same-class records within `radius_m`. A merged record sits at the
/// members' centroid (mean east/north offset around the member with the
/// smallest id), takes distance/bearing/camera from the member nearest the
/// centroid, keeps the smallest member id and lists every source image.
/// Output is sorted by id. Throws Error(kConfig) unless radius_m > 0.
std::vector<ObjectRecord> dedup(const std::vector<ObjectRecord>& records, double radius_m,
                                const DedupOptions& opts = {});

struct MatchPair {
  std::string prediction_id;
  std::string reference_id;
  double distance_m = 0.0;
  /// Camera-to-reference distance, when the prediction knows its camera.
  std::optional<double> true_camera_distance_m;
  double estimated_distance_m = 0.0;
};

struct IntervalStat {
  std::string label;
  double lo = 0.0;  // inclusive
  double hi = 0.0;  // exclusive; +inf for the last interval
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

struct MatchSummary {
  std::size_t predictions = 0;
  std::size_t references = 0;
  std::size_t matched = 0;
  /// matched / references (0 when there are no references).
  double found_fraction = 0.0;
  double mean_distance_m = 0.0;
  double median_distance_m = 0.0;
  std::vector<IntervalStat> by_interval;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<std::string> unmatched_predictions;
  std::vector<std::string> unmatched_references;
  std::vector<std::string> diagnostics;
  MatchSummary summary;
};

struct MatchOptions {
  double max_distance_m = kDefaultMatchDistanceM;
  /// Camera-object distance edges for the per-interval summary.
  std::vector<double> interval_edges{10.0, 20.0};
  EarthModel earth;
};

/// Pairs each prediction with the nearest unconsumed same-class reference
/// within max_distance_m. Candidate pairs are taken globally in ascending
/// distance (ties: prediction id, then reference id); each prediction and
/// each reference is used at most once.
MatchResult match_annotations(const std::vector<ObjectRecord>& preds,
                              const std::vector<Reference>& refs, const MatchOptions& opts = {});

struct DatabaseMatchOptions {
  double radius_m = kDefaultMatchDistanceM;
  double bearing_tolerance_deg = kDefaultBearingToleranceDeg;
  std::vector<double> interval_edges{10.0, 20.0};
  EarthModel earth;
};

/// Like match_annotations, but a candidate entry must also be seen from the
/// record's camera within bearing_tolerance_deg of the record's effective
/// bearing. Records without a camera position are skipped with a diagnostic.
MatchResult match_database(const std::vector<ObjectRecord>& records,
                           const std::vector<Reference>& entries,
                           const DatabaseMatchOptions& opts = {});

}  // namespace mapcore
