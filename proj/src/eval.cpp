#include "mapcore/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mapcore/error.hpp"
#include "text_util.hpp"

namespace mapcore {

void validate_edges(const std::vector<double>& edges) {
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i]) || edges[i] <= 0.0 || (i > 0 && !(edges[i] > edges[i - 1]))) {
      throw Error(ErrorCode::kConfig, "interval edges must be positive and strictly increasing");
    }
  }
}

std::vector<std::string> interval_labels(const std::vector<double>& edges) {
  using detail::format_double;
  std::vector<std::string> labels;
  if (edges.empty()) return {"all"};
  labels.push_back("<" + format_double(edges.front()));
  for (std::size_t i = 1; i < edges.size(); ++i) {
    labels.push_back(format_double(edges[i - 1]) + "-" + format_double(edges[i]));
  }
  labels.push_back(">" + format_double(edges.back()));
  return labels;
}

std::size_t interval_index(const std::vector<double>& edges, double v) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) -
                                  edges.begin());
}

DepthMap project_cloud(const PointCloud& cloud, const Intrinsics& k, ValidRange range) {
  k.validate();
  std::vector<float> depth(static_cast<std::size_t>(k.width) * k.height,
                           std::numeric_limits<float>::infinity());
  const double cx = k.principal_x();
  const double cy = k.principal_y();
  for (const Point3& p : cloud.points) {
    if (!(p.z > 0.0)) continue;
    const double u = cx + k.fx * p.x / p.z;
    const double v = cy + k.fy * p.y / p.z;
    const double col = std::floor(u + 0.5);
    const double row = std::floor(v + 0.5);
    if (col < 0.0 || row < 0.0 || col >= k.width || row >= k.height) continue;
    float& cell = depth[static_cast<std::size_t>(row) * k.width + static_cast<std::size_t>(col)];
    cell = std::min(cell, static_cast<float>(p.z));
  }
  for (float& d : depth) {
    if (std::isinf(d)) d = 0.0f;
  }
  return DepthMap(k.width, k.height, std::move(depth), range, DepthKind::kPlanar);
}

void ErrorCell::add(double abs_err, double rel_err) {
  ++count;
  sum_abs += abs_err;
  sum_rel += rel_err;
  rel.push_back(static_cast<float>(rel_err));
}

void ErrorCell::merge(const ErrorCell& other) {
  count += other.count;
  sum_abs += other.sum_abs;
  sum_rel += other.sum_rel;
  rel.insert(rel.end(), other.rel.begin(), other.rel.end());
}

CellStats ErrorCell::stats() const {
  CellStats s;
  s.count = count;
  if (count == 0) return s;
  s.mae = sum_abs / static_cast<double>(count);
  s.are = sum_rel / static_cast<double>(count);
  std::vector<float> sorted = rel;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size() / 2;
  s.are_median = sorted.size() % 2 ? sorted[m] : (double(sorted[m - 1]) + sorted[m]) / 2.0;
  return s;
}

ErrorReport::ErrorReport(std::vector<double> edges) : edges_(std::move(edges)) {
  validate_edges(edges_);
  cells_.assign(kTotalRow + 1, std::vector<ErrorCell>(bin_count() + 1));
}

void ErrorReport::add_pixel(double pred, double truth, std::optional<SemanticGroup> group) {
  const double abs_err = std::abs(pred - truth);
  const double rel_err = abs_err / truth;
  const std::size_t bin = interval_index(edges_, truth);
  cells_[kTotalRow][bin].add(abs_err, rel_err);
  cells_[kTotalRow][total_column()].add(abs_err, rel_err);
  if (group && *group != SemanticGroup::kExcluded) {
    const auto row = static_cast<std::size_t>(*group);
    cells_[row][bin].add(abs_err, rel_err);
    cells_[row][total_column()].add(abs_err, rel_err);
  }
}

void ErrorReport::merge(const ErrorReport& other) {
  if (other.edges_ != edges_) {
    throw Error(ErrorCode::kConfig, "cannot merge reports with different bin edges");
  }
  has_semantics_ = has_semantics_ || other.has_semantics_;
  excluded_pixels_ += other.excluded_pixels_;
  for (std::size_t r = 0; r < cells_.size(); ++r) {
    for (std::size_t c = 0; c < cells_[r].size(); ++c) cells_[r][c].merge(other.cells_[r][c]);
  }
}

ErrorReport depth_errors(const DepthMap& pred, const DepthMap& truth, const SemanticMap* sem,
                         const DepthErrorOptions& opts) {
  if (pred.width() != truth.width() || pred.height() != truth.height()) {
    throw Error(ErrorCode::kDimension, "predicted and true depth maps differ in size");
  }
  if (sem && (sem->width != pred.width() || sem->height != pred.height())) {
    throw Error(ErrorCode::kDimension, "semantic map differs in size from the depth maps");
  }
  if (pred.kind() != truth.kind()) {
    throw Error(ErrorCode::kConfig, "predicted depth is " + std::string(to_string(pred.kind())) +
                                        " but truth is " + std::string(to_string(truth.kind())));
  }
  ErrorReport report(opts.bin_edges);
  report.set_has_semantics(sem != nullptr);
  for (int y = 0; y < pred.height(); ++y) {
    for (int x = 0; x < pred.width(); ++x) {
      if (!pred.valid(x, y) || !truth.valid(x, y)) continue;
      std::optional<SemanticGroup> group;
      if (sem) {
        group = group_of(sem->at(x, y));
        if (*group == SemanticGroup::kExcluded) {
          report.note_excluded();
          continue;
        }
      }
      report.add_pixel(pred.at(x, y), truth.at(x, y), group);
    }
  }
  if (report.evaluated_pixels() == 0) {
    throw Error(ErrorCode::kEmptyReport, "no pixel is valid in both maps and evaluable");
  }
  return report;
}

ErrorTable tabulate(const ErrorReport& report) {
  ErrorTable t;
  t.edges = report.edges();
  t.has_semantics = report.has_semantics();
  t.images = 1;
  t.cells.resize(ErrorReport::kTotalRow + 1);
  for (std::size_t r = 0; r < t.cells.size(); ++r) {
    for (std::size_t c = 0; c <= report.total_column(); ++c) {
      t.cells[r].push_back(report.stats(r, c));
    }
  }
  return t;
}

ErrorTable aggregate(const std::vector<ErrorReport>& reports, Pooling pooling) {
  if (reports.empty()) throw Error(ErrorCode::kEmptyReport, "no reports to aggregate");
  if (pooling == Pooling::kPixel) {
    ErrorReport pooled = reports.front();
    for (std::size_t i = 1; i < reports.size(); ++i) pooled.merge(reports[i]);
    ErrorTable t = tabulate(pooled);
    t.images = reports.size();
    return t;
  }
  ErrorTable t = tabulate(reports.front());
  for (const auto& r : reports) {
    if (r.edges() != t.edges) throw Error(ErrorCode::kConfig, "reports use different bin edges");
    t.has_semantics = t.has_semantics || r.has_semantics();
  }
  t.images = reports.size();
  for (std::size_t row = 0; row < t.cells.size(); ++row) {
    for (std::size_t col = 0; col < t.cells[row].size(); ++col) {
      CellStats acc;
      std::size_t contributing = 0;
      for (const auto& r : reports) {
        const CellStats s = r.stats(row, col);
        if (s.count == 0) continue;
        ++contributing;
        acc.count += s.count;
        acc.mae += s.mae;
        acc.are += s.are;
        acc.are_median += s.are_median;
      }
      if (contributing > 0) {
        acc.mae /= double(contributing);
        acc.are /= double(contributing);
        acc.are_median /= double(contributing);
      }
      t.cells[row][col] = acc;
    }
  }
  return t;
}

namespace {

// Linear-interpolation quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

IntervalStat describe(std::string label, double lo, double hi, std::vector<double> values) {
  IntervalStat s;
  s.label = std::move(label);
  s.lo = lo;
  s.hi = hi;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.min = values.front();
  s.q1 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  s.max = values.back();
  return s;
}

}  // namespace

CoordErrorTable coord_error_stats(std::span<const double> errors,
                                  std::span<const double> camera_distances,
                                  const std::vector<double>& edges) {
  validate_edges(edges);
  if (errors.size() != camera_distances.size()) {
    throw Error(ErrorCode::kConfig, "one camera distance per error is required");
  }
  const auto labels = interval_labels(edges);
  std::vector<std::vector<double>> buckets(edges.size() + 1);
  for (std::size_t i = 0; i < errors.size(); ++i) {
    buckets[interval_index(edges, camera_distances[i])].push_back(errors[i]);
  }
  CoordErrorTable table;
  table.count = errors.size();
  table.overall = describe("total", 0.0, std::numeric_limits<double>::infinity(),
                           std::vector<double>(errors.begin(), errors.end()));
  table.mean = table.overall.mean;
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    const double lo = b == 0 ? 0.0 : edges[b - 1];
    const double hi = b < edges.size() ? edges[b] : std::numeric_limits<double>::infinity();
    table.intervals.push_back(describe(labels[b], lo, hi, std::move(buckets[b])));
  }
  return table;
}

CoordErrorTable coord_error_stats(const MatchResult& matches, const std::vector<double>& edges) {
  std::vector<double> errors, distances;
  for (const auto& p : matches.pairs) {
    errors.push_back(p.distance_m);
    distances.push_back(p.true_camera_distance_m.value_or(p.estimated_distance_m));
  }
  return coord_error_stats(errors, distances, edges);
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height || a.bits.size() != b.bits.size()) {
    throw Error(ErrorCode::kDimension, "masks differ in size");
  }
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    const bool x = a.bits[i] != 0, y = b.bits[i] != 0;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace mapcore
