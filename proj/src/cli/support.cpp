#include "cli/support.hpp"

#include <iostream>
#include <mutex>

#include <json.hpp>

namespace mapcore::cli {

namespace fs = std::filesystem;

void add_flags(CLI::App& app, Flags& f, unsigned sets) {
  app.add_option("--config", f.config, "TOML file with flat keys named like the flags");
  if (sets & kInputs) {
    app.add_option("--meta", f.meta, "Recording metadata CSV");
    app.add_option("--depth-dir", f.depth_dir, "Directory of <image_id>.pfm|.f32 depth rasters");
    app.add_option("--detections", f.detections, "Detections JSONL");
    app.add_option("--labels-dir", f.labels_dir, "Directory of <image_id>.png train-ID maps");
    app.add_option("--cloud-dir", f.cloud_dir, "Directory of <image_id>.ply|.xyz camera clouds");
    app.add_option("--truth-dir", f.truth_dir, "Directory of true depth rasters");
  }
  if (sets & kRefs) app.add_option("--refs", f.refs, "Reference objects (GeoJSON or CSV)");
  if (sets & kDedup) app.add_option("--radius", f.radius, "Dedup radius in metres");
  if (sets & kMatch) {
    app.add_option("--max-dist", f.max_dist, "Maximum match distance in metres");
    app.add_option("--bearing-tol", f.bearing_tol, "Database bearing tolerance in degrees");
    app.add_option("--intervals", f.intervals, "Camera distance interval edges, e.g. 10,20");
  }
  if (sets & kDepth) {
    app.add_option("--valid-range", f.valid_range, "Valid depth MIN,MAX in metres");
    app.add_option("--depth-format", f.depth_format, "pfm or raw");
    app.add_option("--depth-kind", f.depth_kind, "range or planar, for files that do not say");
  }
  if (sets & kEvalBins) {
    app.add_option("--bins", f.bins, "Depth bin edges, e.g. 5,10,20");
    app.add_option("--pooling", f.pooling, "pixel or image");
  }
  if (sets & kMask) app.add_option("--mask-stat", f.mask_stat, "mean or median");
  if (sets & kEarth) app.add_option("--earth-radius", f.earth_radius, "Sphere radius in metres");
  if (sets & kWorkers) app.add_option("--workers", f.workers, "Worker threads");
  if (sets & kTimestamp) {
    app.add_flag("--no-timestamp", f.no_timestamp, "Omit the generation time from reports");
  }
  app.add_option("--out", f.out, "Output path");
}

PipelineConfig resolve_config(const Flags& f) {
  PipelineConfig cfg;
  if (f.config) apply_config_file(cfg, *f.config);
  auto set_path = [](std::optional<fs::path>& dst, const std::optional<std::string>& src) {
    if (src) dst = fs::path(*src);
  };
  set_path(cfg.meta, f.meta);
  set_path(cfg.depth_dir, f.depth_dir);
  set_path(cfg.truth_dir, f.truth_dir);
  set_path(cfg.detections, f.detections);
  set_path(cfg.labels_dir, f.labels_dir);
  set_path(cfg.cloud_dir, f.cloud_dir);
  set_path(cfg.refs, f.refs);
  set_path(cfg.out, f.out);
  if (f.radius) cfg.radius_m = *f.radius;
  if (f.max_dist) cfg.max_dist_m = *f.max_dist;
  if (f.bearing_tol) cfg.bearing_tol_deg = *f.bearing_tol;
  if (f.earth_radius) cfg.earth_radius_m = *f.earth_radius;
  if (f.bins) cfg.bins = parse_edge_list(*f.bins);
  if (f.intervals) cfg.intervals = parse_edge_list(*f.intervals);
  if (f.valid_range) cfg.valid_range = parse_valid_range(*f.valid_range);
  if (f.depth_format) cfg.depth_format = depth_format_from_string(*f.depth_format);
  if (f.depth_kind) cfg.depth_kind = depth_kind_from_string(*f.depth_kind);
  if (f.mask_stat) {
    if (*f.mask_stat == "mean") cfg.mask_statistic = MaskDepthStatistic::kMean;
    else if (*f.mask_stat == "median") cfg.mask_statistic = MaskDepthStatistic::kMedian;
    else throw Error(ErrorCode::kConfig, "--mask-stat must be mean or median");
  }
  if (f.pooling) {
    if (*f.pooling == "pixel") cfg.pooling = Pooling::kPixel;
    else if (*f.pooling == "image") cfg.pooling = Pooling::kImage;
    else throw Error(ErrorCode::kConfig, "--pooling must be pixel or image");
  }
  if (f.workers) cfg.workers = *f.workers;
  if (f.no_timestamp) cfg.no_timestamp = true;
  cfg.validate();
  return cfg;
}

const fs::path& require_path(const std::optional<fs::path>& p, const char* flag) {
  if (!p) throw Error(ErrorCode::kConfig, std::string(flag) + " is required");
  if (!fs::exists(*p)) throw Error(ErrorCode::kIo, std::string(flag) + ": no such path " + p->string());
  return *p;
}

const fs::path& require_out(const std::optional<fs::path>& p) {
  if (!p) throw Error(ErrorCode::kConfig, "--out is required");
  return *p;
}

fs::path find_file(const fs::path& dir, const std::string& stem,
                   std::initializer_list<const char*> extensions) {
  for (const char* ext : extensions) {
    fs::path candidate = dir / (stem + ext);
    if (fs::exists(candidate)) return candidate;
  }
  std::string tried;
  for (const char* ext : extensions) tried += (tried.empty() ? "" : ", ") + stem + ext;
  throw Error(ErrorCode::kIo, "none of " + tried + " found in " + dir.string());
}

fs::path depth_file(const fs::path& dir, const std::string& image_id, DepthFormat preferred) {
  return preferred == DepthFormat::kPfm ? find_file(dir, image_id, {".pfm", ".f32"})
                                        : find_file(dir, image_id, {".f32", ".pfm"});
}

void diagnostic(const std::string& level, const std::string& code, const std::string& message,
                const std::vector<std::pair<std::string, std::string>>& extra) {
  static std::mutex mu;
  nlohmann::ordered_json j;
  j["level"] = level;
  j["code"] = code;
  for (const auto& [k, v] : extra) j[k] = v;
  j["message"] = message;
  std::lock_guard lock(mu);
  std::cerr << j.dump() << '\n';
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

void ensure_dir(const fs::path& dir) { fs::create_directories(dir); }

}  // namespace mapcore::cli
