#include "cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "mapcore/formats.hpp"
#include "mapcore/report.hpp"
#include "mapcore/scene_sim.hpp"
#include "text_util.hpp"

namespace mapcore::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

void check_dimensions(const DepthMap& dm, const RecordingMeta& meta, const char* what) {
  if (dm.width() != meta.intrinsics.width || dm.height() != meta.intrinsics.height) {
    throw Error(ErrorCode::kDimension,
                std::string(what) + " for " + meta.image_id + " is " + std::to_string(dm.width()) +
                    "x" + std::to_string(dm.height()) + " but the metadata says " +
                    std::to_string(meta.intrinsics.width) + "x" +
                    std::to_string(meta.intrinsics.height));
  }
}

std::map<std::string, RecordingMeta> meta_by_id(const fs::path& path) {
  std::map<std::string, RecordingMeta> out;
  for (auto& m : load_meta(path)) {
    const std::string id = m.image_id;
    if (!out.emplace(id, std::move(m)).second) {
      throw Error(ErrorCode::kFormat, path.string() + ": duplicate image_id '" + id + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::kEmptyReport, path.string() + " lists no images");
  return out;
}

void stamp(ojson& j, const PipelineConfig& cfg) {
  if (auto ts = report_timestamp(cfg.no_timestamp)) j["generated_at"] = *ts;
}

}  // namespace

int cmd_locate(const Flags& flags) {
  const PipelineConfig cfg = resolve_config(flags);
  const fs::path& meta_path = require_path(cfg.meta, "--meta");
  const fs::path& depth_dir = require_path(cfg.depth_dir, "--depth-dir");
  const fs::path& det_path = require_path(cfg.detections, "--detections");
  const fs::path& out = require_out(cfg.out);

  const auto metas = meta_by_id(meta_path);
  std::map<std::string, std::vector<Detection>> dets;
  for (auto& img : load_detections(det_path)) {
    if (!metas.contains(img.image_id)) {
      throw Error(ErrorCode::kConfig, "detections for '" + img.image_id + "' have no metadata row");
    }
    if (!dets.emplace(img.image_id, std::move(img.detections)).second) {
      throw Error(ErrorCode::kFormat, det_path.string() + ": image '" + img.image_id +
                                          "' appears twice");
    }
  }

  std::vector<const RecordingMeta*> jobs;
  for (const auto& [id, m] : metas) {
    if (dets.contains(id)) jobs.push_back(&m);
  }
  const LocateOptions opts{cfg.mask_statistic, cfg.earth()};
  std::vector<ImageResult> results(jobs.size());
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
    const RecordingMeta& meta = *jobs[i];
    const DepthMap dm = load_depth(depth_file(depth_dir, meta.image_id, cfg.depth_format),
                                   cfg.valid_range, cfg.depth_kind);
    results[i] = process_image(meta, dm, dets.at(meta.image_id), opts);
    spdlog::debug("{}: {} located, {} skipped", meta.image_id, results[i].records.size(),
                  results[i].skipped.size());
  });

  std::vector<ObjectRecord> records;
  std::size_t skipped = 0;
  for (auto& r : results) {
    for (const auto& s : r.skipped) {
      diagnostic("warning", std::string(to_string(s.code)), s.reason,
                 {{"image_id", s.image_id}, {"detection", std::to_string(s.index)}});
    }
    skipped += r.skipped.size();
    for (auto& rec : r.records) records.push_back(std::move(rec));
  }
  if (records.empty()) throw Error(ErrorCode::kEmptyReport, "no detection could be located");

  ensure_parent(out);
  save_records(records, out);
  std::printf("located %zu objects in %zu images (%zu skipped) -> %s\n", records.size(),
              jobs.size(), skipped, out.string().c_str());
  return kExitOk;
}

int cmd_eval_depth(const Flags& flags) {
  const PipelineConfig cfg = resolve_config(flags);
  const fs::path& meta_path = require_path(cfg.meta, "--meta");
  const fs::path& depth_dir = require_path(cfg.depth_dir, "--depth-dir");
  if (!cfg.truth_dir && !cfg.cloud_dir) {
    throw Error(ErrorCode::kConfig, "eval-depth needs --cloud-dir or --truth-dir");
  }
  if (cfg.truth_dir) require_path(cfg.truth_dir, "--truth-dir");
  if (cfg.cloud_dir) require_path(cfg.cloud_dir, "--cloud-dir");
  if (cfg.labels_dir) require_path(cfg.labels_dir, "--labels-dir");
  const fs::path& out = require_out(cfg.out);

  const auto metas = meta_by_id(meta_path);
  std::vector<const RecordingMeta*> jobs;
  for (const auto& [id, m] : metas) jobs.push_back(&m);

  std::vector<std::optional<ErrorReport>> reports(jobs.size());
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
    const RecordingMeta& meta = *jobs[i];
    const Intrinsics& k = meta.intrinsics;
    DepthMap pred = load_depth(depth_file(depth_dir, meta.image_id, cfg.depth_format),
                               cfg.valid_range, cfg.depth_kind);
    check_dimensions(pred, meta, "predicted depth");
    const DepthMap truth =
        cfg.truth_dir
            ? load_depth(depth_file(*cfg.truth_dir, meta.image_id, cfg.depth_format),
                         cfg.valid_range, cfg.depth_kind)
            : project_cloud(load_cloud(find_file(*cfg.cloud_dir, meta.image_id, {".ply", ".xyz"})),
                            k, cfg.valid_range);
    check_dimensions(truth, meta, "true depth");
    if (pred.kind() != truth.kind()) {
      pred = truth.kind() == DepthKind::kPlanar ? to_planar(pred, k) : to_range(pred, k);
    }
    std::optional<SemanticMap> sem;
    if (cfg.labels_dir) sem = load_labels(find_file(*cfg.labels_dir, meta.image_id, {".png"}));
    try {
      reports[i] = depth_errors(pred, truth, sem ? &*sem : nullptr, {cfg.bins});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyReport) throw;
      diagnostic("warning", "empty-report", e.what(), {{"image_id", meta.image_id}});
    }
  });

  std::vector<ErrorReport> usable;
  std::size_t excluded = 0;
  for (auto& r : reports) {
    if (!r) continue;
    excluded += r->excluded_pixels();
    usable.push_back(std::move(*r));
  }
  if (usable.empty()) throw Error(ErrorCode::kEmptyReport, "no image had evaluable pixels");
  const ErrorTable table = aggregate(usable, cfg.pooling);

  ojson j = error_table_json(table, cfg.pooling, excluded);
  stamp(j, cfg);
  ensure_dir(out);
  write_text(out / "depth_errors.json", j.dump(2) + "\n");
  write_text(out / "depth_errors.csv", error_table_csv(table));
  const CellStats& total = table.cells[ErrorReport::kTotalRow].back();
  std::printf("evaluated %zu pixels in %zu images: MAE %.4f m, ARE %.4f -> %s\n", total.count,
              table.images, total.mae, total.are, out.string().c_str());
  return kExitOk;
}

int cmd_dedup(const Flags& flags, const std::string& input, bool strict) {
  const PipelineConfig cfg = resolve_config(flags);
  if (input.empty()) throw Error(ErrorCode::kConfig, "dedup needs an input GeoJSON file");
  const std::optional<fs::path> input_path = fs::path(input);
  const fs::path& in = require_path(input_path, "input");
  const fs::path& out = require_out(cfg.out);
  const auto records = load_records(in);
  if (records.empty()) throw Error(ErrorCode::kEmptyReport, in.string() + " holds no records");
  DedupOptions opts;
  opts.mode = strict ? ClusterMode::kStrictDiameter : ClusterMode::kTransitive;
  opts.earth = cfg.earth();
  const auto merged = dedup(records, cfg.radius_m, opts);
  ensure_parent(out);
  save_records(merged, out);
  std::printf("merged %zu records into %zu -> %s\n", records.size(), merged.size(),
              out.string().c_str());
  return kExitOk;
}

int cmd_match(const Flags& flags, const std::string& input, bool database) {
  const PipelineConfig cfg = resolve_config(flags);
  if (input.empty()) throw Error(ErrorCode::kConfig, "match needs an input GeoJSON file");
  const std::optional<fs::path> input_path = fs::path(input);
  const fs::path& in = require_path(input_path, "input");
  const fs::path& refs_path = require_path(cfg.refs, "--refs");
  const fs::path& out = require_out(cfg.out);
  const auto preds = load_records(in);
  const auto refs = load_references(refs_path);
  if (refs.empty()) throw Error(ErrorCode::kEmptyReport, refs_path.string() + " holds no objects");

  MatchResult result;
  if (database) {
    DatabaseMatchOptions opts;
    opts.radius_m = cfg.max_dist_m;
    opts.bearing_tolerance_deg = cfg.bearing_tol_deg;
    opts.interval_edges = cfg.intervals;
    opts.earth = cfg.earth();
    result = match_database(preds, refs, opts);
  } else {
    MatchOptions opts;
    opts.max_distance_m = cfg.max_dist_m;
    opts.interval_edges = cfg.intervals;
    opts.earth = cfg.earth();
    result = match_annotations(preds, refs, opts);
  }
  for (const auto& d : result.diagnostics) diagnostic("warning", "match", d);

  ojson j;
  j["mode"] = database ? "database" : "annotations";
  j["max_dist_m"] = cfg.max_dist_m;
  if (database) j["bearing_tol_deg"] = cfg.bearing_tol_deg;
  j["interval_edges_m"] = cfg.intervals;
  const ojson body = match_to_json(result);
  for (const auto& [k, v] : body.items()) j[k] = v;
  stamp(j, cfg);
  ensure_dir(out);
  write_text(out / "match.json", j.dump(2) + "\n");
  write_text(out / "pairs.csv", match_pairs_csv(result));
  std::printf("matched %zu of %zu references (found fraction %.4f, median error %.4f m) -> %s\n",
              result.summary.matched, result.summary.references, result.summary.found_fraction,
              result.summary.median_distance_m, out.string().c_str());
  return kExitOk;
}

int cmd_simulate(const Flags& flags, const SimulateArgs& a) {
  const PipelineConfig cfg = resolve_config(flags);
  const fs::path& out = require_out(cfg.out);
  if (a.scenes < 1 || a.billboards < 1) {
    throw Error(ErrorCode::kConfig, "--scenes and --billboards must be at least 1");
  }
  if (!(a.noise >= 0.0)) throw Error(ErrorCode::kConfig, "--noise must be >= 0");
  if (a.cloud_stride < 1) throw Error(ErrorCode::kConfig, "--cloud-stride must be at least 1");
  RayModel model;
  if (a.ray_model == "angular") model = RayModel::kAngular;
  else if (a.ray_model == "pinhole") model = RayModel::kPinhole;
  else throw Error(ErrorCode::kConfig, "--ray-model must be angular or pinhole");
  const EarthModel em = cfg.earth();

  std::vector<SceneSpec> specs;
  for (int i = 0; i < a.scenes; ++i) {
    RandomSceneOptions o;
    char id[32];
    std::snprintf(id, sizeof id, "img%04d", i);
    o.image_id = id;
    // Scenes sit ~220 m apart so nothing is visible from two cameras.
    o.pose = CameraPose{48.137 + 0.002 * i, 11.575, std::fmod(67.0 * i, 360.0), 0.0};
    o.intrinsics = Intrinsics{a.focal, a.focal, a.width, a.height, {}, {}};
    o.intrinsics.validate();
    o.camera_height_m = a.camera_height_m;
    o.billboard_count = static_cast<std::size_t>(a.billboards);
    o.min_distance_m = a.near_m;
    o.max_distance_m = a.far_m;
    o.seed = a.seed + static_cast<std::uint64_t>(i);
    o.id_prefix = std::string(id) + "_bb";
    SceneSpec spec = random_scene(o, em);
    spec.depth_noise_sigma = a.noise;
    spec.ray_model = model;
    spec.valid_range = cfg.valid_range;
    spec.cloud_stride = a.cloud_stride;
    spec.validate();
    specs.push_back(std::move(spec));
  }

  for (const char* sub : {"depth", "depth_gt", "labels", "clouds", "masks"}) ensure_dir(out / sub);
  const std::string ext(extension_for(cfg.depth_format));
  std::vector<std::string> mask_lines(specs.size()), bbox_lines(specs.size());
  std::vector<std::vector<Reference>> truths(specs.size());
  parallel_for(specs.size(), cfg.workers, [&](std::size_t i) {
    const SceneSpec& spec = specs[i];
    const std::string& id = spec.camera.image_id;
    RenderedScene scene = render_depth(spec, em);
    for (const auto& d : scene.diagnostics) diagnostic("warning", "simulate", d, {{"image_id", id}});
    save_depth(scene.depth, out / "depth" / (id + ext), cfg.depth_format);
    save_depth(scene.clean_depth, out / "depth_gt" / (id + ext), cfg.depth_format);
    save_labels(scene.labels, out / "labels" / (id + ".png"));
    save_cloud_ply(scene.cloud, out / "clouds" / (id + ".ply"));
    ImageDetections boxes{id, {}};
    for (const auto& d : scene.detections) {
      Detection b = d;
      b.shape = bbox_of(std::get<BinaryMask>(d.shape));
      boxes.detections.push_back(std::move(b));
    }
    mask_lines[i] = detections_line({id, std::move(scene.detections)}, out, "masks");
    bbox_lines[i] = detections_line(boxes, out, "masks");
    truths[i] = std::move(scene.truth);
  });

  std::vector<RecordingMeta> metas;
  std::vector<Reference> truth;
  std::string masks_jsonl, bbox_jsonl;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    metas.push_back(specs[i].camera);
    masks_jsonl += mask_lines[i];
    bbox_jsonl += bbox_lines[i];
    truth.insert(truth.end(), truths[i].begin(), truths[i].end());
  }
  save_meta(metas, out / "meta.csv");
  write_text(out / "detections.jsonl", masks_jsonl);
  write_text(out / "detections_bbox.jsonl", bbox_jsonl);
  save_references_geojson(truth, out / "truth.geojson");

  using detail::format_double;
  std::string toml = "meta = \"meta.csv\"\n"
                     "depth-dir = \"depth\"\n"
                     "truth-dir = \"depth_gt\"\n"
                     "detections = \"detections.jsonl\"\n"
                     "labels-dir = \"labels\"\n"
                     "cloud-dir = \"clouds\"\n"
                     "refs = \"truth.geojson\"\n"
                     "depth-format = \"" + std::string(cfg.depth_format == DepthFormat::kPfm ? "pfm" : "raw") + "\"\n"
                     "depth-kind = \"range\"\n"
                     "valid-range = [" + format_double(cfg.valid_range.min) + ", " +
                     format_double(cfg.valid_range.max) + "]\n"
                     "earth-radius = " + format_double(cfg.earth_radius_m) + "\n";
  write_text(out / "mapcore.toml", toml);
  std::printf("simulated %zu scenes with %zu billboards -> %s\n", specs.size(), truth.size(),
              out.string().c_str());
  return kExitOk;
}

int cmd_report(const Flags& flags, const ReportArgs& a) {
  const PipelineConfig cfg = resolve_config(flags);
  if (!a.depth_report && !a.match_report) {
    throw Error(ErrorCode::kConfig, "report needs --depth-report and/or --match-report");
  }
  std::optional<fs::path> depth_path, match_path;
  if (a.depth_report) depth_path = require_path(fs::path(*a.depth_report), "--depth-report");
  if (a.match_report) match_path = require_path(fs::path(*a.match_report), "--match-report");
  const fs::path& out = require_out(cfg.out);

  auto parse = [](const fs::path& p) {
    try {
      return nlohmann::json::parse(read_text(p));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormat, p.string() + ": " + e.what());
    }
  };

  std::string md = "# mapcore report\n\n";
  if (auto ts = report_timestamp(cfg.no_timestamp)) md += "Generated " + *ts + "\n\n";
  std::optional<CoordErrorTable> coords;
  if (depth_path) {
    const auto doc = parse(*depth_path);
    const ErrorTable table = error_table_from_json(doc);
    md += "## Depth error\n\n";
    md += std::to_string(table.images) + " images, " + doc.value("pooling", "pixel") +
          " pooling, bins by true depth.\n\n";
    md += error_table_markdown(table);
  }
  if (match_path) {
    const auto doc = parse(*match_path);
    MatchResult m;
    try {
      for (const auto& p : doc.at("pairs")) {
        MatchPair pair;
        pair.prediction_id = p.at("prediction_id").get<std::string>();
        pair.reference_id = p.at("reference_id").get<std::string>();
        pair.distance_m = p.at("distance_m").get<double>();
        pair.estimated_distance_m = p.at("estimated_distance_m").get<double>();
        if (p.contains("true_camera_distance_m")) {
          pair.true_camera_distance_m = p["true_camera_distance_m"].get<double>();
        }
        m.pairs.push_back(std::move(pair));
      }
      const auto& s = doc.at("summary");
      md += "## Object localisation\n\n";
      md += "| predictions | references | matched | found fraction | mean error (m) | median error (m) |\n";
      md += "|---:|---:|---:|---:|---:|---:|\n";
      char row[256];
      std::snprintf(row, sizeof row, "| %zu | %zu | %zu | %.4f | %.3f | %.3f |\n\n",
                    s.at("predictions").get<std::size_t>(), s.at("references").get<std::size_t>(),
                    s.at("matched").get<std::size_t>(), s.at("found_fraction").get<double>(),
                    s.at("mean_distance_m").get<double>(), s.at("median_distance_m").get<double>());
      md += row;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormat, match_path->string() + ": " + e.what());
    }
    coords = coord_error_stats(m, cfg.intervals);
    md += coord_table_markdown(*coords, "Coordinate error by camera distance (m)");
  }

  ensure_dir(out);
  if (a.svg && coords) {
    write_text(out / "coord_errors.svg",
               coord_boxplot_svg(*coords, "Coordinate error by camera distance"));
    md += "![coordinate error box plot](coord_errors.svg)\n";
  }
  write_text(out / "report.md", md);
  std::printf("report -> %s\n", (out / "report.md").string().c_str());
  return kExitOk;
}

}  // namespace mapcore::cli
