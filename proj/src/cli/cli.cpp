#include "cli/cli.hpp"

#include <cstdlib>
#include <filesystem>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "cli/commands.hpp"

namespace mapcore::cli {

namespace {

// Logs go to stderr so stdout stays machine-readable. MAPCORE_LOG takes
// spdlog level names (trace, debug, info, warn, err, critical, off).
void setup_logging() {
  static const bool once = [] {
    auto logger = spdlog::stderr_logger_mt("mapcore");
    spdlog::set_default_logger(logger);
    return true;
  }();
  (void)once;
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("MAPCORE_LOG")) {
    level = spdlog::level::from_str(env);
  }
  spdlog::set_level(level);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  setup_logging();

  CLI::App app{"mapcore: geolocate urban objects from street-view images and metric depth"};
  app.name(args.empty() ? "mapcore" : std::filesystem::path(args[0]).filename().string());
  app.require_subcommand(1);

  Flags locate_f, eval_f, dedup_f, match_f, sim_f, report_f;
  std::string dedup_input, match_input;
  bool strict = false, database = false;
  SimulateArgs sim;
  ReportArgs rep;

  auto* locate = app.add_subcommand("locate", "Geolocate detections into GeoJSON records");
  add_flags(*locate, locate_f, kInputs | kDepth | kMask | kEarth | kWorkers);

  auto* eval = app.add_subcommand("eval-depth", "Depth error table against LiDAR or true depth");
  add_flags(*eval, eval_f, kInputs | kDepth | kEvalBins | kWorkers | kTimestamp);

  auto* dd = app.add_subcommand("dedup", "Merge same-class records within a radius");
  add_flags(*dd, dedup_f, kDedup | kEarth);
  dd->add_option("input", dedup_input, "Records GeoJSON")->required();
  dd->add_flag("--strict", strict, "Complete linkage instead of transitive merging");

  auto* match = app.add_subcommand("match", "Match records against annotations or a database");
  add_flags(*match, match_f, kRefs | kMatch | kEarth | kTimestamp);
  match->add_option("input", match_input, "Records GeoJSON")->required();
  match->add_flag("--database", database, "Require bearing agreement from the record's camera");

  auto* simulate = app.add_subcommand("simulate", "Write a synthetic billboard dataset");
  add_flags(*simulate, sim_f, kDepth | kEarth | kWorkers);
  simulate->add_option("--scenes", sim.scenes, "Number of images")->capture_default_str();
  simulate->add_option("--billboards", sim.billboards, "Billboards per image")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Base random seed")->capture_default_str();
  simulate->add_option("--noise", sim.noise, "Multiplicative depth noise sigma")->capture_default_str();
  simulate->add_option("--ray-model", sim.ray_model, "angular or pinhole")->capture_default_str();
  simulate->add_option("--width", sim.width, "Image width in pixels")->capture_default_str();
  simulate->add_option("--height", sim.height, "Image height in pixels")->capture_default_str();
  simulate->add_option("--focal", sim.focal, "Focal length in pixels")->capture_default_str();
  simulate->add_option("--cloud-stride", sim.cloud_stride, "Cloud sampling stride")->capture_default_str();
  simulate->add_option("--near", sim.near_m, "Minimum billboard distance (m)")->capture_default_str();
  simulate->add_option("--far", sim.far_m, "Maximum billboard distance (m)")->capture_default_str();
  simulate->add_option("--camera-height", sim.camera_height_m, "Camera height (m)")->capture_default_str();

  auto* report = app.add_subcommand("report", "Markdown summary with optional SVG box plot");
  add_flags(*report, report_f, kMatch | kTimestamp);
  report->add_option("--depth-report", rep.depth_report, "depth_errors.json from eval-depth");
  report->add_option("--match-report", rep.match_report, "match.json from match");
  report->add_flag("--svg", rep.svg, "Also write coord_errors.svg");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*locate) return cmd_locate(locate_f);
    if (*eval) return cmd_eval_depth(eval_f);
    if (*dd) return cmd_dedup(dedup_f, dedup_input, strict);
    if (*match) return cmd_match(match_f, match_input, database);
    if (*simulate) return cmd_simulate(sim_f, sim);
    if (*report) return cmd_report(report_f, rep);
  } catch (const Error& e) {
    diagnostic("error", std::string(to_string(e.code())), e.what());
    return e.code() == ErrorCode::kIo ? kExitIo : kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    diagnostic("error", "io", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    diagnostic("error", "internal", e.what());
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace mapcore::cli
