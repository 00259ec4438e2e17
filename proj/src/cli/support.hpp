#pragma once

// Shared plumbing for the subcommands: flag binding, input resolution,
// structured diagnostics and the worker pool.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mapcore/config.hpp"
#include "mapcore/error.hpp"

namespace mapcore::cli {

/// Raw flag values. Only flags the user actually passed override the config file.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> meta, depth_dir, truth_dir, detections, labels_dir, cloud_dir, refs,
      out;
  std::optional<double> radius, max_dist, bearing_tol, earth_radius;
  std::optional<std::string> bins, intervals, valid_range, depth_format, depth_kind, mask_stat,
      pooling;
  std::optional<int> workers;
  bool no_timestamp = false;
};

/// Flag groups each subcommand opts into.
enum FlagSet : unsigned {
  kInputs = 1u << 0,     // --meta --depth-dir --detections --labels-dir --cloud-dir --truth-dir
  kRefs = 1u << 1,       // --refs
  kDedup = 1u << 2,      // --radius
  kMatch = 1u << 3,      // --max-dist --bearing-tol --intervals
  kDepth = 1u << 4,      // --valid-range --depth-format --depth-kind
  kEvalBins = 1u << 5,   // --bins --pooling
  kEarth = 1u << 6,      // --earth-radius
  kWorkers = 1u << 7,    // --workers
  kTimestamp = 1u << 8,  // --no-timestamp
  kMask = 1u << 9,       // --mask-stat
};

void add_flags(CLI::App& app, Flags& flags, unsigned sets);

/// Defaults, then the --config file, then explicit flags; validated.
PipelineConfig resolve_config(const Flags& flags);

/// Throws Error(kConfig) naming the flag when the path is unset and
/// Error(kIo) when it does not exist.
const std::filesystem::path& require_path(const std::optional<std::filesystem::path>& p,
                                          const char* flag);
const std::filesystem::path& require_out(const std::optional<std::filesystem::path>& p);

/// <dir>/<image_id>.<ext> for the configured depth format, falling back to
/// the other supported extension.
std::filesystem::path depth_file(const std::filesystem::path& dir, const std::string& image_id,
                                 DepthFormat preferred);
/// First existing <dir>/<stem><ext> over the extensions, or Error(kIo).
std::filesystem::path find_file(const std::filesystem::path& dir, const std::string& stem,
                                std::initializer_list<const char*> extensions);

/// One JSON object per line on stderr.
void diagnostic(const std::string& level, const std::string& code, const std::string& message,
                const std::vector<std::pair<std::string, std::string>>& extra = {});

/// Runs fn(i) for i in [0, n) on up to `workers` threads. If any call throws,
/// the exception of the smallest failing index is rethrown, so failures are
/// as deterministic as results.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// Creates the parent directory (file outputs) or the directory itself.
void ensure_parent(const std::filesystem::path& file);
void ensure_dir(const std::filesystem::path& dir);

}  // namespace mapcore::cli
