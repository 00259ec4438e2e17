#include "mapcore/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <toml.hpp>

#include "mapcore/error.hpp"
#include "text_util.hpp"

namespace mapcore {

namespace fs = std::filesystem;

namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw Error(ErrorCode::kConfig, std::string(name) + " must be a positive number");
  }
}

Error config_error(std::string_view key, std::string_view what) {
  return Error(ErrorCode::kConfig, "config key '" + std::string(key) + "': " + std::string(what));
}

double number_of(const toml::node& node, std::string_view key) {
  if (auto v = node.value<double>()) return *v;
  throw config_error(key, "expected a number");
}

std::string string_of(const toml::node& node, std::string_view key) {
  if (auto v = node.value<std::string>()) return *v;
  throw config_error(key, "expected a string");
}

std::vector<double> numbers_of(const toml::node& node, std::string_view key) {
  if (node.is_string()) return parse_edge_list(*node.value<std::string>());
  const toml::array* arr = node.as_array();
  if (!arr) throw config_error(key, "expected an array of numbers or a comma list");
  std::vector<double> out;
  for (const auto& el : *arr) out.push_back(number_of(el, key));
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  require_positive(radius_m, "radius");
  require_positive(max_dist_m, "max-dist");
  require_positive(bearing_tol_deg, "bearing-tol");
  require_positive(earth_radius_m, "earth-radius");
  if (workers < 1) throw Error(ErrorCode::kConfig, "workers must be at least 1");
  valid_range.validate();
  validate_edges(bins);
  validate_edges(intervals);
}

std::vector<double> parse_edge_list(std::string_view text) {
  std::vector<double> out;
  if (detail::trim(text).empty()) return out;
  for (auto part : detail::split(text, ',')) {
    const auto v = detail::parse_double(part);
    if (!v) throw Error(ErrorCode::kConfig, "'" + std::string(text) + "' is not a number list");
    out.push_back(*v);
  }
  return out;
}

ValidRange parse_valid_range(std::string_view text) {
  const auto v = parse_edge_list(text);
  if (v.size() != 2) {
    throw Error(ErrorCode::kConfig, "valid range must be MIN,MAX, got '" + std::string(text) + "'");
  }
  ValidRange r{v[0], v[1]};
  r.validate();
  return r;
}

void apply_config_text(PipelineConfig& cfg, std::string_view toml_text, const fs::path& base_dir) {
  toml::table tbl;
  try {
    tbl = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error at line " << e.source().begin.line << ": " << e.description();
    throw Error(ErrorCode::kConfig, msg.str());
  }

  auto path_of = [&](const toml::node& n, std::string_view key) {
    fs::path p = string_of(n, key);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };

  using Setter = std::function<void(const toml::node&, std::string_view)>;
  const std::map<std::string, Setter, std::less<>> setters{
      {"meta", [&](auto& n, auto k) { cfg.meta = path_of(n, k); }},
      {"depth-dir", [&](auto& n, auto k) { cfg.depth_dir = path_of(n, k); }},
      {"truth-dir", [&](auto& n, auto k) { cfg.truth_dir = path_of(n, k); }},
      {"detections", [&](auto& n, auto k) { cfg.detections = path_of(n, k); }},
      {"labels-dir", [&](auto& n, auto k) { cfg.labels_dir = path_of(n, k); }},
      {"cloud-dir", [&](auto& n, auto k) { cfg.cloud_dir = path_of(n, k); }},
      {"refs", [&](auto& n, auto k) { cfg.refs = path_of(n, k); }},
      {"out", [&](auto& n, auto k) { cfg.out = path_of(n, k); }},
      {"radius", [&](auto& n, auto k) { cfg.radius_m = number_of(n, k); }},
      {"max-dist", [&](auto& n, auto k) { cfg.max_dist_m = number_of(n, k); }},
      {"bearing-tol", [&](auto& n, auto k) { cfg.bearing_tol_deg = number_of(n, k); }},
      {"earth-radius", [&](auto& n, auto k) { cfg.earth_radius_m = number_of(n, k); }},
      {"bins", [&](auto& n, auto k) { cfg.bins = numbers_of(n, k); }},
      {"intervals", [&](auto& n, auto k) { cfg.intervals = numbers_of(n, k); }},
      {"valid-range",
       [&](auto& n, auto k) {
         const auto v = numbers_of(n, k);
         if (v.size() != 2) throw config_error(k, "expected [MIN, MAX]");
         cfg.valid_range = ValidRange{v[0], v[1]};
       }},
      {"workers",
       [&](auto& n, auto k) {
         const auto v = n.template value<std::int64_t>();
         if (!v || !n.is_integer()) throw config_error(k, "expected an integer");
         cfg.workers = static_cast<int>(*v);
       }},
      {"no-timestamp",
       [&](auto& n, auto k) {
         if (!n.is_boolean()) throw config_error(k, "expected true or false");
         cfg.no_timestamp = *n.template value<bool>();
       }},
      {"depth-format",
       [&](auto& n, auto k) { cfg.depth_format = depth_format_from_string(string_of(n, k)); }},
      {"depth-kind",
       [&](auto& n, auto k) { cfg.depth_kind = depth_kind_from_string(string_of(n, k)); }},
      {"mask-stat",
       [&](auto& n, auto k) {
         const std::string s = string_of(n, k);
         if (s == "mean") cfg.mask_statistic = MaskDepthStatistic::kMean;
         else if (s == "median") cfg.mask_statistic = MaskDepthStatistic::kMedian;
         else throw config_error(k, "expected mean or median");
       }},
      {"pooling",
       [&](auto& n, auto k) {
         const std::string s = string_of(n, k);
         if (s == "pixel") cfg.pooling = Pooling::kPixel;
         else if (s == "image") cfg.pooling = Pooling::kImage;
         else throw config_error(k, "expected pixel or image");
       }},
  };

  for (const auto& [key, node] : tbl) {
    const auto it = setters.find(key.str());
    if (it == setters.end()) throw config_error(key.str(), "unknown key");
    it->second(node, key.str());
  }
}

void apply_config_file(PipelineConfig& cfg, const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    apply_config_text(cfg, ss.str(), path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace mapcore
