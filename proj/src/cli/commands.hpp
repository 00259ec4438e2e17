#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cli/cli.hpp"
#include "cli/support.hpp"

namespace mapcore::cli {

struct SimulateArgs {
  int scenes = 1;
  int billboards = 10;
  std::uint64_t seed = 1;
  double noise = 0.0;
  std::string ray_model = "angular";
  int width = 1920;
  int height = 1080;
  double focal = 960.0;
  int cloud_stride = 4;
  double near_m = 5.0;
  double far_m = 30.0;
  double camera_height_m = 2.5;
};

struct ReportArgs {
  std::optional<std::string> depth_report;
  std::optional<std::string> match_report;
  bool svg = false;
};

int cmd_locate(const Flags& flags);
int cmd_eval_depth(const Flags& flags);
int cmd_dedup(const Flags& flags, const std::string& input, bool strict);
int cmd_match(const Flags& flags, const std::string& input, bool database);
int cmd_simulate(const Flags& flags, const SimulateArgs& args);
int cmd_report(const Flags& flags, const ReportArgs& args);

}  // namespace mapcore::cli
