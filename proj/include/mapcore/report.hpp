#pragma once

// Serialisation of evaluation results: depth-error tables as JSON / CSV /
// Markdown, coordinate-error tables and SVG box plots.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mapcore/dedup_match.hpp"
#include "mapcore/eval.hpp"

namespace mapcore {

/// Row names of an ErrorTable: the evaluated groups followed by "total".
std::vector<std::string> error_table_rows();

/// {"pooling", "images", "semantic_groups", "excluded_pixels", "bins",
///  "rows": [{"group", "cells": [{"bin", "count", "mae_m", "are",
///  "are_median"}]}]}. Rows without semantics are omitted except "total".
nlohmann::ordered_json error_table_json(const ErrorTable& table, Pooling pooling,
                                        std::size_t excluded_pixels = 0);
ErrorTable error_table_from_json(const nlohmann::json& doc);
/// group,bin,count,mae_m,are,are_median
std::string error_table_csv(const ErrorTable& table);
/// Markdown tables for MAE, ARE and pixel counts, groups as rows and bins as columns.
std::string error_table_markdown(const ErrorTable& table);

nlohmann::ordered_json coord_table_json(const CoordErrorTable& table);
/// One row per interval: count, mean and quartiles.
std::string coord_table_markdown(const CoordErrorTable& table, const std::string& title);

/// Box-and-whisker chart of per-interval errors (min, q1, median, q3, max).
std::string coord_boxplot_svg(const CoordErrorTable& table, const std::string& title);

/// Current UTC time as ISO-8601, or nullopt when suppressed.
std::optional<std::string> report_timestamp(bool suppressed);

}  // namespace mapcore
