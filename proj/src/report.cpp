#include "mapcore/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include "mapcore/error.hpp"
#include "text_util.hpp"

namespace mapcore {

using ojson = nlohmann::ordered_json;
using detail::format_double;

namespace {

std::string group_name(std::size_t row) {
  return row == ErrorReport::kTotalRow ? "total"
                                       : std::string(to_string(kEvaluatedGroups[row]));
}

bool row_shown(const ErrorTable& t, std::size_t row) {
  return row == ErrorReport::kTotalRow || t.has_semantics;
}

std::vector<std::string> column_labels(const ErrorTable& t) {
  auto labels = interval_labels(t.edges);
  labels.push_back("total");
  return labels;
}

// Fixed-point text for Markdown cells; JSON and CSV keep full precision.
std::string fixed(double v, int digits) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> error_table_rows() {
  std::vector<std::string> rows;
  for (std::size_t r = 0; r <= ErrorReport::kTotalRow; ++r) rows.push_back(group_name(r));
  return rows;
}

ojson error_table_json(const ErrorTable& table, Pooling pooling, std::size_t excluded_pixels) {
  ojson j;
  j["pooling"] = pooling == Pooling::kPixel ? "pixel" : "image";
  j["images"] = table.images;
  j["semantic_groups"] = table.has_semantics;
  j["excluded_pixels"] = excluded_pixels;
  j["bin_edges_m"] = table.edges;
  const auto labels = column_labels(table);
  j["bins"] = labels;
  j["rows"] = ojson::array();
  for (std::size_t r = 0; r < table.cells.size(); ++r) {
    if (!row_shown(table, r)) continue;
    ojson row{{"group", group_name(r)}, {"cells", ojson::array()}};
    for (std::size_t c = 0; c < table.cells[r].size(); ++c) {
      const CellStats& s = table.cells[r][c];
      row["cells"].push_back({{"bin", labels[c]},
                              {"count", s.count},
                              {"mae_m", s.mae},
                              {"are", s.are},
                              {"are_median", s.are_median}});
    }
    j["rows"].push_back(std::move(row));
  }
  return j;
}

ErrorTable error_table_from_json(const nlohmann::json& doc) {
  try {
    ErrorTable t;
    t.edges = doc.at("bin_edges_m").get<std::vector<double>>();
    validate_edges(t.edges);
    t.has_semantics = doc.at("semantic_groups").get<bool>();
    t.images = doc.at("images").get<std::size_t>();
    const std::size_t columns = t.edges.size() + 2;
    t.cells.assign(ErrorReport::kTotalRow + 1, std::vector<CellStats>(columns));
    const auto names = error_table_rows();
    for (const auto& row : doc.at("rows")) {
      const auto name = row.at("group").get<std::string>();
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw Error(ErrorCode::kFormat, "unknown group '" + name + "'");
      const auto& cells = row.at("cells");
      if (cells.size() != columns) throw Error(ErrorCode::kFormat, "row '" + name + "' width");
      auto& out = t.cells[static_cast<std::size_t>(it - names.begin())];
      for (std::size_t c = 0; c < columns; ++c) {
        out[c].count = cells[c].at("count").get<std::size_t>();
        out[c].mae = cells[c].at("mae_m").get<double>();
        out[c].are = cells[c].at("are").get<double>();
        out[c].are_median = cells[c].at("are_median").get<double>();
      }
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("depth error table: ") + e.what());
  }
}

std::string error_table_csv(const ErrorTable& table) {
  std::string out = "group,bin,count,mae_m,are,are_median\n";
  const auto labels = column_labels(table);
  for (std::size_t r = 0; r < table.cells.size(); ++r) {
    if (!row_shown(table, r)) continue;
    for (std::size_t c = 0; c < table.cells[r].size(); ++c) {
      const CellStats& s = table.cells[r][c];
      out += group_name(r) + "," + labels[c] + "," + std::to_string(s.count) + "," +
             format_double(s.mae) + "," + format_double(s.are) + "," +
             format_double(s.are_median) + "\n";
    }
  }
  return out;
}

std::string error_table_markdown(const ErrorTable& table) {
  const auto labels = column_labels(table);
  std::string out;
  auto emit = [&](const std::string& title, auto value) {
    out += "### " + title + "\n\n| group |";
    for (const auto& l : labels) out += " " + l + " |";
    out += "\n|---|";
    for (std::size_t i = 0; i < labels.size(); ++i) out += "---:|";
    out += "\n";
    for (std::size_t r = 0; r < table.cells.size(); ++r) {
      if (!row_shown(table, r)) continue;
      out += "| " + group_name(r) + " |";
      for (const auto& s : table.cells[r]) {
        out += " " + (s.count == 0 ? std::string("-") : value(s)) + " |";
      }
      out += "\n";
    }
    out += "\n";
  };
  emit("MAE (m)", [](const CellStats& s) { return fixed(s.mae, 3); });
  emit("ARE", [](const CellStats& s) { return fixed(s.are, 4); });
  emit("Pixels", [](const CellStats& s) { return std::to_string(s.count); });
  return out;
}

ojson coord_table_json(const CoordErrorTable& table) {
  auto stat = [](const IntervalStat& s) {
    return ojson{{"interval", s.label}, {"count", s.count}, {"mean_m", s.mean},
                 {"min_m", s.min},      {"q1_m", s.q1},       {"median_m", s.median},
                 {"q3_m", s.q3},        {"max_m", s.max}};
  };
  ojson j;
  j["count"] = table.count;
  j["mean_m"] = table.mean;
  j["overall"] = stat(table.overall);
  j["intervals"] = ojson::array();
  for (const auto& s : table.intervals) j["intervals"].push_back(stat(s));
  return j;
}

std::string coord_table_markdown(const CoordErrorTable& table, const std::string& title) {
  std::string out = "### " + title + "\n\n";
  out += "| interval | count | mean (m) | q1 | median | q3 | max |\n";
  out += "|---|---:|---:|---:|---:|---:|---:|\n";
  auto row = [&](const IntervalStat& s) {
    out += "| " + s.label + " | " + std::to_string(s.count) + " | ";
    if (s.count == 0) {
      out += "- | - | - | - | - |\n";
      return;
    }
    out += fixed(s.mean, 3) + " | " + fixed(s.q1, 3) + " | " + fixed(s.median, 3) + " | " +
           fixed(s.q3, 3) + " | " + fixed(s.max, 3) + " |\n";
  };
  for (const auto& s : table.intervals) row(s);
  row(table.overall);
  return out + "\n";
}

std::string coord_boxplot_svg(const CoordErrorTable& table, const std::string& title) {
  constexpr double kWidth = 640, kHeight = 360, kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;
  double top = 0.0;
  for (const auto& s : table.intervals) {
    if (s.count > 0) top = std::max(top, s.max);
  }
  if (top <= 0.0) top = 1.0;
  // Round the axis up to 1, 2 or 5 times a power of ten.
  const double mag = std::pow(10.0, std::floor(std::log10(top)));
  double axis = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= top) {
      axis = m * mag;
      break;
    }
  }
  const double plot_h = kHeight - kTop - kBottom;
  const double plot_w = kWidth - kLeft - kRight;
  auto y_of = [&](double v) { return format_double(std::round((kTop + plot_h * (1.0 - v / axis)) * 100) / 100); };
  auto num = [](double v) { return format_double(std::round(v * 100) / 100); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                    "\" height=\"" + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
         xml_escape(title) + "</text>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) +
         "\" y2=\"" + num(kTop + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" +
         num(kLeft + plot_w) + "\" y2=\"" + num(kTop + plot_h) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = axis * i / 4.0;
    svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + y_of(v) +
           "\" text-anchor=\"end\" dominant-baseline=\"middle\">" + format_double(v) + "</text>\n";
  }
  svg += "<text x=\"15\" y=\"" + num(kTop + plot_h / 2) +
         "\" transform=\"rotate(-90 15 " + num(kTop + plot_h / 2) +
         ")\" text-anchor=\"middle\">error (m)</text>\n";

  const double slot = plot_w / std::max<std::size_t>(table.intervals.size(), 1);
  for (std::size_t i = 0; i < table.intervals.size(); ++i) {
    const IntervalStat& s = table.intervals[i];
    const double cx = kLeft + slot * (i + 0.5);
    const double half = slot * 0.25;
    svg += "<text x=\"" + num(cx) + "\" y=\"" + num(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + xml_escape(s.label) + " m (n=" + std::to_string(s.count) +
           ")</text>\n";
    if (s.count == 0) continue;
    svg += "<line x1=\"" + num(cx) + "\" y1=\"" + y_of(s.min) + "\" x2=\"" + num(cx) +
           "\" y2=\"" + y_of(s.max) + "\" stroke=\"black\"/>\n";
    svg += "<rect x=\"" + num(cx - half) + "\" y=\"" + y_of(s.q3) + "\" width=\"" +
           num(2 * half) + "\" height=\"" +
           num(std::max(0.0, (s.q3 - s.q1) / axis * plot_h)) +
           "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(cx - half) + "\" y1=\"" + y_of(s.median) + "\" x2=\"" +
           num(cx + half) + "\" y2=\"" + y_of(s.median) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::optional<std::string> report_timestamp(bool suppressed) {
  if (suppressed) return std::nullopt;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

}  // namespace mapcore
