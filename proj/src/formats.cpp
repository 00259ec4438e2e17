#include "mapcore/formats.hpp"

#include <fstream>
#include <sstream>

#include "mapcore/error.hpp"
#include "text_util.hpp"

namespace mapcore {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, where + ": " + e.what());
  }
}

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::kFormat, where + ": missing '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kFormat, where + ": field '" + std::string(key) + "' has the wrong type");
  }
}

Detection parse_detection(const json& j, const fs::path& base, const std::string& where) {
  Detection det;
  det.class_id = field<std::string>(j, "class", where);
  if (j.contains("score") && !j["score"].is_null()) det.score = field<double>(j, "score", where);
  if (j.contains("id")) det.id = field<std::string>(j, "id", where);
  const bool has_bbox = j.contains("bbox");
  const bool has_mask = j.contains("mask_path");
  if (has_bbox == has_mask) {
    throw Error(ErrorCode::kFormat, where + ": detection needs exactly one of bbox, mask_path");
  }
  if (has_bbox) {
    const auto v = field<std::vector<int>>(j, "bbox", where);
    if (v.size() != 4) throw Error(ErrorCode::kFormat, where + ": bbox needs 4 integers");
    det.shape = BBox{v[0], v[1], v[2], v[3]};
  } else {
    det.shape = load_mask(base / field<std::string>(j, "mask_path", where));
  }
  return det;
}

GeoPoint point_from(const json& coords, const std::string& where) {
  if (!coords.is_array() || coords.size() < 2 || !coords[0].is_number() ||
      !coords[1].is_number()) {
    throw Error(ErrorCode::kFormat, where + ": bad coordinates");
  }
  return {coords[1].get<double>(), coords[0].get<double>()};
}

ojson coords_of(const GeoPoint& p) { return ojson::array({p.lon, p.lat}); }

}  // namespace

std::vector<ImageDetections> load_detections(const fs::path& path) {
  std::istringstream in(read_text(path));
  const fs::path base = path.parent_path();
  std::vector<ImageDetections> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const json j = parse_json(line, where);
    ImageDetections img;
    img.image_id = field<std::string>(j, "image_id", where);
    const json dets = j.contains("detections") ? j["detections"] : json::array();
    if (!dets.is_array()) throw Error(ErrorCode::kFormat, where + ": detections must be a list");
    for (const auto& d : dets) img.detections.push_back(parse_detection(d, base, where));
    out.push_back(std::move(img));
  }
  return out;
}

std::string detections_line(const ImageDetections& img, const fs::path& base,
                            const std::string& mask_subdir) {
  ojson line;
  line["image_id"] = img.image_id;
  line["detections"] = ojson::array();
  for (std::size_t i = 0; i < img.detections.size(); ++i) {
    const Detection& d = img.detections[i];
    ojson jd;
    jd["class"] = d.class_id;
    if (!d.id.empty()) jd["id"] = d.id;
    if (const auto* b = std::get_if<BBox>(&d.shape)) {
      jd["bbox"] = ojson::array({b->x0, b->y0, b->x1, b->y1});
    } else {
      const std::string name = img.image_id + "_" + std::to_string(i) + ".png";
      fs::create_directories(base / mask_subdir);
      save_mask(std::get<BinaryMask>(d.shape), base / mask_subdir / name);
      jd["mask_path"] = (fs::path(mask_subdir) / name).generic_string();
    }
    if (d.score) jd["score"] = *d.score;
    line["detections"].push_back(std::move(jd));
  }
  return line.dump() + "\n";
}

void save_detections(const std::vector<ImageDetections>& images, const fs::path& path,
                     const std::string& mask_subdir) {
  std::string text;
  for (const auto& img : images) text += detections_line(img, path.parent_path(), mask_subdir);
  write_text(path, text);
}

ojson records_to_geojson(const std::vector<ObjectRecord>& records) {
  ojson fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = ojson::array();
  for (const auto& r : records) {
    ojson f;
    f["type"] = "Feature";
    ojson point{{"type", "Point"}, {"coordinates", coords_of(r.point)}};
    if (r.extent) {
      ojson line{{"type", "LineString"},
                 {"coordinates", ojson::array({coords_of(r.extent->first),
                                               coords_of(r.extent->second)})}};
      f["geometry"] = {{"type", "GeometryCollection"},
                       {"geometries", ojson::array({point, line})}};
    } else {
      f["geometry"] = point;
    }
    ojson props;
    props["id"] = r.id;
    props["class"] = r.class_id;
    props["image_id"] = r.image_ids.empty() ? "" : r.image_ids.front();
    props["image_ids"] = r.image_ids;
    props["distance_m"] = r.distance_m;
    props["bearing_eff_deg"] = r.bearing_eff_deg;
    props["reliable"] = r.reliable;
    if (r.camera) {
      props["camera_lat"] = r.camera->lat;
      props["camera_lon"] = r.camera->lon;
    }
    if (r.score) props["score"] = *r.score;
    f["properties"] = std::move(props);
    fc["features"].push_back(std::move(f));
  }
  return fc;
}

std::vector<ObjectRecord> records_from_geojson(const json& doc) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw Error(ErrorCode::kFormat, "records must be a GeoJSON FeatureCollection");
  }
  std::vector<ObjectRecord> out;
  std::size_t index = 0;
  for (const auto& f : doc["features"]) {
    const std::string where = "feature " + std::to_string(index++);
    const json& geom = f.contains("geometry") ? f["geometry"] : json();
    const json& props = f.contains("properties") ? f["properties"] : json();
    ObjectRecord r;
    const std::string type = geom.is_object() ? geom.value("type", "") : "";
    if (type == "Point") {
      r.point = point_from(geom["coordinates"], where);
    } else if (type == "GeometryCollection" && geom.contains("geometries")) {
      for (const auto& g : geom["geometries"]) {
        const std::string t = g.value("type", "");
        if (t == "Point") r.point = point_from(g["coordinates"], where);
        if (t == "LineString" && g["coordinates"].size() == 2) {
          r.extent = GeoExtent{point_from(g["coordinates"][0], where),
                               point_from(g["coordinates"][1], where)};
        }
      }
    } else {
      throw Error(ErrorCode::kFormat, where + ": unsupported geometry");
    }
    r.id = field<std::string>(props, "id", where);
    r.class_id = field<std::string>(props, "class", where);
    if (props.contains("image_ids")) {
      r.image_ids = field<std::vector<std::string>>(props, "image_ids", where);
    } else if (props.contains("image_id")) {
      r.image_ids = {field<std::string>(props, "image_id", where)};
    }
    r.distance_m = props.contains("distance_m") ? field<double>(props, "distance_m", where) : 0.0;
    r.bearing_eff_deg =
        props.contains("bearing_eff_deg") ? field<double>(props, "bearing_eff_deg", where) : 0.0;
    r.reliable = props.contains("reliable") ? field<bool>(props, "reliable", where)
                                            : r.distance_m < kReliableDistanceM;
    if (props.contains("camera_lat") && props.contains("camera_lon")) {
      r.camera = GeoPoint{field<double>(props, "camera_lat", where),
                          field<double>(props, "camera_lon", where)};
    }
    if (props.contains("score") && !props["score"].is_null()) {
      r.score = field<double>(props, "score", where);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ObjectRecord> load_records(const fs::path& path) {
  try {
    return records_from_geojson(parse_json(read_text(path), path.string()));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kFormat) throw;
    throw Error(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

void save_records(const std::vector<ObjectRecord>& records, const fs::path& path) {
  write_text(path, records_to_geojson(records).dump(2) + "\n");
}

std::vector<Reference> load_references(const fs::path& path) {
  std::string ext = path.extension().string();
  std::vector<Reference> out;
  if (ext == ".csv" || ext == ".CSV") {
    std::istringstream in(read_text(path));
    std::string line;
    std::getline(in, line);
    const auto header = detail::split(detail::trim(line), ',');
    if (header.size() != 4 || detail::trim(header[0]) != "id" ||
        detail::trim(header[1]) != "class" || detail::trim(header[2]) != "lat" ||
        detail::trim(header[3]) != "lon") {
      throw Error(ErrorCode::kFormat, path.string() + ": header must be 'id,class,lat,lon'");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::trim(line).empty()) continue;
      const auto f = detail::split(line, ',');
      const auto lat = f.size() == 4 ? detail::parse_double(f[2]) : std::nullopt;
      const auto lon = f.size() == 4 ? detail::parse_double(f[3]) : std::nullopt;
      if (!lat || !lon) {
        throw Error(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) +
                                            ": expected id,class,lat,lon");
      }
      out.push_back({std::string(detail::trim(f[0])), std::string(detail::trim(f[1])),
                     {*lat, *lon}});
    }
    return out;
  }
  const json doc = parse_json(read_text(path), path.string());
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array()) {
    throw Error(ErrorCode::kFormat, path.string() + ": expected a GeoJSON FeatureCollection");
  }
  std::size_t index = 0;
  for (const auto& f : doc["features"]) {
    const std::string where = path.string() + ": feature " + std::to_string(index++);
    if (!f.contains("geometry") || f["geometry"].value("type", "") != "Point") {
      throw Error(ErrorCode::kFormat, where + ": references must be Point features");
    }
    const json& props = f.contains("properties") ? f["properties"] : json();
    Reference r;
    r.point = point_from(f["geometry"]["coordinates"], where);
    r.class_id = field<std::string>(props, "class", where);
    if (props.contains("id") && props["id"].is_number_integer()) {
      r.id = std::to_string(props["id"].get<long long>());
    } else {
      r.id = field<std::string>(props, "id", where);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void save_references_geojson(const std::vector<Reference>& refs, const fs::path& path) {
  ojson fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = ojson::array();
  for (const auto& r : refs) {
    ojson f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"}, {"coordinates", coords_of(r.point)}};
    f["properties"] = {{"id", r.id}, {"class", r.class_id}};
    fc["features"].push_back(std::move(f));
  }
  write_text(path, fc.dump(2) + "\n");
}

void save_references_csv(const std::vector<Reference>& refs, const fs::path& path) {
  std::string text = "id,class,lat,lon\n";
  for (const auto& r : refs) {
    text += r.id + "," + r.class_id + "," + detail::format_double(r.point.lat) + "," +
            detail::format_double(r.point.lon) + "\n";
  }
  write_text(path, text);
}

ojson match_to_json(const MatchResult& result) {
  ojson j;
  const MatchSummary& s = result.summary;
  j["summary"] = {{"predictions", s.predictions},
                  {"references", s.references},
                  {"matched", s.matched},
                  {"found_fraction", s.found_fraction},
                  {"mean_distance_m", s.mean_distance_m},
                  {"median_distance_m", s.median_distance_m}};
  ojson intervals = ojson::array();
  for (const auto& iv : s.by_interval) {
    intervals.push_back({{"interval", iv.label},
                         {"count", iv.count},
                         {"mean_m", iv.mean},
                         {"min_m", iv.min},
                         {"q1_m", iv.q1},
                         {"median_m", iv.median},
                         {"q3_m", iv.q3},
                         {"max_m", iv.max}});
  }
  j["summary"]["by_interval"] = std::move(intervals);
  j["pairs"] = ojson::array();
  for (const auto& p : result.pairs) {
    ojson jp{{"prediction_id", p.prediction_id},
             {"reference_id", p.reference_id},
             {"distance_m", p.distance_m},
             {"estimated_distance_m", p.estimated_distance_m}};
    if (p.true_camera_distance_m) jp["true_camera_distance_m"] = *p.true_camera_distance_m;
    j["pairs"].push_back(std::move(jp));
  }
  j["unmatched_predictions"] = result.unmatched_predictions;
  j["unmatched_references"] = result.unmatched_references;
  j["diagnostics"] = result.diagnostics;
  return j;
}

std::string match_pairs_csv(const MatchResult& result) {
  using detail::format_double;
  std::string text =
      "prediction_id,reference_id,distance_m,true_camera_distance_m,estimated_distance_m\n";
  for (const auto& p : result.pairs) {
    text += p.prediction_id + "," + p.reference_id + "," + format_double(p.distance_m) + "," +
            (p.true_camera_distance_m ? format_double(*p.true_camera_distance_m) : "") + "," +
            format_double(p.estimated_distance_m) + "\n";
  }
  return text;
}

}  // namespace mapcore
