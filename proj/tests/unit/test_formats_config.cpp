#include <fstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mapcore/config.hpp"
#include "mapcore/formats.hpp"
#include "mapcore/report.hpp"
#include "test_util.hpp"

using namespace mapcore;
using nlohmann::json;
using testutil::TempDir;

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

ObjectRecord sample_record(bool with_extent) {
  ObjectRecord r;
  r.id = "img1_bb3";
  r.class_id = "206";
  r.point = {48.1371234567891, 11.5754321098765};
  r.image_ids = {"img1", "img7"};
  r.camera = GeoPoint{48.137, 11.575};
  r.bearing_eff_deg = 33.25;
  r.distance_m = 14.125;
  r.reliable = true;
  r.score = 0.875;
  if (with_extent) r.extent = GeoExtent{{48.1372, 11.5751}, {48.1373, 11.5752}};
  return r;
}

}  // namespace

TEST(Detections, RoundTripWithBoxesAndMasks) {
  TempDir dir;
  BinaryMask m(6, 4);
  m.set(1, 1);
  m.set(4, 3);
  std::vector<ImageDetections> images{
      {"a", {Detection{"sign", BBox{1, 2, 30, 40}, 0.5, "a0"}, Detection{"pole", m, std::nullopt, ""}}},
      {"b", {}},
  };
  save_detections(images, dir / "dets.jsonl");
  EXPECT_TRUE(std::filesystem::exists(dir / "masks" / "a_1.png"));
  const auto back = load_detections(dir / "dets.jsonl");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].image_id, "a");
  ASSERT_EQ(back[0].detections.size(), 2u);
  const auto& d0 = back[0].detections[0];
  EXPECT_EQ(d0.class_id, "sign");
  EXPECT_EQ(d0.id, "a0");
  ASSERT_TRUE(d0.score.has_value());
  EXPECT_EQ(*d0.score, 0.5);
  const BBox& b = std::get<BBox>(d0.shape);
  EXPECT_EQ(b.x0, 1);
  EXPECT_EQ(b.y1, 40);
  const auto& d1 = back[0].detections[1];
  EXPECT_FALSE(d1.score.has_value());
  EXPECT_EQ(std::get<BinaryMask>(d1.shape).bits, m.bits);
  EXPECT_TRUE(back[1].detections.empty());
}

TEST(Detections, HandWrittenLineWithRelativeMask) {
  TempDir dir;
  std::filesystem::create_directories(dir / "m");
  BinaryMask m(3, 3);
  m.set(2, 2);
  save_mask(m, dir / "m" / "x.png");
  write_file(dir / "d.jsonl",
             "{\"image_id\":\"i\",\"detections\":[{\"class\":\"205\",\"mask_path\":\"m/x.png\"}]}\n"
             "\n");
  const auto back = load_detections(dir / "d.jsonl");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(std::get<BinaryMask>(back[0].detections[0].shape).bits, m.bits);
}

TEST(Detections, MalformedInputIsAFormatError) {
  TempDir dir;
  const std::pair<const char*, const char*> cases[] = {
      {"notjson", "{oops"},
      {"noid", "{\"detections\":[]}"},
      {"both", "{\"image_id\":\"i\",\"detections\":[{\"class\":\"c\",\"bbox\":[0,0,1,1],\"mask_path\":\"x\"}]}"},
      {"neither", "{\"image_id\":\"i\",\"detections\":[{\"class\":\"c\"}]}"},
      {"short", "{\"image_id\":\"i\",\"detections\":[{\"class\":\"c\",\"bbox\":[0,0,1]}]}"},
      {"notlist", "{\"image_id\":\"i\",\"detections\":5}"},
  };
  for (const auto& [name, text] : cases) {
    write_file(dir / name, std::string(text) + "\n");
    EXPECT_MAPCORE_ERROR(load_detections(dir / name), ErrorCode::kFormat);
  }
  EXPECT_MAPCORE_ERROR(load_detections(dir / "missing.jsonl"), ErrorCode::kIo);
}

TEST(Records, GeoJsonRoundTripIsExact) {
  TempDir dir;
  ObjectRecord bare;
  bare.id = "x";
  bare.class_id = "pole";
  bare.point = {-33.5, 151.25};
  bare.image_ids = {"q"};
  bare.distance_m = 30.0;
  const std::vector<ObjectRecord> recs{sample_record(true), sample_record(false), bare};
  save_records(recs, dir / "r.geojson");
  const auto back = load_records(dir / "r.geojson");
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].id, recs[i].id);
    EXPECT_EQ(back[i].class_id, recs[i].class_id);
    EXPECT_EQ(back[i].point.lat, recs[i].point.lat);
    EXPECT_EQ(back[i].point.lon, recs[i].point.lon);
    EXPECT_EQ(back[i].image_ids, recs[i].image_ids);
    EXPECT_EQ(back[i].distance_m, recs[i].distance_m);
    EXPECT_EQ(back[i].bearing_eff_deg, recs[i].bearing_eff_deg);
    EXPECT_EQ(back[i].reliable, recs[i].reliable);
    EXPECT_EQ(back[i].score, recs[i].score);
    EXPECT_EQ(back[i].camera.has_value(), recs[i].camera.has_value());
    EXPECT_EQ(back[i].extent.has_value(), recs[i].extent.has_value());
  }
  EXPECT_EQ(back[0].extent->second.lon, 11.5752);
}

TEST(Records, GeoJsonShape) {
  const auto doc = records_to_geojson({sample_record(false), sample_record(true)});
  EXPECT_EQ(doc["type"], "FeatureCollection");
  const auto& f0 = doc["features"][0];
  EXPECT_EQ(f0["geometry"]["type"], "Point");
  // GeoJSON orders coordinates as lon, lat
  EXPECT_EQ(f0["geometry"]["coordinates"][0], 11.5754321098765);
  EXPECT_EQ(f0["properties"]["class"], "206");
  EXPECT_EQ(f0["properties"]["image_id"], "img1");
  EXPECT_EQ(f0["properties"]["reliable"], true);
  const auto& f1 = doc["features"][1];
  EXPECT_EQ(f1["geometry"]["type"], "GeometryCollection");
  EXPECT_EQ(f1["geometry"]["geometries"][1]["type"], "LineString");
}

TEST(Records, RejectsOtherDocuments) {
  EXPECT_MAPCORE_ERROR(records_from_geojson(json::parse("{\"type\":\"Feature\"}")), ErrorCode::kFormat);
  EXPECT_MAPCORE_ERROR(
      records_from_geojson(json::parse(
          R"({"type":"FeatureCollection","features":[{"type":"Feature","geometry":{"type":"Polygon","coordinates":[]},"properties":{"id":"a","class":"c"}}]})")),
      ErrorCode::kFormat);
}

TEST(References, CsvAndGeoJsonRoundTrip) {
  TempDir dir;
  const std::vector<Reference> refs{{"r1", "206", {48.1, 11.5}}, {"r2", "205", {48.2000000001, 11.6}}};
  save_references_csv(refs, dir / "r.csv");
  save_references_geojson(refs, dir / "r.geojson");
  for (const auto& p : {dir / "r.csv", dir / "r.geojson"}) {
    const auto back = load_references(p);
    ASSERT_EQ(back.size(), 2u) << p;
    EXPECT_EQ(back[1].id, "r2");
    EXPECT_EQ(back[1].class_id, "205");
    EXPECT_EQ(back[1].point.lat, 48.2000000001);
    EXPECT_EQ(back[1].point.lon, 11.6);
  }
}

TEST(References, IntegerIdsAndErrors) {
  TempDir dir;
  write_file(dir / "a.geojson",
             R"({"type":"FeatureCollection","features":[{"type":"Feature","geometry":{"type":"Point","coordinates":[11.0,48.0]},"properties":{"id":17,"class":"pole"}}]})");
  const auto refs = load_references(dir / "a.geojson");
  ASSERT_EQ(refs.size(), 1u);
  EXPECT_EQ(refs[0].id, "17");
  EXPECT_EQ(refs[0].point.lat, 48.0);
  write_file(dir / "bad.csv", "name,lat,lon\nx,1,2\n");
  EXPECT_MAPCORE_ERROR(load_references(dir / "bad.csv"), ErrorCode::kFormat);
  write_file(dir / "bad2.csv", "id,class,lat,lon\nx,c,north,2\n");
  EXPECT_MAPCORE_ERROR(load_references(dir / "bad2.csv"), ErrorCode::kFormat);
}

TEST(MatchOutput, PairsCsv) {
  MatchResult m;
  m.pairs.push_back({"p", "r", 1.5, 12.0, 11.0});
  m.pairs.push_back({"q", "s", 0.25, std::nullopt, 7.0});
  const std::string csv = match_pairs_csv(m);
  EXPECT_EQ(csv,
            "prediction_id,reference_id,distance_m,true_camera_distance_m,estimated_distance_m\n"
            "p,r,1.5,12,11\n"
            "q,s,0.25,,7\n");
  const auto j = match_to_json(m);
  EXPECT_EQ(j["pairs"].size(), 2u);
  EXPECT_FALSE(j["pairs"][1].contains("true_camera_distance_m"));
}

TEST(Config, DefaultsAreTheProtocolConstants) {
  const PipelineConfig c;
  EXPECT_EQ(c.radius_m, 3.0);
  EXPECT_EQ(c.max_dist_m, 10.0);
  EXPECT_EQ(c.bearing_tol_deg, 5.0);
  EXPECT_EQ(c.bins, (std::vector<double>{5, 10, 20}));
  EXPECT_EQ(c.intervals, (std::vector<double>{10, 20}));
  EXPECT_EQ(kDamageIntervalEdges, (std::vector<double>{2, 4, 6, 8, 10}));
  EXPECT_EQ(c.earth_radius_m, 6371008.8);
  EXPECT_EQ(c.valid_range.min, 0.1);
  EXPECT_EQ(c.valid_range.max, 200.0);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, TomlKeysAndRelativePaths) {
  PipelineConfig c;
  apply_config_text(c, R"(
meta = "meta.csv"
depth-dir = "/abs/depth"
radius = 2.5
max-dist = 8
bins = [2, 4.5, 9]
intervals = "10,20,30"
valid-range = "0.5,80"
workers = 4
no-timestamp = true
depth-format = "raw"
depth-kind = "planar"
mask-stat = "median"
pooling = "image"
)",
                    "/data/run");
  EXPECT_EQ(*c.meta, std::filesystem::path("/data/run/meta.csv"));
  EXPECT_EQ(*c.depth_dir, std::filesystem::path("/abs/depth"));
  EXPECT_EQ(c.radius_m, 2.5);
  EXPECT_EQ(c.max_dist_m, 8.0);
  EXPECT_EQ(c.bins, (std::vector<double>{2, 4.5, 9}));
  EXPECT_EQ(c.intervals, (std::vector<double>{10, 20, 30}));
  EXPECT_EQ(c.valid_range.min, 0.5);
  EXPECT_EQ(c.valid_range.max, 80.0);
  EXPECT_EQ(c.workers, 4);
  EXPECT_TRUE(c.no_timestamp);
  EXPECT_EQ(c.depth_format, DepthFormat::kRaw);
  EXPECT_EQ(c.depth_kind, DepthKind::kPlanar);
  EXPECT_EQ(c.mask_statistic, MaskDepthStatistic::kMedian);
  EXPECT_EQ(c.pooling, Pooling::kImage);
  EXPECT_EQ(c.bearing_tol_deg, 5.0);  // untouched
}

TEST(Config, BadTomlIsAConfigError) {
  const char* cases[] = {
      "radius = \"three\"",  "unknown-key = 1",     "workers = 2.5",   "bins = [1, \"x\"]",
      "valid-range = [1]",   "mask-stat = \"mode\"", "radius = ",       "no-timestamp = 1",
      "pooling = \"none\"",  "depth-kind = \"z\"",
  };
  for (const char* text : cases) {
    PipelineConfig c;
    EXPECT_MAPCORE_ERROR(apply_config_text(c, text), ErrorCode::kConfig);
  }
}

TEST(Config, ValidationAndFiles) {
  PipelineConfig c;
  c.radius_m = 0;
  EXPECT_MAPCORE_ERROR(c.validate(), ErrorCode::kConfig);
  c = {};
  c.bins = {10, 5};
  EXPECT_MAPCORE_ERROR(c.validate(), ErrorCode::kConfig);
  c = {};
  c.valid_range = {5, 1};
  EXPECT_MAPCORE_ERROR(c.validate(), ErrorCode::kConfig);
  c = {};
  c.workers = 0;
  EXPECT_MAPCORE_ERROR(c.validate(), ErrorCode::kConfig);

  TempDir dir;
  EXPECT_MAPCORE_ERROR(apply_config_file(c, dir / "nope.toml"), ErrorCode::kIo);
  write_file(dir / "c.toml", "refs = \"truth.geojson\"\nbogus = 1\n");
  try {
    apply_config_file(c, dir / "c.toml");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_NE(std::string(e.what()).find("c.toml"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
  write_file(dir / "ok.toml", "refs = \"truth.geojson\"\n");
  apply_config_file(c, dir / "ok.toml");
  EXPECT_EQ(*c.refs, dir / "truth.geojson");
}

TEST(Config, ParseHelpers) {
  EXPECT_EQ(parse_edge_list("5, 10,20"), (std::vector<double>{5, 10, 20}));
  EXPECT_TRUE(parse_edge_list("").empty());
  EXPECT_MAPCORE_ERROR(parse_edge_list("5,,10"), ErrorCode::kConfig);
  EXPECT_MAPCORE_ERROR(parse_valid_range("1"), ErrorCode::kConfig);
  EXPECT_MAPCORE_ERROR(parse_valid_range("10,1"), ErrorCode::kConfig);
  EXPECT_EQ(parse_valid_range("0.2,150").max, 150.0);
}

TEST(Report, ErrorTableJsonRoundTrip) {
  std::vector<float> p{8, 12, 3, 22, 7}, t{10, 10, 2.5, 25, 6};
  const SemanticMap sem{5, 1, {train_id::kRoad, train_id::kPole, train_id::kVegetation, train_id::kWall, train_id::kCar}};
  const ErrorReport r = depth_errors(DepthMap(5, 1, p), DepthMap(5, 1, t), &sem);
  const ErrorTable table = tabulate(r);
  const auto j = error_table_json(table, Pooling::kPixel, r.excluded_pixels());
  EXPECT_EQ(j["excluded_pixels"], 1);
  EXPECT_EQ(j["rows"].size(), 5u);
  const ErrorTable back = error_table_from_json(json::parse(j.dump()));
  EXPECT_EQ(back.edges, table.edges);
  EXPECT_EQ(back.has_semantics, true);
  for (std::size_t row = 0; row < table.cells.size(); ++row) {
    for (std::size_t c = 0; c < table.cells[row].size(); ++c) {
      EXPECT_EQ(back.cells[row][c].count, table.cells[row][c].count);
      EXPECT_EQ(back.cells[row][c].mae, table.cells[row][c].mae);
      EXPECT_EQ(back.cells[row][c].are, table.cells[row][c].are);
    }
  }
}

TEST(Report, CsvAndMarkdownLayout) {
  const ErrorReport r = depth_errors(DepthMap(2, 1, {8, 12}), DepthMap(2, 1, {10, 10}));
  const ErrorTable t = tabulate(r);
  const std::string csv = error_table_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "group,bin,count,mae_m,are,are_median");
  EXPECT_NE(csv.find("total,5-10,0,"), std::string::npos);
  EXPECT_NE(csv.find("total,10-20,2,2,0.2,0.2"), std::string::npos);
  EXPECT_EQ(csv.find("flat"), std::string::npos);  // no semantic rows without labels
  const std::string md = error_table_markdown(t);
  EXPECT_NE(md.find("| total |"), std::string::npos);
  EXPECT_NE(md.find("### ARE"), std::string::npos);
}

TEST(Report, CoordTableAndSvg) {
  const std::vector<double> e{1, 2, 3}, d{5, 15, 25};
  const auto t = coord_error_stats(e, d, kSignIntervalEdges);
  const auto j = coord_table_json(t);
  EXPECT_EQ(j["intervals"].size(), 3u);
  EXPECT_EQ(j["mean_m"], 2.0);
  const std::string svg = coord_boxplot_svg(t, "errors <by> distance & bin");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("&lt;by&gt;"), std::string::npos);
  EXPECT_NE(svg.find("&amp;"), std::string::npos);
  EXPECT_NE(coord_table_markdown(t, "Signs").find("| 10-20 | 1 |"), std::string::npos);
  EXPECT_FALSE(report_timestamp(true).has_value());
  EXPECT_EQ(report_timestamp(false)->back(), 'Z');
}
