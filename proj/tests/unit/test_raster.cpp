#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "mapcore/formats.hpp"
#include "mapcore/raster.hpp"
#include "test_util.hpp"

using namespace mapcore;
using testutil::TempDir;

namespace {

DepthMap random_map(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> v(0.0f, 250.0f);
  std::vector<float> values(static_cast<std::size_t>(w) * h);
  for (auto& x : values) x = v(rng);
  values[0] = std::numeric_limits<float>::infinity();
  values[1] = std::numeric_limits<float>::quiet_NaN();
  return DepthMap(w, h, std::move(values));
}

bool bit_equal(const DepthMap& a, const DepthMap& b) {
  return a.width() == b.width() && a.height() == b.height() &&
         std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(float)) == 0;
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
}

}  // namespace

TEST(DepthMapTest, ValidityFollowsTheHalfOpenRange) {
  DepthMap dm(4, 1, {0.1f, 0.2f, 200.0f, 1e9f}, ValidRange{0.1, 200.0});
  // 0.1f is slightly above 0.1 as a double, so it counts as valid.
  EXPECT_EQ(dm.valid(0, 0), static_cast<double>(0.1f) > 0.1);
  EXPECT_TRUE(dm.valid(1, 0));
  EXPECT_TRUE(dm.valid(2, 0));
  EXPECT_FALSE(dm.valid(3, 0));
}

TEST(DepthMapTest, HugeValueIsInvalidUnderDefaultCap) {
  const DepthMap dm(1, 1, {1e9f});
  EXPECT_FALSE(dm.valid(0, 0));
  EXPECT_EQ(dm.invalid_count(), 1u);
}

TEST(DepthMapTest, NonFiniteAndNonPositiveAreInvalid) {
  const DepthMap dm(4, 1, {0.0f, -3.0f, std::numeric_limits<float>::infinity(),
                           std::numeric_limits<float>::quiet_NaN()});
  EXPECT_EQ(dm.invalid_count(), 4u);
}

TEST(DepthMapTest, InvalidCountShrinksAsRangeWidens) {
  const DepthMap dm = random_map(40, 30, 3);
  std::size_t previous = dm.with_range({5.0, 10.0}).invalid_count();
  for (ValidRange r : {ValidRange{4.0, 20.0}, ValidRange{1.0, 100.0}, ValidRange{0.5, 200.0},
                       ValidRange{0.0, 1000.0}}) {
    const std::size_t now = dm.with_range(r).invalid_count();
    EXPECT_LE(now, previous);
    previous = now;
  }
}

TEST(DepthMapTest, SizeMismatchIsRejected) {
  EXPECT_MAPCORE_ERROR(DepthMap(3, 2, std::vector<float>(5, 1.0f)), ErrorCode::kDimension);
}

TEST(DepthMapTest, BadRangeIsRejected) {
  EXPECT_MAPCORE_ERROR((ValidRange{5.0, 1.0}.validate()), ErrorCode::kConfig);
  EXPECT_MAPCORE_ERROR((ValidRange{-1.0, 1.0}.validate()), ErrorCode::kConfig);
}

TEST(DepthIo, TwoByTwoRoundTripsBitExactly) {
  TempDir dir;
  const DepthMap dm(2, 2, {1.0f, 2.0f, 3.0f, 4.0f});
  save_depth_pfm(dm, dir / "a.pfm");
  save_depth_raw(dm, dir / "a.f32");
  const DepthMap p = load_depth(dir / "a.pfm");
  const DepthMap r = load_depth(dir / "a.f32");
  EXPECT_TRUE(bit_equal(dm, p));
  EXPECT_TRUE(bit_equal(dm, r));
  EXPECT_EQ(p.at(1, 0), 2.0f);
  EXPECT_EQ(r.at(0, 1), 3.0f);
}

TEST(DepthIo, PfmIsStoredBottomRowFirst) {
  TempDir dir;
  save_depth_pfm(DepthMap(2, 2, {1.0f, 2.0f, 3.0f, 4.0f}), dir / "a.pfm");
  const std::string bytes = read_text(dir / "a.pfm");
  const std::string header = "Pf\n2 2\n-1.0\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  float first;
  std::memcpy(&first, bytes.data() + header.size(), 4);
  EXPECT_EQ(first, 3.0f);
}

TEST(DepthIo, RandomRastersAgreeAcrossFormats) {
  TempDir dir;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DepthMap dm = random_map(17 + static_cast<int>(seed), 9, seed);
    save_depth(dm, dir / "m.pfm", DepthFormat::kPfm);
    save_depth(dm, dir / "m.f32", DepthFormat::kRaw);
    const DepthMap a = load_depth(dir / "m.pfm");
    const DepthMap b = load_depth(dir / "m.f32");
    EXPECT_TRUE(bit_equal(a, b));
    EXPECT_TRUE(bit_equal(a, dm));
    EXPECT_EQ(a.invalid_count(), dm.invalid_count());
  }
}

TEST(DepthIo, BigEndianPfmIsAccepted) {
  TempDir dir;
  std::string bytes = "Pf\n2 1\n1.0\n";
  for (float v : {5.0f, 7.5f}) {
    unsigned char b[4];
    std::memcpy(b, &v, 4);
    for (int i = 3; i >= 0; --i) bytes.push_back(static_cast<char>(b[i]));
  }
  write_bytes(dir / "be.pfm", bytes);
  const DepthMap dm = load_depth(dir / "be.pfm");
  EXPECT_EQ(dm.at(0, 0), 5.0f);
  EXPECT_EQ(dm.at(1, 0), 7.5f);
}

TEST(DepthIo, SidecarCarriesKind) {
  TempDir dir;
  const DepthMap dm(2, 1, {3.0f, 4.0f}, {}, DepthKind::kPlanar);
  save_depth_raw(dm, dir / "p.f32");
  EXPECT_EQ(load_depth(dir / "p.f32").kind(), DepthKind::kPlanar);
  const auto side = nlohmann::json::parse(read_text(dir / "p.json"));
  EXPECT_EQ(side["width"], 2);
  EXPECT_EQ(side["height"], 1);
  EXPECT_EQ(side["unit"], "m");
  // PFM has no kind field; the caller supplies it.
  save_depth_pfm(dm, dir / "p.pfm");
  EXPECT_EQ(load_depth(dir / "p.pfm", {}, DepthKind::kPlanar).kind(), DepthKind::kPlanar);
}

TEST(DepthIo, MalformedInputsAreFormatErrors) {
  TempDir dir;
  write_bytes(dir / "bad.pfm", "P6\n2 2\n-1.0\n");
  EXPECT_MAPCORE_ERROR(load_depth(dir / "bad.pfm"), ErrorCode::kFormat);
  write_bytes(dir / "short.pfm", "Pf\n2 2\n-1.0\nabc");
  EXPECT_MAPCORE_ERROR(load_depth(dir / "short.pfm"), ErrorCode::kFormat);
  write_bytes(dir / "r.f32", std::string(12, '\0'));
  write_bytes(dir / "r.json", R"({"width": 2, "height": 2, "unit": "m"})");
  EXPECT_MAPCORE_ERROR(load_depth(dir / "r.f32"), ErrorCode::kFormat);
  write_bytes(dir / "u.f32", std::string(16, '\0'));
  write_bytes(dir / "u.json", R"({"width": 2, "height": 2, "unit": "mm"})");
  EXPECT_MAPCORE_ERROR(load_depth(dir / "u.f32"), ErrorCode::kFormat);
  EXPECT_MAPCORE_ERROR(load_depth(dir / "missing.pfm"), ErrorCode::kIo);
  write_bytes(dir / "x.tif", "");
  EXPECT_MAPCORE_ERROR(load_depth(dir / "x.tif"), ErrorCode::kFormat);
}

TEST(DepthKinds, PinholeConversionRoundTrips) {
  const Intrinsics k{100.0, 120.0, 20, 10, {}, {}};
  std::vector<float> v(200);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 5.0f + static_cast<float>(i % 7);
  const DepthMap planar(20, 10, v, {}, DepthKind::kPlanar);
  const DepthMap range = to_range(planar, k);
  EXPECT_EQ(range.kind(), DepthKind::kRange);
  const double factor = range_per_planar({0.0, 0.0}, k);
  EXPECT_NEAR(factor, std::sqrt(1.0 + 0.01 + 1.0 / 576.0), 1e-15);
  EXPECT_NEAR(range.at(0, 0), planar.at(0, 0) * factor, 1e-5);
  EXPECT_EQ(range.at(10, 5), planar.at(10, 5));  // principal point
  const DepthMap back = to_planar(range, k);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 20; ++x) EXPECT_NEAR(back.at(x, y), planar.at(x, y), 1e-5);
  }
  EXPECT_MAPCORE_ERROR(to_range(planar, Intrinsics{100.0, 100.0, 21, 10, {}, {}}),
                       ErrorCode::kDimension);
}

TEST(LabelIo, AllRoadImageLoadsAsRoad) {
  TempDir dir;
  SemanticMap m{5, 3, std::vector<std::uint8_t>(15, 0)};
  save_labels(m, dir / "l.png");
  const SemanticMap back = load_labels(dir / "l.png");
  ASSERT_EQ(back.width, 5);
  ASSERT_EQ(back.height, 3);
  for (auto v : back.labels) EXPECT_EQ(v, 0);
}

TEST(LabelIo, UnknownIdsBecomeVoid) {
  TempDir dir;
  SemanticMap m{4, 1, {0, 18, 19, 255}};
  save_labels(m, dir / "l.png");
  const SemanticMap back = load_labels(dir / "l.png");
  EXPECT_EQ(back.labels, (std::vector<std::uint8_t>{0, 18, kVoidLabel, kVoidLabel}));
}

TEST(LabelIo, NotAPngIsAFormatError) {
  TempDir dir;
  write_bytes(dir / "l.png", "not a png");
  EXPECT_MAPCORE_ERROR(load_labels(dir / "l.png"), ErrorCode::kFormat);
}

TEST(MaskIo, OneBitRoundTrip) {
  TempDir dir;
  BinaryMask m(13, 7);
  std::mt19937 rng(3);
  for (auto& b : m.bits) b = rng() & 1u;
  save_mask(m, dir / "m.png");
  const BinaryMask back = load_mask(dir / "m.png");
  EXPECT_EQ(back.width, 13);
  EXPECT_EQ(back.height, 7);
  EXPECT_EQ(back.bits, m.bits);
}

TEST(CloudIo, XyzRowOnTheOpticalAxis) {
  TempDir dir;
  write_bytes(dir / "c.xyz", "# comment\n0 0 10\n\n");
  const PointCloud c = load_cloud(dir / "c.xyz");
  ASSERT_EQ(c.points.size(), 1u);
  EXPECT_EQ(c.points[0].x, 0.0);
  EXPECT_EQ(c.points[0].y, 0.0);
  EXPECT_EQ(c.points[0].z, 10.0);
}

TEST(CloudIo, NonNumericRowIsAFormatError) {
  TempDir dir;
  write_bytes(dir / "c.xyz", "0 0 10\n1 two 3\n");
  EXPECT_MAPCORE_ERROR(load_cloud(dir / "c.xyz"), ErrorCode::kFormat);
}

TEST(CloudIo, PlyAndXyzRoundTripExactly) {
  TempDir dir;
  PointCloud c;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 200; ++i) c.points.push_back({u(rng), u(rng), u(rng)});
  save_cloud_ply(c, dir / "c.ply");
  save_cloud_xyz(c, dir / "c.xyz");
  for (const auto* name : {"c.ply", "c.xyz"}) {
    const PointCloud back = load_cloud(dir / name);
    ASSERT_EQ(back.points.size(), c.points.size()) << name;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      EXPECT_EQ(back.points[i].x, c.points[i].x);
      EXPECT_EQ(back.points[i].y, c.points[i].y);
      EXPECT_EQ(back.points[i].z, c.points[i].z);
    }
  }
}

TEST(CloudIo, AsciiPlyWithExtraProperties) {
  TempDir dir;
  write_bytes(dir / "a.ply",
              "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n"
              "property float z\nproperty uchar intensity\nend_header\n1 2 3 9\n4 5 6 9\n");
  const PointCloud c = load_cloud(dir / "a.ply");
  ASSERT_EQ(c.points.size(), 2u);
  EXPECT_EQ(c.points[1].x, 4.0);
  EXPECT_EQ(c.points[1].z, 6.0);
}

TEST(CameraFrame, AxesFollowBearingAndPitch) {
  const CameraPose east{0, 0, 90.0, 0.0};
  const Point3 fwd = enu_to_camera({10.0, 0.0, 0.0}, east);
  EXPECT_NEAR(fwd.z, 10.0, 1e-12);
  EXPECT_NEAR(fwd.x, 0.0, 1e-12);
  const Point3 right = enu_to_camera({0.0, -3.0, 0.0}, east);  // south is right when facing east
  EXPECT_NEAR(right.x, 3.0, 1e-12);
  const Point3 up = enu_to_camera({0.0, 0.0, 2.0}, east);
  EXPECT_NEAR(up.y, -2.0, 1e-12);  // camera y points down

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-30.0, 30.0), b(0.0, 360.0), p(-40.0, 40.0);
  for (int i = 0; i < 100; ++i) {
    const CameraPose pose{0, 0, b(rng), p(rng)};
    const Point3 v{u(rng), u(rng), u(rng)};
    const Point3 back = camera_to_enu(enu_to_camera(v, pose), pose);
    EXPECT_NEAR(back.x, v.x, 1e-12);
    EXPECT_NEAR(back.y, v.y, 1e-12);
    EXPECT_NEAR(back.z, v.z, 1e-12);
  }
}

TEST(MetaIo, BearingIsNormalisedOnLoad) {
  TempDir dir;
  write_bytes(dir / "m.csv",
              "image_id,lat,lon,bearing_deg,pitch_deg,fx_px,fy_px,width,height,timestamp,source\n"
              "a,48.1,11.5,361,0,960,960,1920,1080,2021-05-01T10:00:00Z,survey\n"
              "b,48.2,11.6,-10,1.5,500,500,640,480,,crowd\n");
  const auto rows = load_meta(dir / "m.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].pose.bearing, 1.0);
  EXPECT_EQ(rows[0].timestamp.value_or(""), "2021-05-01T10:00:00Z");
  EXPECT_EQ(rows[0].source, "survey");
  EXPECT_EQ(rows[1].pose.bearing, 350.0);
  EXPECT_FALSE(rows[1].timestamp.has_value());
  EXPECT_EQ(rows[1].intrinsics.width, 640);
}

TEST(MetaIo, RoundTripIsExact) {
  TempDir dir;
  RecordingMeta m;
  m.image_id = "x1";
  m.pose = {48.137154321, 11.575382, 123.456789, -2.5};
  m.intrinsics = {961.25, 958.5, 1920, 1080, {}, {}};
  m.timestamp = "2022-01-01T00:00:00Z";
  m.source = "survey";
  save_meta({m}, dir / "m.csv");
  const auto back = load_meta(dir / "m.csv");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].pose.lat, m.pose.lat);
  EXPECT_EQ(back[0].pose.lon, m.pose.lon);
  EXPECT_EQ(back[0].pose.bearing, m.pose.bearing);
  EXPECT_EQ(back[0].pose.pitch, m.pose.pitch);
  EXPECT_EQ(back[0].intrinsics.fx, m.intrinsics.fx);
  EXPECT_EQ(back[0].intrinsics.fy, m.intrinsics.fy);
}

TEST(MetaIo, BadRowsAreFormatErrors) {
  TempDir dir;
  write_bytes(dir / "h.csv", "id,lat\n");
  EXPECT_MAPCORE_ERROR(load_meta(dir / "h.csv"), ErrorCode::kFormat);
  write_bytes(dir / "n.csv",
              "image_id,lat,lon,bearing_deg,pitch_deg,fx_px,fy_px,width,height,timestamp,source\n"
              "a,north,11.5,0,0,960,960,1920,1080,,\n");
  EXPECT_MAPCORE_ERROR(load_meta(dir / "n.csv"), ErrorCode::kFormat);
  write_bytes(dir / "f.csv",
              "image_id,lat,lon,bearing_deg,pitch_deg,fx_px,fy_px,width,height,timestamp,source\n"
              "a,48,11.5,0,0,0,960,1920,1080,,\n");
  EXPECT_MAPCORE_ERROR(load_meta(dir / "f.csv"), ErrorCode::kFormat);
}
