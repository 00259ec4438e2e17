#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mapcore/eval.hpp"
#include "test_util.hpp"

using namespace mapcore;

namespace {

constexpr std::size_t kTotal = ErrorReport::kTotalRow;

DepthMap row(std::vector<float> v, DepthKind kind = DepthKind::kRange) {
  const int w = static_cast<int>(v.size());
  return DepthMap(w, 1, std::move(v), {}, kind);
}

SemanticMap labels(std::vector<std::uint8_t> v) {
  const int w = static_cast<int>(v.size());
  return SemanticMap{w, 1, std::move(v)};
}

std::size_t row_of(SemanticGroup g) { return static_cast<std::size_t>(g); }

}  // namespace

TEST(DepthErrors, DirectArithmetic) {
  const ErrorReport r = depth_errors(row({8, 12}), row({10, 10}));
  EXPECT_DOUBLE_EQ(r.total().mae, 2.0);
  EXPECT_DOUBLE_EQ(r.total().are, 0.2);
  EXPECT_EQ(r.total().count, 2u);
  EXPECT_FALSE(r.has_semantics());
}

TEST(DepthErrors, PersonPixelIsExcludedEverywhere) {
  const auto pred = row({8, 12, 30});
  const auto truth = row({10, 10, 20});
  const ErrorReport all = depth_errors(pred, truth);
  EXPECT_DOUBLE_EQ(all.total().mae, 14.0 / 3.0);
  EXPECT_DOUBLE_EQ(all.total().are, 0.3);

  const auto sem = labels({train_id::kRoad, train_id::kBuilding, train_id::kPerson});
  const ErrorReport r = depth_errors(pred, truth, &sem);
  EXPECT_DOUBLE_EQ(r.total().mae, 2.0);
  EXPECT_DOUBLE_EQ(r.total().are, 0.2);
  EXPECT_EQ(r.excluded_pixels(), 1u);
  EXPECT_EQ(r.stats(kTotal, 3).count, 0u);  // the 20 m bin would hold the person pixel
  for (std::size_t g = 0; g < kTotal; ++g) {
    for (std::size_t c = 0; c <= r.total_column(); ++c) {
      const auto s = r.stats(g, c);
      if (s.count) EXPECT_LE(s.mae, 2.0);
    }
  }
  EXPECT_EQ(r.stats(row_of(SemanticGroup::kFlat), r.total_column()).count, 1u);
  EXPECT_EQ(r.stats(row_of(SemanticGroup::kConstruction), r.total_column()).count, 1u);
}

TEST(DepthErrors, BinsFollowTruthDepthHalfOpen) {
  const ErrorReport r = depth_errors(row({3, 15, 5, 10, 20, 25}), row({3, 15, 5, 10, 20, 25}));
  EXPECT_EQ(r.stats(kTotal, 0).count, 1u);  // 3
  EXPECT_EQ(r.stats(kTotal, 1).count, 1u);  // 5
  EXPECT_EQ(r.stats(kTotal, 2).count, 2u);  // 10, 15
  EXPECT_EQ(r.stats(kTotal, 3).count, 2u);  // 20, 25
  // binned by truth even when the prediction is in another bin
  const ErrorReport s = depth_errors(row({30}), row({4}));
  EXPECT_EQ(s.stats(kTotal, 0).count, 1u);
}

TEST(DepthErrors, AreIsNotSymmetric) {
  const auto a = row({8, 12});
  const auto b = row({10, 16});
  const ErrorReport ab = depth_errors(a, b), ba = depth_errors(b, a);
  EXPECT_DOUBLE_EQ(ab.total().mae, ba.total().mae);
  EXPECT_NE(ab.total().are, ba.total().are);
}

TEST(DepthErrors, ScalingLeavesAreAndScalesMae) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> u(1.0f, 40.0f);
  std::vector<float> p(500), t(500), p4(500), t4(500), p3(500), t3(500);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = u(rng);
    t[i] = u(rng);
    p4[i] = p[i] * 4;
    t4[i] = t[i] * 4;
    p3[i] = p[i] * 3;
    t3[i] = t[i] * 3;
  }
  const ValidRange wide{0.1, 1000.0};
  const auto base = depth_errors(DepthMap(500, 1, p, wide), DepthMap(500, 1, t, wide)).total();
  const auto x4 = depth_errors(DepthMap(500, 1, p4, wide), DepthMap(500, 1, t4, wide)).total();
  const auto x3 = depth_errors(DepthMap(500, 1, p3, wide), DepthMap(500, 1, t3, wide)).total();
  EXPECT_DOUBLE_EQ(x4.are, base.are);
  EXPECT_DOUBLE_EQ(x4.mae, 4 * base.mae);
  EXPECT_NEAR(x3.are, base.are, 1e-6 * base.are);
  EXPECT_NEAR(x3.mae, 3 * base.mae, 1e-6 * base.mae);
}

TEST(DepthErrors, CellCountsSumToTotal) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<float> u(0.5f, 60.0f);
  std::uniform_int_distribution<int> lab(0, 19);
  const int w = 80, h = 60;
  std::vector<float> p(w * h), t(w * h);
  std::vector<std::uint8_t> s(w * h);
  for (int i = 0; i < w * h; ++i) {
    p[i] = u(rng);
    t[i] = i % 13 == 0 ? 0.0f : u(rng);
    const int l = lab(rng);
    s[i] = l == 19 ? train_id::kVoid : static_cast<std::uint8_t>(l);
  }
  const SemanticMap sem{w, h, s};
  const ErrorReport r = depth_errors(DepthMap(w, h, p), DepthMap(w, h, t), &sem);
  std::size_t bins = 0, groups = 0, cross = 0;
  for (std::size_t c = 0; c < r.bin_count(); ++c) bins += r.stats(kTotal, c).count;
  for (std::size_t g = 0; g < kTotal; ++g) {
    groups += r.stats(g, r.total_column()).count;
    for (std::size_t c = 0; c < r.bin_count(); ++c) cross += r.stats(g, c).count;
  }
  EXPECT_EQ(bins, r.evaluated_pixels());
  EXPECT_EQ(groups, r.evaluated_pixels());
  EXPECT_EQ(cross, r.evaluated_pixels());
  std::size_t valid = 0;
  for (int i = 0; i < w * h; ++i) valid += t[i] > 0.1f ? 1 : 0;
  EXPECT_EQ(r.evaluated_pixels() + r.excluded_pixels(), valid);
}

TEST(DepthErrors, Errors) {
  EXPECT_MAPCORE_ERROR(depth_errors(row({1, 2}), row({1, 2, 3})), ErrorCode::kDimension);
  const auto sem = labels({0});
  EXPECT_MAPCORE_ERROR(depth_errors(row({1, 2}), row({1, 2}), &sem), ErrorCode::kDimension);
  EXPECT_MAPCORE_ERROR(depth_errors(row({0, 0}), row({1, 2})), ErrorCode::kEmptyReport);
  const auto sky = labels({train_id::kSky, train_id::kCar});
  EXPECT_MAPCORE_ERROR(depth_errors(row({1, 2}), row({1, 2}), &sky), ErrorCode::kEmptyReport);
  EXPECT_MAPCORE_ERROR(depth_errors(row({1}, DepthKind::kPlanar), row({1})), ErrorCode::kConfig);
  EXPECT_MAPCORE_ERROR(depth_errors(row({1}), row({1}), nullptr, {{5.0, 5.0}}), ErrorCode::kConfig);
}

TEST(Aggregate, PixelAndImagePooling) {
  const ErrorReport a = depth_errors(row({11}), row({10}));             // 1 pixel, error 1
  const ErrorReport b = depth_errors(row({13, 13, 13}), row({10, 10, 10}));  // 3 pixels, error 3
  const ErrorTable px = aggregate({a, b}, Pooling::kPixel);
  const ErrorTable im = aggregate({a, b}, Pooling::kImage);
  const std::size_t tc = px.cells[kTotal].size() - 1;
  EXPECT_DOUBLE_EQ(px.cells[kTotal][tc].mae, 2.5);
  EXPECT_DOUBLE_EQ(im.cells[kTotal][tc].mae, 2.0);
  EXPECT_EQ(px.cells[kTotal][tc].count, 4u);
  EXPECT_EQ(im.cells[kTotal][tc].count, 4u);
  EXPECT_EQ(px.images, 2u);
  EXPECT_MAPCORE_ERROR(aggregate({}), ErrorCode::kEmptyReport);
}

TEST(Aggregate, MergeIsOrderIndependent) {
  const ErrorReport a = depth_errors(row({11, 4}), row({10, 3}));
  const ErrorReport b = depth_errors(row({13, 30}), row({10, 25}));
  const ErrorReport c = depth_errors(row({7}), row({6}));
  const auto t1 = aggregate({a, b, c});
  const auto t2 = aggregate({c, a, b});
  for (std::size_t r = 0; r < t1.cells.size(); ++r) {
    for (std::size_t k = 0; k < t1.cells[r].size(); ++k) {
      EXPECT_EQ(t1.cells[r][k].count, t2.cells[r][k].count);
      EXPECT_NEAR(t1.cells[r][k].mae, t2.cells[r][k].mae, 1e-12);
      EXPECT_NEAR(t1.cells[r][k].are, t2.cells[r][k].are, 1e-12);
    }
  }
}

TEST(Semantics, TrainIdMappingIsExhaustive) {
  using G = SemanticGroup;
  const G expected[19] = {
      G::kFlat,          G::kFlat,         // road, sidewalk
      G::kConstruction,  G::kConstruction, G::kConstruction,  // building, wall, fence
      G::kObject,        G::kObject,       G::kObject,        // pole, traffic light, traffic sign
      G::kNature,        G::kNature,                          // vegetation, terrain
      G::kExcluded,                                           // sky
      G::kExcluded,      G::kExcluded,                        // person, rider
      G::kExcluded,      G::kExcluded,     G::kExcluded,      // car, truck, bus
      G::kExcluded,      G::kExcluded,     G::kExcluded,      // train, motorcycle, bicycle
  };
  for (std::uint8_t id = 0; id < 19; ++id) {
    EXPECT_EQ(group_of(id), expected[id]) << train_id_name(id);
  }
  EXPECT_EQ(group_of(train_id::kVoid), G::kExcluded);
  for (int id = 19; id < 256; ++id) EXPECT_EQ(group_of(static_cast<std::uint8_t>(id)), G::kExcluded);
  EXPECT_EQ(train_id_name(train_id::kTrafficSign), "traffic sign");
  EXPECT_EQ(train_id_name(train_id::kVoid), "void");
}

TEST(Semantics, FullLabelIdsCoverParkingRailAndPoleGroup) {
  using G = SemanticGroup;
  // Cityscapes label ids for classes that have no train id.
  EXPECT_EQ(group_of_label_id(9), G::kFlat);           // parking
  EXPECT_EQ(group_of_label_id(10), G::kFlat);          // rail track
  EXPECT_EQ(group_of_label_id(14), G::kConstruction);  // guard rail
  EXPECT_EQ(group_of_label_id(15), G::kConstruction);  // bridge
  EXPECT_EQ(group_of_label_id(16), G::kConstruction);  // tunnel
  EXPECT_EQ(group_of_label_id(18), G::kObject);        // pole group
  EXPECT_EQ(group_of_label_id(7), G::kFlat);           // road
  EXPECT_EQ(group_of_label_id(23), G::kExcluded);      // sky
  EXPECT_EQ(group_of_label_id(24), G::kExcluded);      // person
  EXPECT_EQ(group_of_label_id(0), G::kExcluded);       // unlabeled
  EXPECT_EQ(group_of_label_id(-1), G::kExcluded);
}

TEST(ProjectCloud, SinglePointAtCentre) {
  const Intrinsics k{960, 960, 1920, 1080, {}, {}};
  const DepthMap d = project_cloud({{{0, 0, 10}}}, k);
  EXPECT_EQ(d.kind(), DepthKind::kPlanar);
  EXPECT_EQ(d.at(960, 540), 10.0f);
  EXPECT_EQ(d.invalid_count(), 1920u * 1080u - 1u);
}

TEST(ProjectCloud, HandProjectionOffAxis) {
  // u = W/2 + fx * X / Z = 1000 + 960 * 10 / 10
  const Intrinsics k{960, 960, 2000, 1000, {}, {}};
  const DepthMap d = project_cloud({{{10, 0, 10}}}, k);
  EXPECT_EQ(d.at(1960, 500), 10.0f);
  EXPECT_EQ(d.invalid_count(), 2000u * 1000u - 1u);
  // the same point falls outside a 1920-wide image
  EXPECT_EQ(project_cloud({{{10, 0, 10}}}, {960, 960, 1920, 1080, {}, {}}).invalid_count(),
            1920u * 1080u);
}

TEST(ProjectCloud, ZBufferKeepsNearest) {
  const Intrinsics k{100, 100, 20, 20, {}, {}};
  const DepthMap d = project_cloud({{{0, 0, 10}, {0, 0, 8}, {0, 0, 9}}}, k);
  EXPECT_EQ(d.at(10, 10), 8.0f);
}

TEST(ProjectCloud, EmptyAndBehindCamera) {
  const Intrinsics k{100, 100, 20, 20, {}, {}};
  EXPECT_EQ(project_cloud({}, k).invalid_count(), 400u);
  EXPECT_EQ(project_cloud({{{0, 0, -5}, {0, 0, 0}}}, k).invalid_count(), 400u);
}

TEST(ProjectCloud, GroundPlaneMatchesAnalyticRenderExactly) {
  // Ground plane 2 m below a level pinhole camera. Each pixel centre below the
  // horizon gets Z = fy * h / (v - cy); the analytic map holds the same values.
  const Intrinsics k{400, 400, 160, 120, {}, {}};
  const double h = 2.0;
  PointCloud cloud;
  std::vector<float> analytic(160 * 120, 0.0f);
  for (int v = 0; v < 120; ++v) {
    for (int u = 0; u < 160; ++u) {
      const double dv = v - k.principal_y();
      if (dv <= 0) continue;
      const double z = k.fy * h / dv;
      if (z > 200.0) continue;
      cloud.points.push_back({(u - k.principal_x()) * z / k.fx, h, z});
      analytic[v * 160 + u] = static_cast<float>(z);
    }
  }
  const DepthMap projected = project_cloud(cloud, k);
  const DepthMap truth(160, 120, analytic, {}, DepthKind::kPlanar);
  const ErrorReport r = depth_errors(projected, truth);
  EXPECT_EQ(r.total().mae, 0.0);
  EXPECT_EQ(r.total().are, 0.0);
  EXPECT_EQ(r.evaluated_pixels(), cloud.points.size());
}

TEST(Intervals, LabelsAndIndex) {
  EXPECT_EQ(interval_labels({10, 20}), (std::vector<std::string>{"<10", "10-20", ">20"}));
  EXPECT_EQ(interval_labels({2.5}), (std::vector<std::string>{"<2.5", ">2.5"}));
  EXPECT_EQ(interval_index({5, 10, 20}, 4.999), 0u);
  EXPECT_EQ(interval_index({5, 10, 20}, 5.0), 1u);
  EXPECT_EQ(interval_index({5, 10, 20}, 20.0), 3u);
  EXPECT_MAPCORE_ERROR(validate_edges({10, 5}), ErrorCode::kConfig);
  EXPECT_MAPCORE_ERROR(validate_edges({0, 5}), ErrorCode::kConfig);
}

TEST(CoordErrorStats, SinglePair) {
  const std::vector<double> e{2.3}, d{7.0};
  const auto t = coord_error_stats(e, d, kSignIntervalEdges);
  EXPECT_DOUBLE_EQ(t.mean, 2.3);
  ASSERT_EQ(t.intervals.size(), 3u);
  EXPECT_EQ(t.intervals[0].label, "<10");
  EXPECT_DOUBLE_EQ(t.intervals[0].mean, 2.3);
  EXPECT_EQ(t.intervals[1].count, 0u);
}

TEST(CoordErrorStats, TwoPairsInTwoIntervals) {
  const std::vector<double> e{2.0, 4.0}, d{5.0, 15.0};
  const auto t = coord_error_stats(e, d, kSignIntervalEdges);
  EXPECT_DOUBLE_EQ(t.mean, 3.0);
  EXPECT_DOUBLE_EQ(t.intervals[0].mean, 2.0);
  EXPECT_DOUBLE_EQ(t.intervals[1].mean, 4.0);
  EXPECT_EQ(t.intervals[1].label, "10-20");
}

TEST(CoordErrorStats, QuartilesForBoxPlots) {
  const std::vector<double> e{1, 2, 3, 4, 5}, d{3, 3, 3, 3, 3};
  const auto t = coord_error_stats(e, d, kDamageIntervalEdges);
  ASSERT_EQ(t.intervals.size(), 6u);
  const auto& s = t.intervals[1];  // 2-4 m
  EXPECT_EQ(s.label, "2-4");
  EXPECT_EQ(s.count, 5u);
  EXPECT_DOUBLE_EQ(s.min, 1);
  EXPECT_DOUBLE_EQ(s.q1, 2);
  EXPECT_DOUBLE_EQ(s.median, 3);
  EXPECT_DOUBLE_EQ(s.q3, 4);
  EXPECT_DOUBLE_EQ(s.max, 5);
}

TEST(CoordErrorStats, EmptyGivesEmptyTable) {
  const auto t = coord_error_stats(MatchResult{}, kSignIntervalEdges);
  EXPECT_EQ(t.count, 0u);
  for (const auto& i : t.intervals) EXPECT_EQ(i.count, 0u);
}

TEST(CoordErrorStats, UsesTrueCameraDistanceWhenKnown) {
  MatchResult m;
  m.pairs.push_back({"p", "r", 1.5, 25.0, 8.0});
  m.pairs.push_back({"q", "s", 0.5, std::nullopt, 8.0});
  const auto t = coord_error_stats(m, kSignIntervalEdges);
  EXPECT_EQ(t.intervals[2].count, 1u);
  EXPECT_EQ(t.intervals[0].count, 1u);
}

TEST(MaskIou, Examples) {
  BinaryMask a(4, 1), b(4, 1);
  a.set(0, 0);
  a.set(1, 0);
  EXPECT_EQ(mask_iou(a, a), 1.0);
  b.set(2, 0);
  b.set(3, 0);
  EXPECT_EQ(mask_iou(a, b), 0.0);
  b.set(3, 0, false);
  b.set(1, 0);
  EXPECT_DOUBLE_EQ(mask_iou(a, b), 1.0 / 3.0);
  EXPECT_EQ(mask_iou(BinaryMask(3, 3), BinaryMask(3, 3)), 1.0);
  EXPECT_MAPCORE_ERROR(mask_iou(a, BinaryMask(2, 2)), ErrorCode::kDimension);
}
