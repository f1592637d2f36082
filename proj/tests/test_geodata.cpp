#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "raster_fixtures.hpp"
#include "streetnet/geodata.hpp"

using namespace streetnet;
using namespace streetnet::testing;

namespace {

VectorStreetSet one_line(Point a, Point b, std::string tag = "residential") {
  return {{{{a, b}, std::move(tag)}}};
}

PatchSpec spec_at(Georef origin, int size = 512, double res = 5.0, int stroke = 3) {
  PatchSpec s;
  s.size = size;
  s.resolution = res;
  s.stroke_width = stroke;
  s.origin = origin;
  return s;
}

// Independent painter for axis-aligned segments: every pixel within
// Chebyshev distance `half` of a centerline pixel.
std::size_t painted_axis_segment(int x0, int x1, int y, int half, int size) {
  std::size_t n = 0;
  for (int py = 0; py < size; ++py)
    for (int px = 0; px < size; ++px) {
      bool hit = false;
      for (int t = x0; t <= x1 && !hit; ++t) hit = std::abs(px - t) <= half && std::abs(py - y) <= half;
      n += hit;
    }
  return n;
}

GridSource grid(int w, int h, double res, double x0, double y0, std::vector<double> values) {
  GridSource g;
  g.width = w;
  g.height = h;
  g.resolution = res;
  g.x0 = x0;
  g.y0 = y0;
  g.values = std::move(values);
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// filter_highways

TEST(FilterHighways, DefaultCategories) {
  VectorStreetSet v;
  for (const char* tag : {"footway", "residential", "motorway", "cycleway", "living_street", "service"})
    v.polylines.push_back({{{0, 0}, {1, 1}}, tag});
  const VectorStreetSet out = filter_highways(v);
  std::vector<std::string> kept;
  for (const auto& p : out.polylines) kept.push_back(p.highway);
  EXPECT_EQ(kept, (std::vector<std::string>{"residential", "motorway", "living_street"}));
  EXPECT_EQ(default_highway_tags().size(), 7u);
}

TEST(FilterHighways, EmptyAndCustom) {
  EXPECT_TRUE(filter_highways(VectorStreetSet{}).empty());
  const VectorStreetSet v = one_line({0, 0}, {1, 1}, "footway");
  EXPECT_TRUE(filter_highways(v).empty());
  EXPECT_EQ(filter_highways(v, {"footway"}).polylines.size(), 1u);
}

// ---------------------------------------------------------------------------
// project_web_mercator

TEST(WebMercator, Origin) {
  const Point p = project_web_mercator(Point{0, 0});
  EXPECT_EQ(p.x, 0.0);
  EXPECT_NEAR(p.y, 0.0, 1e-9);
}

TEST(WebMercator, AntimeridianOnEquator) {
  // 6378137 * pi, evaluated at 40 digits by tests/oracles/metrics_oracle.py.
  const Point p = project_web_mercator(Point{180, 0});
  EXPECT_NEAR(p.x, 20037508.342789243, 0.01);
  EXPECT_NEAR(p.y, 0.0, 1e-9);
}

TEST(WebMercator, SquareWorld) {
  const Point p = project_web_mercator(Point{0, kMaxMercatorLatitude});
  EXPECT_NEAR(p.y, 20037509.917339622, 0.01);
  EXPECT_NEAR(p.y, project_web_mercator(Point{180, 0}).x, 2.0);
  EXPECT_NEAR(project_web_mercator(Point{0, -kMaxMercatorLatitude}).y, -p.y, 1e-6);
}

TEST(WebMercator, LatitudeOutOfRange) {
  EXPECT_THROW(project_web_mercator(Point{0, 85.06}), LatitudeOutOfRange);
  EXPECT_THROW(project_web_mercator(Point{0, -90}), LatitudeOutOfRange);
  EXPECT_THROW(project_web_mercator(Point{0, std::nan("")}), LatitudeOutOfRange);
  const VectorStreetSet v = one_line({0, 0}, {0, 89});
  EXPECT_THROW(project_web_mercator(v), LatitudeOutOfRange);
}

TEST(WebMercator, MonotoneAndInjective) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lon(-180, 180), lat(-85, 85);
  for (int i = 0; i < 2000; ++i) {
    const Point a{lon(rng), lat(rng)}, b{lon(rng), lat(rng)};
    const Point pa = project_web_mercator(a), pb = project_web_mercator(b);
    EXPECT_EQ(a.x < b.x, pa.x < pb.x);
    EXPECT_EQ(a.y < b.y, pa.y < pb.y);
    EXPECT_EQ(a == b, pa == pb);
  }
}

TEST(WebMercator, ProjectsEveryVertex) {
  VectorStreetSet v = one_line({0, 0}, {180, 0}, "primary");
  const VectorStreetSet out = project_web_mercator(v);
  ASSERT_EQ(out.polylines.size(), 1u);
  EXPECT_EQ(out.polylines[0].highway, "primary");
  EXPECT_NEAR(out.polylines[0].coords[1].x, 20037508.342789243, 0.01);
}

// ---------------------------------------------------------------------------
// rasterize

TEST(Rasterize, HundredMeterSegment) {
  const PatchSpec spec = spec_at({0.0, 2560.0});
  const RasterPatch img = rasterize(one_line({100, 1000}, {200, 1000}), spec);
  // Centerline pixels 20..40 on row 312, widened by one pixel on each side.
  EXPECT_EQ(img.foreground_count(), painted_axis_segment(20, 40, 312, 1, 512));
  EXPECT_EQ(img.foreground_count(), 69u);  // 20x3 body plus the brush overhang at both ends
  EXPECT_TRUE(img.is_binary());
  EXPECT_EQ(img.at(30, 311), 255);
  EXPECT_EQ(img.at(30, 314), 0);
  ASSERT_TRUE(img.georef());
  EXPECT_EQ(*img.georef(), (Georef{0.0, 2560.0}));
  EXPECT_DOUBLE_EQ(img.resolution(), 5.0);
}

TEST(Rasterize, StrokeWidthOne) {
  const RasterPatch img = rasterize(one_line({100, 1000}, {200, 1000}), spec_at({0.0, 2560.0}, 512, 5.0, 1));
  EXPECT_EQ(img.foreground_count(), 21u);
}

TEST(Rasterize, EmptyAndOutside) {
  const PatchSpec spec = spec_at({0.0, 2560.0});
  EXPECT_EQ(rasterize(VectorStreetSet{}, spec).foreground_count(), 0u);
  EXPECT_EQ(rasterize(one_line({5000, 1000}, {6000, 1000}), spec).foreground_count(), 0u);
  EXPECT_EQ(rasterize(one_line({-600, -50}, {3000, -40}), spec).foreground_count(), 0u);
}

TEST(Rasterize, ClipsLongSegments) {
  const PatchSpec spec = spec_at({0.0, 2560.0});
  const RasterPatch img = rasterize(one_line({-1e6, 1000}, {1e6, 1000}), spec);
  EXPECT_EQ(img.foreground_count(), 512u * 3u);
}

TEST(Rasterize, RejectsBadSpec) {
  EXPECT_THROW(rasterize(VectorStreetSet{}, spec_at({0, 0}, 512, 5.0, 2)), ConfigError);
  EXPECT_THROW(rasterize(VectorStreetSet{}, spec_at({0, 0}, 0)), ConfigError);
  EXPECT_THROW(rasterize(VectorStreetSet{}, spec_at({0, 0}, 16, -1.0)), ConfigError);
}

TEST(Rasterize, GraphUsesPixelCenters) {
  StreetGraph g(5.0);
  g.add_vertex({10, 20});
  g.add_vertex({30, 20});
  g.add_edge(0, 1);
  const RasterPatch img = rasterize(g, spec_at({0.0, 0.0}, 64));
  EXPECT_EQ(img.foreground_count(), painted_axis_segment(10, 30, 20, 1, 64));
  EXPECT_EQ(img.at(10, 20), 255);
  EXPECT_EQ(img.at(30, 21), 255);
}

// ---------------------------------------------------------------------------
// crop_patches

TEST(CropPatches, OneWindow) {
  const auto patches = crop_patches(one_line({1000, 1000}, {1500, 1200}), spec_at({}));
  ASSERT_EQ(patches.size(), 1u);
  EXPECT_EQ(patches[0].row, 0);
  EXPECT_EQ(patches[0].col, 0);
  EXPECT_EQ(patches[0].spec.origin, (Georef{0.0, 2560.0}));
  EXPECT_GT(patches[0].raster.foreground_count(), 0u);
}

TEST(CropPatches, Empty) { EXPECT_TRUE(crop_patches(VectorStreetSet{}, spec_at({})).empty()); }

TEST(CropPatches, TwoWindowsAlignAtBorder) {
  // Slanted street crossing the x = 2560 m window border.
  const auto patches = crop_patches(one_line({2000, 1000}, {3100, 1400}), spec_at({}));
  ASSERT_EQ(patches.size(), 2u);
  EXPECT_EQ(patches[0].col, 0);
  EXPECT_EQ(patches[1].col, 1);
  EXPECT_EQ(patches[1].spec.origin.x0 - patches[0].spec.origin.x0, 2560.0);
  auto rows_in_column = [](const RasterPatch& img, int x) {
    std::vector<int> rows;
    for (int y = 0; y < img.height(); ++y)
      if (img.at(x, y)) rows.push_back(y);
    return rows;
  };
  const auto left = rows_in_column(patches[0].raster, 511), right = rows_in_column(patches[1].raster, 0);
  ASSERT_FALSE(left.empty());
  ASSERT_FALSE(right.empty());
  EXPECT_LE(std::abs(left.front() - right.front()), 1);
  EXPECT_LE(std::abs(left.back() - right.back()), 1);
}

TEST(CropPatches, AxisAlignedTilesMatchOneBigRaster) {
  // 32 px windows of 160 m; the big raster covers 4 x 4 windows.
  const PatchSpec tile = spec_at({}, 32, 5.0, 3);
  VectorStreetSet v;
  v.polylines.push_back({{{12.5, 402.5}, {617.5, 402.5}}, "primary"});
  v.polylines.push_back({{{322.5, 7.5}, {322.5, 632.5}}, "primary"});
  v.polylines.push_back({{{100.5, 200.5}, {100.5, 260.5}}, "residential"});
  const auto patches = crop_patches(v, tile);
  const RasterPatch big = rasterize(v, spec_at({0.0, 640.0}, 128, 5.0, 3));
  std::size_t tiled = 0;
  std::set<std::pair<int, int>> seen;
  for (const auto& p : patches) {
    EXPECT_TRUE(seen.emplace(p.row, p.col).second);
    const int ox = static_cast<int>(p.spec.origin.x0 / 5.0), oy = static_cast<int>((640.0 - p.spec.origin.y0) / 5.0);
    for (int y = 0; y < 32; ++y)
      for (int x = 0; x < 32; ++x) EXPECT_EQ(p.raster.at(x, y), big.at(ox + x, oy + y));
    tiled += p.raster.foreground_count();
  }
  EXPECT_EQ(tiled, big.foreground_count());
}

TEST(CropPatches, OrderedAndDisjoint) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(-3000, 3000);
  VectorStreetSet v;
  for (int i = 0; i < 20; ++i) v.polylines.push_back({{{c(rng), c(rng)}, {c(rng), c(rng)}}, "residential"});
  const PatchSpec tile = spec_at({}, 64, 5.0, 3);
  const auto patches = crop_patches(v, tile);
  ASSERT_FALSE(patches.empty());
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const auto& p = patches[i];
    EXPECT_DOUBLE_EQ(p.spec.origin.x0, p.col * 320.0);
    EXPECT_DOUBLE_EQ(p.spec.origin.y0, (1 - p.row) * 320.0);
    if (i > 0) {
      const auto& q = patches[i - 1];
      EXPECT_TRUE(std::pair(q.row, q.col) < std::pair(p.row, p.col));
    }
  }
}

// ---------------------------------------------------------------------------
// condition layers

TEST(ConditionLayers, CheckerboardExpandsTwoByTwo) {
  // 4x4 checkerboard at 10 m covering a 8x8 patch at 5 m.
  std::vector<double> cb;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) cb.push_back((r + c) % 2 ? 100.0 : 0.0);
  const GridSource src = grid(4, 4, 10.0, 0.0, 40.0, cb);
  const ConditionLayer layer = resample_layer(spec_at({0.0, 40.0}, 8), src);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) EXPECT_EQ(layer.raster.at(x, y), ((x / 2 + y / 2) % 2) ? 255 : 0);
  EXPECT_EQ(layer.min, 0.0);
  EXPECT_EQ(layer.max, 100.0);
}

TEST(ConditionLayers, IdentityResample) {
  std::vector<double> vals;
  for (int i = 0; i < 256; ++i) vals.push_back(i);
  const GridSource src = grid(16, 16, 5.0, 1000.0, 2000.0, vals);
  const ConditionLayer layer = resample_layer(spec_at({1000.0, 2000.0}, 16), src);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) EXPECT_EQ(layer.raster.at(x, y), y * 16 + x);
  EXPECT_EQ(layer.min, 0.0);
  EXPECT_EQ(layer.max, 255.0);
}

TEST(ConditionLayers, ConstantSource) {
  const GridSource src = grid(4, 4, 50.0, 0.0, 200.0, std::vector<double>(16, 42.0));
  const ConditionLayer layer = resample_layer(spec_at({0.0, 200.0}, 20, 5.0), src);
  const auto first = layer.raster.at(0, 0);
  for (auto p : layer.raster.pixels()) EXPECT_EQ(p, first);
  EXPECT_EQ(layer.denormalize(first), 42.0);
}

TEST(ConditionLayers, MissingCoverage) {
  const GridSource src = grid(4, 4, 10.0, 0.0, 40.0, std::vector<double>(16, 1.0));
  EXPECT_THROW(resample_layer(spec_at({0.0, 40.0}, 9), src), MissingCoverage);
  EXPECT_THROW(resample_layer(spec_at({-5.0, 40.0}, 4), src), MissingCoverage);
  EXPECT_THROW(align_condition_layers(spec_at({0.0, 40.0}, 8), src, src, grid(1, 1, 1.0, 0, 40, {1.0})),
               MissingCoverage);
}

TEST(ConditionLayers, AlignsAllThree) {
  const GridSource a = grid(2, 2, 20.0, 0.0, 40.0, {0, 1, 2, 3});
  const GridSource b = grid(1, 1, 100.0, -10.0, 50.0, {7});
  const ConditionSet set = align_condition_layers(spec_at({0.0, 40.0}, 8), a, b, a);
  EXPECT_EQ(set.elevation.raster.width(), 8);
  EXPECT_EQ(set.population.raster.width(), 8);
  EXPECT_EQ(set.land_use.raster, set.elevation.raster);
  EXPECT_EQ(set.elevation.raster.at(7, 7), 255);
  ASSERT_TRUE(set.elevation.raster.georef());
}

TEST(ConditionLayers, NormalizationInvertible) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50.0, 900.0);
  std::vector<double> vals(32 * 32);
  for (auto& v : vals) v = u(rng);
  const GridSource src = grid(32, 32, 5.0, 0.0, 160.0, vals);
  const ConditionLayer layer = resample_layer(spec_at({0.0, 160.0}, 32), src);
  const double range = layer.max - layer.min;
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      EXPECT_LE(std::abs(layer.denormalize(layer.raster.at(x, y)) - vals[y * 32 + x]), 0.5 / 255.0 * range + 1e-9);
}

TEST(ConditionLayers, RejectsMalformedGrid) {
  EXPECT_THROW(resample_layer(spec_at({}, 4), grid(2, 2, 1.0, 0, 0, {1, 2, 3})), InvalidInput);
}
