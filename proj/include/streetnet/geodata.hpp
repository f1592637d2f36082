#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "streetnet/errors.hpp"
#include "streetnet/graph.hpp"
#include "streetnet/raster.hpp"

namespace streetnet {

inline constexpr double kEarthRadiusM = 6378137.0;
inline constexpr double kMaxMercatorLatitude = 85.05113;

struct Polyline {
  std::vector<Point> coords;  // lon/lat degrees or Web Mercator meters, depending on stage
  std::string highway;
};

struct VectorStreetSet {
  std::vector<Polyline> polylines;

  [[nodiscard]] bool empty() const noexcept { return polylines.empty(); }
};

// OSM highway categories kept for street layouts.
inline const std::set<std::string>& default_highway_tags() {
  static const std::set<std::string> tags{"motorway",    "primary",       "secondary", "tertiary",
                                          "residential", "living_street", "pedestrian"};
  return tags;
}

inline VectorStreetSet filter_highways(const VectorStreetSet& v,
                                       const std::set<std::string>& allowed = default_highway_tags()) {
  VectorStreetSet out;
  for (const auto& p : v.polylines)
    if (allowed.contains(p.highway)) out.polylines.push_back(p);
  return out;
}

// Spherical Web Mercator. Input is (lon, lat) in degrees.
inline Point project_web_mercator(Point lonlat) {
  if (!std::isfinite(lonlat.x) || !std::isfinite(lonlat.y) || std::abs(lonlat.y) > kMaxMercatorLatitude)
    throw LatitudeOutOfRange("latitude outside the Web Mercator domain: " + std::to_string(lonlat.y));
  constexpr double deg = std::numbers::pi / 180.0;
  return {kEarthRadiusM * lonlat.x * deg,
          kEarthRadiusM * std::log(std::tan(std::numbers::pi / 4.0 + lonlat.y * deg / 2.0))};
}

inline VectorStreetSet project_web_mercator(const VectorStreetSet& v) {
  VectorStreetSet out = v;
  for (auto& p : out.polylines)
    for (auto& c : p.coords) c = project_web_mercator(c);
  return out;
}

// One square raster window. `origin` is the Web Mercator top-left corner.
struct PatchSpec {
  int size = 512;
  double resolution = 5.0;
  int stroke_width = 3;
  Georef origin;

  void validate() const {
    if (size <= 0) throw ConfigError("patch size must be positive");
    if (!(resolution > 0.0)) throw ConfigError("patch resolution must be positive");
    if (stroke_width < 1 || stroke_width % 2 == 0) throw ConfigError("stroke width must be odd and >= 1");
  }

  [[nodiscard]] double window_m() const noexcept { return size * resolution; }

  // Continuous pixel coordinates of a world point; pixel (c, r) covers
  // [c, c+1) x [r, r+1).
  [[nodiscard]] Point to_pixel(Point world) const noexcept {
    return {(world.x - origin.x0) / resolution, (origin.y0 - world.y) / resolution};
  }
};

namespace detail {

// Liang-Barsky clip of segment a-b to the box [lo, hi]^2. Returns false when
// nothing remains.
inline bool clip_segment(Point& a, Point& b, double lo, double hi) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  double t0 = 0.0, t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.x - lo, hi - a.x, a.y - lo, hi - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      if (t > t1) return false;
      t0 = std::max(t0, t);
    } else {
      if (t < t0) return false;
      t1 = std::min(t1, t);
    }
  }
  const Point a0 = a;
  a = {a0.x + t0 * dx, a0.y + t0 * dy};
  b = {a0.x + t1 * dx, a0.y + t1 * dy};
  return true;
}

inline void stamp(RasterPatch& img, int cx, int cy, int half) {
  for (int y = cy - half; y <= cy + half; ++y)
    for (int x = cx - half; x <= cx + half; ++x)
      if (img.in_bounds(x, y)) img.set(x, y, kStreet);
}

// Bresenham centerline between pixel centers with a square brush.
inline void draw_segment(RasterPatch& img, Point a, Point b, int stroke_width) {
  const int half = stroke_width / 2;
  const double margin = half + 2.0;
  if (!clip_segment(a, b, -margin, std::max(img.width(), img.height()) + margin)) return;
  int x0 = static_cast<int>(std::floor(a.x)), y0 = static_cast<int>(std::floor(a.y));
  const int x1 = static_cast<int>(std::floor(b.x)), y1 = static_cast<int>(std::floor(b.y));
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  for (;;) {
    stamp(img, x0, y0, half);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

}  // namespace detail

// Streets in Web Mercator meters drawn as 255 strokes over 0.
inline RasterPatch rasterize(const VectorStreetSet& v, const PatchSpec& spec) {
  spec.validate();
  RasterPatch img(spec.size, spec.size, spec.resolution, spec.origin);
  for (const auto& line : v.polylines)
    for (std::size_t i = 0; i + 1 < line.coords.size(); ++i)
      detail::draw_segment(img, spec.to_pixel(line.coords[i]), spec.to_pixel(line.coords[i + 1]),
                           spec.stroke_width);
  return img;
}

inline RasterPatch rasterize(const StreetGraph& g, const PatchSpec& spec) {
  spec.validate();
  RasterPatch img(spec.size, spec.size, spec.resolution, spec.origin);
  for (const Edge& e : g.edges())
    detail::draw_segment(img, spec.to_pixel(world_position(g, e.a)), spec.to_pixel(world_position(g, e.b)),
                         spec.stroke_width);
  return img;
}

struct CroppedPatch {
  PatchSpec spec;
  int row = 0;  // tile index, increasing southwards
  int col = 0;  // tile index, increasing eastwards
  RasterPatch raster;
};

// Tiles the plane into non-overlapping windows of size*resolution meters
// anchored at multiples of the window size, and rasterizes every window that
// receives at least one street pixel. Ordered north to south, then west to east.
inline std::vector<CroppedPatch> crop_patches(const VectorStreetSet& v, const PatchSpec& base) {
  base.validate();
  const double w = base.window_m();
  const double pad = (base.stroke_width / 2 + 1) * base.resolution;
  // (-row_north, col) where row_north = floor(y / w)
  std::set<std::pair<long long, long long>> cells;
  for (const auto& line : v.polylines)
    for (std::size_t i = 0; i + 1 < line.coords.size(); ++i) {
      const Point a = line.coords[i], b = line.coords[i + 1];
      const auto c0 = static_cast<long long>(std::floor((std::min(a.x, b.x) - pad) / w));
      const auto c1 = static_cast<long long>(std::floor((std::max(a.x, b.x) + pad) / w));
      const auto r0 = static_cast<long long>(std::floor((std::min(a.y, b.y) - pad) / w));
      const auto r1 = static_cast<long long>(std::floor((std::max(a.y, b.y) + pad) / w));
      for (long long r = r0; r <= r1; ++r)
        for (long long c = c0; c <= c1; ++c) cells.emplace(-r, c);
    }

  std::vector<CroppedPatch> out;
  for (const auto& [neg_r, c] : cells) {
    PatchSpec spec = base;
    spec.origin = {static_cast<double>(c) * w, static_cast<double>(-neg_r + 1) * w};
    RasterPatch img = rasterize(v, spec);
    if (img.foreground_count() == 0) continue;
    out.push_back({spec, static_cast<int>(neg_r), static_cast<int>(c), std::move(img)});
  }
  return out;
}

// Georeferenced single-band grid of real values; (x0, y0) is the Web
// Mercator top-left corner, rows run southwards.
struct GridSource {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<double> values;

  [[nodiscard]] double at(int col, int row) const {
    return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)];
  }
};

// A condition raster stored as bytes plus the value range needed to undo
// the byte normalization.
struct ConditionLayer {
  RasterPatch raster;
  double min = 0.0;
  double max = 0.0;

  [[nodiscard]] double denormalize(std::uint8_t b) const { return min + (max - min) * b / 255.0; }
};

struct ConditionSet {
  ConditionLayer elevation;
  ConditionLayer population;
  ConditionLayer land_use;
};

// Nearest-neighbor resample onto the patch grid, normalized to 0..255.
inline ConditionLayer resample_layer(const PatchSpec& patch, const GridSource& src) {
  patch.validate();
  if (src.width <= 0 || src.height <= 0 || !(src.resolution > 0.0) ||
      src.values.size() != static_cast<std::size_t>(src.width) * static_cast<std::size_t>(src.height))
    throw InvalidInput("condition source grid is malformed");

  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(patch.size) * patch.size);
  for (int r = 0; r < patch.size; ++r)
    for (int c = 0; c < patch.size; ++c) {
      const double x = patch.origin.x0 + (c + 0.5) * patch.resolution;
      const double y = patch.origin.y0 - (r + 0.5) * patch.resolution;
      const auto sc = static_cast<long long>(std::floor((x - src.x0) / src.resolution));
      const auto sr = static_cast<long long>(std::floor((src.y0 - y) / src.resolution));
      if (sc < 0 || sr < 0 || sc >= src.width || sr >= src.height)
        throw MissingCoverage("condition source does not cover the patch window");
      vals.push_back(src.at(static_cast<int>(sc), static_cast<int>(sr)));
    }

  ConditionLayer layer{RasterPatch(patch.size, patch.size, patch.resolution, patch.origin), 0.0, 0.0};
  const auto [lo, hi] = std::ranges::minmax_element(vals);
  layer.min = *lo;
  layer.max = *hi;
  const double range = layer.max - layer.min;
  auto px = layer.raster.pixels();
  for (std::size_t i = 0; i < vals.size(); ++i)
    px[i] = range > 0.0 ? static_cast<std::uint8_t>(std::lround((vals[i] - layer.min) / range * 255.0)) : 0;
  return layer;
}

inline ConditionSet align_condition_layers(const PatchSpec& patch, const GridSource& elevation,
                                           const GridSource& population, const GridSource& land_use) {
  return {resample_layer(patch, elevation), resample_layer(patch, population), resample_layer(patch, land_use)};
}

}  // namespace streetnet
