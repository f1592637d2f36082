#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "streetnet/errors.hpp"

namespace streetnet {

inline constexpr std::uint8_t kStreet = 255;
inline constexpr std::uint8_t kBackground = 0;

// Web Mercator position (meters) of the top-left corner of a patch.
struct Georef {
  double x0 = 0.0;
  double y0 = 0.0;

  friend bool operator==(const Georef&, const Georef&) = default;
};

// Single-band 8-bit raster with a ground resolution in meters per pixel.
// Pixels are row-major; (x, y) is (column, row) with row 0 at the top.
class RasterPatch {
 public:
  RasterPatch() = default;

  RasterPatch(int width, int height, double resolution = 5.0,
              std::optional<Georef> georef = std::nullopt)
      : width_(width), height_(height), resolution_(resolution), georef_(georef) {
    if (width < 0 || height < 0) throw ConfigError("raster dimensions must be non-negative");
    if (!(resolution > 0.0) || !std::isfinite(resolution))
      throw ConfigError("raster resolution must be positive");
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), kBackground);
  }

  RasterPatch(int width, int height, std::vector<std::uint8_t> pixels, double resolution = 5.0,
              std::optional<Georef> georef = std::nullopt)
      : RasterPatch(width, height, resolution, georef) {
    if (pixels.size() != pixels_.size())
      throw InvalidInput("pixel buffer length does not match width * height");
    pixels_ = std::move(pixels);
  }

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] double resolution() const noexcept { return resolution_; }
  [[nodiscard]] const std::optional<Georef>& georef() const noexcept { return georef_; }
  void set_georef(std::optional<Georef> g) { georef_ = g; }

  [[nodiscard]] bool in_bounds(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  [[nodiscard]] std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  void set(int x, int y, std::uint8_t v) { pixels_[index(x, y)] = v; }

  // Out-of-bounds reads return background.
  [[nodiscard]] std::uint8_t get_or_zero(int x, int y) const noexcept {
    return in_bounds(x, y) ? pixels_[index(x, y)] : kBackground;
  }

  [[nodiscard]] std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  [[nodiscard]] std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  [[nodiscard]] std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  [[nodiscard]] bool is_binary() const noexcept {
    for (auto p : pixels_)
      if (p != kStreet && p != kBackground) return false;
    return true;
  }

  [[nodiscard]] std::size_t foreground_count() const noexcept {
    std::size_t n = 0;
    for (auto p : pixels_) n += (p != kBackground);
    return n;
  }

  // Same geometry, all background.
  [[nodiscard]] RasterPatch blank_like() const { return RasterPatch(width_, height_, resolution_, georef_); }

  friend bool operator==(const RasterPatch&, const RasterPatch&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 5.0;
  std::optional<Georef> georef_;
  std::vector<std::uint8_t> pixels_;
};

struct EnhanceConfig {
  std::uint8_t threshold = 127;
  int radius = 1;
  int dilate_iters = 2;
  int rounds = 2;

  void validate() const {
    if (radius < 1) throw ConfigError("dilation radius must be >= 1");
    if (dilate_iters < 0) throw ConfigError("dilation iterations must be >= 0");
    if (rounds < 0) throw ConfigError("enhancement rounds must be >= 0");
  }
};

// 255 where value > threshold, else 0.
inline RasterPatch binarize(const RasterPatch& img, std::uint8_t threshold = 127) {
  RasterPatch out = img;
  for (auto& p : out.pixels()) p = p > threshold ? kStreet : kBackground;
  return out;
}

// Square (Chebyshev) dilation, separable as a row max followed by a column max.
inline RasterPatch dilate(const RasterPatch& img, int radius, int iterations = 1) {
  if (radius < 1) throw ConfigError("dilation radius must be >= 1");
  if (iterations < 0) throw ConfigError("dilation iterations must be >= 0");
  if (!img.is_binary()) throw InvalidInput("dilate expects a binary (0/255) raster");

  const int w = img.width();
  const int h = img.height();
  RasterPatch cur = img;
  RasterPatch tmp = img.blank_like();
  for (int it = 0; it < iterations; ++it) {
    // Horizontal pass: running count of foreground within the window.
    for (int y = 0; y < h; ++y) {
      int count = 0;
      for (int x = 0; x <= std::min(radius - 1, w - 1); ++x) count += cur.at(x, y) != 0;
      for (int x = 0; x < w; ++x) {
        if (x + radius < w) count += cur.at(x + radius, y) != 0;
        if (x - radius - 1 >= 0) count -= cur.at(x - radius - 1, y) != 0;
        tmp.set(x, y, count > 0 ? kStreet : kBackground);
      }
    }
    for (int x = 0; x < w; ++x) {
      int count = 0;
      for (int y = 0; y <= std::min(radius - 1, h - 1); ++y) count += tmp.at(x, y) != 0;
      for (int y = 0; y < h; ++y) {
        if (y + radius < h) count += tmp.at(x, y + radius) != 0;
        if (y - radius - 1 >= 0) count -= tmp.at(x, y - radius - 1) != 0;
        cur.set(x, y, count > 0 ? kStreet : kBackground);
      }
    }
  }
  return cur;
}

namespace detail {

// Neighbor order used by the thinning tables: P2 (north) clockwise to P9
// (north-west). Bit k of a mask is neighbor P(k+2).
inline constexpr std::array<std::pair<int, int>, 8> kRing = {{
    {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}}};

// deletable[pass][mask]
inline constexpr auto kThinTable = [] {
  std::array<std::array<bool, 256>, 2> t{};
  for (int mask = 0; mask < 256; ++mask) {
    auto p = [mask](int k) { return (mask >> (k - 2)) & 1; };  // p(2)..p(9)
    int b = 0;
    for (int k = 0; k < 8; ++k) b += (mask >> k) & 1;
    int a = 0;
    for (int k = 0; k < 8; ++k) a += (((mask >> k) & 1) == 0) && (((mask >> ((k + 1) % 8)) & 1) == 1);
    const bool shape = b >= 2 && b <= 6 && a == 1;
    t[0][mask] = shape && p(2) * p(4) * p(6) == 0 && p(4) * p(6) * p(8) == 0;
    t[1][mask] = shape && p(2) * p(4) * p(8) == 0 && p(2) * p(6) * p(8) == 0;
  }
  return t;
}();

inline int ring_mask(const RasterPatch& img, int x, int y) noexcept {
  int mask = 0;
  for (int k = 0; k < 8; ++k)
    if (img.get_or_zero(x + kRing[k].first, y + kRing[k].second)) mask |= 1 << k;
  return mask;
}

}  // namespace detail

// Zhang-Suen thinning, repeated until neither sub-iteration deletes a pixel.
// Only pixels that were foreground after the previous pass are rescanned.
inline RasterPatch skeletonize(const RasterPatch& img) {
  if (!img.is_binary()) throw InvalidInput("skeletonize expects a binary (0/255) raster");
  RasterPatch cur = img;
  std::vector<std::pair<int, int>> live;
  for (int y = 0; y < cur.height(); ++y)
    for (int x = 0; x < cur.width(); ++x)
      if (cur.at(x, y)) live.emplace_back(x, y);

  std::vector<std::pair<int, int>> doomed;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      doomed.clear();
      for (auto [x, y] : live)
        if (detail::kThinTable[pass][detail::ring_mask(cur, x, y)]) doomed.emplace_back(x, y);
      for (auto [x, y] : doomed) cur.set(x, y, kBackground);
      if (!doomed.empty()) {
        changed = true;
        std::erase_if(live, [&cur](auto xy) { return cur.at(xy.first, xy.second) == kBackground; });
      }
    }
  }
  return cur;
}

// Binarize, then `rounds` x (dilate; skeletonize).
inline RasterPatch enhance(const RasterPatch& img, const EnhanceConfig& cfg = {}) {
  cfg.validate();
  RasterPatch out = binarize(img, cfg.threshold);
  for (int r = 0; r < cfg.rounds; ++r) out = skeletonize(dilate(out, cfg.radius, cfg.dilate_iters));
  return out;
}

// Number of 8-connected foreground components.
inline int count_components(const RasterPatch& img) {
  std::vector<char> seen(img.pixels().size(), 0);
  std::vector<std::pair<int, int>> stack;
  int components = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (!img.at(x, y) || seen[img.index(x, y)]) continue;
      ++components;
      seen[img.index(x, y)] = 1;
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        for (auto [dx, dy] : detail::kRing) {
          const int nx = cx + dx, ny = cy + dy;
          if (img.get_or_zero(nx, ny) && !seen[img.index(nx, ny)]) {
            seen[img.index(nx, ny)] = 1;
            stack.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  return components;
}

}  // namespace streetnet
