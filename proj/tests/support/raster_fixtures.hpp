#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "streetnet/raster.hpp"

namespace streetnet::testing {

// '#' is street (255), anything else background.
inline RasterPatch from_ascii(const std::vector<std::string>& rows, double resolution = 5.0) {
  const int h = static_cast<int>(rows.size());
  const int w = h ? static_cast<int>(rows[0].size()) : 0;
  RasterPatch img(w, h, resolution);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (rows[y][x] == '#') img.set(x, y, kStreet);
  return img;
}

inline RasterPatch from_points(int w, int h, const std::vector<std::pair<int, int>>& pts) {
  RasterPatch img(w, h);
  for (auto [x, y] : pts) img.set(x, y, kStreet);
  return img;
}

inline std::vector<std::pair<int, int>> foreground(const RasterPatch& img) {
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (img.at(x, y)) out.emplace_back(x, y);
  return out;
}

inline void fill_rect(RasterPatch& img, int x0, int y0, int x1, int y1, std::uint8_t v = kStreet) {
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (img.in_bounds(x, y)) img.set(x, y, v);
}

// Random union of rectangles and thick strokes.
inline RasterPatch random_blobs(std::uint64_t seed, int size = 48) {
  std::mt19937_64 rng(seed);
  auto r = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  RasterPatch img(size, size);
  const int shapes = 1 + r(6);
  for (int i = 0; i < shapes; ++i) {
    const int x = r(size), y = r(size);
    if (r(2)) {
      fill_rect(img, x, y, x + r(12), y + 1 + r(3));
    } else {
      fill_rect(img, x, y, x + 1 + r(3), y + r(12));
    }
  }
  return img;
}

// Random grayscale noise.
inline RasterPatch random_gray(std::uint64_t seed, int w = 32, int h = 24) {
  std::mt19937_64 rng(seed);
  RasterPatch img(w, h);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng() & 0xFF);
  return img;
}

}  // namespace streetnet::testing
