#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "streetnet/io.hpp"
#include "streetnet/metrics.hpp"

namespace streetnet {

// One histogram panel per metric, side by side: corpus A in blue, corpus B in
// orange, bar heights normalized to each corpus' own size. No text; panel
// order follows compared_metric_names().
inline void write_comparison_plot(const fs::path& path, const ComparisonReport& c) {
  constexpr int panel_w = 2 * kHistogramBins * 5 + 20, panel_h = 160, pad = 10;
  const int width = static_cast<int>(c.metrics.size()) * panel_w;
  const int height = panel_h;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) * height * 3, 255);
  auto fill = [&](int x0, int y0, int x1, int y1, std::array<std::uint8_t, 3> color) {
    for (int y = std::max(0, y0); y < std::min(height, y1); ++y)
      for (int x = std::max(0, x0); x < std::min(width, x1); ++x)
        for (int k = 0; k < 3; ++k) rgb[(static_cast<std::size_t>(y) * width + x) * 3 + k] = color[k];
  };
  constexpr std::array<std::uint8_t, 3> blue{31, 119, 180}, orange{255, 127, 14}, axis{0, 0, 0};

  for (std::size_t m = 0; m < c.metrics.size(); ++m) {
    const auto& mc = c.metrics[m];
    const int left = static_cast<int>(m) * panel_w + pad;
    const int base = panel_h - pad;
    const int usable = panel_h - 2 * pad;
    double peak = 0.0;
    for (int i = 0; i < kHistogramBins; ++i) {
      if (mc.a.n) peak = std::max(peak, double(mc.a.histogram[i]) / mc.a.n);
      if (mc.b.n) peak = std::max(peak, double(mc.b.histogram[i]) / mc.b.n);
    }
    for (int i = 0; i < kHistogramBins && peak > 0.0; ++i) {
      const int x = left + i * 10;
      const int ha = mc.a.n ? static_cast<int>(usable * (double(mc.a.histogram[i]) / mc.a.n) / peak) : 0;
      const int hb = mc.b.n ? static_cast<int>(usable * (double(mc.b.histogram[i]) / mc.b.n) / peak) : 0;
      fill(x, base - ha, x + 4, base, blue);
      fill(x + 5, base - hb, x + 9, base, orange);
    }
    fill(left, base, left + kHistogramBins * 10, base + 1, axis);
  }
  write_rgb_png(path, width, height, rgb);
}

}  // namespace streetnet
