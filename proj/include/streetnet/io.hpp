#pragma once

#include <png.h>

#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "streetnet/errors.hpp"
#include "streetnet/geodata.hpp"
#include "streetnet/raster.hpp"

namespace streetnet {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed for " + path.string());
}

inline json read_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw FormatError(path.string() + " is empty");
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// Two-space indented JSON with a trailing newline; keys come out sorted.
inline void write_json_file(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// PNG

inline RasterPatch read_png(const fs::path& path, double resolution = 5.0) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw FormatError("cannot read PNG " + path.string() + ": " + image.message);
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("cannot decode PNG " + path.string() + ": " + msg);
  }
  return RasterPatch(static_cast<int>(image.width), static_cast<int>(image.height), std::move(buf), resolution);
}

namespace detail {

inline void write_png_buffer(const fs::path& path, int width, int height, png_uint_32 format,
                             const std::uint8_t* data) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr))
    throw FormatError("cannot write PNG " + path.string() + ": " + image.message);
}

}  // namespace detail

inline void write_png(const fs::path& path, const RasterPatch& img) {
  if (img.width() == 0 || img.height() == 0) throw FormatError("cannot write an empty raster as PNG");
  detail::write_png_buffer(path, img.width(), img.height(), PNG_FORMAT_GRAY, img.pixels().data());
}

// Interleaved 8-bit RGB.
inline void write_rgb_png(const fs::path& path, int width, int height, const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != static_cast<std::size_t>(width) * height * 3) throw FormatError("RGB buffer size mismatch");
  detail::write_png_buffer(path, width, height, PNG_FORMAT_RGB, rgb.data());
}

// ---------------------------------------------------------------------------
// PGM (P2 ascii and P5 binary, maxval <= 255)

inline RasterPatch read_pgm(const fs::path& path, double resolution = 5.0) {
  const std::string data = read_text_file(path);
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto token = [&] {
    skip_space();
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])) && data[pos] != '#') ++pos;
    if (start == pos) throw FormatError("truncated PGM header in " + path.string());
    return data.substr(start, pos - start);
  };
  auto number = [&] {
    const std::string t = token();
    try {
      std::size_t used = 0;
      const long v = std::stol(t, &used);
      if (used != t.size() || v < 0) throw FormatError("bad number");
      return v;
    } catch (const std::exception&) {
      throw FormatError("bad number '" + t + "' in PGM " + path.string());
    }
  };

  const std::string magic = token();
  if (magic != "P2" && magic != "P5") throw FormatError(path.string() + " is not a PGM (P2/P5) file");
  const long w = number(), h = number(), maxval = number();
  if (w <= 0 || h <= 0 || w > 1 << 16 || h > 1 << 16) throw FormatError("bad PGM dimensions in " + path.string());
  if (maxval <= 0 || maxval > 255) throw FormatError("only 8-bit PGM is supported: " + path.string());

  std::vector<std::uint8_t> px(static_cast<std::size_t>(w * h));
  auto scale = [maxval](long v) { return static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255 + maxval / 2) / maxval); };
  if (magic == "P5") {
    ++pos;  // single whitespace after maxval
    if (data.size() < pos + px.size()) throw FormatError("truncated PGM raster in " + path.string());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = scale(static_cast<unsigned char>(data[pos + i]));
  } else {
    for (auto& p : px) {
      const long v = number();
      if (v > maxval) throw FormatError("PGM sample exceeds maxval in " + path.string());
      p = scale(v);
    }
  }
  return RasterPatch(static_cast<int>(w), static_cast<int>(h), std::move(px), resolution);
}

inline void write_pgm(const fs::path& path, const RasterPatch& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels().data()), static_cast<std::streamsize>(img.pixels().size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Raster + JSON sidecar

inline fs::path sidecar_path(const fs::path& image) {
  fs::path p = image;
  p.replace_extension(".json");
  return p;
}

inline json georef_to_json(const std::optional<Georef>& g) {
  if (!g) return nullptr;
  return {{"x0", g->x0}, {"y0", g->y0}};
}

inline std::optional<Georef> georef_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Georef{j.at("x0").get<double>(), j.at("y0").get<double>()};
}

inline json sidecar_json(const RasterPatch& img, const json& extra = json::object()) {
  json j = extra;
  j["width"] = img.width();
  j["height"] = img.height();
  j["resolution"] = img.resolution();
  j["georef"] = georef_to_json(img.georef());
  return j;
}

// Dispatches on extension (.png, .pgm). A sidecar next to the image, when
// present, supplies resolution and georef.
inline RasterPatch load_raster(const fs::path& path, double default_resolution = 5.0) {
  if (!fs::exists(path)) throw FormatError("no such file: " + path.string());
  std::string ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  RasterPatch img;
  if (ext == ".png") {
    img = read_png(path, default_resolution);
  } else if (ext == ".pgm") {
    img = read_pgm(path, default_resolution);
  } else {
    throw FormatError("unsupported image format: " + path.string());
  }
  const fs::path side = sidecar_path(path);
  if (fs::exists(side)) {
    try {
      const json j = read_json_file(side);
      const double res = j.value("resolution", default_resolution);
      std::optional<Georef> geo = j.contains("georef") ? georef_from_json(j["georef"]) : std::nullopt;
      img = RasterPatch(img.width(), img.height(),
                        std::vector<std::uint8_t>(img.pixels().begin(), img.pixels().end()), res, geo);
    } catch (const json::exception& e) {
      throw FormatError("bad sidecar " + side.string() + ": " + e.what());
    }
  }
  return img;
}

inline void save_raster(const fs::path& path, const RasterPatch& img, const json& sidecar_extra = json::object()) {
  std::string ext = path.extension().string();
  if (ext == ".pgm") {
    write_pgm(path, img);
  } else if (ext == ".png") {
    write_png(path, img);
  } else {
    throw FormatError("unsupported image format: " + path.string());
  }
  write_json_file(sidecar_path(path), sidecar_json(img, sidecar_extra));
}

// ---------------------------------------------------------------------------
// Condition source grids: JSON header naming a raw little-endian data file.
//
//   {"width": W, "height": H, "resolution": m, "x0": .., "y0": ..,
//    "dtype": "float32" | "float64" | "uint8", "data": "elevation.raw"}

inline GridSource read_grid_source(const fs::path& header_path) {
  const json h = read_json_file(header_path);
  GridSource g;
  std::string dtype, data;
  try {
    g.width = h.at("width").get<int>();
    g.height = h.at("height").get<int>();
    g.resolution = h.at("resolution").get<double>();
    g.x0 = h.at("x0").get<double>();
    g.y0 = h.at("y0").get<double>();
    dtype = h.value("dtype", std::string("float32"));
    data = h.at("data").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError("bad grid header " + header_path.string() + ": " + e.what());
  }
  if (g.width <= 0 || g.height <= 0 || !(g.resolution > 0.0)) throw FormatError("bad grid geometry in " + header_path.string());
  const std::string raw = read_text_file(header_path.parent_path() / data);
  const std::size_t n = static_cast<std::size_t>(g.width) * static_cast<std::size_t>(g.height);
  g.values.resize(n);
  if (dtype == "uint8") {
    if (raw.size() != n) throw FormatError("grid data size mismatch for " + header_path.string());
    for (std::size_t i = 0; i < n; ++i) g.values[i] = static_cast<unsigned char>(raw[i]);
  } else if (dtype == "float32") {
    if (raw.size() != n * 4) throw FormatError("grid data size mismatch for " + header_path.string());
    for (std::size_t i = 0; i < n; ++i) {
      float f;
      std::memcpy(&f, raw.data() + 4 * i, 4);
      g.values[i] = f;
    }
  } else if (dtype == "float64") {
    if (raw.size() != n * 8) throw FormatError("grid data size mismatch for " + header_path.string());
    for (std::size_t i = 0; i < n; ++i) std::memcpy(&g.values[i], raw.data() + 8 * i, 8);
  } else {
    throw FormatError("unsupported grid dtype '" + dtype + "' in " + header_path.string());
  }
  return g;
}

}  // namespace streetnet
