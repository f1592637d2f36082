#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include <json.hpp>

#include "streetnet/errors.hpp"
#include "streetnet/extract.hpp"
#include "streetnet/geodata.hpp"
#include "streetnet/geojson.hpp"
#include "streetnet/metrics.hpp"

namespace streetnet {

// Every tunable of the command-line pipeline. Defaults are the library
// defaults; a JSON config file overrides them and explicit flags override
// the file.
struct PipelineConfig {
  ExtractConfig extract;  // includes the enhancement parameters
  MetricsConfig metrics;
  std::optional<std::uint64_t> seed;  // required before any sampled metric runs
  PatchSpec patch;
  std::set<std::string> highway_tags = default_highway_tags();
  InputCrs input_crs = InputCrs::Wgs84;
  std::string image_format = "png";
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  void validate() const {
    extract.validate();
    metrics.validate();
    patch.validate();
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (image_format != "png" && image_format != "pgm") throw ConfigError("image format must be png or pgm");
  }

  [[nodiscard]] MetricsConfig seeded_metrics() const {
    if (!seed) throw ConfigError("a seed is required for sampled metrics (--seed or \"seed\" in the config file)");
    MetricsConfig m = metrics;
    m.seed = *seed;
    return m;
  }
};

inline nlohmann::json to_json(const PipelineConfig& c) {
  const auto& e = c.extract;
  return {
      {"enhance",
       {{"threshold", e.enhance.threshold},
        {"radius", e.enhance.radius},
        {"dilate_iters", e.enhance.dilate_iters},
        {"rounds", e.enhance.rounds}}},
      {"extract",
       {{"leg_tolerance", e.leg_tolerance},
        {"angle_tolerance_deg", e.angle_tolerance_deg},
        {"epsilon_px", e.epsilon_px}}},
      {"metrics",
       {{"pairs", c.metrics.pairs},
        {"min_de_m", c.metrics.min_de_m},
        {"reach_radius_m", c.metrics.reach_radius_m},
        {"reach_samples", c.metrics.reach_samples}}},
      {"seed", c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr)},
      {"patch", {{"size", c.patch.size}, {"resolution", c.patch.resolution}, {"stroke_width", c.patch.stroke_width}}},
      {"highway_tags", c.highway_tags},
      {"input_crs", c.input_crs == InputCrs::Wgs84 ? "wgs84" : "mercator"},
      {"image_format", c.image_format},
      {"jobs", c.jobs},
  };
}

// Applies the keys present in `j` on top of `c`; unknown keys are an error
// so that typos do not silently fall back to defaults.
inline void merge_config(PipelineConfig& c, const nlohmann::json& j) {
  using nlohmann::json;
  auto check_keys = [](const json& obj, std::set<std::string> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError("config section '" + where + "' must be an object");
    for (const auto& [k, _] : obj.items())
      if (!allowed.contains(k)) throw ConfigError("unknown config key '" + where + k + "'");
  };
  try {
    check_keys(j, {"enhance", "extract", "metrics", "seed", "patch", "highway_tags", "input_crs", "image_format", "jobs"},
               "");
    if (j.contains("enhance")) {
      const json& s = j["enhance"];
      check_keys(s, {"threshold", "radius", "dilate_iters", "rounds"}, "enhance.");
      auto& e = c.extract.enhance;
      if (s.contains("threshold")) {
        const int t = s["threshold"].get<int>();
        if (t < 0 || t > 255) throw ConfigError("threshold must be within 0..255");
        e.threshold = static_cast<std::uint8_t>(t);
      }
      e.radius = s.value("radius", e.radius);
      e.dilate_iters = s.value("dilate_iters", e.dilate_iters);
      e.rounds = s.value("rounds", e.rounds);
    }
    if (j.contains("extract")) {
      const json& s = j["extract"];
      check_keys(s, {"leg_tolerance", "angle_tolerance_deg", "epsilon_px"}, "extract.");
      c.extract.leg_tolerance = s.value("leg_tolerance", c.extract.leg_tolerance);
      c.extract.angle_tolerance_deg = s.value("angle_tolerance_deg", c.extract.angle_tolerance_deg);
      c.extract.epsilon_px = s.value("epsilon_px", c.extract.epsilon_px);
    }
    if (j.contains("metrics")) {
      const json& s = j["metrics"];
      check_keys(s, {"pairs", "min_de_m", "reach_radius_m", "reach_samples"}, "metrics.");
      c.metrics.pairs = s.value("pairs", c.metrics.pairs);
      c.metrics.min_de_m = s.value("min_de_m", c.metrics.min_de_m);
      c.metrics.reach_radius_m = s.value("reach_radius_m", c.metrics.reach_radius_m);
      c.metrics.reach_samples = s.value("reach_samples", c.metrics.reach_samples);
    }
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("patch")) {
      const json& s = j["patch"];
      check_keys(s, {"size", "resolution", "stroke_width"}, "patch.");
      c.patch.size = s.value("size", c.patch.size);
      c.patch.resolution = s.value("resolution", c.patch.resolution);
      c.patch.stroke_width = s.value("stroke_width", c.patch.stroke_width);
    }
    if (j.contains("highway_tags")) c.highway_tags = j["highway_tags"].get<std::set<std::string>>();
    if (j.contains("input_crs")) {
      const auto crs = j["input_crs"].get<std::string>();
      if (crs == "wgs84") {
        c.input_crs = InputCrs::Wgs84;
      } else if (crs == "mercator") {
        c.input_crs = InputCrs::WebMercator;
      } else {
        throw ConfigError("input_crs must be wgs84 or mercator");
      }
    }
    c.image_format = j.value("image_format", c.image_format);
    c.jobs = j.value("jobs", c.jobs);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

}  // namespace streetnet
