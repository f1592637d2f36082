// streetnet
//
// Command-line front end: rasterize vector streets into patches, extract
// street graphs from rasters, score graphs, compare corpora, or run the whole
// image -> graph -> report pipeline over a directory.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "streetnet/streetnet.hpp"

namespace {

using namespace streetnet;
using nlohmann::json;

// Command-line overrides; unset members leave the config file / defaults alone.
struct Flags {
  std::string config_path;
  std::optional<int> jobs;
  std::optional<int> threshold, radius, dilate_iters, rounds;
  std::optional<double> leg_tolerance, angle_tolerance, epsilon;
  std::optional<std::uint64_t> seed;
  std::optional<int> pairs, reach_samples;
  std::optional<double> min_de, reach_radius;
  std::optional<int> size, stroke_width;
  std::optional<double> resolution;
  std::optional<std::string> tags, input_crs, format;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file (flags override it)")->check(CLI::ExistingFile);
  cmd->add_option("-j,--jobs", f.jobs, "Worker threads (default: all cores)");
}

void add_extract_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--threshold", f.threshold, "Binarization threshold; pixels above it are street (127)");
  cmd->add_option("--radius", f.radius, "Dilation radius in pixels (1)");
  cmd->add_option("--dilate-iters", f.dilate_iters, "Dilations per enhancement round (2)");
  cmd->add_option("--rounds", f.rounds, "Dilate+thin rounds (2)");
  cmd->add_option("--leg-tolerance", f.leg_tolerance, "Relative leg mismatch for right-triangle removal (0.1)");
  cmd->add_option("--angle-tolerance", f.angle_tolerance, "Degrees from 90 for right-triangle removal (5)");
  cmd->add_option("--epsilon", f.epsilon, "Douglas-Peucker tolerance in pixels (1)");
  cmd->add_option("--resolution", f.resolution, "Meters per pixel for images without a sidecar (5)");
}

void add_metric_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--seed", f.seed, "Seed for sampled metrics (required unless set in --config)");
  cmd->add_option("--pairs", f.pairs, "Transportation convenience sample pairs (100)");
  cmd->add_option("--min-de", f.min_de, "Minimum Euclidean pair distance in meters (250)");
  cmd->add_option("--reach-radius", f.reach_radius, "Metric reach travel distance in meters (500)");
  cmd->add_option("--reach-samples", f.reach_samples, "Metric reach source vertices (100)");
}

void add_patch_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--size", f.size, "Patch size in pixels (512)");
  cmd->add_option("--resolution", f.resolution, "Meters per pixel (5)");
  cmd->add_option("--stroke-width", f.stroke_width, "Street stroke width in pixels, odd (3)");
  cmd->add_option("--tags", f.tags, "Comma-separated highway tags to keep");
  cmd->add_option("--input-crs", f.input_crs, "Input coordinates: wgs84 or mercator")
      ->check(CLI::IsMember({"wgs84", "mercator"}));
  cmd->add_option("--format", f.format, "Patch image format: png or pgm")->check(CLI::IsMember({"png", "pgm"}));
}

PipelineConfig effective_config(const Flags& f) {
  PipelineConfig c;
  if (!f.config_path.empty()) merge_config(c, read_json_file(f.config_path));
  if (f.threshold) {
    if (*f.threshold < 0 || *f.threshold > 255) throw ConfigError("threshold must be within 0..255");
    c.extract.enhance.threshold = static_cast<std::uint8_t>(*f.threshold);
  }
  if (f.radius) c.extract.enhance.radius = *f.radius;
  if (f.dilate_iters) c.extract.enhance.dilate_iters = *f.dilate_iters;
  if (f.rounds) c.extract.enhance.rounds = *f.rounds;
  if (f.leg_tolerance) c.extract.leg_tolerance = *f.leg_tolerance;
  if (f.angle_tolerance) c.extract.angle_tolerance_deg = *f.angle_tolerance;
  if (f.epsilon) c.extract.epsilon_px = *f.epsilon;
  if (f.seed) c.seed = *f.seed;
  if (f.pairs) c.metrics.pairs = *f.pairs;
  if (f.min_de) c.metrics.min_de_m = *f.min_de;
  if (f.reach_radius) c.metrics.reach_radius_m = *f.reach_radius;
  if (f.reach_samples) c.metrics.reach_samples = *f.reach_samples;
  if (f.size) c.patch.size = *f.size;
  if (f.resolution) c.patch.resolution = *f.resolution;
  if (f.stroke_width) c.patch.stroke_width = *f.stroke_width;
  if (f.tags) {
    c.highway_tags.clear();
    std::stringstream ss(*f.tags);
    for (std::string t; std::getline(ss, t, ',');)
      if (!t.empty()) c.highway_tags.insert(t);
  }
  if (f.input_crs) c.input_crs = *f.input_crs == "wgs84" ? InputCrs::Wgs84 : InputCrs::WebMercator;
  if (f.format) c.image_format = *f.format;
  if (f.jobs) c.jobs = *f.jobs;
  c.validate();
  return c;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create directory " + dir.string() + ": " + ec.message());
}

// Collects failures from worker threads; the command fails if any is recorded.
class FailureLog {
 public:
  void add(const std::string& what, const std::string& why) {
    std::lock_guard lock(mu_);
    failures_.emplace(what, why);
  }
  [[nodiscard]] bool empty() const { return failures_.empty(); }
  [[nodiscard]] json to_json() const { return failures_; }
  void print() const {
    for (const auto& [what, why] : failures_) std::cerr << "error: " << what << ": " << why << "\n";
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::string> failures_;
};

bool is_image(const fs::path& p) {
  std::string ext = p.extension().string();
  std::ranges::transform(ext, ext.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext == ".png" || ext == ".pgm";
}

std::vector<fs::path> list_files(const fs::path& dir, auto&& keep) {
  if (!fs::is_directory(dir)) throw FormatError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && keep(e.path())) out.push_back(e.path());
  std::ranges::sort(out);
  return out;
}

bool is_report(const fs::path& p) {
  const std::string name = p.filename().string();
  return name.size() > 13 && name.ends_with(".metrics.json");
}

std::string report_name(const fs::path& graph_path) { return graph_path.stem().string() + ".metrics.json"; }

// ---------------------------------------------------------------------------

int cmd_rasterize(const fs::path& input, const fs::path& out_dir, const PipelineConfig& cfg,
                  const std::map<std::string, std::string>& layer_paths) {
  VectorStreetSet streets = vector_streets_from_geojson(read_json_file(input));
  streets = filter_highways(streets, cfg.highway_tags);
  if (cfg.input_crs == InputCrs::Wgs84) streets = project_web_mercator(streets);

  std::map<std::string, GridSource> layers;
  for (const auto& [name, path] : layer_paths)
    if (!path.empty()) layers.emplace(name, read_grid_source(path));

  ensure_dir(out_dir);
  const json config = to_json(cfg);
  const std::vector<CroppedPatch> patches = crop_patches(streets, cfg.patch);
  const std::string ext = "." + cfg.image_format;

  FailureLog failures;
  std::vector<json> entries(patches.size());
  parallel_for(patches.size(), cfg.jobs, [&](std::size_t i) {
    const CroppedPatch& p = patches[i];
    const std::string id = "patch_" + std::to_string(p.row) + "_" + std::to_string(p.col);
    try {
      json info = {{"id", id}, {"row", p.row}, {"col", p.col}, {"stroke_width", p.spec.stroke_width}, {"config", config}};
      save_raster(out_dir / (id + ext), p.raster, info);
      json entry = {{"id", id},
                    {"row", p.row},
                    {"col", p.col},
                    {"origin", georef_to_json(p.spec.origin)},
                    {"file", id + ext},
                    {"sidecar", id + ".json"}};
      json layer_files = json::object();
      for (const auto& [name, src] : layers) {
        const ConditionLayer layer = resample_layer(p.spec, src);
        const std::string file = id + "_" + name + ext;
        save_raster(out_dir / file, layer.raster,
                    {{"layer", name}, {"min", layer.min}, {"max", layer.max}, {"patch", id}, {"config", config}});
        layer_files[name] = file;
      }
      entry["layers"] = layer_files;
      entries[i] = std::move(entry);
    } catch (const std::exception& e) {
      failures.add(id, e.what());
    }
  });

  json manifest = {{"source", input.filename().string()},
                   {"config", config},
                   {"patch_count", patches.size()},
                   {"patches", entries}};
  write_json_file(out_dir / "manifest.json", manifest);
  failures.print();
  std::cout << "wrote " << patches.size() << " patch(es) to " << out_dir.string() << "\n";
  return failures.empty() ? 0 : 1;
}

// Extracts each image into out_dir/<stem>.geojson. Returns the written paths
// indexed like `inputs` (empty on failure).
std::vector<fs::path> extract_all(const std::vector<fs::path>& inputs, const fs::path& out_dir,
                                  const PipelineConfig& cfg, FailureLog& failures) {
  ensure_dir(out_dir);
  const json config = to_json(cfg);
  std::vector<fs::path> written(inputs.size());
  parallel_for(inputs.size(), cfg.jobs, [&](std::size_t i) {
    try {
      const RasterPatch img = load_raster(inputs[i], cfg.patch.resolution);
      const StreetGraph g = extract(img, cfg.extract);
      const fs::path out = out_dir / (inputs[i].stem().string() + ".geojson");
      write_json_file(out, graph_to_geojson(g, {{"source", inputs[i].filename().string()}, {"config", config}}));
      written[i] = out;
    } catch (const std::exception& e) {
      failures.add(inputs[i].string(), e.what());
    }
  });
  return written;
}

json metrics_document(const fs::path& graph_path, const PipelineConfig& cfg) {
  const StreetGraph g = graph_from_geojson(read_json_file(graph_path));
  json doc = to_json(report(g, cfg.seeded_metrics()));
  doc["source"] = graph_path.filename().string();
  doc["config"] = to_json(cfg);
  return doc;
}

int cmd_extract(const std::vector<fs::path>& inputs, const fs::path& out_dir, const PipelineConfig& cfg) {
  FailureLog failures;
  const auto written = extract_all(inputs, out_dir, cfg, failures);
  failures.print();
  std::cout << "wrote " << std::ranges::count_if(written, [](const fs::path& p) { return !p.empty(); })
            << " graph(s) to " << out_dir.string() << "\n";
  return failures.empty() ? 0 : 1;
}

int cmd_metrics(const std::vector<fs::path>& inputs, const std::optional<fs::path>& out_dir,
                const PipelineConfig& cfg) {
  (void)cfg.seeded_metrics();  // fail fast without a seed
  FailureLog failures;
  std::vector<json> docs(inputs.size());
  parallel_for(inputs.size(), cfg.jobs, [&](std::size_t i) {
    try {
      docs[i] = metrics_document(inputs[i], cfg);
      if (out_dir) write_json_file(*out_dir / report_name(inputs[i]), docs[i]);
    } catch (const std::exception& e) {
      failures.add(inputs[i].string(), e.what());
    }
  });
  failures.print();
  if (!failures.empty()) return 1;
  if (!out_dir) std::cout << (docs.size() == 1 ? docs.front() : json(docs)).dump(2) << "\n";
  return 0;
}

std::vector<MetricsReport> load_reports(const fs::path& dir) {
  const auto files = list_files(dir, is_report);
  if (files.empty()) throw EmptyCorpus("no *.metrics.json reports in " + dir.string());
  std::vector<MetricsReport> out;
  for (const auto& f : files) {
    try {
      out.push_back(metrics_report_from_json(read_json_file(f)));
    } catch (const json::exception& e) {
      throw FormatError("bad report " + f.string() + ": " + e.what());
    }
  }
  return out;
}

int cmd_compare(const fs::path& dir_a, const fs::path& dir_b, const std::optional<fs::path>& out,
                const std::optional<fs::path>& plot) {
  const ComparisonReport c = compare(load_reports(dir_a), load_reports(dir_b));
  json doc = to_json(c);
  doc["a"] = dir_a.filename().string();
  doc["b"] = dir_b.filename().string();
  if (out) {
    write_json_file(*out, doc);
  } else {
    std::cout << doc.dump(2) << "\n";
  }
  if (plot) write_comparison_plot(*plot, c);
  return 0;
}

int cmd_pipeline(const fs::path& image_dir, const fs::path& out_dir, const PipelineConfig& cfg,
                 const std::optional<fs::path>& reference, const std::optional<fs::path>& plot) {
  (void)cfg.seeded_metrics();
  const auto images = list_files(image_dir, is_image);
  if (images.empty()) throw EmptyCorpus("no .png or .pgm images in " + image_dir.string());
  ensure_dir(out_dir / "reports");

  FailureLog failures;
  const auto graphs = extract_all(images, out_dir / "graphs", cfg, failures);
  std::vector<std::optional<MetricsReport>> reports(graphs.size());
  parallel_for(graphs.size(), cfg.jobs, [&](std::size_t i) {
    if (graphs[i].empty()) return;
    try {
      const json doc = metrics_document(graphs[i], cfg);
      write_json_file(out_dir / "reports" / report_name(graphs[i]), doc);
      reports[i] = metrics_report_from_json(doc);
    } catch (const std::exception& e) {
      failures.add(graphs[i].string(), e.what());
    }
  });

  std::vector<MetricsReport> corpus;
  for (const auto& r : reports)
    if (r) corpus.push_back(*r);

  json summary = {{"config", to_json(cfg)},
                  {"images", images.size()},
                  {"graphs_written", std::ranges::count_if(graphs, [](const fs::path& p) { return !p.empty(); })},
                  {"reports_written", corpus.size()},
                  {"failures", failures.to_json()}};
  json stats = json::object();
  for (const std::string& name : compared_metric_names()) {
    std::vector<double> v;
    for (const auto& r : corpus)
      if (auto x = metric_value(r, name)) v.push_back(*x);
    double lo = v.empty() ? 0.0 : *std::ranges::min_element(v), hi = v.empty() ? 0.0 : *std::ranges::max_element(v);
    stats[name] = to_json(summarize(v, lo, hi));
  }
  summary["corpus"] = stats;
  std::size_t below = std::ranges::count_if(corpus, [](const MetricsReport& r) { return r.below_connectivity_guideline(); });
  summary["below_connectivity_guideline"] = below;

  if (reference && !corpus.empty()) {
    const ComparisonReport c = compare(corpus, load_reports(*reference));
    json cmp = to_json(c);
    cmp["config"] = to_json(cfg);
    write_json_file(out_dir / "comparison.json", cmp);
    summary["comparison"] = "comparison.json";
    if (plot) write_comparison_plot(*plot, c);
  }
  write_json_file(out_dir / "summary.json", summary);
  failures.print();
  std::cout << "processed " << images.size() << " image(s): " << corpus.size() << " report(s) in "
            << out_dir.string() << "\n";
  return failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streetnet: street-layout rasters to planar graphs and urban-form metrics"};
  app.require_subcommand(1);

  Flags flags;
  std::string input, out_dir, dir_a, dir_b, reference, plot, out_file;
  std::vector<std::string> inputs;
  std::map<std::string, std::string> layers{{"elevation", ""}, {"population", ""}, {"landuse", ""}};

  auto* rasterize = app.add_subcommand("rasterize", "Rasterize GeoJSON streets into georeferenced patches");
  rasterize->add_option("input", input, "GeoJSON FeatureCollection of LineStrings")->required()->check(CLI::ExistingFile);
  rasterize->add_option("-o,--out", out_dir, "Output directory")->required();
  rasterize->add_option("--elevation", layers["elevation"], "Elevation grid header (JSON)")->check(CLI::ExistingFile);
  rasterize->add_option("--population", layers["population"], "Population grid header (JSON)")->check(CLI::ExistingFile);
  rasterize->add_option("--landuse", layers["landuse"], "Land-use grid header (JSON)")->check(CLI::ExistingFile);
  add_common(rasterize, flags);
  add_patch_flags(rasterize, flags);

  auto* extract_cmd = app.add_subcommand("extract", "Extract street graphs (GeoJSON) from raster images");
  extract_cmd->add_option("images", inputs, "PNG or PGM images")->required();
  extract_cmd->add_option("-o,--out", out_dir, "Output directory")->required();
  add_common(extract_cmd, flags);
  add_extract_flags(extract_cmd, flags);

  auto* metrics_cmd = app.add_subcommand("metrics", "Score street graphs");
  metrics_cmd->add_option("graphs", inputs, "Graph GeoJSON files")->required();
  metrics_cmd->add_option("-o,--out", out_dir, "Write <name>.metrics.json here instead of stdout");
  add_common(metrics_cmd, flags);
  add_metric_flags(metrics_cmd, flags);

  auto* compare_cmd = app.add_subcommand("compare", "Compare two directories of metrics reports");
  compare_cmd->add_option("a", dir_a, "Directory of *.metrics.json")->required();
  compare_cmd->add_option("b", dir_b, "Directory of *.metrics.json")->required();
  compare_cmd->add_option("-o,--out", out_file, "Comparison JSON path (default stdout)");
  compare_cmd->add_option("--plot", plot, "Write histogram panels to this PNG");

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Images -> graphs -> reports -> summary");
  pipeline_cmd->add_option("images", input, "Directory of PNG/PGM images")->required();
  pipeline_cmd->add_option("-o,--out", out_dir, "Output directory")->required();
  pipeline_cmd->add_option("--reference", reference, "Directory of reference *.metrics.json to compare against");
  pipeline_cmd->add_option("--plot", plot, "Histogram PNG for the reference comparison");
  add_common(pipeline_cmd, flags);
  add_extract_flags(pipeline_cmd, flags);
  add_metric_flags(pipeline_cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  auto opt_path = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<fs::path>(s); };
  try {
    if (*rasterize) {
      std::map<std::string, std::string> layer_paths;
      for (const auto& [k, v] : layers) layer_paths[k] = v;
      return cmd_rasterize(input, out_dir, effective_config(flags), layer_paths);
    }
    if (*extract_cmd) {
      return cmd_extract({inputs.begin(), inputs.end()}, out_dir, effective_config(flags));
    }
    if (*metrics_cmd) {
      const PipelineConfig cfg = effective_config(flags);
      if (!out_dir.empty()) ensure_dir(out_dir);
      return cmd_metrics({inputs.begin(), inputs.end()}, opt_path(out_dir), cfg);
    }
    if (*compare_cmd) return cmd_compare(dir_a, dir_b, opt_path(out_file), opt_path(plot));
    if (*pipeline_cmd)
      return cmd_pipeline(input, out_dir, effective_config(flags), opt_path(reference), opt_path(plot));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
