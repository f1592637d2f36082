#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "streetnet/errors.hpp"
#include "streetnet/graph.hpp"

namespace streetnet {

// Planning guideline floor for the connectivity index.
inline constexpr double kMinConnectivityIndex = 1.4;
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct MetricsConfig {
  int pairs = 100;              // transportation convenience sample size
  double min_de_m = 250.0;      // pairs must be farther apart than this (Euclidean)
  double reach_radius_m = 500.0;
  int reach_samples = 100;      // metric reach sources, capped at |V|
  std::uint64_t seed = 0;

  void validate() const {
    if (pairs < 1) throw ConfigError("pair count must be >= 1");
    if (!(min_de_m >= 0.0)) throw ConfigError("minimum Euclidean distance must be >= 0");
    if (!(reach_radius_m >= 0.0)) throw ConfigError("metric reach radius must be >= 0");
    if (reach_samples < 1) throw ConfigError("metric reach samples must be >= 1");
  }
};

// Uniform integer in [0, n) from a 64-bit engine. Unlike
// std::uniform_int_distribution the mapping is fixed, so sampled metrics are
// reproducible across standard libraries.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return static_cast<std::size_t>(r % n);
}

// Adjacency with edge lengths in meters.
class WeightedGraph {
 public:
  explicit WeightedGraph(const StreetGraph& g) : adj_(g.vertex_count()) {
    for (const Edge& e : g.edges()) {
      const double len = g.edge_length_m(e.a, e.b);
      adj_[e.a].push_back({e.b, len});
      adj_[e.b].push_back({e.a, len});
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return adj_.size(); }

  // Single-source shortest path lengths in meters (kUnreachable if none).
  [[nodiscard]] std::vector<double> dijkstra(VertexId source) const {
    std::vector<double> dist(adj_.size(), kUnreachable);
    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[source] = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (d > dist[u]) continue;
      for (const auto& [v, w] : adj_[u])
        if (d + w < dist[v]) {
          dist[v] = d + w;
          queue.emplace(dist[v], v);
        }
    }
    return dist;
  }

 private:
  std::vector<std::vector<std::pair<VertexId, double>>> adj_;
};

inline std::vector<double> shortest_distances_m(const StreetGraph& g, VertexId source) {
  return WeightedGraph(g).dijkstra(source);
}

// Mean degree over vertices whose degree is not 2.
inline double connectivity_index(const StreetGraph& g) {
  std::size_t sum = 0, count = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) != 2) {
      sum += g.degree(v);
      ++count;
    }
  if (count == 0) throw EmptyGraph("no vertex with degree other than 2");
  return static_cast<double>(sum) / static_cast<double>(count);
}

// Plain mean degree over all vertices.
inline double connectivity_index_unfiltered(const StreetGraph& g) {
  if (g.empty()) throw EmptyGraph("graph has no vertices");
  return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.vertex_count());
}

struct IntersectionDensity {
  std::size_t count = 0;
  std::optional<double> per_km2;  // only when the patch extent is known
};

inline IntersectionDensity intersection_density(const StreetGraph& g) {
  IntersectionDensity out;
  for (VertexId v = 0; v < g.vertex_count(); ++v) out.count += g.degree(v) > 2;
  if (const auto& ext = g.extent(); ext && ext->width > 0 && ext->height > 0) {
    const double area_km2 = ext->width * g.resolution() * ext->height * g.resolution() / 1e6;
    out.per_km2 = static_cast<double>(out.count) / area_km2;
  }
  return out;
}

inline double total_street_length_km(const StreetGraph& g) {
  double m = 0.0;
  for (const Edge& e : g.edges()) m += g.edge_length_m(e.a, e.b);
  return m / 1000.0;
}

struct SamplePair {
  VertexId s = 0;
  VertexId d = 0;
  double d_e_m = 0.0;
  double d_d_m = kUnreachable;  // network distance; kUnreachable when disconnected

  // d_E / d_D, or 0 for an unreachable destination.
  [[nodiscard]] double score() const { return std::isfinite(d_d_m) ? d_e_m / d_d_m : 0.0; }
};

struct ConvenienceResult {
  double mean = 0.0;
  std::vector<SamplePair> pairs;
};

// Scores of explicit (s, d) pairs, no distance filter.
inline std::vector<SamplePair> score_pairs(const StreetGraph& g,
                                           const std::vector<std::pair<VertexId, VertexId>>& pairs) {
  const WeightedGraph wg(g);
  std::map<VertexId, std::vector<double>> cache;
  std::vector<SamplePair> out;
  for (auto [s, d] : pairs) {
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, wg.dijkstra(s)).first;
    const double de = distance(g.point(s), g.point(d)) * g.meters_per_unit();
    out.push_back({s, d, de, it->second[d]});
  }
  return out;
}

// Mean d_E/d_D over `pair_count` seeded vertex pairs with d_E > min_de_m.
// Pairs are drawn uniformly with rejection; when rejection is hopeless the
// draw falls back to the explicit list of qualifying pairs, which gives the
// same distribution.
inline ConvenienceResult transportation_convenience(const StreetGraph& g, int pair_count = 100,
                                                    double min_de_m = 250.0, std::uint64_t seed = 0) {
  if (pair_count < 1) throw ConfigError("pair count must be >= 1");
  const std::size_t n = g.vertex_count();
  if (n < 2) throw NoValidPairs("transportation convenience needs at least 2 vertices");
  const double mpu = g.meters_per_unit();
  auto far_enough = [&](VertexId s, VertexId d) { return distance(g.point(s), g.point(d)) * mpu > min_de_m; };

  std::size_t valid = 0;
  for (VertexId s = 0; s < n; ++s)
    for (VertexId d = 0; d < n; ++d) valid += far_enough(s, d);
  if (valid == 0) throw NoValidPairs("no vertex pair is farther apart than the minimum Euclidean distance");

  std::mt19937_64 rng(seed);
  std::vector<std::pair<VertexId, VertexId>> chosen;
  const long max_attempts = 1000L * pair_count;
  long attempts = 0;
  while (chosen.size() < static_cast<std::size_t>(pair_count) && attempts < max_attempts) {
    ++attempts;
    const auto s = static_cast<VertexId>(uniform_index(rng, n));
    const auto d = static_cast<VertexId>(uniform_index(rng, n));
    if (far_enough(s, d)) chosen.emplace_back(s, d);
  }
  if (chosen.size() < static_cast<std::size_t>(pair_count)) {
    std::vector<std::pair<VertexId, VertexId>> all;
    all.reserve(valid);
    for (VertexId s = 0; s < n; ++s)
      for (VertexId d = 0; d < n; ++d)
        if (far_enough(s, d)) all.emplace_back(s, d);
    while (chosen.size() < static_cast<std::size_t>(pair_count)) chosen.push_back(all[uniform_index(rng, all.size())]);
  }

  ConvenienceResult out;
  out.pairs = score_pairs(g, chosen);
  double sum = 0.0;
  for (const auto& p : out.pairs) sum += p.score();
  out.mean = sum / static_cast<double>(out.pairs.size());
  return out;
}

// Street length (km) within network distance `radius_m` of `source`. An
// edge is credited from each end by the budget left on arrival, capped at
// its length.
inline double metric_reach_from_km(const StreetGraph& g, VertexId source, double radius_m) {
  const std::vector<double> dist = WeightedGraph(g).dijkstra(source);
  double m = 0.0;
  for (const Edge& e : g.edges()) {
    const double len = g.edge_length_m(e.a, e.b);
    const double from_a = std::isfinite(dist[e.a]) ? std::max(0.0, radius_m - dist[e.a]) : 0.0;
    const double from_b = std::isfinite(dist[e.b]) ? std::max(0.0, radius_m - dist[e.b]) : 0.0;
    m += std::min(len, from_a + from_b);
  }
  return m / 1000.0;
}

// Seeded sample of min(|V|, samples) distinct source vertices, sorted.
inline std::vector<VertexId> sample_sources(std::size_t vertex_count, int samples, std::uint64_t seed) {
  std::vector<VertexId> ids(vertex_count);
  for (VertexId v = 0; v < vertex_count; ++v) ids[v] = v;
  const std::size_t k = std::min(vertex_count, static_cast<std::size_t>(std::max(samples, 0)));
  if (k < vertex_count) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < k; ++i) std::swap(ids[i], ids[i + uniform_index(rng, vertex_count - i)]);
    ids.resize(k);
    std::ranges::sort(ids);
  }
  return ids;
}

// Mean metric reach over sampled source vertices, in km.
inline double metric_reach_km(const StreetGraph& g, double radius_m = 500.0, int samples = 100,
                              std::uint64_t seed = 0) {
  if (g.empty()) throw EmptyGraph("metric reach needs a non-empty graph");
  const auto sources = sample_sources(g.vertex_count(), samples, seed);
  double sum = 0.0;
  for (VertexId s : sources) sum += metric_reach_from_km(g, s, radius_m);
  return sum / static_cast<double>(sources.size());
}

struct MetricsReport {
  std::optional<double> t_ci;
  std::optional<double> t_ci_unfiltered;
  std::size_t t_id = 0;
  std::optional<double> t_id_per_km2;
  double g_sl_km = 0.0;
  std::optional<double> g_tc;
  std::optional<double> g_mr_km;
  std::uint64_t seed = 0;
  std::size_t pair_count_used = 0;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  std::map<std::string, std::string> errors;  // metric name -> reason it is missing

  [[nodiscard]] bool below_connectivity_guideline() const { return t_ci && *t_ci < kMinConnectivityIndex; }
};

// All five metrics with one seed. A metric whose precondition fails is left
// empty and explained in `errors`.
inline MetricsReport report(const StreetGraph& g, const MetricsConfig& cfg = {}) {
  cfg.validate();
  MetricsReport r;
  r.seed = cfg.seed;
  r.vertex_count = g.vertex_count();
  r.edge_count = g.edge_count();
  try {
    r.t_ci = connectivity_index(g);
    r.t_ci_unfiltered = connectivity_index_unfiltered(g);
  } catch (const Error& e) {
    r.errors["t_ci"] = e.what();
  }
  const IntersectionDensity id = intersection_density(g);
  r.t_id = id.count;
  r.t_id_per_km2 = id.per_km2;
  r.g_sl_km = total_street_length_km(g);
  try {
    const ConvenienceResult tc = transportation_convenience(g, cfg.pairs, cfg.min_de_m, cfg.seed);
    r.g_tc = tc.mean;
    r.pair_count_used = tc.pairs.size();
  } catch (const Error& e) {
    r.errors["g_tc"] = e.what();
  }
  try {
    // Separate stream so that changing the pair count leaves reach sources alone.
    r.g_mr_km = metric_reach_km(g, cfg.reach_radius_m, cfg.reach_samples, cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  } catch (const Error& e) {
    r.errors["g_mr"] = e.what();
  }
  return r;
}

inline nlohmann::json metrics_config_to_json(const MetricsConfig& c) {
  return {{"pairs", c.pairs},
          {"min_de_m", c.min_de_m},
          {"reach_radius_m", c.reach_radius_m},
          {"reach_samples", c.reach_samples},
          {"seed", c.seed}};
}

inline nlohmann::json to_json(const MetricsReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"t_ci", opt(r.t_ci)},
          {"t_ci_unfiltered", opt(r.t_ci_unfiltered)},
          {"t_id", r.t_id},
          {"t_id_per_km2", opt(r.t_id_per_km2)},
          {"g_sl_km", r.g_sl_km},
          {"g_tc", opt(r.g_tc)},
          {"g_mr_km", opt(r.g_mr_km)},
          {"seed", r.seed},
          {"pair_count_used", r.pair_count_used},
          {"vertex_count", r.vertex_count},
          {"edge_count", r.edge_count},
          {"connectivity_guideline", kMinConnectivityIndex},
          {"below_connectivity_guideline", r.below_connectivity_guideline()},
          {"errors", r.errors}};
}

inline MetricsReport metrics_report_from_json(const nlohmann::json& j) {
  auto opt = [&j](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<double>();
  };
  MetricsReport r;
  r.t_ci = opt("t_ci");
  r.t_ci_unfiltered = opt("t_ci_unfiltered");
  r.t_id = j.at("t_id").get<std::size_t>();
  r.t_id_per_km2 = opt("t_id_per_km2");
  r.g_sl_km = j.at("g_sl_km").get<double>();
  r.g_tc = opt("g_tc");
  r.g_mr_km = opt("g_mr_km");
  r.seed = j.value("seed", std::uint64_t{0});
  r.pair_count_used = j.value("pair_count_used", std::size_t{0});
  r.vertex_count = j.value("vertex_count", std::size_t{0});
  r.edge_count = j.value("edge_count", std::size_t{0});
  if (j.contains("errors")) r.errors = j["errors"].get<std::map<std::string, std::string>>();
  return r;
}

// ---------------------------------------------------------------------------
// Corpus comparison

inline constexpr int kHistogramBins = 20;

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw EmptyCorpus("KS statistic needs two non-empty samples");
  std::ranges::sort(a);
  std::ranges::sort(b);
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1) standard deviation, 0 for n < 2
  double min = 0.0;
  double max = 0.0;
  std::vector<std::size_t> histogram;
};

inline SummaryStats summarize(const std::vector<double>& v, double lo, double hi) {
  SummaryStats s;
  s.n = v.size();
  s.histogram.assign(kHistogramBins, 0);
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  const auto [mn, mx] = std::ranges::minmax_element(v);
  s.min = *mn;
  s.max = *mx;
  for (double x : v) {
    int bin = hi > lo ? static_cast<int>((x - lo) / (hi - lo) * kHistogramBins) : 0;
    s.histogram[std::clamp(bin, 0, kHistogramBins - 1)]++;
  }
  return s;
}

struct MetricComparison {
  std::string metric;
  SummaryStats a;
  SummaryStats b;
  std::vector<double> bin_edges;  // kHistogramBins + 1 edges over the pooled range
  std::optional<double> ks;       // absent when either side has no values
};

struct ComparisonReport {
  std::size_t corpus_a = 0;
  std::size_t corpus_b = 0;
  std::vector<MetricComparison> metrics;
};

inline std::vector<std::string> compared_metric_names() { return {"t_ci", "t_id", "g_sl_km", "g_tc", "g_mr_km"}; }

inline std::optional<double> metric_value(const MetricsReport& r, const std::string& name) {
  if (name == "t_ci") return r.t_ci;
  if (name == "t_id") return static_cast<double>(r.t_id);
  if (name == "g_sl_km") return r.g_sl_km;
  if (name == "g_tc") return r.g_tc;
  if (name == "g_mr_km") return r.g_mr_km;
  throw InvalidInput("unknown metric " + name);
}

inline ComparisonReport compare(const std::vector<MetricsReport>& a, const std::vector<MetricsReport>& b) {
  if (a.empty() || b.empty()) throw EmptyCorpus("both corpora must contain at least one report");
  ComparisonReport out;
  out.corpus_a = a.size();
  out.corpus_b = b.size();
  for (const std::string& name : compared_metric_names()) {
    std::vector<double> va, vb;
    for (const auto& r : a)
      if (auto v = metric_value(r, name)) va.push_back(*v);
    for (const auto& r : b)
      if (auto v = metric_value(r, name)) vb.push_back(*v);
    MetricComparison mc;
    mc.metric = name;
    double lo = 0.0, hi = 0.0;
    if (!va.empty() || !vb.empty()) {
      lo = std::numeric_limits<double>::infinity();
      hi = -lo;
      for (double x : va) lo = std::min(lo, x), hi = std::max(hi, x);
      for (double x : vb) lo = std::min(lo, x), hi = std::max(hi, x);
    }
    for (int i = 0; i <= kHistogramBins; ++i) mc.bin_edges.push_back(lo + (hi - lo) * i / kHistogramBins);
    mc.a = summarize(va, lo, hi);
    mc.b = summarize(vb, lo, hi);
    if (!va.empty() && !vb.empty()) mc.ks = ks_statistic(va, vb);
    out.metrics.push_back(std::move(mc));
  }
  return out;
}

inline nlohmann::json to_json(const SummaryStats& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}, {"histogram", s.histogram}};
}

inline nlohmann::json to_json(const ComparisonReport& c) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& m : c.metrics)
    metrics[m.metric] = {{"a", to_json(m.a)},
                         {"b", to_json(m.b)},
                         {"bin_edges", m.bin_edges},
                         {"ks", m.ks ? nlohmann::json(*m.ks) : nlohmann::json(nullptr)}};
  return {{"corpus_a", c.corpus_a}, {"corpus_b", c.corpus_b}, {"bins", kHistogramBins}, {"metrics", metrics}};
}

}  // namespace streetnet
