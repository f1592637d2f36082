#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "streetnet/errors.hpp"
#include "streetnet/raster.hpp"

namespace streetnet {

using VertexId = std::uint32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

// Distance from p to the closed segment [a, b].
inline double point_segment_distance(Point p, Point a, Point b) noexcept {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return distance(p, {a.x + t * dx, a.y + t * dy});
}

enum class CoordUnit { Pixel, Meter };

inline const char* to_string(CoordUnit u) { return u == CoordUnit::Pixel ? "pixel" : "meter"; }

// Undirected edge, stored with a < b.
struct Edge {
  VertexId a = 0;
  VertexId b = 0;

  Edge() = default;
  Edge(VertexId u, VertexId v) : a(std::min(u, v)), b(std::max(u, v)) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Pixel dimensions of the patch a graph was extracted from.
struct Extent {
  int width = 0;
  int height = 0;
};

// Planar street graph. Vertex ids are dense indices into `points`; edges are
// kept sorted and unique.
//
// Pixel-unit coordinates put pixel (c, r) at (c, r); meter-unit coordinates
// are Web Mercator meters. `resolution` is meters per pixel either way.
class StreetGraph {
 public:
  StreetGraph() = default;
  explicit StreetGraph(double resolution, CoordUnit unit = CoordUnit::Pixel)
      : resolution_(resolution), unit_(unit) {
    if (!(resolution > 0.0)) throw ConfigError("graph resolution must be positive");
  }

  VertexId add_vertex(Point p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput("vertex coordinates must be finite");
    points_.push_back(p);
    adjacency_.emplace_back();
    return static_cast<VertexId>(points_.size() - 1);
  }

  // Returns false when the edge already exists. Self-loops are rejected.
  bool add_edge(VertexId u, VertexId v) {
    check_id(u);
    check_id(v);
    if (u == v) throw InvalidInput("self-loop edges are not allowed");
    if (!adjacency_[u].insert(v).second) return false;
    adjacency_[v].insert(u);
    return true;
  }

  bool remove_edge(VertexId u, VertexId v) {
    check_id(u);
    check_id(v);
    if (adjacency_[u].erase(v) == 0) return false;
    adjacency_[v].erase(u);
    return true;
  }

  [[nodiscard]] bool has_edge(VertexId u, VertexId v) const {
    return u < adjacency_.size() && adjacency_[u].contains(v);
  }

  [[nodiscard]] std::size_t vertex_count() const noexcept { return points_.size(); }
  [[nodiscard]] std::size_t edge_count() const noexcept {
    std::size_t twice = 0;
    for (const auto& n : adjacency_) twice += n.size();
    return twice / 2;
  }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }

  [[nodiscard]] Point point(VertexId v) const { return points_.at(v); }
  [[nodiscard]] const std::vector<Point>& points() const noexcept { return points_; }
  [[nodiscard]] const std::set<VertexId>& neighbors(VertexId v) const { return adjacency_.at(v); }
  [[nodiscard]] std::size_t degree(VertexId v) const { return adjacency_.at(v).size(); }

  // Sorted (a < b) edge list.
  [[nodiscard]] std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (VertexId u = 0; u < adjacency_.size(); ++u)
      for (VertexId v : adjacency_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  [[nodiscard]] double resolution() const noexcept { return resolution_; }
  [[nodiscard]] CoordUnit unit() const noexcept { return unit_; }
  [[nodiscard]] double meters_per_unit() const noexcept {
    return unit_ == CoordUnit::Pixel ? resolution_ : 1.0;
  }
  [[nodiscard]] double edge_length_m(VertexId u, VertexId v) const {
    return distance(point(u), point(v)) * meters_per_unit();
  }

  [[nodiscard]] const std::optional<Georef>& georef() const noexcept { return georef_; }
  void set_georef(std::optional<Georef> g) { georef_ = g; }
  [[nodiscard]] const std::optional<Extent>& extent() const noexcept { return extent_; }
  void set_extent(std::optional<Extent> e) { extent_ = e; }

  // Copy of the graph metadata with no vertices.
  [[nodiscard]] StreetGraph empty_like() const {
    StreetGraph g(resolution_, unit_);
    g.georef_ = georef_;
    g.extent_ = extent_;
    return g;
  }

  // Drops the listed vertices and renumbers the rest in increasing id order.
  [[nodiscard]] StreetGraph without_vertices(const std::vector<bool>& drop) const {
    StreetGraph g = empty_like();
    std::vector<VertexId> remap(points_.size(), 0);
    for (VertexId v = 0; v < points_.size(); ++v)
      if (!drop[v]) remap[v] = g.add_vertex(points_[v]);
    for (const Edge& e : edges())
      if (!drop[e.a] && !drop[e.b]) g.add_edge(remap[e.a], remap[e.b]);
    return g;
  }

  // Throws InvalidInput if coordinates repeat or are non-finite.
  void validate() const {
    std::set<Point> seen;
    for (const Point& p : points_) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput("non-finite vertex coordinate");
      if (!seen.insert(p).second) throw InvalidInput("two vertices share identical coordinates");
    }
  }

 private:
  void check_id(VertexId v) const {
    if (v >= points_.size()) throw InvalidInput("edge endpoint does not exist");
  }

  double resolution_ = 5.0;
  CoordUnit unit_ = CoordUnit::Pixel;
  std::optional<Georef> georef_;
  std::optional<Extent> extent_;
  std::vector<Point> points_;
  std::vector<std::set<VertexId>> adjacency_;
};

// World position of a graph vertex. Pixel-unit graphs place pixel (c, r) at
// the center of that pixel relative to their georef (or the world origin).
inline Point world_position(const StreetGraph& g, VertexId v) {
  const Point p = g.point(v);
  if (g.unit() == CoordUnit::Meter) return p;
  const Georef o = g.georef().value_or(Georef{});
  return {o.x0 + (p.x + 0.5) * g.resolution(), o.y0 - (p.y + 0.5) * g.resolution()};
}

}  // namespace streetnet
