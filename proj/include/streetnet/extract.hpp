#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <map>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

#include "streetnet/errors.hpp"
#include "streetnet/graph.hpp"
#include "streetnet/raster.hpp"

namespace streetnet {

struct ExtractConfig {
  EnhanceConfig enhance;
  double leg_tolerance = 0.10;      // relative difference allowed between triangle legs
  double angle_tolerance_deg = 5.0;  // allowed deviation of the apex angle from 90 degrees
  double epsilon_px = 1.0;           // Douglas-Peucker tolerance

  void validate() const {
    enhance.validate();
    if (!(leg_tolerance >= 0.0)) throw ConfigError("leg tolerance must be >= 0");
    if (!(angle_tolerance_deg >= 0.0)) throw ConfigError("angle tolerance must be >= 0");
    if (!(epsilon_px >= 0.0)) throw ConfigError("simplification epsilon must be >= 0");
  }
};

enum class PixelLabel : std::uint8_t { Background, Chain, Isolated, Vertex };

// Vertex criteria evaluated over the 8-neighborhood of a foreground pixel.
enum class VertexCriterion : std::uint8_t {
  None = 0,
  SingleNeighbor = 1,  // dead end
  ManyNeighbors = 2,   // three or more neighbors
  Bend = 3,            // two neighbors not on a straight line through the pixel
};

struct PixelClassification {
  int width = 0;
  int height = 0;
  std::vector<PixelLabel> labels;
  std::vector<VertexCriterion> criteria;

  [[nodiscard]] PixelLabel label(int x, int y) const { return labels[idx(x, y)]; }
  [[nodiscard]] VertexCriterion criterion(int x, int y) const { return criteria[idx(x, y)]; }

  [[nodiscard]] std::size_t count(PixelLabel l) const { return std::ranges::count(labels, l); }
  [[nodiscard]] std::size_t count(VertexCriterion c) const { return std::ranges::count(criteria, c); }

 private:
  [[nodiscard]] std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
};

inline PixelClassification classify_pixels(const RasterPatch& skeleton) {
  if (!skeleton.is_binary()) throw InvalidInput("classify_pixels expects a binary (0/255) raster");
  PixelClassification out;
  out.width = skeleton.width();
  out.height = skeleton.height();
  out.labels.assign(skeleton.pixels().size(), PixelLabel::Background);
  out.criteria.assign(skeleton.pixels().size(), VertexCriterion::None);

  for (int y = 0; y < skeleton.height(); ++y) {
    for (int x = 0; x < skeleton.width(); ++x) {
      if (!skeleton.at(x, y)) continue;
      const std::size_t i = skeleton.index(x, y);
      std::pair<int, int> offs[8];
      int n = 0;
      for (auto [dx, dy] : detail::kRing)
        if (skeleton.get_or_zero(x + dx, y + dy)) offs[n++] = {dx, dy};
      if (n == 0) {
        out.labels[i] = PixelLabel::Isolated;
      } else if (n == 1) {
        out.labels[i] = PixelLabel::Vertex;
        out.criteria[i] = VertexCriterion::SingleNeighbor;
      } else if (n >= 3) {
        out.labels[i] = PixelLabel::Vertex;
        out.criteria[i] = VertexCriterion::ManyNeighbors;
      } else if (offs[0].first == -offs[1].first && offs[0].second == -offs[1].second) {
        out.labels[i] = PixelLabel::Chain;
      } else {
        out.labels[i] = PixelLabel::Vertex;
        out.criteria[i] = VertexCriterion::Bend;
      }
    }
  }
  return out;
}

namespace detail {

class GraphBuilder {
 public:
  GraphBuilder(const RasterPatch& img, const PixelClassification& cls)
      : img_(img), cls_(cls), node_of_(img.pixels().size(), -1), visited_(img.pixels().size(), 0),
        graph_(img.resolution(), CoordUnit::Pixel) {
    graph_.set_georef(img.georef());
    graph_.set_extent(Extent{img.width(), img.height()});
  }

  StreetGraph run() {
    make_nodes();
    // Direct vertex-to-vertex adjacencies first so that a chain joining the
    // same two nodes is detected as parallel and split.
    for (const auto& [x, y] : node_pixels_)
      for (auto [dx, dy] : kRing) {
        const int nx = x + dx, ny = y + dy;
        if (!img_.get_or_zero(nx, ny)) continue;
        const int u = node_of_[img_.index(x, y)], v = node_of_[img_.index(nx, ny)];
        if (v >= 0 && u != v) graph_.add_edge(static_cast<VertexId>(u), static_cast<VertexId>(v));
      }
    for (const auto& [x, y] : node_pixels_)
      for (auto [dx, dy] : kRing) {
        const int nx = x + dx, ny = y + dy;
        if (!img_.get_or_zero(nx, ny)) continue;
        const std::size_t q = img_.index(nx, ny);
        if (node_of_[q] >= 0 || visited_[q]) continue;
        walk(x, y, nx, ny);
      }
    // Remaining chain pixels form cycles without any vertex pixel.
    for (int y = 0; y < img_.height(); ++y)
      for (int x = 0; x < img_.width(); ++x) {
        const std::size_t i = img_.index(x, y);
        if (cls_.labels[i] != PixelLabel::Chain || visited_[i] || node_of_[i] >= 0) continue;
        visited_[i] = 1;
        node_of_[i] = static_cast<int>(graph_.add_vertex({double(x), double(y)}));
        for (auto [dx, dy] : kRing)
          if (img_.get_or_zero(x + dx, y + dy)) {
            walk(x, y, x + dx, y + dy);
            break;
          }
      }
    return std::move(graph_);
  }

 private:
  using Pixel = std::pair<int, int>;

  void make_nodes() {
    const int w = img_.width(), h = img_.height();
    std::vector<int> cluster_of(img_.pixels().size(), -1);
    std::vector<std::vector<Pixel>> clusters;

    auto is_junction = [&](int x, int y) {
      return img_.in_bounds(x, y) && cls_.criterion(x, y) == VertexCriterion::ManyNeighbors;
    };
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!is_junction(x, y) || cluster_of[img_.index(x, y)] >= 0) continue;
        const int id = static_cast<int>(clusters.size());
        clusters.emplace_back();
        std::vector<Pixel> stack{{x, y}};
        cluster_of[img_.index(x, y)] = id;
        while (!stack.empty()) {
          auto [cx, cy] = stack.back();
          stack.pop_back();
          clusters[id].emplace_back(cx, cy);
          for (auto [dx, dy] : kRing)
            if (is_junction(cx + dx, cy + dy) && cluster_of[img_.index(cx + dx, cy + dy)] < 0) {
              cluster_of[img_.index(cx + dx, cy + dy)] = id;
              stack.emplace_back(cx + dx, cy + dy);
            }
        }
      }

    // A pixel whose every neighbor (at least two) lies in one junction cluster
    // has no outward arm; it belongs to that junction.
    std::vector<std::pair<Pixel, int>> absorbed;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!img_.at(x, y) || cluster_of[img_.index(x, y)] >= 0) continue;
        int n = 0, common = -1;
        bool single = true;
        for (auto [dx, dy] : kRing) {
          if (!img_.get_or_zero(x + dx, y + dy)) continue;
          ++n;
          const int c = cluster_of[img_.index(x + dx, y + dy)];
          if (c < 0 || (common >= 0 && c != common)) single = false;
          common = c;
        }
        if (n >= 2 && single) absorbed.push_back({{x, y}, common});
      }
    for (const auto& [px, c] : absorbed) {
      cluster_of[img_.index(px.first, px.second)] = c;
      clusters[c].push_back(px);
    }

    // Node list keyed by the first pixel in raster order.
    struct Pending {
      Pixel key;
      std::vector<Pixel> pixels;
    };
    std::vector<Pending> pending;
    for (auto& c : clusters) {
      std::ranges::sort(c, [](Pixel a, Pixel b) { return std::pair{a.second, a.first} < std::pair{b.second, b.first}; });
      pending.push_back({c.front(), c});
    }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (cls_.label(x, y) == PixelLabel::Vertex && cluster_of[img_.index(x, y)] < 0)
          pending.push_back({{x, y}, {{x, y}}});
    std::ranges::sort(pending, [](const Pending& a, const Pending& b) {
      return std::pair{a.key.second, a.key.first} < std::pair{b.key.second, b.key.first};
    });

    for (const auto& p : pending) {
      double sx = 0, sy = 0;
      for (auto [x, y] : p.pixels) {
        sx += x;
        sy += y;
      }
      const double n = static_cast<double>(p.pixels.size());
      const VertexId id = graph_.add_vertex({sx / n, sy / n});
      for (auto [x, y] : p.pixels) {
        node_of_[img_.index(x, y)] = static_cast<int>(id);
        node_pixels_.emplace_back(x, y);
      }
    }
  }

  // Follows chain pixels from node pixel (sx, sy) through (qx, qy) until a
  // node pixel is reached.
  void walk(int sx, int sy, int qx, int qy) {
    std::vector<Pixel> chain;
    Pixel prev{sx, sy}, cur{qx, qy};
    for (;;) {
      const std::size_t ci = img_.index(cur.first, cur.second);
      if (node_of_[ci] >= 0) break;
      visited_[ci] = 1;
      chain.push_back(cur);
      Pixel next = cur;
      for (auto [dx, dy] : kRing) {
        const Pixel cand{cur.first + dx, cur.second + dy};
        if (cand != prev && img_.get_or_zero(cand.first, cand.second)) {
          next = cand;
          break;
        }
      }
      if (next == cur) return;  // malformed chain; nothing to connect
      prev = cur;
      cur = next;
    }
    connect(static_cast<VertexId>(node_of_[img_.index(sx, sy)]),
            static_cast<VertexId>(node_of_[img_.index(cur.first, cur.second)]), chain);
  }

  VertexId promote(Pixel p) {
    const VertexId id = graph_.add_vertex({double(p.first), double(p.second)});
    node_of_[img_.index(p.first, p.second)] = static_cast<int>(id);
    return id;
  }

  // Adds the edge for one traced chain, inserting chain pixels as extra
  // vertices where the plain edge would be a loop or a duplicate.
  void connect(VertexId u, VertexId v, const std::vector<Pixel>& chain) {
    if (u == v) {
      if (chain.size() < 2) return;
      const VertexId a = promote(chain[chain.size() / 3]);
      const VertexId b = promote(chain[std::max(chain.size() / 3 + 1, 2 * chain.size() / 3)]);
      graph_.add_edge(u, a);
      graph_.add_edge(a, b);
      graph_.add_edge(b, u);
      return;
    }
    if (graph_.has_edge(u, v)) {
      if (chain.empty()) return;
      const VertexId m = promote(chain[chain.size() / 2]);
      graph_.add_edge(u, m);
      graph_.add_edge(m, v);
      return;
    }
    graph_.add_edge(u, v);
  }

  const RasterPatch& img_;
  const PixelClassification& cls_;
  std::vector<int> node_of_;
  std::vector<char> visited_;
  std::vector<Pixel> node_pixels_;
  StreetGraph graph_;
};

}  // namespace detail

// One vertex per vertex pixel (junction blobs merged into their centroid),
// one edge per chain of pixels joining two vertices.
inline StreetGraph build_graph(const RasterPatch& skeleton, const PixelClassification& classes) {
  if (classes.width != skeleton.width() || classes.height != skeleton.height() ||
      classes.labels.size() != skeleton.pixels().size())
    throw InvalidInput("classification does not match skeleton dimensions");
  for (std::size_t i = 0; i < classes.labels.size(); ++i)
    if ((skeleton.pixels()[i] != kBackground) != (classes.labels[i] != PixelLabel::Background))
      throw InvalidInput("classification does not match skeleton foreground");
  return detail::GraphBuilder(skeleton, classes).run();
}

// Removes the hypotenuse of every near-isosceles right triangle until none
// remain. Vertices are never touched.
inline StreetGraph remove_right_triangles(StreetGraph g, double leg_tolerance = 0.10,
                                          double angle_tolerance_deg = 5.0) {
  auto qualifies = [&](VertexId apex, VertexId p, VertexId q) {
    const Point a = g.point(apex), b = g.point(p), c = g.point(q);
    const double l1 = distance(a, b), l2 = distance(a, c), hyp = distance(b, c);
    if (!(hyp > l1 && hyp > l2)) return false;
    if (std::abs(l1 - l2) > leg_tolerance * std::max(l1, l2)) return false;
    const double cosang = ((b.x - a.x) * (c.x - a.x) + (b.y - a.y) * (c.y - a.y)) / (l1 * l2);
    const double deg = std::acos(std::clamp(cosang, -1.0, 1.0)) * 180.0 / std::numbers::pi;
    return std::abs(deg - 90.0) <= angle_tolerance_deg;
  };

  bool removed = true;
  while (removed) {
    removed = false;
    for (const Edge& e : g.edges()) {
      if (!g.has_edge(e.a, e.b)) continue;
      std::vector<VertexId> common;
      std::ranges::set_intersection(g.neighbors(e.a), g.neighbors(e.b), std::back_inserter(common));
      for (VertexId w : common) {
        if (w < e.b || !g.has_edge(e.a, e.b)) continue;
        // Triangle e.a < e.b < w; try each vertex as the right-angle apex.
        if (qualifies(e.a, e.b, w)) {
          g.remove_edge(e.b, w);
        } else if (qualifies(e.b, e.a, w)) {
          g.remove_edge(e.a, w);
        } else if (qualifies(w, e.a, e.b)) {
          g.remove_edge(e.a, e.b);
        } else {
          continue;
        }
        removed = true;
      }
    }
  }
  return g;
}

namespace detail {

// Indices of `pts` kept by Douglas-Peucker, always including both ends.
inline std::vector<std::size_t> douglas_peucker(const std::vector<Point>& pts, double epsilon) {
  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, pts.size() - 1}};
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    double worst = -1.0;
    std::size_t at = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
      if (d > worst) {
        worst = d;
        at = i;
      }
    }
    if (at != lo && worst > epsilon) {
      keep[at] = true;
      stack.emplace_back(lo, at);
      stack.emplace_back(at, hi);
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (keep[i]) out.push_back(i);
  return out;
}

// Interior index of `pts` farthest from segment [a, b], skipping `skip`.
inline std::size_t farthest_interior(const std::vector<Point>& pts, Point a, Point b, std::size_t skip) {
  std::size_t best = 0;
  double worst = -1.0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    if (i == skip) continue;
    const double d = point_segment_distance(pts[i], a, b);
    if (d > worst) {
      worst = d;
      best = i;
    }
  }
  return best;
}

}  // namespace detail

// Douglas-Peucker over every maximal run of degree-2 vertices. Vertices of
// degree other than 2 are kept, and so is whatever is needed to keep the
// graph simple (no loops, no parallel edges).
inline StreetGraph simplify(const StreetGraph& g, double epsilon = 1.0) {
  if (!(epsilon >= 0.0)) throw ConfigError("simplification epsilon must be >= 0");
  const std::size_t n = g.vertex_count();
  std::vector<bool> keep(n, false);
  for (VertexId v = 0; v < n; ++v) keep[v] = g.degree(v) != 2;

  std::set<Edge> result;
  std::set<Edge> used;
  for (const Edge& e : g.edges())
    if (keep[e.a] && keep[e.b]) {
      result.insert(e);
      used.insert(e);
    }

  auto run = [&](std::vector<VertexId> path) {
    std::vector<Point> pts;
    for (VertexId v : path) pts.push_back(g.point(v));
    std::vector<std::size_t> kept;
    if (path.front() == path.back()) {
      // Closed loop: split at the point farthest from the anchor.
      std::size_t far = 1;
      for (std::size_t i = 1; i + 1 < pts.size(); ++i)
        if (distance(pts[i], pts[0]) > distance(pts[far], pts[0])) far = i;
      std::vector<Point> first(pts.begin(), pts.begin() + far + 1), second(pts.begin() + far, pts.end());
      for (std::size_t i : detail::douglas_peucker(first, epsilon)) kept.push_back(i);
      for (std::size_t i : detail::douglas_peucker(second, epsilon))
        if (i > 0) kept.push_back(i + far);
      if (kept.size() < 4) {
        kept.push_back(detail::farthest_interior(pts, pts[0], pts[far], far));
        std::ranges::sort(kept);
      }
    } else {
      kept = detail::douglas_peucker(pts, epsilon);
      if (kept.size() == 2 && result.contains(Edge(path.front(), path.back()))) {
        kept.insert(kept.begin() + 1, detail::farthest_interior(pts, pts.front(), pts.back(), 0));
      }
    }
    for (std::size_t i : kept) keep[path[i]] = true;
    for (std::size_t i = 0; i + 1 < kept.size(); ++i) result.insert(Edge(path[kept[i]], path[kept[i + 1]]));
  };

  auto trace = [&](VertexId start, VertexId first) {
    std::vector<VertexId> path{start, first};
    used.insert(Edge(start, first));
    VertexId prev = start, cur = first;
    while (g.degree(cur) == 2 && cur != start) {
      const auto& nb = g.neighbors(cur);
      const VertexId next = *nb.begin() == prev ? *nb.rbegin() : *nb.begin();
      used.insert(Edge(cur, next));
      path.push_back(next);
      prev = cur;
      cur = next;
    }
    run(std::move(path));
  };

  for (VertexId a = 0; a < n; ++a) {
    if (g.degree(a) == 2) continue;
    for (VertexId b : g.neighbors(a))
      if (!used.contains(Edge(a, b))) trace(a, b);
  }
  // Cycles made only of degree-2 vertices, anchored at their smallest id.
  for (VertexId a = 0; a < n; ++a) {
    if (g.degree(a) != 2) continue;
    const VertexId b = *g.neighbors(a).begin();
    if (used.contains(Edge(a, b))) continue;
    keep[a] = true;
    trace(a, b);
  }

  StreetGraph out = g.empty_like();
  std::vector<VertexId> remap(n, 0);
  for (VertexId v = 0; v < n; ++v)
    if (keep[v]) remap[v] = out.add_vertex(g.point(v));
  for (const Edge& e : result) out.add_edge(remap[e.a], remap[e.b]);
  return out;
}

// enhance -> classify -> build -> triangle removal -> simplification.
inline StreetGraph extract(const RasterPatch& img, const ExtractConfig& cfg = {}) {
  cfg.validate();
  const RasterPatch skeleton = enhance(img, cfg.enhance);
  const PixelClassification classes = classify_pixels(skeleton);
  StreetGraph g = build_graph(skeleton, classes);
  g = remove_right_triangles(std::move(g), cfg.leg_tolerance, cfg.angle_tolerance_deg);
  return simplify(g, cfg.epsilon_px);
}

}  // namespace streetnet
