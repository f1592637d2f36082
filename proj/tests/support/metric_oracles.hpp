#pragma once

// Brute-force references for the metric tests.

#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "streetnet/graph.hpp"

namespace streetnet::testing {

// Shortest distance from `source` to every vertex by enumerating all simple
// paths. Exponential; keep graphs tiny.
inline std::vector<double> brute_force_distances(const StreetGraph& g, VertexId source) {
  std::vector<double> best(g.vertex_count(), std::numeric_limits<double>::infinity());
  std::vector<bool> on_path(g.vertex_count(), false);
  auto walk = [&](auto&& self, VertexId v, double len) -> void {
    best[v] = std::min(best[v], len);
    on_path[v] = true;
    for (VertexId w : g.neighbors(v))
      if (!on_path[w]) self(self, w, len + g.edge_length_m(v, w));
    on_path[v] = false;
  };
  walk(walk, source, 0.0);
  return best;
}

// Up to 8 vertices on an integer lattice, joined only where the Euclidean
// length is an integer (axis steps and 3-4-5 triangles), so every path length
// is an exact sum of integers.
inline StreetGraph random_integer_graph(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = 2 + static_cast<int>(rng() % 7);
  StreetGraph g(1.0, CoordUnit::Meter);
  std::set<Point> used;
  while (static_cast<int>(g.vertex_count()) < n) {
    const Point p{double(rng() % 5) * 3.0, double(rng() % 5) * 4.0};
    if (used.insert(p).second) g.add_vertex(p);
  }
  for (VertexId u = 0; u < g.vertex_count(); ++u)
    for (VertexId v = u + 1; v < g.vertex_count(); ++v) {
      const double d = distance(g.point(u), g.point(v));
      if (d == std::floor(d) && rng() % 100 < 45) g.add_edge(u, v);
    }
  return g;
}

}  // namespace streetnet::testing
