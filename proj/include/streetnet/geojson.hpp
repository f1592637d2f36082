#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "streetnet/errors.hpp"
#include "streetnet/geodata.hpp"
#include "streetnet/graph.hpp"
#include "streetnet/io.hpp"

namespace streetnet {

enum class InputCrs { Wgs84, WebMercator };

// LineString / MultiLineString features with a "highway" property. Lines with
// fewer than two points are skipped; a missing tag becomes "".
inline VectorStreetSet vector_streets_from_geojson(const json& doc) {
  VectorStreetSet out;
  auto add_line = [&](const json& coords, const std::string& tag) {
    Polyline line;
    line.highway = tag;
    for (const auto& c : coords) {
      if (!c.is_array() || c.size() < 2) throw FormatError("GeoJSON position must have two numbers");
      line.coords.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    if (line.coords.size() >= 2) out.polylines.push_back(std::move(line));
  };
  try {
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection")
      throw FormatError("expected a GeoJSON FeatureCollection");
    for (const auto& f : doc.at("features")) {
      const json& geom = f.at("geometry");
      if (geom.is_null()) continue;
      std::string tag;
      if (f.contains("properties") && f["properties"].is_object()) {
        const json& hw = f["properties"].value("highway", json());
        if (hw.is_string()) tag = hw.get<std::string>();
      }
      const std::string type = geom.at("type").get<std::string>();
      if (type == "LineString") {
        add_line(geom.at("coordinates"), tag);
      } else if (type == "MultiLineString") {
        for (const auto& part : geom.at("coordinates")) add_line(part, tag);
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed GeoJSON: ") + e.what());
  }
  return out;
}

// One LineString feature per edge, ordered by vertex ids. Coordinates are Web
// Mercator meters when the graph is georeferenced, pixel units otherwise.
// Graph metadata (unit, resolution, georef, extent, vertex table) and the
// caller's `provenance` ride along as a foreign "streetnet" member.
inline json graph_to_geojson(const StreetGraph& g, const json& provenance = json::object()) {
  const bool world = g.unit() == CoordUnit::Meter || g.georef().has_value();
  const CoordUnit unit = world ? CoordUnit::Meter : CoordUnit::Pixel;
  auto coord = [&](VertexId v) {
    const Point p = world ? world_position(g, v) : g.point(v);
    return json::array({p.x, p.y});
  };

  json vertices = json::array();
  for (VertexId v = 0; v < g.vertex_count(); ++v) vertices.push_back(coord(v));

  json features = json::array();
  for (const Edge& e : g.edges()) {
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", {coord(e.a), coord(e.b)}}}},
                        {"properties", {{"u", e.a}, {"v", e.b}, {"unit", to_string(unit)},
                                        {"length_m", g.edge_length_m(e.a, e.b)}}}});
  }

  json meta = provenance;
  meta["unit"] = to_string(unit);
  meta["resolution"] = g.resolution();
  meta["georef"] = georef_to_json(g.georef());
  meta["extent"] = g.extent() ? json{{"width", g.extent()->width}, {"height", g.extent()->height}} : json(nullptr);
  meta["vertices"] = std::move(vertices);
  return {{"type", "FeatureCollection"}, {"streetnet", std::move(meta)}, {"features", std::move(features)}};
}

// Inverse of graph_to_geojson. Plain GeoJSON without the "streetnet" member
// is read as Web Mercator meters, merging line endpoints with equal
// coordinates into one vertex.
inline StreetGraph graph_from_geojson(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection")
      throw FormatError("expected a GeoJSON FeatureCollection");
    const json meta = doc.value("streetnet", json::object());
    const double resolution = meta.value("resolution", 1.0);
    CoordUnit unit = meta.value("unit", std::string("meter")) == "pixel" ? CoordUnit::Pixel : CoordUnit::Meter;
    StreetGraph g(resolution, unit);
    if (meta.contains("georef")) g.set_georef(georef_from_json(meta["georef"]));
    if (meta.contains("extent") && !meta["extent"].is_null())
      g.set_extent(Extent{meta["extent"].at("width").get<int>(), meta["extent"].at("height").get<int>()});

    std::map<Point, VertexId> by_coord;
    auto vertex_at = [&](const json& c) {
      const Point p{c.at(0).get<double>(), c.at(1).get<double>()};
      auto it = by_coord.find(p);
      if (it != by_coord.end()) return it->second;
      const VertexId id = g.add_vertex(p);
      by_coord.emplace(p, id);
      return id;
    };
    if (meta.contains("vertices"))
      for (const auto& c : meta["vertices"]) vertex_at(c);

    for (const auto& f : doc.at("features")) {
      const json& geom = f.at("geometry");
      if (geom.is_null()) continue;
      const std::string type = geom.at("type").get<std::string>();
      std::vector<json> lines;
      if (type == "LineString") {
        lines.push_back(geom.at("coordinates"));
      } else if (type == "MultiLineString") {
        for (const auto& part : geom.at("coordinates")) lines.push_back(part);
      } else {
        continue;
      }
      for (const auto& line : lines)
        for (std::size_t i = 0; i + 1 < line.size(); ++i) {
          const VertexId a = vertex_at(line[i]), b = vertex_at(line[i + 1]);
          if (a != b) g.add_edge(a, b);
        }
    }
    return g;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed graph GeoJSON: ") + e.what());
  }
}

}  // namespace streetnet
