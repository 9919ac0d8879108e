#include "chronicle/geojson.hpp"

#include <fstream>
#include <stdexcept>

#include "chronicle/types.hpp"

namespace chronicle::geojson {

namespace {

using nlohmann::json;

Ring parse_ring(const json& coords) {
  Ring ring;
  ring.reserve(coords.size());
  for (const auto& c : coords) {
    if (!c.is_array() || c.size() < 2) throw std::invalid_argument("bad coordinate");
    ring.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  return ring;
}

PolygonPart parse_part(const json& rings) {
  if (!rings.is_array() || rings.empty()) throw std::invalid_argument("polygon without rings");
  PolygonPart part;
  part.outer = parse_ring(rings[0]);
  for (std::size_t i = 1; i < rings.size(); ++i) part.holes.push_back(parse_ring(rings[i]));
  return part;
}

json ring_json(const Ring& ring) {
  json out = json::array();
  for (Point p : ring) out.push_back({p.x, p.y});
  if (!ring.empty()) out.push_back({ring.front().x, ring.front().y});
  return out;
}

json part_json(const PolygonPart& part) {
  json out = json::array();
  out.push_back(ring_json(part.outer));
  for (const auto& h : part.holes) out.push_back(ring_json(h));
  return out;
}

}  // namespace

Polygon parse_geometry(const json& geometry) {
  if (!geometry.is_object()) throw std::invalid_argument("geometry is not an object");
  const std::string type = geometry.at("type").get<std::string>();
  const json& coords = geometry.at("coordinates");
  Polygon poly;
  if (type == "Polygon") {
    poly.parts.push_back(parse_part(coords));
  } else if (type == "MultiPolygon") {
    for (const auto& p : coords) poly.parts.push_back(parse_part(p));
  } else {
    throw std::invalid_argument("unsupported geometry type " + type);
  }
  return poly;
}

json to_geometry(const Polygon& poly) {
  if (poly.parts.size() == 1) {
    return {{"type", "Polygon"}, {"coordinates", part_json(poly.parts[0])}};
  }
  json parts = json::array();
  for (const auto& p : poly.parts) parts.push_back(part_json(p));
  return {{"type", "MultiPolygon"}, {"coordinates", parts}};
}

std::vector<NamedShape> read_named_collection(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<NamedShape> out;
  try {
    const json doc = json::parse(in);
    for (const auto& f : doc.at("features")) {
      NamedShape s;
      s.name = f.at("properties").at("name").get<std::string>();
      s.shape = parse_geometry(f.at("geometry"));
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return out;
}

void write_named_collection(const std::vector<NamedShape>& shapes,
                            const std::filesystem::path& path) {
  json features = json::array();
  for (const auto& s : shapes) {
    features.push_back({{"type", "Feature"},
                        {"properties", {{"name", s.name}}},
                        {"geometry", to_geometry(s.shape)}});
  }
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << json{{"type", "FeatureCollection"}, {"features", features}}.dump() << '\n';
}

}  // namespace chronicle::geojson
