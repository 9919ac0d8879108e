#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "chronicle/geometry.hpp"
#include "json.hpp"

namespace chronicle::geojson {

/// Polygon or MultiPolygon geometry object; the closing vertex of each ring
/// is dropped. Throws nlohmann::json exceptions or std::invalid_argument on
/// malformed input.
Polygon parse_geometry(const nlohmann::json& geometry);

/// Polygon / MultiPolygon object with explicitly closed rings.
nlohmann::json to_geometry(const Polygon& poly);

struct NamedShape {
  std::string name;
  Polygon shape;
};

/// FeatureCollection whose features carry a `name` property.
std::vector<NamedShape> read_named_collection(const std::filesystem::path& path);
void write_named_collection(const std::vector<NamedShape>& shapes,
                            const std::filesystem::path& path);

}  // namespace chronicle::geojson
