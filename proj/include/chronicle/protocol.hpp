#pragma once

#include <string>
#include <vector>

#include "chronicle/engine.hpp"
#include "chronicle/query.hpp"
#include "json.hpp"

namespace chronicle {

/// Request body is malformed (HTTP 400).
class BadRequest : public Error {
 public:
  using Error::Error;
};

/// Parsed /api/query body. Types: geometries, aggregate, matrix, series, histogram.
struct QueryRequest {
  std::string type;
  std::vector<std::string> path{std::string(kCityName)};
  TreeOptions tree;
  /// Whether `regions` / `skip_blocks` appeared in the body; absent fields
  /// fall back to the session defaults.
  bool has_regions = false;
  bool has_skip_blocks = false;
  std::string attribute;
  AggregateFn fn = AggregateFn::Sum;
  std::optional<ReleaseId> release;
  MatrixMode mode = MatrixMode::Value;
  DeltaKind delta = DeltaKind::Relative;
  std::optional<ReleaseId> base;
  std::optional<ReleaseId> sort_release;
  std::vector<std::string> rows;
  std::size_t bins = 20;
  double simplify = 0;
};

/// Throws BadRequest for missing or mistyped fields and ValidationError for
/// unknown enumeration values.
QueryRequest parse_query(const nlohmann::json& body);

/// Runs a request against one snapshot. Errors propagate as NotFound,
/// AttributeError, InvalidRelease, ValidationError or BadRequest.
nlohmann::json execute(const Snapshot& snapshot, const QueryRequest& request);
nlohmann::json execute(const Snapshot& snapshot, const nlohmann::json& body);

nlohmann::json meta_json(const Engine& engine);
nlohmann::json cell_json(const Cell& cell);
nlohmann::json matrix_json(const MatrixSlice& slice);
/// {"name":..,"polygons":[[[x0,y0,x1,y1,..],[hole..]],..]} with open rings.
nlohmann::json geometry_json(const NamedGeometry& geometry);

}  // namespace chronicle
