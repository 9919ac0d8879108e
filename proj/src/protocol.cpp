#include "chronicle/protocol.hpp"

namespace chronicle {

using nlohmann::json;

namespace {

const json* field(const json& body, const char* key) {
  auto it = body.find(key);
  return it == body.end() || it->is_null() ? nullptr : &*it;
}

std::string string_field(const json& body, const char* key, bool required) {
  const json* v = field(body, key);
  if (!v) {
    if (required) throw BadRequest(std::string("missing field '") + key + "'");
    return {};
  }
  if (!v->is_string()) throw BadRequest(std::string("field '") + key + "' must be a string");
  return v->get<std::string>();
}

std::optional<ReleaseId> release_field(const json& body, const char* key) {
  const json* v = field(body, key);
  if (!v) return std::nullopt;
  if (v->is_string()) return ReleaseId::parse(v->get<std::string>());
  if (v->is_number_integer()) return ReleaseId{v->get<int>(), 1};
  throw BadRequest(std::string("field '") + key + "' must be a release such as \"2009.1\"");
}

std::vector<std::string> string_list(const json& body, const char* key) {
  const json* v = field(body, key);
  if (!v) return {};
  if (!v->is_array()) throw BadRequest(std::string("field '") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : *v) {
    if (!item.is_string()) throw BadRequest(std::string("field '") + key + "' must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::size_t release_or_latest(const Store& store, const std::optional<ReleaseId>& release) {
  if (!release) {
    if (store.timeline.empty()) throw InvalidRelease("the timeline is empty");
    return store.timeline.size() - 1;
  }
  return release_index(store.timeline, *release);
}

MatrixOptions matrix_options(const Store& store, const QueryRequest& q) {
  MatrixOptions o;
  o.mode = q.mode;
  o.delta = q.delta;
  if (q.base) o.base = release_index(store.timeline, *q.base);
  if (q.sort_release) o.sort_release = release_index(store.timeline, *q.sort_release);
  return o;
}

json timeline_json(const Timeline& timeline) {
  json a = json::array();
  for (const auto& r : timeline) a.push_back(r.to_string());
  return a;
}

json cells_json(const std::vector<Cell>& cells) {
  json a = json::array();
  for (const auto& c : cells) a.push_back(cell_json(c));
  return a;
}

}  // namespace

QueryRequest parse_query(const json& body) {
  if (!body.is_object()) throw BadRequest("query body must be a JSON object");
  QueryRequest q;
  q.type = string_field(body, "type", true);
  if (field(body, "path")) q.path = string_list(body, "path");
  if (q.path.empty()) throw BadRequest("path must name at least the city");
  if (const json* v = field(body, "regions")) {
    if (!v->is_string()) throw BadRequest("field 'regions' must be a string");
    q.tree.regions = parse_region_kind(v->get<std::string>());
    q.has_regions = true;
  }
  if (const json* v = field(body, "skip_blocks")) {
    if (!v->is_boolean()) throw BadRequest("field 'skip_blocks' must be a boolean");
    q.tree.skip_blocks = v->get<bool>();
    q.has_skip_blocks = true;
  }
  const bool needs_attribute = q.type != "geometries";
  q.attribute = string_field(body, "attribute", needs_attribute);
  if (auto fn = string_field(body, "fn", false); !fn.empty()) q.fn = parse_aggregate_fn(fn);
  q.release = release_field(body, "release");
  if (auto mode = string_field(body, "mode", false); !mode.empty()) q.mode = parse_matrix_mode(mode);
  if (auto delta = string_field(body, "delta", false); !delta.empty()) q.delta = parse_delta_kind(delta);
  q.base = release_field(body, "base");
  if (const json* sort = field(body, "sort")) {
    if (sort->is_string()) {
      if (sort->get<std::string>() != "name") q.sort_release = ReleaseId::parse(sort->get<std::string>());
    } else if (sort->is_object()) {
      const std::string by = string_field(*sort, "by", true);
      if (by == "release") {
        q.sort_release = release_field(*sort, "release");
        if (!q.sort_release) throw BadRequest("sort by release needs 'release'");
      } else if (by != "name") {
        throw ValidationError("unknown sort key '" + by + "'");
      }
    } else {
      throw BadRequest("field 'sort' must be \"name\", a release, or an object");
    }
  }
  q.rows = string_list(body, "rows");
  if (const json* v = field(body, "bins")) {
    if (!v->is_number_integer() || v->get<long long>() < 1 || v->get<long long>() > 100000) {
      throw BadRequest("field 'bins' must be an integer in [1, 100000]");
    }
    q.bins = v->get<std::size_t>();
  }
  if (const json* v = field(body, "simplify")) {
    if (!v->is_number() || v->get<double>() < 0) throw BadRequest("field 'simplify' must be a non-negative number");
    q.simplify = v->get<double>();
  }
  return q;
}

json cell_json(const Cell& cell) { return cell ? json(*cell) : json(nullptr); }

json matrix_json(const MatrixSlice& slice) {
  json cells = json::array();
  const std::size_t k = slice.columns.size();
  for (std::size_t i = 0; i < slice.rows.size(); ++i) {
    cells.push_back(cells_json({slice.cells.begin() + i * k, slice.cells.begin() + (i + 1) * k}));
  }
  json j{{"rows", slice.rows},
         {"columns", timeline_json(slice.columns)},
         {"cells", cells},
         {"mode", to_string(slice.options.mode)},
         {"delta", to_string(slice.options.delta)}};
  j["base"] = slice.options.base ? json(slice.columns[*slice.options.base].to_string()) : json(nullptr);
  j["sort"] = slice.options.sort_release ? json(slice.columns[*slice.options.sort_release].to_string()) : json("name");
  return j;
}

json geometry_json(const NamedGeometry& g) {
  json polygons = json::array();
  for (const auto& part : g.shape.parts) {
    json rings = json::array();
    auto flat = [](const Ring& ring) {
      std::vector<double> coords;
      coords.reserve(ring.size() * 2);
      for (const auto& p : ring) {
        coords.push_back(p.x);
        coords.push_back(p.y);
      }
      return coords;
    };
    rings.push_back(flat(part.outer));
    for (const auto& hole : part.holes) rings.push_back(flat(hole));
    polygons.push_back(std::move(rings));
  }
  return {{"name", g.name}, {"polygons", std::move(polygons)}};
}

json execute(const Snapshot& snapshot, const QueryRequest& q) {
  const Store& store = snapshot.store();
  const QueryContext ctx = snapshot.context(q.tree);
  const std::uint32_t node = ctx.tree.resolve(q.path);
  json out{{"type", q.type}, {"path", q.path}, {"snapshot", snapshot.id()}};

  if (q.type == "geometries") {
    const std::size_t r = release_or_latest(store, q.release);
    json features = json::array();
    for (const auto& g : retrieve_geometries(ctx, node, r, q.simplify)) features.push_back(geometry_json(g));
    out["release"] = store.timeline[r].to_string();
    out["features"] = std::move(features);
    return out;
  }

  const AttributeRef& attr = snapshot.catalog().at(q.attribute);
  out["attribute"] = attr.name;
  if (q.type == "histogram") {
    const std::size_t r = release_or_latest(store, q.release);
    const Histogram h = attribute_histogram(ctx, node, attr, q.bins, r);
    out["release"] = store.timeline[r].to_string();
    out["edges"] = h.edges;
    out["counts"] = h.counts;
    return out;
  }
  out["fn"] = to_string(q.fn);
  if (q.type == "aggregate") {
    const std::size_t r = release_or_latest(store, q.release);
    out["release"] = store.timeline[r].to_string();
    out["value"] = cell_json(aggregate(ctx, node, attr, q.fn, r));
    return out;
  }
  if (q.type == "matrix") {
    out["matrix"] = matrix_json(aggregate_matrix(ctx, node, attr, q.fn, matrix_options(store, q)));
    return out;
  }
  if (q.type == "series") {
    json list = json::array();
    for (const auto& s : series(ctx, node, q.rows, attr, q.fn, matrix_options(store, q))) {
      list.push_back({{"name", s.name}, {"mode", to_string(s.mode)}, {"values", cells_json(s.values)}});
    }
    out["columns"] = timeline_json(store.timeline);
    out["series"] = std::move(list);
    return out;
  }
  throw BadRequest("unknown query type '" + q.type + "'");
}

json execute(const Snapshot& snapshot, const json& body) { return execute(snapshot, parse_query(body)); }

json meta_json(const Engine& engine) {
  const auto snapshot = engine.current();
  const Store& store = engine.store();
  json attributes = json::array();
  for (const auto& a : engine.catalog().attributes()) {
    attributes.push_back({{"name", a.name}, {"kind", a.kind_name()}, {"numeric", a.numeric}, {"unit", a.unit}});
  }
  json boroughs = json::array();
  for (const auto& b : store.boroughs) boroughs.push_back({{"code", b.code}, {"name", b.name}});
  json regions = json::object();
  for (RegionKind kind : kAllRegionKinds) {
    const auto& names = store.level(kind).names;
    regions[std::string(to_string(kind))] = names;
  }
  json j{{"city", kCityName},
         {"timeline", timeline_json(store.timeline)},
         {"attributes", attributes},
         {"region_kinds", {"neighborhood", "community-district"}},
         {"regions", regions},
         {"boroughs", boroughs},
         {"lots", store.lots.size()},
         {"epsilon", store.dedup.epsilon},
         {"snapshot", snapshot->id()}};
  j["filter"] = snapshot->filter() ? to_json(*snapshot->filter()) : json(nullptr);
  return j;
}

}  // namespace chronicle
