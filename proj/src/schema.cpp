#include "chronicle/schema.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "chronicle/types.hpp"
#include "json.hpp"

namespace chronicle {

std::string_view to_string(AttributeKind kind) noexcept {
  switch (kind) {
    case AttributeKind::Categorical: return "categorical";
    case AttributeKind::NumericalStable: return "numerical-stable";
    case AttributeKind::NumericalUnstable: return "numerical-unstable";
  }
  return "?";
}

AttributeKind parse_attribute_kind(std::string_view text) {
  for (AttributeKind k : kAllKinds) {
    if (to_string(k) == text) return k;
  }
  throw ValidationError("unknown attribute kind '" + std::string(text) + "'");
}

AttributeSchema::AttributeSchema(std::vector<AttributeDef> attributes)
    : attributes_(std::move(attributes)) {
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    const auto& a = attributes_[i];
    if (a.name.empty()) throw ValidationError("schema attribute with empty name");
    if (a.name == "BBL") throw ValidationError("BBL is the lot identifier, not a schema attribute");
    if (!seen.insert(a.name).second) throw ValidationError("duplicate schema attribute " + a.name);
    auto& members = by_kind_[static_cast<std::size_t>(a.kind)];
    slots_.push_back({a.kind, static_cast<std::uint32_t>(members.size())});
    members.push_back(i);
  }
}

std::optional<std::size_t> AttributeSchema::find(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

const AttributeDef* AttributeSchema::def(std::string_view name) const {
  auto i = find(name);
  return i ? &attributes_[*i] : nullptr;
}

bool AttributeSchema::names_equal(const AttributeSchema& other) const {
  if (attributes_.size() != other.attributes_.size()) return false;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name != other.attributes_[i].name ||
        attributes_[i].kind != other.attributes_[i].kind) {
      return false;
    }
  }
  return true;
}

AttributeSchema default_schema() {
  using K = AttributeKind;
  return AttributeSchema({
      {"LANDUSE", K::Categorical, "code"},
      {"BLDGCLASS", K::Categorical, "code"},
      {"SPDIST", K::Categorical, "code"},
      {"LOTAREA", K::NumericalStable, "sq ft"},
      {"BLDGAREA", K::NumericalStable, "sq ft"},
      {"RESAREA", K::NumericalStable, "sq ft"},
      {"COMAREA", K::NumericalStable, "sq ft"},
      {"NUMBLDGS", K::NumericalStable, "count"},
      {"NUMFLOORS", K::NumericalStable, "count"},
      {"RESIDFAR", K::NumericalStable, "ratio"},
      {"COMMFAR", K::NumericalStable, "ratio"},
      {"ASSESSLAND", K::NumericalUnstable, "USD"},
      {"ASSESSTOTAL", K::NumericalUnstable, "USD"},
      {"BUILTFAR", K::NumericalUnstable, "ratio"},
  });
}

nlohmann::json schema_to_json(const AttributeSchema& schema) {
  nlohmann::json attrs = nlohmann::json::array();
  for (const auto& a : schema.attributes()) {
    attrs.push_back({{"name", a.name}, {"kind", to_string(a.kind)}, {"unit", a.unit}});
  }
  return nlohmann::json{{"attributes", attrs}};
}

AttributeSchema schema_from_json(const nlohmann::json& doc) {
  std::vector<AttributeDef> defs;
  for (const auto& a : doc.at("attributes")) {
    defs.push_back({a.at("name").get<std::string>(), parse_attribute_kind(a.at("kind").get<std::string>()),
                    a.value("unit", std::string{})});
  }
  return AttributeSchema(std::move(defs));
}

AttributeSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open schema file " + path.string());
  try {
    return schema_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("schema file " + path.string() + ": " + e.what());
  }
}

void save_schema(const AttributeSchema& schema, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << schema_to_json(schema).dump(2) << '\n';
}

void RenameTable::add(std::string source, std::string canonical) {
  entries_[std::move(source)] = std::move(canonical);
}

std::string_view RenameTable::canonical(std::string_view source) const {
  auto it = entries_.find(source);
  return it == entries_.end() ? source : std::string_view(it->second);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

RenameTable load_rename_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open rename table " + path.string());
  RenameTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
    }
    std::string source = trim(std::string_view(line).substr(0, comma));
    std::string canonical = trim(std::string_view(line).substr(comma + 1));
    if (line_no == 1 && source == "source" && canonical == "canonical") continue;
    if (source.empty() || canonical.empty()) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": empty column");
    }
    table.add(std::move(source), std::move(canonical));
  }
  return table;
}

void save_rename_table(const RenameTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << "source,canonical\n";
  for (const auto& [source, canonical] : table.entries()) out << source << ',' << canonical << '\n';
}

RenameTable default_renames() {
  RenameTable t;
  const std::pair<const char*, const char*> pairs[] = {
      {"LandUse", "LANDUSE"},       {"BldgClass", "BLDGCLASS"},  {"SPDist1", "SPDIST"},
      {"SpDist1", "SPDIST"},        {"SPDIST1", "SPDIST"},       {"LotArea", "LOTAREA"},
      {"BldgArea", "BLDGAREA"},     {"ResArea", "RESAREA"},      {"ComArea", "COMAREA"},
      {"NumBldgs", "NUMBLDGS"},     {"NumFloors", "NUMFLOORS"},  {"ResidFAR", "RESIDFAR"},
      {"CommFAR", "COMMFAR"},       {"AssessLand", "ASSESSLAND"}, {"AssessTot", "ASSESSTOTAL"},
      {"AssessTotal", "ASSESSTOTAL"}, {"ASSESSTOT", "ASSESSTOTAL"}, {"BuiltFAR", "BUILTFAR"},
  };
  for (auto [s, c] : pairs) t.add(s, c);
  return t;
}

}  // namespace chronicle
