#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace chronicle {

/// The three attribute-set families that are deduplicated independently.
enum class AttributeKind : std::uint8_t { Categorical = 0, NumericalStable = 1, NumericalUnstable = 2 };

inline constexpr std::array<AttributeKind, 3> kAllKinds = {
    AttributeKind::Categorical, AttributeKind::NumericalStable, AttributeKind::NumericalUnstable};

std::string_view to_string(AttributeKind kind) noexcept;
AttributeKind parse_attribute_kind(std::string_view text);

inline bool is_numeric(AttributeKind kind) noexcept { return kind != AttributeKind::Categorical; }

/// Missing numeric values. Never zero, never produced by arithmetic on valid data.
inline constexpr double kInvalidNumber = std::numeric_limits<double>::quiet_NaN();
inline bool is_invalid(double v) noexcept { return std::isnan(v); }

struct AttributeDef {
  std::string name;
  AttributeKind kind = AttributeKind::Categorical;
  std::string unit;
};

/// Position of an attribute inside its kind's tuple.
struct AttributeSlot {
  AttributeKind kind;
  std::uint32_t column;
};

class AttributeSchema {
 public:
  AttributeSchema() = default;
  explicit AttributeSchema(std::vector<AttributeDef> attributes);

  const std::vector<AttributeDef>& attributes() const noexcept { return attributes_; }
  std::size_t size() const noexcept { return attributes_.size(); }

  std::optional<std::size_t> find(std::string_view name) const;
  const AttributeDef* def(std::string_view name) const;
  AttributeSlot slot(std::size_t attribute) const { return slots_.at(attribute); }

  /// Width of the tuple of one kind.
  std::size_t width(AttributeKind kind) const noexcept {
    return by_kind_[static_cast<std::size_t>(kind)].size();
  }
  /// Attribute indices (into attributes()) of one kind, in tuple order.
  const std::vector<std::size_t>& members(AttributeKind kind) const noexcept {
    return by_kind_[static_cast<std::size_t>(kind)];
  }
  /// Number of numeric attributes; numeric record values are stored
  /// stable-columns first, then unstable.
  std::size_t numeric_width() const noexcept {
    return width(AttributeKind::NumericalStable) + width(AttributeKind::NumericalUnstable);
  }
  /// Index into a record's numeric vector for a numeric slot.
  std::size_t numeric_offset(AttributeSlot slot) const noexcept {
    return slot.kind == AttributeKind::NumericalStable
               ? slot.column
               : width(AttributeKind::NumericalStable) + slot.column;
  }

  friend bool operator==(const AttributeSchema& a, const AttributeSchema& b) {
    return a.names_equal(b);
  }

 private:
  bool names_equal(const AttributeSchema& other) const;

  std::vector<AttributeDef> attributes_;
  std::vector<AttributeSlot> slots_;
  std::array<std::vector<std::size_t>, 3> by_kind_;
};

/// Standard land-use attribute selection: ids, zoning and land use, areas,
/// assessed values and floor-area ratios.
AttributeSchema default_schema();

/// JSON: {"attributes":[{"name":..,"kind":"categorical|numerical-stable|numerical-unstable","unit":..}]}
AttributeSchema load_schema(const std::filesystem::path& path);
void save_schema(const AttributeSchema& schema, const std::filesystem::path& path);
nlohmann::json schema_to_json(const AttributeSchema& schema);
AttributeSchema schema_from_json(const nlohmann::json& doc);

/// Maps historical attribute spellings to canonical schema names.
class RenameTable {
 public:
  void add(std::string source, std::string canonical);
  /// Canonical name for `source`, or `source` itself when it has no entry.
  std::string_view canonical(std::string_view source) const;
  const std::map<std::string, std::string, std::less<>>& entries() const noexcept {
    return entries_;
  }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

/// Two-column CSV (source,canonical). A `source,canonical` header line is skipped.
RenameTable load_rename_table(const std::filesystem::path& path);
void save_rename_table(const RenameTable& table, const std::filesystem::path& path);
RenameTable default_renames();

}  // namespace chronicle
