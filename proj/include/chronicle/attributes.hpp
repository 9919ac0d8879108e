#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chronicle/store.hpp"

namespace chronicle {

inline constexpr std::string_view kBblAttribute = "BBL";
inline constexpr std::string_view kNormalizedAssessTotal = "NORMALIZED_ASSESSTOTAL";

/// An attribute addressable by queries and filters.
struct AttributeRef {
  enum class Source : std::uint8_t { Schema, Bbl, NormalizedAssessTotal };

  std::string name;
  Source source = Source::Schema;
  bool numeric = false;
  /// Schema attributes only.
  AttributeKind kind = AttributeKind::Categorical;
  std::uint32_t column = 0;
  std::string unit;

  /// "categorical", "numerical-stable", "numerical-unstable", "identifier" or "derived".
  std::string_view kind_name() const noexcept;
};

/// Schema attributes plus the BBL identifier and NORMALIZED_ASSESSTOTAL
/// (ASSESSTOTAL / LOTAREA, registered when both are numeric).
class AttributeCatalog {
 public:
  explicit AttributeCatalog(const Store& store);

  const std::vector<AttributeRef>& attributes() const noexcept { return attributes_; }
  const AttributeRef* find(std::string_view name) const noexcept;
  /// Throws AttributeError for unknown names.
  const AttributeRef& at(std::string_view name) const;

  /// Value of a numeric attribute for an existing (lot, release); NaN = invalid.
  double number(const AttributeRef& attr, std::size_t row, std::size_t r) const noexcept;
  /// Value of a categorical attribute; empty = invalid.
  std::string_view text(const AttributeRef& attr, std::size_t row, std::size_t r) const noexcept;
  /// Dictionary code of a categorical schema attribute (0 = invalid).
  std::uint32_t code(const AttributeRef& attr, std::size_t row, std::size_t r) const noexcept;

  const Store& store() const noexcept { return *store_; }

 private:
  double schema_number(AttributeKind kind, std::uint32_t column, std::size_t row, std::size_t r) const noexcept;

  const Store* store_;
  std::vector<AttributeRef> attributes_;
  std::uint32_t assess_column_ = 0, lotarea_column_ = 0;
  AttributeKind assess_kind_ = AttributeKind::NumericalUnstable, lotarea_kind_ = AttributeKind::NumericalStable;
};

}  // namespace chronicle
