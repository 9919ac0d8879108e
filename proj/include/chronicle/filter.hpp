#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "chronicle/attributes.hpp"
#include "json.hpp"

namespace chronicle {

enum class FilterOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge, In, Range, Invalid };

std::string_view to_string(FilterOp op) noexcept;

using FilterValue = std::variant<double, std::string>;

/// Boolean tree of attribute predicates. Every comparison with an invalid
/// value is false; `Invalid` tests for the invalid marker itself; NOT is the
/// plain complement.
struct FilterExpr {
  enum class Type : std::uint8_t { Leaf, And, Or, Not };

  Type type = Type::Leaf;
  std::vector<FilterExpr> children;
  std::string attribute;
  FilterOp op = FilterOp::Eq;
  /// One operand for comparisons, the set for In, {min, max} for Range.
  std::vector<FilterValue> values;

  static FilterExpr leaf(std::string attribute, FilterOp op, std::vector<FilterValue> values = {});
  static FilterExpr all(std::vector<FilterExpr> children);
  static FilterExpr any(std::vector<FilterExpr> children);
  static FilterExpr negate(FilterExpr child);

  friend bool operator==(const FilterExpr&, const FilterExpr&) = default;
};

/// JSON forms:
///   {"and":[..]}  {"or":[..]}  {"not":{..}}
///   {"attribute":"LOTAREA","op":">=","value":0}
///   {"attribute":"LANDUSE","op":"in","values":["01","02"]}
///   {"attribute":"LOTAREA","op":"range","min":0,"max":100}
///   {"attribute":"LOTAREA","op":"invalid"}
/// Throws ValidationError on malformed input.
FilterExpr parse_filter(const nlohmann::json& j);
nlohmann::json to_json(const FilterExpr& expr);

/// A filter bound to a catalog. Construction validates attribute names,
/// operand types and range order (ValidationError).
class CompiledFilter {
 public:
  CompiledFilter(const FilterExpr& expr, const AttributeCatalog& catalog);
  bool eval(std::size_t row, std::size_t r) const;

 private:
  struct Node {
    FilterExpr::Type type;
    FilterOp op;
    const AttributeRef* attr = nullptr;
    std::vector<double> numbers;
    std::vector<std::string> texts;
    std::vector<std::uint32_t> codes;  // dictionary codes of `texts`, categorical schema attributes
    std::vector<std::uint32_t> children;
  };
  std::uint32_t compile(const FilterExpr& expr);
  bool eval_node(std::uint32_t id, std::size_t row, std::size_t r) const;

  const AttributeCatalog* catalog_;
  std::vector<Node> nodes_;
};

/// Lot x release pass bits. Default-constructed masks pass everything.
class PassMask {
 public:
  PassMask() = default;
  static PassMask build(const Store& store, const CompiledFilter& filter, unsigned threads = 1);

  bool all() const noexcept { return bits_.empty(); }
  bool pass(std::size_t row, std::size_t r) const noexcept {
    return bits_.empty() || ((bits_[row * words_ + r / 64] >> (r % 64)) & 1u);
  }
  std::size_t bytes() const noexcept { return bits_.capacity() * sizeof(std::uint64_t); }

 private:
  std::size_t words_ = 1;
  std::vector<std::uint64_t> bits_;
};

}  // namespace chronicle
