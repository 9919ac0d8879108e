#include "chronicle/attributes.hpp"

namespace chronicle {

std::string_view AttributeRef::kind_name() const noexcept {
  switch (source) {
    case Source::Schema: return to_string(kind);
    case Source::Bbl: return "identifier";
    case Source::NormalizedAssessTotal: return "derived";
  }
  return "";
}

AttributeCatalog::AttributeCatalog(const Store& store) : store_(&store) {
  const auto& schema = store.schema;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& def = schema.attributes()[i];
    const AttributeSlot slot = schema.slot(i);
    AttributeRef ref;
    ref.name = def.name;
    ref.numeric = is_numeric(def.kind);
    ref.kind = slot.kind;
    ref.column = slot.column;
    ref.unit = def.unit;
    attributes_.push_back(std::move(ref));
  }
  AttributeRef bbl;
  bbl.name = kBblAttribute;
  bbl.source = AttributeRef::Source::Bbl;
  attributes_.push_back(std::move(bbl));

  const auto* assess = schema.def("ASSESSTOTAL");
  const auto* lotarea = schema.def("LOTAREA");
  if (assess && lotarea && is_numeric(assess->kind) && is_numeric(lotarea->kind) &&
      !schema.find(kNormalizedAssessTotal)) {
    const AttributeSlot a = schema.slot(*schema.find("ASSESSTOTAL"));
    const AttributeSlot l = schema.slot(*schema.find("LOTAREA"));
    assess_kind_ = a.kind;
    assess_column_ = a.column;
    lotarea_kind_ = l.kind;
    lotarea_column_ = l.column;
    AttributeRef derived;
    derived.name = kNormalizedAssessTotal;
    derived.source = AttributeRef::Source::NormalizedAssessTotal;
    derived.numeric = true;
    derived.unit = assess->unit + "/" + lotarea->unit;
    attributes_.push_back(std::move(derived));
  }
}

const AttributeRef* AttributeCatalog::find(std::string_view name) const noexcept {
  for (const auto& a : attributes_) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

const AttributeRef& AttributeCatalog::at(std::string_view name) const {
  if (const auto* a = find(name)) return *a;
  throw AttributeError(std::string(name), "unknown attribute '" + std::string(name) + "'");
}

double AttributeCatalog::schema_number(AttributeKind kind, std::uint32_t column, std::size_t row,
                                       std::size_t r) const noexcept {
  const AttributePool& pool = store_->attributes.pool(kind);
  const std::uint32_t entry = pool.refs.get(row, r);
  return entry == kNone ? kInvalidNumber : pool.number(entry, column);
}

double AttributeCatalog::number(const AttributeRef& attr, std::size_t row, std::size_t r) const noexcept {
  switch (attr.source) {
    case AttributeRef::Source::Schema:
      return attr.numeric ? schema_number(attr.kind, attr.column, row, r) : kInvalidNumber;
    case AttributeRef::Source::Bbl: return kInvalidNumber;
    case AttributeRef::Source::NormalizedAssessTotal: {
      const double assess = schema_number(assess_kind_, assess_column_, row, r);
      const double area = schema_number(lotarea_kind_, lotarea_column_, row, r);
      if (is_invalid(assess) || is_invalid(area) || area == 0.0) return kInvalidNumber;
      return assess / area;
    }
  }
  return kInvalidNumber;
}

std::uint32_t AttributeCatalog::code(const AttributeRef& attr, std::size_t row, std::size_t r) const noexcept {
  if (attr.source != AttributeRef::Source::Schema || attr.numeric) return 0;
  const AttributePool& pool = store_->attributes.pool(AttributeKind::Categorical);
  const std::uint32_t entry = pool.refs.get(row, r);
  return entry == kNone ? 0 : pool.code(entry, attr.column);
}

std::string_view AttributeCatalog::text(const AttributeRef& attr, std::size_t row, std::size_t r) const noexcept {
  if (attr.source == AttributeRef::Source::Bbl) return store_->lots[row].bbl();
  return store_->attributes.dictionary.values()[code(attr, row, r)];
}

}  // namespace chronicle
