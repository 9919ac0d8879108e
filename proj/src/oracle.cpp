#include "chronicle/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace chronicle {

NaiveOracle::NaiveOracle(const ReleaseSequence& seq, const Store& store)
    : seq_(&seq), store_(&store), schema_(store.schema) {
  for (const auto& id : seq.lots()) {
    borough_names_.push_back(borough_name(id.borough()));
    const auto block = store.blocks.find(id.block_key());
    if (!block) throw DataError("lot " + id.bbl() + " has no block in the store");
    block_of_.push_back(*block);
  }
}

bool NaiveOracle::numeric_attribute(const std::string& attribute) const {
  if (attribute == kBblAttribute) return false;
  if (attribute == kNormalizedAssessTotal && !schema_.find(attribute)) return true;
  const auto* def = schema_.def(attribute);
  if (!def) throw AttributeError(attribute, "unknown attribute '" + attribute + "'");
  return is_numeric(def->kind);
}

NaiveOracle::Value NaiveOracle::value(const RawRecord& rec, const std::string& attribute) const {
  Value v;
  if (attribute == kBblAttribute) {
    v.text = rec.id.bbl();
    v.valid = !v.text.empty();
    return v;
  }
  if (attribute == kNormalizedAssessTotal && !schema_.find(attribute)) {
    v.numeric = true;
    const double assess = rec.number(schema_, *schema_.find("ASSESSTOTAL"));
    const double area = rec.number(schema_, *schema_.find("LOTAREA"));
    v.valid = !std::isnan(assess) && !std::isnan(area) && area != 0.0;
    if (v.valid) v.number = assess / area;
    return v;
  }
  const auto index = schema_.find(attribute);
  if (!index) throw AttributeError(attribute, "unknown attribute '" + attribute + "'");
  if (is_numeric(schema_.attributes()[*index].kind)) {
    v.numeric = true;
    v.number = rec.number(schema_, *index);
    v.valid = !std::isnan(v.number);
  } else {
    v.text = rec.text(schema_, *index);
    v.valid = !v.text.empty();
  }
  return v;
}

bool NaiveOracle::passes(const RawRecord& rec, const FilterExpr& f) const {
  switch (f.type) {
    case FilterExpr::Type::And:
      return std::all_of(f.children.begin(), f.children.end(), [&](const FilterExpr& c) { return passes(rec, c); });
    case FilterExpr::Type::Or:
      return std::any_of(f.children.begin(), f.children.end(), [&](const FilterExpr& c) { return passes(rec, c); });
    case FilterExpr::Type::Not: return !passes(rec, f.children.at(0));
    case FilterExpr::Type::Leaf: break;
  }
  const Value v = value(rec, f.attribute);
  if (f.op == FilterOp::Invalid) return !v.valid;
  if (!v.valid) return false;
  if (v.numeric) {
    auto operand = [&](std::size_t i) { return std::get<double>(f.values.at(i)); };
    switch (f.op) {
      case FilterOp::Eq: return v.number == operand(0);
      case FilterOp::Ne: return v.number != operand(0);
      case FilterOp::Lt: return v.number < operand(0);
      case FilterOp::Le: return v.number <= operand(0);
      case FilterOp::Gt: return v.number > operand(0);
      case FilterOp::Ge: return v.number >= operand(0);
      case FilterOp::Range: return operand(0) <= v.number && v.number <= operand(1);
      case FilterOp::In:
        for (const auto& x : f.values) {
          if (std::get<double>(x) == v.number) return true;
        }
        return false;
      case FilterOp::Invalid: break;
    }
    return false;
  }
  auto operand = [&](std::size_t i) -> const std::string& { return std::get<std::string>(f.values.at(i)); };
  switch (f.op) {
    case FilterOp::Eq: return v.text == operand(0);
    case FilterOp::Ne: return v.text != operand(0);
    case FilterOp::In:
      for (const auto& x : f.values) {
        if (std::get<std::string>(x) == v.text) return true;
      }
      return false;
    default: return false;
  }
}

std::vector<std::string_view> NaiveOracle::lot_path(std::size_t row, std::size_t r, TreeOptions tree) const {
  const LotId& id = seq_->lots()[row];
  const RegionLevel& level = store_->level(tree.regions);
  const std::uint32_t region = level.assignment.get(block_of_[row], r);
  std::vector<std::string_view> names{kCityName, borough_names_[row],
                                      region == kNone ? std::string_view{} : std::string_view(level.names[region])};
  if (!tree.skip_blocks) names.push_back(id.block());
  names.push_back(id.bbl());
  return names;
}

bool NaiveOracle::has_prefix(const std::vector<std::string_view>& names, const std::vector<std::string>& path) {
  if (path.size() > names.size()) return false;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (names[i] != path[i]) return false;
  }
  return true;
}

Cell NaiveOracle::aggregate(const std::vector<std::string>& path, const std::string& attribute, AggregateFn fn,
                            std::size_t r, const FilterExpr* filter, TreeOptions tree) const {
  if (fn != AggregateFn::Count && !numeric_attribute(attribute)) {
    throw AttributeError(attribute, attribute + " is not numeric");
  }
  if (r >= seq_->release_count()) throw InvalidRelease("release index out of range");
  double sum = 0, lo = 0, hi = 0;
  std::size_t count = 0;
  for (std::size_t row = 0; row < seq_->lots().size(); ++row) {
    const RawRecord* rec = seq_->record(row, r);
    if (!rec || !has_prefix(lot_path(row, r, tree), path)) continue;
    if (filter && !passes(*rec, *filter)) continue;
    const Value v = value(*rec, attribute);
    if (!v.valid) continue;
    const double x = v.numeric ? v.number : 0.0;
    if (count == 0) lo = hi = x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    sum += x;
    ++count;
  }
  if (count == 0) return std::nullopt;
  switch (fn) {
    case AggregateFn::Sum: return sum;
    case AggregateFn::Count: return static_cast<double>(count);
    case AggregateFn::Min: return lo;
    case AggregateFn::Max: return hi;
    case AggregateFn::Avg: return sum / static_cast<double>(count);
  }
  return std::nullopt;
}

std::vector<std::pair<std::string, std::vector<Cell>>> NaiveOracle::matrix_values(const std::vector<std::string>& path,
                                                                                  const std::string& attribute,
                                                                                  AggregateFn fn,
                                                                                  const FilterExpr* filter,
                                                                                  TreeOptions tree) const {
  std::set<std::string> names;
  for (std::size_t r = 0; r < seq_->release_count(); ++r) {
    for (std::size_t row = 0; row < seq_->lots().size(); ++row) {
      if (!seq_->record(row, r)) continue;
      const auto lp = lot_path(row, r, tree);
      if (lp.size() > path.size() && has_prefix(lp, path)) names.emplace(lp[path.size()]);
    }
  }
  std::vector<std::pair<std::string, std::vector<Cell>>> out;
  for (const auto& name : names) {
    auto child = path;
    child.push_back(name);
    std::vector<Cell> cells;
    for (std::size_t r = 0; r < seq_->release_count(); ++r) cells.push_back(aggregate(child, attribute, fn, r, filter, tree));
    out.emplace_back(name, std::move(cells));
  }
  return out;
}

std::vector<std::string> NaiveOracle::visible_children(const std::vector<std::string>& path, std::size_t r,
                                                       const FilterExpr* filter, TreeOptions tree) const {
  std::set<std::string> names;
  for (std::size_t row = 0; row < seq_->lots().size(); ++row) {
    const RawRecord* rec = seq_->record(row, r);
    if (!rec) continue;
    const auto lp = lot_path(row, r, tree);
    if (lp.size() <= path.size() || !has_prefix(lp, path)) continue;
    if (filter && !passes(*rec, *filter)) continue;
    names.emplace(lp[path.size()]);
  }
  return {names.begin(), names.end()};
}

Histogram NaiveOracle::histogram(const std::vector<std::string>& path, const std::string& attribute, std::size_t bins,
                                 std::size_t r, const FilterExpr* filter, TreeOptions tree) const {
  if (!numeric_attribute(attribute)) throw AttributeError(attribute, attribute + " is not numeric");
  Histogram h;
  h.release = r;
  std::vector<double> values;
  for (std::size_t row = 0; row < seq_->lots().size(); ++row) {
    const RawRecord* rec = seq_->record(row, r);
    if (!rec || !has_prefix(lot_path(row, r, tree), path)) continue;
    if (filter && !passes(*rec, *filter)) continue;
    const Value v = value(*rec, attribute);
    if (v.valid) values.push_back(v.number);
  }
  if (values.empty() || bins == 0) return h;
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  const double width = (hi - lo) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (std::size_t i = 0; i <= bins; ++i) h.edges.push_back(i == bins ? hi : lo + width * static_cast<double>(i));
  for (double v : values) {
    const std::size_t b = width > 0 ? static_cast<std::size_t>((v - lo) / width) : 0;
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

std::size_t NaiveOracle::lot_count(std::size_t r, const FilterExpr* filter) const {
  std::size_t n = 0;
  for (std::size_t row = 0; row < seq_->lots().size(); ++row) {
    const RawRecord* rec = seq_->record(row, r);
    if (rec && (!filter || passes(*rec, *filter))) ++n;
  }
  return n;
}

}  // namespace chronicle
