#include "chronicle/filter.hpp"

#include <algorithm>
#include <thread>

namespace chronicle {

using nlohmann::json;

std::string_view to_string(FilterOp op) noexcept {
  switch (op) {
    case FilterOp::Eq: return "=";
    case FilterOp::Ne: return "!=";
    case FilterOp::Lt: return "<";
    case FilterOp::Le: return "<=";
    case FilterOp::Gt: return ">";
    case FilterOp::Ge: return ">=";
    case FilterOp::In: return "in";
    case FilterOp::Range: return "range";
    case FilterOp::Invalid: return "invalid";
  }
  return "?";
}

FilterExpr FilterExpr::leaf(std::string attribute, FilterOp op, std::vector<FilterValue> values) {
  FilterExpr e;
  e.attribute = std::move(attribute);
  e.op = op;
  e.values = std::move(values);
  return e;
}

FilterExpr FilterExpr::all(std::vector<FilterExpr> children) {
  FilterExpr e;
  e.type = Type::And;
  e.children = std::move(children);
  return e;
}

FilterExpr FilterExpr::any(std::vector<FilterExpr> children) {
  FilterExpr e;
  e.type = Type::Or;
  e.children = std::move(children);
  return e;
}

FilterExpr FilterExpr::negate(FilterExpr child) {
  FilterExpr e;
  e.type = Type::Not;
  e.children.push_back(std::move(child));
  return e;
}

namespace {

FilterOp parse_op(const std::string& s) {
  static const std::pair<const char*, FilterOp> ops[] = {
      {"=", FilterOp::Eq},     {"==", FilterOp::Eq},      {"eq", FilterOp::Eq},        {"!=", FilterOp::Ne},
      {"ne", FilterOp::Ne},    {"<", FilterOp::Lt},       {"lt", FilterOp::Lt},        {"<=", FilterOp::Le},
      {"le", FilterOp::Le},    {">", FilterOp::Gt},       {"gt", FilterOp::Gt},        {">=", FilterOp::Ge},
      {"ge", FilterOp::Ge},    {"in", FilterOp::In},      {"range", FilterOp::Range},  {"invalid", FilterOp::Invalid}};
  for (auto [name, op] : ops) {
    if (s == name) return op;
  }
  throw ValidationError("unknown filter operator '" + s + "'");
}

FilterValue parse_value(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  throw ValidationError("filter operand must be a number or a string");
}

json value_json(const FilterValue& v) {
  if (const double* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

}  // namespace

FilterExpr parse_filter(const json& j) {
  if (!j.is_object()) throw ValidationError("filter must be a JSON object");
  auto list = [&](const char* key) {
    const json& items = j.at(key);
    if (!items.is_array() || items.empty()) throw ValidationError(std::string("'") + key + "' needs a non-empty array");
    std::vector<FilterExpr> out;
    for (const auto& item : items) out.push_back(parse_filter(item));
    return out;
  };
  if (j.contains("and")) return FilterExpr::all(list("and"));
  if (j.contains("or")) return FilterExpr::any(list("or"));
  if (j.contains("not")) return FilterExpr::negate(parse_filter(j.at("not")));
  if (!j.contains("attribute") || !j["attribute"].is_string()) throw ValidationError("filter leaf needs 'attribute'");
  if (!j.contains("op") || !j["op"].is_string()) throw ValidationError("filter leaf needs 'op'");
  FilterExpr e = FilterExpr::leaf(j["attribute"].get<std::string>(), parse_op(j["op"].get<std::string>()));
  switch (e.op) {
    case FilterOp::Invalid: break;
    case FilterOp::In:
      if (!j.contains("values") || !j["values"].is_array()) throw ValidationError("'in' needs 'values'");
      for (const auto& v : j["values"]) e.values.push_back(parse_value(v));
      break;
    case FilterOp::Range:
      if (!j.contains("min") || !j.contains("max")) throw ValidationError("'range' needs 'min' and 'max'");
      e.values = {parse_value(j["min"]), parse_value(j["max"])};
      break;
    default:
      if (!j.contains("value")) throw ValidationError("comparison needs 'value'");
      e.values = {parse_value(j["value"])};
  }
  return e;
}

json to_json(const FilterExpr& e) {
  auto list = [&] {
    json a = json::array();
    for (const auto& c : e.children) a.push_back(to_json(c));
    return a;
  };
  switch (e.type) {
    case FilterExpr::Type::And: return {{"and", list()}};
    case FilterExpr::Type::Or: return {{"or", list()}};
    case FilterExpr::Type::Not: return {{"not", to_json(e.children.at(0))}};
    case FilterExpr::Type::Leaf: break;
  }
  json j{{"attribute", e.attribute}, {"op", std::string(to_string(e.op))}};
  if (e.op == FilterOp::In) {
    json values = json::array();
    for (const auto& v : e.values) values.push_back(value_json(v));
    j["values"] = values;
  } else if (e.op == FilterOp::Range) {
    j["min"] = value_json(e.values.at(0));
    j["max"] = value_json(e.values.at(1));
  } else if (e.op != FilterOp::Invalid) {
    j["value"] = value_json(e.values.at(0));
  }
  return j;
}

CompiledFilter::CompiledFilter(const FilterExpr& expr, const AttributeCatalog& catalog) : catalog_(&catalog) {
  compile(expr);
}

std::uint32_t CompiledFilter::compile(const FilterExpr& e) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  Node node;
  node.type = e.type;
  node.op = e.op;
  nodes_.push_back(std::move(node));
  if (e.type != FilterExpr::Type::Leaf) {
    if (e.children.empty()) throw ValidationError("boolean filter node without children");
    if (e.type == FilterExpr::Type::Not && e.children.size() != 1) throw ValidationError("NOT takes exactly one child");
    std::vector<std::uint32_t> kids;
    for (const auto& c : e.children) kids.push_back(compile(c));
    nodes_[id].children = std::move(kids);
    return id;
  }
  const AttributeRef* attr = catalog_->find(e.attribute);
  if (!attr) throw ValidationError("unknown attribute '" + e.attribute + "'");
  Node& n = nodes_[id];
  n.attr = attr;
  const std::size_t arity = e.op == FilterOp::Invalid ? 0 : e.op == FilterOp::Range ? 2 : e.op == FilterOp::In ? e.values.size() : 1;
  if (e.values.size() != arity) throw ValidationError("wrong operand count for '" + std::string(to_string(e.op)) + "'");
  for (const auto& v : e.values) {
    if (attr->numeric) {
      const double* d = std::get_if<double>(&v);
      if (!d) throw ValidationError("attribute " + attr->name + " needs numeric operands");
      n.numbers.push_back(*d);
    } else {
      const std::string* s = std::get_if<std::string>(&v);
      if (!s) throw ValidationError("attribute " + attr->name + " needs string operands");
      n.texts.push_back(*s);
    }
  }
  if (!attr->numeric && e.op != FilterOp::Eq && e.op != FilterOp::Ne && e.op != FilterOp::In &&
      e.op != FilterOp::Invalid) {
    throw ValidationError("operator '" + std::string(to_string(e.op)) + "' needs a numeric attribute");
  }
  if (e.op == FilterOp::Range && !(n.numbers[0] <= n.numbers[1])) throw ValidationError("range min exceeds max");
  if (attr->source == AttributeRef::Source::Schema && !attr->numeric) {
    for (const auto& t : n.texts) n.codes.push_back(catalog_->store().attributes.dictionary.find(t));
  }
  return id;
}

bool CompiledFilter::eval(std::size_t row, std::size_t r) const { return eval_node(0, row, r); }

bool CompiledFilter::eval_node(std::uint32_t id, std::size_t row, std::size_t r) const {
  const Node& n = nodes_[id];
  switch (n.type) {
    case FilterExpr::Type::And:
      for (auto c : n.children) {
        if (!eval_node(c, row, r)) return false;
      }
      return true;
    case FilterExpr::Type::Or:
      for (auto c : n.children) {
        if (eval_node(c, row, r)) return true;
      }
      return false;
    case FilterExpr::Type::Not: return !eval_node(n.children[0], row, r);
    case FilterExpr::Type::Leaf: break;
  }
  if (n.attr->numeric) {
    const double v = catalog_->number(*n.attr, row, r);
    if (n.op == FilterOp::Invalid) return is_invalid(v);
    if (is_invalid(v)) return false;
    switch (n.op) {
      case FilterOp::Eq: return v == n.numbers[0];
      case FilterOp::Ne: return v != n.numbers[0];
      case FilterOp::Lt: return v < n.numbers[0];
      case FilterOp::Le: return v <= n.numbers[0];
      case FilterOp::Gt: return v > n.numbers[0];
      case FilterOp::Ge: return v >= n.numbers[0];
      case FilterOp::In: return std::find(n.numbers.begin(), n.numbers.end(), v) != n.numbers.end();
      case FilterOp::Range: return n.numbers[0] <= v && v <= n.numbers[1];
      case FilterOp::Invalid: break;
    }
    return false;
  }
  if (!n.codes.empty() || (n.attr->source == AttributeRef::Source::Schema && n.op == FilterOp::Invalid)) {
    const std::uint32_t c = catalog_->code(*n.attr, row, r);
    if (n.op == FilterOp::Invalid) return c == 0;
    if (c == 0) return false;
    switch (n.op) {
      case FilterOp::Eq: return c == n.codes[0];
      case FilterOp::Ne: return c != n.codes[0];
      case FilterOp::In: return std::find(n.codes.begin(), n.codes.end(), c) != n.codes.end();
      default: return false;
    }
  }
  const std::string_view t = catalog_->text(*n.attr, row, r);
  if (n.op == FilterOp::Invalid) return t.empty();
  if (t.empty()) return false;
  switch (n.op) {
    case FilterOp::Eq: return t == n.texts[0];
    case FilterOp::Ne: return t != n.texts[0];
    case FilterOp::In: return std::find(n.texts.begin(), n.texts.end(), t) != n.texts.end();
    default: return false;
  }
}

PassMask PassMask::build(const Store& store, const CompiledFilter& filter, unsigned threads) {
  PassMask mask;
  const std::size_t k = store.release_count();
  const std::size_t rows = store.lots.size();
  mask.words_ = std::max<std::size_t>(1, (k + 63) / 64);
  mask.bits_.assign(std::max<std::size_t>(1, rows * mask.words_), 0);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t row = begin; row < end; ++row) {
      for (std::size_t r = 0; r < k; ++r) {
        if (store.lot_exists(row, r) && filter.eval(row, r)) {
          mask.bits_[row * mask.words_ + r / 64] |= std::uint64_t{1} << (r % 64);
        }
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, rows / 4096));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run, rows * t / workers, rows * (t + 1) / workers);
    run(0, rows / workers);
  }
  return mask;
}

}  // namespace chronicle
