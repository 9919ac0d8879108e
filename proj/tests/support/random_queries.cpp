#include "random_queries.hpp"

#include <sstream>

namespace randq {

using namespace chronicle;

namespace {

std::pair<std::size_t, std::size_t> random_slot(std::mt19937_64& rng, const Store& store) {
  std::uniform_int_distribution<std::size_t> row(0, store.lots.size() - 1), rel(0, store.release_count() - 1);
  for (;;) {
    const std::size_t a = row(rng), r = rel(rng);
    if (store.lot_exists(a, r)) return {a, r};
  }
}

}  // namespace

FilterExpr random_filter(std::mt19937_64& rng, const AttributeCatalog& catalog, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  const int shape = pick(rng);
  if (depth > 0 && shape < 2) {
    std::vector<FilterExpr> kids{random_filter(rng, catalog, depth - 1), random_filter(rng, catalog, depth - 1)};
    return shape == 0 ? FilterExpr::all(std::move(kids)) : FilterExpr::any(std::move(kids));
  }
  if (depth > 0 && shape == 2) return FilterExpr::negate(random_filter(rng, catalog, depth - 1));

  const auto& attrs = catalog.attributes();
  const AttributeRef& attr = attrs[std::uniform_int_distribution<std::size_t>(0, attrs.size() - 1)(rng)];
  const Store& store = catalog.store();
  if (pick(rng) == 0) return FilterExpr::leaf(attr.name, FilterOp::Invalid);
  if (attr.numeric) {
    auto sample = [&] {
      for (int tries = 0; tries < 50; ++tries) {
        const auto [row, r] = random_slot(rng, store);
        const double v = catalog.number(attr, row, r);
        if (!is_invalid(v)) return v;
      }
      return 0.0;
    };
    static constexpr FilterOp ops[] = {FilterOp::Eq, FilterOp::Ne, FilterOp::Lt, FilterOp::Le,
                                       FilterOp::Gt, FilterOp::Ge, FilterOp::Range, FilterOp::In};
    const FilterOp op = ops[std::uniform_int_distribution<int>(0, 7)(rng)];
    if (op == FilterOp::Range) {
      double a = sample(), b = sample();
      if (a > b) std::swap(a, b);
      return FilterExpr::leaf(attr.name, op, {a, b});
    }
    if (op == FilterOp::In) return FilterExpr::leaf(attr.name, op, {sample(), sample(), sample()});
    return FilterExpr::leaf(attr.name, op, {sample()});
  }
  auto sample = [&] {
    const auto [row, r] = random_slot(rng, store);
    return std::string(catalog.text(attr, row, r));
  };
  if (pick(rng) < 5) return FilterExpr::leaf(attr.name, FilterOp::In, {sample(), sample()});
  return FilterExpr::leaf(attr.name, pick(rng) < 7 ? FilterOp::Eq : FilterOp::Ne, {sample()});
}

std::vector<std::string> random_path(std::mt19937_64& rng, const SpatioTemporalIndex& tree) {
  std::vector<std::vector<std::uint32_t>> by_depth(1, {tree.root()});
  for (std::size_t d = 0; d < by_depth.size(); ++d) {
    std::vector<std::uint32_t> next;
    for (std::uint32_t n : by_depth[d]) {
      for (std::uint32_t c : tree.children_of(n)) next.push_back(c);
    }
    if (!next.empty()) by_depth.push_back(std::move(next));
  }
  const auto& level = by_depth[std::uniform_int_distribution<std::size_t>(0, by_depth.size() - 1)(rng)];
  return tree.path_of(level[std::uniform_int_distribution<std::size_t>(0, level.size() - 1)(rng)]);
}

Tuple random_tuple(std::mt19937_64& rng, const IndexSet& indexes, const AttributeCatalog& catalog,
                   std::size_t filters) {
  Tuple t;
  t.tree.regions = kAllRegionKinds[std::uniform_int_distribution<int>(0, 1)(rng)];
  t.tree.skip_blocks = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  t.path = random_path(rng, indexes.tree(t.tree));
  const auto& attrs = catalog.attributes();
  const AttributeRef& attr = attrs[std::uniform_int_distribution<std::size_t>(0, attrs.size() - 1)(rng)];
  t.attribute = attr.name;
  static constexpr AggregateFn fns[] = {AggregateFn::Count, AggregateFn::Sum, AggregateFn::Min, AggregateFn::Max,
                                        AggregateFn::Avg};
  t.fn = attr.numeric ? fns[std::uniform_int_distribution<int>(0, 4)(rng)] : AggregateFn::Count;
  t.release = std::uniform_int_distribution<std::size_t>(0, indexes.store().release_count() - 1)(rng);
  if (filters && std::uniform_int_distribution<int>(0, 2)(rng) != 0) {
    t.filter = static_cast<int>(std::uniform_int_distribution<std::size_t>(0, filters - 1)(rng));
  }
  return t;
}

std::string describe(const Tuple& t) {
  std::ostringstream out;
  for (const auto& p : t.path) out << '/' << p;
  out << " [" << to_string(t.tree.regions) << (t.tree.skip_blocks ? ", no blocks" : "") << "] " << to_string(t.fn)
      << '(' << t.attribute << ") @" << t.release << " filter " << t.filter;
  return out.str();
}

}  // namespace randq
