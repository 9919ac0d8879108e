#include "chronicle/query.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chronicle {

std::string_view to_string(AggregateFn fn) noexcept {
  switch (fn) {
    case AggregateFn::Sum: return "sum";
    case AggregateFn::Count: return "count";
    case AggregateFn::Min: return "min";
    case AggregateFn::Max: return "max";
    case AggregateFn::Avg: return "avg";
  }
  return "?";
}

AggregateFn parse_aggregate_fn(std::string_view text) {
  for (AggregateFn fn : {AggregateFn::Sum, AggregateFn::Count, AggregateFn::Min, AggregateFn::Max, AggregateFn::Avg}) {
    if (text == to_string(fn)) return fn;
  }
  if (text == "average" || text == "mean") return AggregateFn::Avg;
  throw ValidationError("unknown aggregate function '" + std::string(text) + "'");
}

std::string_view to_string(MatrixMode mode) noexcept { return mode == MatrixMode::Value ? "value" : "delta"; }

MatrixMode parse_matrix_mode(std::string_view text) {
  if (text == "value") return MatrixMode::Value;
  if (text == "delta") return MatrixMode::Delta;
  throw ValidationError("unknown matrix mode '" + std::string(text) + "'");
}

std::string_view to_string(DeltaKind kind) noexcept { return kind == DeltaKind::Relative ? "relative" : "absolute"; }

DeltaKind parse_delta_kind(std::string_view text) {
  if (text == "relative") return DeltaKind::Relative;
  if (text == "absolute") return DeltaKind::Absolute;
  throw ValidationError("unknown delta kind '" + std::string(text) + "'");
}

Cell Accumulator::result(AggregateFn fn) const noexcept {
  if (count == 0) return std::nullopt;
  switch (fn) {
    case AggregateFn::Sum: return sum;
    case AggregateFn::Count: return static_cast<double>(count);
    case AggregateFn::Min: return min;
    case AggregateFn::Max: return max;
    case AggregateFn::Avg: return sum / static_cast<double>(count);
  }
  return std::nullopt;
}

void check_aggregate(const AttributeRef& attr, AggregateFn fn) {
  if (fn != AggregateFn::Count && !attr.numeric) {
    throw AttributeError(attr.name, "aggregate " + std::string(to_string(fn)) + " needs a numeric attribute, " +
                                        attr.name + " is " + std::string(attr.kind_name()));
  }
}

namespace {

void check_release(const QueryContext& ctx, std::size_t r) {
  if (r >= ctx.tree.store().release_count()) throw InvalidRelease("release index out of range");
}

bool valid_value(const QueryContext& ctx, const AttributeRef& attr, std::size_t row, std::size_t r, double& out) {
  if (attr.numeric) {
    out = ctx.catalog.number(attr, row, r);
    return !is_invalid(out);
  }
  out = 0;
  return !ctx.catalog.text(attr, row, r).empty();
}

/// Accumulates every release of the node's subtree in one pass over its leaves.
std::vector<Accumulator> accumulate(const QueryContext& ctx, std::uint32_t node, const AttributeRef& attr) {
  const std::size_t k = ctx.tree.store().release_count();
  std::vector<Accumulator> acc(k);
  const IndexNode& n = ctx.tree.node(node);
  for (std::uint32_t leaf = n.leaf_begin; leaf < n.leaf_end; ++leaf) {
    const std::uint32_t row = ctx.tree.leaf_lot(leaf);
    for (std::size_t r = 0; r < k; ++r) {
      if (!ctx.tree.leaf_member(leaf, r) || !ctx.pass.pass(row, r)) continue;
      double v;
      if (valid_value(ctx, attr, row, r, v)) acc[r].add(v);
    }
  }
  return acc;
}

}  // namespace

bool visible(const QueryContext& ctx, std::uint32_t node, std::size_t r) {
  if (!ctx.tree.exists(node, r)) return false;
  if (ctx.pass.all()) return true;
  const IndexNode& n = ctx.tree.node(node);
  for (std::uint32_t leaf = n.leaf_begin; leaf < n.leaf_end; ++leaf) {
    if (ctx.tree.leaf_member(leaf, r) && ctx.pass.pass(ctx.tree.leaf_lot(leaf), r)) return true;
  }
  return false;
}

std::vector<NamedGeometry> retrieve_geometries(const QueryContext& ctx, std::uint32_t node, std::size_t r,
                                               double simplify_tolerance) {
  check_release(ctx, r);
  std::vector<NamedGeometry> out;
  for (std::uint32_t child : ctx.tree.children_of(node)) {
    if (!visible(ctx, child, r)) continue;
    auto shape = ctx.tree.node_geometry(child, r);
    if (!shape) continue;
    if (simplify_tolerance > 0) *shape = simplify(*shape, simplify_tolerance);
    out.push_back({std::string(ctx.tree.name(child)), std::move(*shape)});
  }
  return out;
}

Cell aggregate(const QueryContext& ctx, std::uint32_t node, const AttributeRef& attr, AggregateFn fn, std::size_t r) {
  check_aggregate(attr, fn);
  check_release(ctx, r);
  Accumulator acc;
  const IndexNode& n = ctx.tree.node(node);
  for (std::uint32_t leaf = n.leaf_begin; leaf < n.leaf_end; ++leaf) {
    const std::uint32_t row = ctx.tree.leaf_lot(leaf);
    if (!ctx.tree.leaf_member(leaf, r) || !ctx.pass.pass(row, r)) continue;
    double v;
    if (valid_value(ctx, attr, row, r, v)) acc.add(v);
  }
  return acc.result(fn);
}

std::vector<Cell> aggregate_releases(const QueryContext& ctx, std::uint32_t node, const AttributeRef& attr,
                                     AggregateFn fn) {
  check_aggregate(attr, fn);
  const auto acc = accumulate(ctx, node, attr);
  std::vector<Cell> out;
  out.reserve(acc.size());
  for (const auto& a : acc) out.push_back(a.result(fn));
  return out;
}

std::vector<Cell> apply_delta(const std::vector<Cell>& values, DeltaKind kind, std::optional<std::size_t> base) {
  std::vector<Cell> out(values.size());
  for (std::size_t c = 1; c < values.size(); ++c) {
    if (base && c <= *base) continue;
    const Cell& prev = base ? values[*base] : values[c - 1];
    const Cell& cur = values[c];
    if (!prev || !cur) continue;
    if (kind == DeltaKind::Absolute) {
      out[c] = *cur - *prev;
    } else if (*prev != 0.0) {
      out[c] = (*cur - *prev) / std::fabs(*prev);
    }
  }
  return out;
}

namespace {

std::vector<Cell> row_cells(const QueryContext& ctx, std::uint32_t child, const AttributeRef& attr, AggregateFn fn,
                            MatrixMode mode, const MatrixOptions& options) {
  auto values = aggregate_releases(ctx, child, attr, fn);
  if (mode == MatrixMode::Delta) return apply_delta(values, options.delta, options.base);
  return values;
}

void check_options(const QueryContext& ctx, const MatrixOptions& options) {
  if (options.base) check_release(ctx, *options.base);
  if (options.sort_release) check_release(ctx, *options.sort_release);
}

}  // namespace

MatrixSlice aggregate_matrix(const QueryContext& ctx, std::uint32_t node, const AttributeRef& attr, AggregateFn fn,
                             const MatrixOptions& options) {
  check_aggregate(attr, fn);
  check_options(ctx, options);
  MatrixSlice slice;
  slice.columns = ctx.tree.store().timeline;
  slice.options = options;
  const std::size_t k = slice.columns.size();
  const auto kids = ctx.tree.children_of(node);
  std::vector<std::vector<Cell>> rows;
  for (std::uint32_t child : kids) {
    slice.rows.emplace_back(ctx.tree.name(child));
    rows.push_back(row_cells(ctx, child, attr, fn, options.mode, options));
  }
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  if (options.sort_release) {
    const std::size_t c = *options.sort_release;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const Cell& x = rows[a][c];
      const Cell& y = rows[b][c];
      if (x.has_value() != y.has_value()) return x.has_value();
      if (x && *x != *y) return *x > *y;
      return slice.rows[a] < slice.rows[b];
    });
  }
  std::vector<std::string> names;
  slice.cells.reserve(rows.size() * k);
  for (std::size_t i : order) {
    names.push_back(std::move(slice.rows[i]));
    slice.cells.insert(slice.cells.end(), rows[i].begin(), rows[i].end());
  }
  slice.rows = std::move(names);
  return slice;
}

std::vector<SeriesSlice> series(const QueryContext& ctx, std::uint32_t node, const std::vector<std::string>& selected,
                                const AttributeRef& attr, AggregateFn fn, const MatrixOptions& matrix) {
  check_aggregate(attr, fn);
  check_options(ctx, matrix);
  const std::size_t depth = ctx.tree.path_of(node).size() + 1;
  std::vector<SeriesSlice> out;
  const MatrixMode mode = complement(matrix.mode);
  for (const auto& name : selected) {
    const auto child = ctx.tree.child(node, name);
    if (!child) throw NotFound(depth, name);
    out.push_back({name, mode, row_cells(ctx, *child, attr, fn, mode, matrix)});
  }
  return out;
}

Histogram attribute_histogram(const QueryContext& ctx, std::uint32_t node, const AttributeRef& attr, std::size_t bins,
                              std::size_t r) {
  if (!attr.numeric) throw AttributeError(attr.name, "histogram needs a numeric attribute, " + attr.name + " is " +
                                                         std::string(attr.kind_name()));
  if (bins == 0) throw ValidationError("histogram needs at least one bin");
  check_release(ctx, r);
  Histogram h;
  h.release = r;
  std::vector<double> values;
  const IndexNode& n = ctx.tree.node(node);
  for (std::uint32_t leaf = n.leaf_begin; leaf < n.leaf_end; ++leaf) {
    const std::uint32_t row = ctx.tree.leaf_lot(leaf);
    if (!ctx.tree.leaf_member(leaf, r) || !ctx.pass.pass(row, r)) continue;
    const double v = ctx.catalog.number(attr, row, r);
    if (!is_invalid(v)) values.push_back(v);
  }
  if (values.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  h.counts.assign(bins, 0);
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  for (double v : values) {
    std::size_t b = width > 0 ? static_cast<std::size_t>((v - lo) / width) : 0;
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

}  // namespace chronicle
