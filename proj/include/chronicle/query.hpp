#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chronicle/attributes.hpp"
#include "chronicle/filter.hpp"
#include "chronicle/index.hpp"

namespace chronicle {

enum class AggregateFn : std::uint8_t { Sum, Count, Min, Max, Avg };
std::string_view to_string(AggregateFn fn) noexcept;
AggregateFn parse_aggregate_fn(std::string_view text);

enum class MatrixMode : std::uint8_t { Value, Delta };
std::string_view to_string(MatrixMode mode) noexcept;
MatrixMode parse_matrix_mode(std::string_view text);
inline MatrixMode complement(MatrixMode mode) noexcept {
  return mode == MatrixMode::Value ? MatrixMode::Delta : MatrixMode::Value;
}

enum class DeltaKind : std::uint8_t { Relative, Absolute };
std::string_view to_string(DeltaKind kind) noexcept;
DeltaKind parse_delta_kind(std::string_view text);

using Cell = std::optional<double>;

/// Everything a query reads: one tree, the catalog and the filter mask.
struct QueryContext {
  const SpatioTemporalIndex& tree;
  const AttributeCatalog& catalog;
  const PassMask& pass;
};

/// Running distributive parts; avg is composed as sum / count.
struct Accumulator {
  double sum = 0;
  std::size_t count = 0;
  double min = 0, max = 0;

  void add(double v) noexcept {
    if (count == 0 || v < min) min = v;
    if (count == 0 || v > max) max = v;
    sum += v;
    ++count;
  }
  /// Null when nothing contributed.
  Cell result(AggregateFn fn) const noexcept;
};

/// Throws AttributeError when `fn` needs a numeric attribute and `attr` is not.
void check_aggregate(const AttributeRef& attr, AggregateFn fn);

/// The node has a lot at release r that passes the filter.
bool visible(const QueryContext& ctx, std::uint32_t node, std::size_t r);

struct NamedGeometry {
  std::string name;
  Polygon shape;
};

/// Shapes of the node's children visible at release r. `simplify` > 0 applies
/// Douglas-Peucker with that tolerance.
std::vector<NamedGeometry> retrieve_geometries(const QueryContext& ctx, std::uint32_t node, std::size_t r,
                                               double simplify = 0);

Cell aggregate(const QueryContext& ctx, std::uint32_t node, const AttributeRef& attr, AggregateFn fn,
               std::size_t r);
/// One aggregate per release.
std::vector<Cell> aggregate_releases(const QueryContext& ctx, std::uint32_t node, const AttributeRef& attr,
                                     AggregateFn fn);

struct MatrixOptions {
  MatrixMode mode = MatrixMode::Value;
  DeltaKind delta = DeltaKind::Relative;
  /// Delta against this release index instead of the previous release.
  std::optional<std::size_t> base;
  /// Sort rows by this release column (descending, nulls last); by name otherwise.
  std::optional<std::size_t> sort_release;
};

struct MatrixSlice {
  std::vector<std::string> rows;
  Timeline columns;
  /// rows x columns, row-major.
  std::vector<Cell> cells;
  MatrixOptions options;

  const Cell& at(std::size_t row, std::size_t col) const { return cells.at(row * columns.size() + col); }
};

/// Applies the delta rule to a value series. Relative: (v - prev) / |prev|,
/// null when either side is null or prev is 0. Absolute: v - prev. The
/// first column, and with a base every column up to the base, is null.
std::vector<Cell> apply_delta(const std::vector<Cell>& values, DeltaKind kind, std::optional<std::size_t> base);

MatrixSlice aggregate_matrix(const QueryContext& ctx, std::uint32_t node, const AttributeRef& attr, AggregateFn fn,
                             const MatrixOptions& options);

struct SeriesSlice {
  std::string name;
  MatrixMode mode = MatrixMode::Value;
  std::vector<Cell> values;
};

/// Series for the selected children of `node`, in the mode complementary to
/// `matrix.mode`. Unknown child names throw NotFound.
std::vector<SeriesSlice> series(const QueryContext& ctx, std::uint32_t node, const std::vector<std::string>& selected,
                                const AttributeRef& attr, AggregateFn fn, const MatrixOptions& matrix);

struct Histogram {
  std::size_t release = 0;
  /// bins + 1 edges; empty when no lot has a valid value.
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max] of the valid values under `node` at
/// release r; the maximum falls in the last bin.
Histogram attribute_histogram(const QueryContext& ctx, std::uint32_t node, const AttributeRef& attr,
                              std::size_t bins, std::size_t r);

}  // namespace chronicle
