#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chronicle/geometry.hpp"
#include "chronicle/ingest.hpp"
#include "chronicle/schema.hpp"

namespace chronicle {

/// Dense rows x releases table of container indices; kNone marks a slot
/// without a reference (lot or region absent in that release).
class RefTable {
 public:
  RefTable() = default;
  RefTable(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols, kNone) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::uint32_t get(std::size_t row, std::size_t col) const noexcept { return cells_[row * cols_ + col]; }
  void set(std::size_t row, std::size_t col, std::uint32_t v) noexcept { cells_[row * cols_ + col] = v; }
  std::span<const std::uint32_t> row(std::size_t r) const noexcept {
    return {cells_.data() + r * cols_, cols_};
  }
  const std::vector<std::uint32_t>& cells() const noexcept { return cells_; }
  std::vector<std::uint32_t>& cells() noexcept { return cells_; }
  void reshape(std::size_t rows, std::size_t cols) {
    rows_ = rows;
    cols_ = cols;
    cells_.resize(rows * cols, kNone);
  }
  std::size_t bytes() const noexcept { return cells_.capacity() * sizeof(std::uint32_t); }

  friend bool operator==(const RefTable&, const RefTable&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint32_t> cells_;
};

/// Append-only flat polygon storage addressed by shape index.
class ShapeStore {
 public:
  ShapeStore() { clear(); }

  std::uint32_t append(const Polygon& poly);
  Polygon get(std::uint32_t shape) const;
  std::size_t size() const noexcept { return shape_offsets_.size() - 1; }
  /// Serialized footprint of one shape (vertices plus offset entries).
  std::size_t entry_bytes(std::uint32_t shape) const noexcept;
  std::size_t bytes() const noexcept;
  void clear();
  /// Appends every shape of `other`; returns the index offset applied.
  std::uint32_t append_all(const ShapeStore& other);

  // Raw arrays, for snapshot IO.
  const std::vector<Point>& points() const noexcept { return points_; }
  const std::vector<std::uint32_t>& ring_offsets() const noexcept { return ring_offsets_; }
  const std::vector<std::uint32_t>& part_offsets() const noexcept { return part_offsets_; }
  const std::vector<std::uint32_t>& shape_offsets() const noexcept { return shape_offsets_; }
  /// Throws DataError when the offset tables are inconsistent.
  static ShapeStore from_arrays(std::vector<Point> points, std::vector<std::uint32_t> rings,
                                std::vector<std::uint32_t> parts, std::vector<std::uint32_t> shapes);

  friend bool operator==(const ShapeStore&, const ShapeStore&) = default;

 private:
  std::vector<Point> points_;
  std::vector<std::uint32_t> ring_offsets_;   // point offsets, rings + 1
  std::vector<std::uint32_t> part_offsets_;   // ring offsets, parts + 1; first ring = outer
  std::vector<std::uint32_t> shape_offsets_;  // part offsets, shapes + 1
};

struct GeometryContainer {
  ShapeStore shapes;
  /// Lot row x release -> shape index.
  RefTable lot_refs;
};

/// Interned categorical values; code 0 is the invalid (empty) value.
class StringDictionary {
 public:
  StringDictionary() { values_.emplace_back(); }
  std::uint32_t intern(std::string_view value);
  /// Code of an existing value, or kNone.
  std::uint32_t find(std::string_view value) const;
  const std::string& value(std::uint32_t code) const { return values_.at(code); }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<std::string>& values() const noexcept { return values_; }
  std::size_t bytes() const noexcept;
  static StringDictionary from_values(std::vector<std::string> values);

  friend bool operator==(const StringDictionary& a, const StringDictionary& b) {
    return a.values_ == b.values_;
  }

 private:
  std::vector<std::string> values_;
  std::unordered_map<std::string, std::uint32_t> codes_;
};

/// Tuples of one attribute kind. Numeric pools use `numbers` (NaN =
/// invalid), the categorical pool uses dictionary `codes`.
struct AttributePool {
  AttributeKind kind = AttributeKind::Categorical;
  std::size_t width = 0;
  std::vector<double> numbers;
  std::vector<std::uint32_t> codes;
  /// Lot row x release -> tuple index.
  RefTable refs;

  std::size_t size() const noexcept {
    if (width == 0) return 0;
    return (is_numeric(kind) ? numbers.size() : codes.size()) / width;
  }
  std::size_t entry_bytes() const noexcept {
    return width * (is_numeric(kind) ? sizeof(double) : sizeof(std::uint32_t));
  }
  double number(std::uint32_t entry, std::size_t column) const noexcept {
    return numbers[entry * width + column];
  }
  std::uint32_t code(std::uint32_t entry, std::size_t column) const noexcept {
    return codes[entry * width + column];
  }
  std::size_t bytes() const noexcept {
    return numbers.capacity() * sizeof(double) + codes.capacity() * sizeof(std::uint32_t) + refs.bytes();
  }
};

struct AttributeContainer {
  StringDictionary dictionary;
  std::array<AttributePool, 3> pools;

  const AttributePool& pool(AttributeKind kind) const noexcept {
    return pools[static_cast<std::size_t>(kind)];
  }
  AttributePool& pool(AttributeKind kind) noexcept { return pools[static_cast<std::size_t>(kind)]; }
};

/// Direction of the overlap test. AtLeast (ratio >= epsilon means "same")
/// is the default; AtMost treats ratio <= epsilon as "same".
enum class OverlapRule : std::uint8_t { AtLeast, AtMost };

/// What a new version is compared against: the stored representative of the
/// lot's current run, or the immediately preceding raw version.
enum class ChainMode : std::uint8_t { Representative, Predecessor };

struct DedupOptions {
  double epsilon = 0.9;
  OverlapRule rule = OverlapRule::AtLeast;
  ChainMode chain = ChainMode::Representative;
  unsigned threads = 1;

  void validate() const;
};

/// Area(a ∩ b) / max(Area(a), Area(b)); 0 when both areas are 0.
double overlap_ratio(const Polygon& a, const Polygon& b);

bool geometry_equivalent(const Polygon& a, const Polygon& b, double epsilon = 0.9,
                         OverlapRule rule = OverlapRule::AtLeast);

GeometryContainer dedup_geometries(const ReleaseSequence& seq, const DedupOptions& options = {});

AttributeContainer dedup_attributes(const ReleaseSequence& seq, const AttributeSchema& schema);

struct CategoryRedundancy {
  std::string category;
  double fraction = 1.0;
  std::size_t stored = 0;  // distinct entries referenced
  std::size_t first = 0;   // first-occurrence slots (one per lot)
  std::size_t slots = 0;   // reference slots
  std::uint64_t bytes_before = 0;
  std::uint64_t bytes_after = 0;
};

struct RedundancyReport {
  /// geometry, categorical, numerical-stable, numerical-unstable
  std::array<CategoryRedundancy, 4> categories;

  const CategoryRedundancy& geometry() const noexcept { return categories[0]; }
  const CategoryRedundancy& pool(AttributeKind kind) const noexcept {
    return categories[1 + static_cast<std::size_t>(kind)];
  }
  std::string table() const;
  std::string csv() const;
};

/// Redundant fraction = 1 - (stored - first) / (slots - first), clamped to
/// [0,1]; 1 when no lot continues across releases.
RedundancyReport redundancy_report(const GeometryContainer& gc, const AttributeContainer& ac);

}  // namespace chronicle
