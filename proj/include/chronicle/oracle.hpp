#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chronicle/filter.hpp"
#include "chronicle/index.hpp"
#include "chronicle/ingest.hpp"
#include "chronicle/query.hpp"
#include "chronicle/store.hpp"

namespace chronicle {

/// Reference implementation of the query semantics by full scan over the raw
/// release sequence. Only block-to-region assignments are taken from the
/// Store; values, derived attributes, filters and path membership are
/// computed here from the raw records.
class NaiveOracle {
 public:
  NaiveOracle(const ReleaseSequence& seq, const Store& store);

  Cell aggregate(const std::vector<std::string>& path, const std::string& attribute, AggregateFn fn, std::size_t r,
                 const FilterExpr* filter, TreeOptions tree) const;

  /// Children of `path` that have a lot in any release, sorted by name, each
  /// with one aggregate per release.
  std::vector<std::pair<std::string, std::vector<Cell>>> matrix_values(const std::vector<std::string>& path,
                                                                       const std::string& attribute, AggregateFn fn,
                                                                       const FilterExpr* filter, TreeOptions tree) const;

  /// Children of `path` with a lot passing the filter at release r.
  std::vector<std::string> visible_children(const std::vector<std::string>& path, std::size_t r,
                                            const FilterExpr* filter, TreeOptions tree) const;

  Histogram histogram(const std::vector<std::string>& path, const std::string& attribute, std::size_t bins,
                      std::size_t r, const FilterExpr* filter, TreeOptions tree) const;

  /// Lots existing at r that pass the filter.
  std::size_t lot_count(std::size_t r, const FilterExpr* filter) const;

  const ReleaseSequence& sequence() const noexcept { return *seq_; }

 private:
  struct Value {
    bool valid = false;
    bool numeric = false;
    double number = 0;
    std::string_view text;
  };
  Value value(const RawRecord& rec, const std::string& attribute) const;
  bool numeric_attribute(const std::string& attribute) const;
  bool passes(const RawRecord& rec, const FilterExpr& filter) const;
  /// Names from the city down to the lot for lot `row` at release r.
  std::vector<std::string_view> lot_path(std::size_t row, std::size_t r, TreeOptions tree) const;
  static bool has_prefix(const std::vector<std::string_view>& names, const std::vector<std::string>& path);

  const ReleaseSequence* seq_;
  const Store* store_;
  AttributeSchema schema_;
  std::vector<std::string> borough_names_;  // per lot row
  std::vector<std::size_t> block_of_;       // per lot row, index into store blocks
};

}  // namespace chronicle
