#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chronicle/geometry.hpp"
#include "chronicle/schema.hpp"
#include "chronicle/types.hpp"

namespace chronicle {

/// One lot in one release. Values are aligned to the schema: `numeric`
/// holds stable then unstable columns (NaN = invalid), `categorical` holds
/// categorical columns (empty = invalid).
struct RawRecord {
  LotId id;
  Polygon shape;
  std::vector<double> numeric;
  std::vector<std::string> categorical;

  double number(const AttributeSchema& schema, std::size_t attribute) const {
    return numeric[schema.numeric_offset(schema.slot(attribute))];
  }
  const std::string& text(const AttributeSchema& schema, std::size_t attribute) const {
    return categorical[schema.slot(attribute).column];
  }
};

/// Reject counts keyed by reason ("degenerate ring", "duplicate id", ...).
struct RejectionReport {
  std::map<std::string, std::size_t> counts;

  void add(const std::string& reason, std::size_t n = 1) { counts[reason] += n; }
  std::size_t total() const noexcept;
  void merge(const RejectionReport& other);
};

struct RawRelease {
  ReleaseId release;
  std::vector<RawRecord> records;
  /// Features dropped while parsing (unparseable feature or geometry).
  RejectionReport load_rejects;
};

/// Reads one newline-delimited GeoJSON release file. Property names go
/// through `renames` before matching the schema; unmatched properties are
/// ignored and schema attributes without a value are marked invalid.
RawRelease load_release(const std::filesystem::path& path, ReleaseId release,
                        const AttributeSchema& schema, const RenameTable& renames = {});

/// Parses `<year>.<half>.geojsonl`; nullopt for other names.
std::optional<ReleaseId> release_from_filename(const std::filesystem::path& path);
std::string release_filename(ReleaseId release);

/// Normalizes geometry and drops records that violate the polygon
/// invariants or repeat an earlier lot id. Total and idempotent.
std::pair<RawRelease, RejectionReport> clean_records(RawRelease raw);

/// All releases merged into one sequence with per-lot timelines.
class ReleaseSequence {
 public:
  const Timeline& timeline() const noexcept { return timeline_; }
  std::size_t release_count() const noexcept { return timeline_.size(); }
  const std::vector<RawRelease>& releases() const noexcept { return releases_; }

  /// Every lot id appearing in any release, sorted by BBL.
  const std::vector<LotId>& lots() const noexcept { return lots_; }
  std::optional<std::size_t> lot_row(std::string_view bbl) const;

  /// Record of lot `row` in release `r`, or nullptr when the lot does not
  /// exist in that release.
  const RawRecord* record(std::size_t row, std::size_t r) const noexcept {
    const std::uint32_t i = slots_[row * timeline_.size() + r];
    return i == kNone ? nullptr : &releases_[r].records[i];
  }
  const RawRecord* find(std::string_view bbl, ReleaseId release) const;

  std::size_t record_count() const noexcept;

 private:
  friend ReleaseSequence consolidate(std::vector<RawRelease> releases);

  Timeline timeline_;
  std::vector<RawRelease> releases_;
  std::vector<LotId> lots_;
  std::vector<std::uint32_t> slots_;  // lot row x release -> record index
};

/// Requires strictly increasing releases; throws DataError otherwise or when
/// a release still contains a duplicate lot id.
ReleaseSequence consolidate(std::vector<RawRelease> releases);

/// Loads and cleans every `<year>.<half>.geojsonl` in `dir`. Throws LoadError
/// when the directory has no release files.
struct LoadedCorpus {
  ReleaseSequence sequence;
  std::vector<std::pair<ReleaseId, RejectionReport>> rejects;
};
LoadedCorpus load_directory(const std::filesystem::path& dir, const AttributeSchema& schema,
                            const RenameTable& renames, unsigned threads = 1);

}  // namespace chronicle
