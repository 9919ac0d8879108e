#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chronicle/dedup.hpp"
#include "chronicle/geolevels.hpp"
#include "chronicle/ingest.hpp"
#include "chronicle/schema.hpp"

namespace chronicle {

/// Region level of one kind, frozen for querying.
struct RegionLevel {
  RegionKind kind = RegionKind::Neighborhood;
  /// Region names followed by kUnassigned.
  std::vector<std::string> names;
  /// Name index -> static boundary shape; kNone for kUnassigned.
  std::vector<std::uint32_t> shapes;
  /// Block x release -> name index; kNone where the block has no lot.
  RefTable assignment;
  std::size_t unassigned_slots = 0;
};

struct Borough {
  int code = 0;
  std::string name;
  std::uint32_t shape = kNone;
};

/// Preprocessed dataset: deduplicated containers plus everything the index
/// needs. This is what the snapshot file holds.
struct Store {
  Timeline timeline;
  AttributeSchema schema;
  DedupOptions dedup;
  std::uint64_t seed = 0;

  /// Sorted by BBL; lot row = position.
  std::vector<LotId> lots;
  /// Every shape (lots, then block footprints, then boundaries); lot_refs
  /// covers lots only.
  GeometryContainer geometry;
  AttributeContainer attributes;
  /// Derived from `lots`.
  BlockCatalog blocks;
  /// Block x release -> footprint shape.
  RefTable block_shapes;
  /// Sorted by code.
  std::vector<Borough> boroughs;
  std::uint32_t city_shape = kNone;
  std::array<RegionLevel, 2> levels;

  std::size_t release_count() const noexcept { return timeline.size(); }
  const RegionLevel& level(RegionKind kind) const noexcept { return levels[static_cast<std::size_t>(kind)]; }
  std::optional<std::size_t> borough_index(int code) const noexcept;
  bool lot_exists(std::size_t row, std::size_t r) const noexcept {
    return geometry.lot_refs.get(row, r) != kNone;
  }
  std::size_t lots_in_release(std::size_t r) const noexcept;
  RedundancyReport redundancy() const { return redundancy_report(geometry, attributes); }
  /// Heap bytes held by the containers and lookup tables.
  std::size_t resident_bytes() const noexcept;
};

struct PreprocessOptions {
  DedupOptions dedup;
  std::uint64_t seed = 1;
  std::vector<geojson::NamedShape> neighborhoods;
  std::vector<geojson::NamedShape> districts;
  /// Matched to lots by borough display name; missing boroughs fall back
  /// to the hull of their block footprints.
  std::vector<geojson::NamedShape> boroughs;
};

Store preprocess(const ReleaseSequence& seq, const AttributeSchema& schema, const PreprocessOptions& options);

}  // namespace chronicle
