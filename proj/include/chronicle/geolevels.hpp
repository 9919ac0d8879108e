#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronicle/dedup.hpp"
#include "chronicle/geojson.hpp"
#include "chronicle/geometry.hpp"
#include "chronicle/ingest.hpp"

namespace chronicle {

enum class RegionKind : std::uint8_t { Neighborhood = 0, CommunityDistrict = 1 };
inline constexpr std::array<RegionKind, 2> kAllRegionKinds = {RegionKind::Neighborhood,
                                                              RegionKind::CommunityDistrict};

std::string_view to_string(RegionKind kind) noexcept;
/// Accepts "neighborhood" and "community-district" (also "district").
RegionKind parse_region_kind(std::string_view text);

/// Reserved name for blocks whose representative point lies in no region.
inline constexpr std::string_view kUnassigned = "(unassigned)";

struct Region {
  std::string name;
  Polygon boundary;
  BBox box;
};

struct RegionSet {
  RegionKind kind = RegionKind::Neighborhood;
  std::vector<Region> regions;

  /// Normalizes boundaries; throws ValidationError on duplicate, empty or
  /// reserved names and on invalid boundaries.
  static RegionSet make(RegionKind kind, std::vector<geojson::NamedShape> shapes);
  /// Index of the first region containing `p`.
  std::optional<std::size_t> locate(Point p) const;
};

RegionSet load_region_set(const std::filesystem::path& path, RegionKind kind);

/// Even-odd rule over every ring of every part; boundary points are inside.
bool point_in_polygon(Point p, const Polygon& poly) noexcept;

/// Point of the polygon farthest from its outline, to within `precision`
/// (polylabel grid refinement). precision <= 0 picks 1e-3 of the bbox extent.
Point pole_of_inaccessibility(const Polygon& poly, double precision = 0);

/// Centroid when it lies inside the polygon, pole of inaccessibility otherwise.
Point representative_point(const Polygon& poly);

/// Blocks derived from lot ids. Block keys (borough code + block code) are
/// sorted; lot rows refer to the sorted lot list they were built from.
struct BlockCatalog {
  std::vector<std::string> keys;
  std::vector<std::string> codes;
  std::vector<int> boroughs;
  std::vector<std::uint32_t> lot_block;  // lot row -> block
  std::vector<std::uint32_t> lot_begin;  // block -> offset into lot_rows, blocks + 1
  std::vector<std::uint32_t> lot_rows;

  std::size_t size() const noexcept { return keys.size(); }
  std::optional<std::size_t> find(std::string_view key) const;
  std::span<const std::uint32_t> lots_of(std::size_t block) const noexcept {
    return {lot_rows.data() + lot_begin[block], lot_begin[block + 1] - lot_begin[block]};
  }
};

BlockCatalog catalog_blocks(std::span<const LotId> lots);

/// Per-release block footprints: convex hull of the block's lots in that
/// release, deduplicated along each block's timeline like lot geometries.
GeometryContainer block_footprints(const ReleaseSequence& seq, const BlockCatalog& catalog,
                                   const DedupOptions& options = {});

struct LevelAssignment {
  RegionKind kind = RegionKind::Neighborhood;
  /// Region names in RegionSet order followed by kUnassigned.
  std::vector<std::string> names;
  /// Block x release -> name index; kNone where the block has no lot.
  RefTable blocks;
  /// Block-release slots that fell into no region.
  std::size_t unassigned_slots = 0;

  std::uint32_t unassigned_index() const noexcept { return static_cast<std::uint32_t>(names.size() - 1); }
};

/// Assigns every block with lots in a release to the first region containing
/// the representative point of one of its lots, chosen at random under
/// `seed`. A block whose footprint reference is unchanged from the previous
/// release keeps its previous assignment.
LevelAssignment assign_blocks(const ReleaseSequence& seq, const BlockCatalog& catalog,
                              const RefTable& footprints, const RegionSet& regions,
                              std::uint64_t seed, unsigned threads = 1);

}  // namespace chronicle
