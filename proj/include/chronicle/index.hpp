#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronicle/store.hpp"

namespace chronicle {

enum class Level : std::uint8_t { City, Borough, Region, Block, Lot };
std::string_view to_string(Level level) noexcept;

inline constexpr std::string_view kCityName = "NYC";

struct TreeOptions {
  RegionKind regions = RegionKind::Neighborhood;
  bool skip_blocks = false;

  std::size_t slot() const noexcept { return static_cast<std::size_t>(regions) * 2 + (skip_blocks ? 1 : 0); }
};

struct IndexNode {
  Level level = Level::City;
  /// Borough index, region name index, block index or lot row.
  std::uint32_t entity = 0;
  std::uint32_t parent = kNone;
  /// Range in SpatioTemporalIndex::children().
  std::uint32_t child_begin = 0, child_end = 0;
  /// Leaves of the subtree, contiguous because nodes are laid out depth first.
  std::uint32_t leaf_begin = 0, leaf_end = 0;
};

/// City -> borough -> region -> block -> lot tree over a Store. A lot whose
/// block moves between regions across releases has one leaf per region,
/// each carrying the releases it belongs there. Children are sorted by name.
class SpatioTemporalIndex {
 public:
  /// `store` must outlive the index. Throws DataError on inconsistent input.
  static SpatioTemporalIndex build(const Store& store, TreeOptions options);

  const Store& store() const noexcept { return *store_; }
  TreeOptions options() const noexcept { return options_; }
  std::uint32_t root() const noexcept { return 0; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const noexcept { return leaf_lots_.size(); }
  std::size_t words() const noexcept { return words_; }

  const IndexNode& node(std::uint32_t id) const { return nodes_.at(id); }
  std::span<const std::uint32_t> children_of(std::uint32_t id) const;
  std::string_view name(std::uint32_t id) const;
  std::optional<std::uint32_t> child(std::uint32_t id, std::string_view name) const;
  /// Node whose root path has these names; the first must be the city.
  /// Throws NotFound with the 1-based depth of the first unknown segment.
  std::uint32_t resolve(std::span<const std::string> path) const;
  std::vector<std::string> path_of(std::uint32_t id) const;

  /// Lot row of a leaf (leaf index, not node id).
  std::uint32_t leaf_lot(std::uint32_t leaf) const noexcept { return leaf_lots_[leaf]; }
  bool leaf_member(std::uint32_t leaf, std::size_t r) const noexcept {
    return (leaf_bits_[leaf * words_ + r / 64] >> (r % 64)) & 1u;
  }
  /// The node has at least one lot at release r.
  bool exists(std::uint32_t id, std::size_t r) const noexcept {
    return (node_bits_[id * words_ + r / 64] >> (r % 64)) & 1u;
  }
  /// Geometry container index for the node at release r, or kNone.
  std::uint32_t geometry_ref(std::uint32_t id, std::size_t r) const;
  std::optional<Polygon> node_geometry(std::uint32_t id, std::size_t r) const;

  std::size_t resident_bytes() const noexcept;

 private:
  const Store* store_ = nullptr;
  TreeOptions options_;
  std::size_t words_ = 1;
  std::vector<IndexNode> nodes_;
  std::vector<std::uint32_t> children_;
  std::vector<std::uint32_t> leaf_lots_;
  std::vector<std::uint32_t> leaf_nodes_;
  std::vector<std::uint64_t> leaf_bits_;
  std::vector<std::uint64_t> node_bits_;
};

/// The four trees (region kind x block skip) over one shared Store, each
/// built on first use.
class IndexSet {
 public:
  explicit IndexSet(std::shared_ptr<const Store> store) : store_(std::move(store)) {}

  const Store& store() const noexcept { return *store_; }
  const std::shared_ptr<const Store>& store_ptr() const noexcept { return store_; }
  const SpatioTemporalIndex& tree(TreeOptions options) const;
  /// Builds all four trees.
  void build_all() const;
  /// Store plus every tree built so far.
  std::size_t resident_bytes() const;

 private:
  std::shared_ptr<const Store> store_;
  mutable std::array<std::once_flag, 4> once_;
  mutable std::array<std::unique_ptr<SpatioTemporalIndex>, 4> trees_;
  mutable std::array<std::atomic<bool>, 4> built_{};
};

}  // namespace chronicle
