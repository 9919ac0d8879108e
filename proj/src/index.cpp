#include "chronicle/index.hpp"

#include <algorithm>
#include <numeric>

namespace chronicle {

std::string_view to_string(Level level) noexcept {
  switch (level) {
    case Level::City: return "city";
    case Level::Borough: return "borough";
    case Level::Region: return "region";
    case Level::Block: return "block";
    case Level::Lot: return "lot";
  }
  return "?";
}

namespace {

template <typename Names>
std::vector<std::uint32_t> ranks(std::size_t n, Names&& name) {
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return name(a) < name(b); });
  std::vector<std::uint32_t> rank(n);
  for (std::uint32_t i = 0; i < n; ++i) rank[order[i]] = i;
  return rank;
}

struct Entry {
  std::uint32_t borough, region, block, lot;  // ranks, except lot = row
  std::uint32_t borough_index, region_index, block_index;
  std::uint32_t bits;                          // offset into the bit pool
};

}  // namespace

SpatioTemporalIndex SpatioTemporalIndex::build(const Store& store, TreeOptions options) {
  SpatioTemporalIndex index;
  index.store_ = &store;
  index.options_ = options;
  const std::size_t k = store.release_count();
  const std::size_t w = std::max<std::size_t>(1, (k + 63) / 64);
  index.words_ = w;
  const RegionLevel& level = store.level(options.regions);
  if (level.assignment.rows() != store.blocks.size() || level.assignment.cols() != k) {
    throw DataError("region assignment does not match the block catalog");
  }

  const auto borough_rank = ranks(store.boroughs.size(), [&](std::uint32_t i) -> const std::string& {
    return store.boroughs[i].name;
  });
  const auto region_rank = ranks(level.names.size(), [&](std::uint32_t i) -> const std::string& {
    return level.names[i];
  });
  const auto block_rank = ranks(store.blocks.size(), [&](std::uint32_t i) {
    return std::pair<std::string_view, std::string_view>(store.blocks.codes[i], store.blocks.keys[i]);
  });

  std::vector<Entry> entries;
  std::vector<std::uint64_t> bits;
  entries.reserve(store.lots.size());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> seen;  // region -> entry
  for (std::uint32_t row = 0; row < store.lots.size(); ++row) {
    const std::uint32_t block = store.blocks.lot_block[row];
    const auto borough = store.borough_index(store.lots[row].borough());
    seen.clear();
    for (std::size_t r = 0; r < k; ++r) {
      if (!store.lot_exists(row, r)) continue;
      if (!borough) throw DataError("lot " + store.lots[row].bbl() + " has no borough entry");
      const std::uint32_t region = level.assignment.get(block, r);
      if (region == kNone || region >= level.names.size()) {
        throw DataError("lot " + store.lots[row].bbl() + " in release " + store.timeline[r].to_string() +
                        " has no region assignment");
      }
      auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& p) { return p.first == region; });
      if (it == seen.end()) {
        const auto b = static_cast<std::uint32_t>(*borough);
        entries.push_back({borough_rank[b], region_rank[region], block_rank[block], row, b, region, block,
                           static_cast<std::uint32_t>(bits.size())});
        bits.resize(bits.size() + w, 0);
        seen.emplace_back(region, static_cast<std::uint32_t>(entries.size() - 1));
        it = seen.end() - 1;
      }
      bits[entries[it->second].bits + r / 64] |= std::uint64_t{1} << (r % 64);
    }
  }
  std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    if (a.borough != b.borough) return a.borough < b.borough;
    if (a.region != b.region) return a.region < b.region;
    if (!options.skip_blocks && a.block != b.block) return a.block < b.block;
    return a.lot < b.lot;
  });

  auto& nodes = index.nodes_;
  nodes.reserve(entries.size() + store.blocks.size() + 64);
  auto add = [&](Level lv, std::uint32_t entity, std::uint32_t parent) {
    IndexNode n;
    n.level = lv;
    n.entity = entity;
    n.parent = parent;
    n.leaf_begin = n.leaf_end = static_cast<std::uint32_t>(index.leaf_lots_.size());
    nodes.push_back(n);
    return static_cast<std::uint32_t>(nodes.size() - 1);
  };
  const std::uint32_t root = add(Level::City, 0, kNone);
  std::uint32_t cur_borough = kNone, cur_region = kNone, cur_block = kNone;
  const Entry* prev = nullptr;
  index.leaf_lots_.reserve(entries.size());
  index.leaf_bits_.reserve(entries.size() * w);
  for (const Entry& e : entries) {
    const bool new_borough = !prev || prev->borough != e.borough;
    const bool new_region = new_borough || prev->region != e.region;
    const bool new_block = new_region || prev->block != e.block;
    if (new_borough) cur_borough = add(Level::Borough, e.borough_index, root);
    if (new_region) cur_region = add(Level::Region, e.region_index, cur_borough);
    std::uint32_t parent = cur_region;
    if (!options.skip_blocks) {
      if (new_block) cur_block = add(Level::Block, e.block_index, cur_region);
      parent = cur_block;
    }
    const std::uint32_t lot = add(Level::Lot, e.lot, parent);
    nodes[lot].leaf_end = nodes[lot].leaf_begin + 1;
    index.leaf_lots_.push_back(e.lot);
    index.leaf_nodes_.push_back(lot);
    index.leaf_bits_.insert(index.leaf_bits_.end(), bits.begin() + e.bits, bits.begin() + e.bits + w);
    prev = &e;
  }

  index.node_bits_.assign(nodes.size() * w, 0);
  for (std::size_t leaf = 0; leaf < index.leaf_nodes_.size(); ++leaf) {
    std::copy_n(index.leaf_bits_.begin() + leaf * w, w, index.node_bits_.begin() + index.leaf_nodes_[leaf] * w);
  }
  std::vector<std::uint32_t> child_count(nodes.size() + 1, 0);
  for (std::size_t i = nodes.size(); i-- > 1;) {
    IndexNode& n = nodes[i];
    IndexNode& p = nodes[n.parent];
    p.leaf_end = std::max(p.leaf_end, n.leaf_end);
    for (std::size_t j = 0; j < w; ++j) index.node_bits_[n.parent * w + j] |= index.node_bits_[i * w + j];
    ++child_count[n.parent];
  }
  std::uint32_t offset = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].child_begin = nodes[i].child_end = offset;
    offset += child_count[i];
  }
  index.children_.resize(offset);
  for (std::uint32_t i = 1; i < nodes.size(); ++i) {
    IndexNode& p = nodes[nodes[i].parent];
    index.children_[p.child_end++] = i;
  }
  return index;
}

std::span<const std::uint32_t> SpatioTemporalIndex::children_of(std::uint32_t id) const {
  const IndexNode& n = nodes_.at(id);
  return {children_.data() + n.child_begin, n.child_end - n.child_begin};
}

std::string_view SpatioTemporalIndex::name(std::uint32_t id) const {
  const IndexNode& n = nodes_.at(id);
  switch (n.level) {
    case Level::City: return kCityName;
    case Level::Borough: return store_->boroughs[n.entity].name;
    case Level::Region: return store_->level(options_.regions).names[n.entity];
    case Level::Block: return store_->blocks.codes[n.entity];
    case Level::Lot: return store_->lots[n.entity].bbl();
  }
  return {};
}

std::optional<std::uint32_t> SpatioTemporalIndex::child(std::uint32_t id, std::string_view child_name) const {
  const auto kids = children_of(id);
  auto it = std::lower_bound(kids.begin(), kids.end(), child_name,
                             [&](std::uint32_t c, std::string_view s) { return name(c) < s; });
  if (it == kids.end() || name(*it) != child_name) return std::nullopt;
  return *it;
}

std::uint32_t SpatioTemporalIndex::resolve(std::span<const std::string> path) const {
  if (path.empty() || path.front() != kCityName) {
    throw NotFound(1, path.empty() ? std::string{} : path.front());
  }
  std::uint32_t cur = root();
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto next = child(cur, path[i]);
    if (!next) throw NotFound(i + 1, path[i]);
    cur = *next;
  }
  return cur;
}

std::vector<std::string> SpatioTemporalIndex::path_of(std::uint32_t id) const {
  std::vector<std::string> out;
  for (std::uint32_t cur = id; cur != kNone; cur = nodes_.at(cur).parent) out.emplace_back(name(cur));
  std::reverse(out.begin(), out.end());
  return out;
}

std::uint32_t SpatioTemporalIndex::geometry_ref(std::uint32_t id, std::size_t r) const {
  if (r >= store_->release_count() || !exists(id, r)) return kNone;
  const IndexNode& n = nodes_.at(id);
  switch (n.level) {
    case Level::City: return store_->city_shape;
    case Level::Borough: return store_->boroughs[n.entity].shape;
    case Level::Region: return store_->level(options_.regions).shapes[n.entity];
    case Level::Block: return store_->block_shapes.get(n.entity, r);
    case Level::Lot: return store_->geometry.lot_refs.get(n.entity, r);
  }
  return kNone;
}

std::optional<Polygon> SpatioTemporalIndex::node_geometry(std::uint32_t id, std::size_t r) const {
  const std::uint32_t ref = geometry_ref(id, r);
  if (ref == kNone) return std::nullopt;
  return store_->geometry.shapes.get(ref);
}

std::size_t SpatioTemporalIndex::resident_bytes() const noexcept {
  return sizeof(*this) + nodes_.capacity() * sizeof(IndexNode) +
         (children_.capacity() + leaf_lots_.capacity() + leaf_nodes_.capacity()) * sizeof(std::uint32_t) +
         (leaf_bits_.capacity() + node_bits_.capacity()) * sizeof(std::uint64_t);
}

const SpatioTemporalIndex& IndexSet::tree(TreeOptions options) const {
  const std::size_t slot = options.slot();
  std::call_once(once_[slot], [&] {
    trees_[slot] = std::make_unique<SpatioTemporalIndex>(SpatioTemporalIndex::build(*store_, options));
    built_[slot].store(true, std::memory_order_release);
  });
  return *trees_[slot];
}

void IndexSet::build_all() const {
  for (RegionKind kind : kAllRegionKinds) {
    tree({kind, false});
    tree({kind, true});
  }
}

std::size_t IndexSet::resident_bytes() const {
  std::size_t n = store_->resident_bytes();
  for (std::size_t slot = 0; slot < trees_.size(); ++slot) {
    if (built_[slot].load(std::memory_order_acquire)) n += trees_[slot]->resident_bytes();
  }
  return n;
}

}  // namespace chronicle
