#include "chronicle/store.hpp"

#include <algorithm>
#include <map>

namespace chronicle {

std::optional<std::size_t> Store::borough_index(int code) const noexcept {
  auto it = std::lower_bound(boroughs.begin(), boroughs.end(), code,
                             [](const Borough& b, int c) { return b.code < c; });
  if (it == boroughs.end() || it->code != code) return std::nullopt;
  return static_cast<std::size_t>(it - boroughs.begin());
}

std::size_t Store::lots_in_release(std::size_t r) const noexcept {
  std::size_t n = 0;
  for (std::size_t row = 0; row < lots.size(); ++row) n += lot_exists(row, r);
  return n;
}

namespace {

template <typename T>
std::size_t vec_bytes(const std::vector<T>& v) {
  return v.capacity() * sizeof(T);
}

std::size_t strings_bytes(const std::vector<std::string>& v) {
  std::size_t n = vec_bytes(v);
  for (const auto& s : v) n += s.capacity() > 15 ? s.capacity() + 1 : 0;
  return n;
}

}  // namespace

std::size_t Store::resident_bytes() const noexcept {
  std::size_t n = geometry.shapes.bytes() + geometry.lot_refs.bytes();
  for (const auto& pool : attributes.pools) n += pool.bytes();
  n += attributes.dictionary.bytes();
  n += vec_bytes(lots);
  for (const auto& id : lots) n += id.bbl().capacity() > 15 ? id.bbl().capacity() + 1 : 0;
  n += strings_bytes(blocks.keys) + strings_bytes(blocks.codes) + vec_bytes(blocks.boroughs) +
       vec_bytes(blocks.lot_block) + vec_bytes(blocks.lot_begin) + vec_bytes(blocks.lot_rows);
  n += block_shapes.bytes();
  n += vec_bytes(boroughs);
  for (const auto& level : levels) {
    n += strings_bytes(level.names) + vec_bytes(level.shapes) + level.assignment.bytes();
  }
  n += vec_bytes(timeline);
  return n;
}

Store preprocess(const ReleaseSequence& seq, const AttributeSchema& schema, const PreprocessOptions& options) {
  options.dedup.validate();
  Store store;
  store.timeline = seq.timeline();
  store.schema = schema;
  store.dedup = options.dedup;
  store.seed = options.seed;
  store.lots = seq.lots();
  store.geometry = dedup_geometries(seq, options.dedup);
  store.attributes = dedup_attributes(seq, schema);
  store.blocks = catalog_blocks(store.lots);

  GeometryContainer footprints = block_footprints(seq, store.blocks, options.dedup);
  const std::uint32_t fp_offset = store.geometry.shapes.append_all(footprints.shapes);
  store.block_shapes = footprints.lot_refs;
  for (auto& v : store.block_shapes.cells()) {
    if (v != kNone) v += fp_offset;
  }

  for (RegionKind kind : kAllRegionKinds) {
    const auto& shapes = kind == RegionKind::Neighborhood ? options.neighborhoods : options.districts;
    RegionSet set = RegionSet::make(kind, shapes);
    LevelAssignment assignment =
        assign_blocks(seq, store.blocks, footprints.lot_refs, set, options.seed, options.dedup.threads);
    RegionLevel& level = store.levels[static_cast<std::size_t>(kind)];
    level.kind = kind;
    level.names = std::move(assignment.names);
    level.assignment = std::move(assignment.blocks);
    level.unassigned_slots = assignment.unassigned_slots;
    for (const auto& region : set.regions) level.shapes.push_back(store.geometry.shapes.append(region.boundary));
    level.shapes.push_back(kNone);
  }

  std::map<std::string, const Polygon*> given;
  for (const auto& b : options.boroughs) given.emplace(b.name, &b.shape);
  std::map<int, std::vector<std::uint32_t>> borough_blocks;
  for (std::size_t b = 0; b < store.blocks.size(); ++b) {
    borough_blocks[store.blocks.boroughs[b]].push_back(static_cast<std::uint32_t>(b));
  }
  std::vector<Polygon> borough_polys;
  for (const auto& [code, blocks] : borough_blocks) {
    Borough borough{code, borough_name(code), kNone};
    Polygon shape;
    if (auto it = given.find(borough.name); it != given.end()) {
      shape = *it->second;
      normalize(shape);
    } else {
      std::vector<Polygon> hulls;
      for (std::uint32_t b : blocks) {
        std::uint32_t last = kNone;
        for (std::uint32_t v : store.block_shapes.row(b)) {
          if (v != kNone && v != last) hulls.push_back(store.geometry.shapes.get(v));
          last = v;
        }
      }
      std::vector<const Polygon*> ptrs;
      for (const auto& h : hulls) ptrs.push_back(&h);
      shape = hull_of(ptrs);
    }
    if (!shape.parts.empty()) borough.shape = store.geometry.shapes.append(shape);
    borough_polys.push_back(std::move(shape));
    store.boroughs.push_back(std::move(borough));
  }
  std::vector<const Polygon*> ptrs;
  for (const auto& p : borough_polys) {
    if (!p.parts.empty()) ptrs.push_back(&p);
  }
  Polygon city = hull_of(ptrs);
  if (!city.parts.empty()) store.city_shape = store.geometry.shapes.append(city);
  return store;
}

}  // namespace chronicle
