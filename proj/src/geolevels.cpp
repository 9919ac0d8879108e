#include "chronicle/geolevels.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <thread>

namespace chronicle {

std::string_view to_string(RegionKind kind) noexcept {
  return kind == RegionKind::Neighborhood ? "neighborhood" : "community-district";
}

RegionKind parse_region_kind(std::string_view text) {
  if (text == "neighborhood" || text == "neighborhoods") return RegionKind::Neighborhood;
  if (text == "community-district" || text == "district" || text == "districts") {
    return RegionKind::CommunityDistrict;
  }
  throw ValidationError("unknown region kind '" + std::string(text) + "'");
}

RegionSet RegionSet::make(RegionKind kind, std::vector<geojson::NamedShape> shapes) {
  RegionSet set;
  set.kind = kind;
  std::set<std::string> seen;
  for (auto& s : shapes) {
    if (s.name.empty()) throw ValidationError("region without name");
    if (s.name == kUnassigned) throw ValidationError("region name " + s.name + " is reserved");
    if (!seen.insert(s.name).second) throw ValidationError("duplicate region name " + s.name);
    normalize(s.shape);
    if (auto reason = validate(s.shape)) throw ValidationError("region " + s.name + ": " + *reason);
    const BBox box = bbox(s.shape);
    set.regions.push_back({std::move(s.name), std::move(s.shape), box});
  }
  return set;
}

std::optional<std::size_t> RegionSet::locate(Point p) const {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].box.contains(p) && point_in_polygon(p, regions[i].boundary)) return i;
  }
  return std::nullopt;
}

RegionSet load_region_set(const std::filesystem::path& path, RegionKind kind) {
  return RegionSet::make(kind, geojson::read_named_collection(path));
}

namespace {

bool on_segment(Point p, Point a, Point b) noexcept {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  if (cross != 0.0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

template <typename Fn>
void for_each_ring(const Polygon& poly, Fn&& fn) {
  for (const auto& part : poly.parts) {
    fn(part.outer);
    for (const auto& hole : part.holes) fn(hole);
  }
}

double segment_distance_sq(Point p, Point a, Point b) noexcept {
  double x = a.x, y = a.y;
  double dx = b.x - x, dy = b.y - y;
  if (dx != 0 || dy != 0) {
    const double t = ((p.x - x) * dx + (p.y - y) * dy) / (dx * dx + dy * dy);
    if (t > 1) {
      x = b.x;
      y = b.y;
    } else if (t > 0) {
      x += dx * t;
      y += dy * t;
    }
  }
  dx = p.x - x;
  dy = p.y - y;
  return dx * dx + dy * dy;
}

/// Distance to the outline, positive inside.
double signed_distance(Point p, const Polygon& poly) {
  double best = std::numeric_limits<double>::infinity();
  for_each_ring(poly, [&](const Ring& ring) {
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
      best = std::min(best, segment_distance_sq(p, ring[i], ring[j]));
    }
  });
  const double d = std::sqrt(best);
  return point_in_polygon(p, poly) ? d : -d;
}

std::uint64_t mix(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

bool point_in_polygon(Point p, const Polygon& poly) noexcept {
  bool inside = false;
  bool boundary = false;
  for_each_ring(poly, [&](const Ring& ring) {
    if (boundary) return;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
      const Point a = ring[i], b = ring[j];
      if (on_segment(p, a, b)) {
        boundary = true;
        return;
      }
      if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
        inside = !inside;
      }
    }
  });
  return boundary || inside;
}

Point pole_of_inaccessibility(const Polygon& poly, double precision) {
  const BBox box = bbox(poly);
  const double w = box.max_x - box.min_x, h = box.max_y - box.min_y;
  const double cell = std::min(w, h);
  if (poly.parts.empty()) return {};
  if (!(cell > 0)) return poly.parts.front().outer.front();
  if (precision <= 0) precision = std::max(w, h) * 1e-3;

  struct Cell {
    Point c;
    double half, d, max;
  };
  auto make = [&](double x, double y, double half) {
    Cell c{{x, y}, half, signed_distance({x, y}, poly), 0};
    c.max = c.d + c.half * std::sqrt(2.0);
    return c;
  };
  auto cmp = [](const Cell& a, const Cell& b) { return a.max < b.max; };
  std::priority_queue<Cell, std::vector<Cell>, decltype(cmp)> queue(cmp);
  const double half = cell / 2;
  for (double x = box.min_x; x < box.max_x; x += cell) {
    for (double y = box.min_y; y < box.max_y; y += cell) queue.push(make(x + half, y + half, half));
  }
  const Point c = centroid(poly);
  Cell best = make(c.x, c.y, 0);
  const Cell center = make(box.min_x + w / 2, box.min_y + h / 2, 0);
  if (center.d > best.d) best = center;
  while (!queue.empty()) {
    const Cell top = queue.top();
    queue.pop();
    if (top.d > best.d) best = top;
    if (top.max - best.d <= precision) continue;
    const double q = top.half / 2;
    queue.push(make(top.c.x - q, top.c.y - q, q));
    queue.push(make(top.c.x + q, top.c.y - q, q));
    queue.push(make(top.c.x - q, top.c.y + q, q));
    queue.push(make(top.c.x + q, top.c.y + q, q));
  }
  return best.c;
}

Point representative_point(const Polygon& poly) {
  const Point c = centroid(poly);
  if (std::isfinite(c.x) && std::isfinite(c.y) && point_in_polygon(c, poly)) return c;
  return pole_of_inaccessibility(poly);
}

std::optional<std::size_t> BlockCatalog::find(std::string_view key) const {
  auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - keys.begin());
}

BlockCatalog catalog_blocks(std::span<const LotId> lots) {
  BlockCatalog cat;
  std::vector<std::uint32_t> order(lots.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return lots[a].block_key() < lots[b].block_key();
  });
  cat.lot_block.resize(lots.size());
  cat.lot_begin.push_back(0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const LotId& id = lots[order[i]];
    if (cat.keys.empty() || cat.keys.back() != id.block_key()) {
      if (!cat.keys.empty()) cat.lot_begin.push_back(static_cast<std::uint32_t>(i));
      cat.keys.emplace_back(id.block_key());
      cat.codes.emplace_back(id.block());
      cat.boroughs.push_back(id.borough());
    }
    cat.lot_block[order[i]] = static_cast<std::uint32_t>(cat.keys.size() - 1);
    cat.lot_rows.push_back(order[i]);
  }
  cat.lot_begin.push_back(static_cast<std::uint32_t>(order.size()));
  if (cat.keys.empty()) cat.lot_begin.assign(1, 0);
  return cat;
}

GeometryContainer block_footprints(const ReleaseSequence& seq, const BlockCatalog& catalog,
                                   const DedupOptions& options) {
  options.validate();
  const std::size_t k = seq.release_count();
  GeometryContainer gc;
  gc.lot_refs = RefTable(catalog.size(), k);
  std::vector<const Polygon*> members;
  for (std::size_t b = 0; b < catalog.size(); ++b) {
    Polygon representative;
    Polygon previous;
    std::uint32_t current = kNone;
    for (std::size_t r = 0; r < k; ++r) {
      members.clear();
      for (std::uint32_t row : catalog.lots_of(b)) {
        if (const RawRecord* rec = seq.record(row, r)) members.push_back(&rec->shape);
      }
      if (members.empty()) continue;
      Polygon hull = hull_of(members);
      if (hull.parts.empty()) continue;
      bool reuse = false;
      if (current != kNone) {
        const Polygon& against = options.chain == ChainMode::Representative ? representative : previous;
        reuse = geometry_equivalent(hull, against, options.epsilon, options.rule);
      }
      if (!reuse) {
        current = gc.shapes.append(hull);
        representative = hull;
      }
      gc.lot_refs.set(b, r, current);
      previous = std::move(hull);
    }
  }
  return gc;
}

LevelAssignment assign_blocks(const ReleaseSequence& seq, const BlockCatalog& catalog,
                              const RefTable& footprints, const RegionSet& regions,
                              std::uint64_t seed, unsigned threads) {
  const std::size_t k = seq.release_count();
  if (footprints.rows() != catalog.size() || footprints.cols() != k) {
    throw DataError("block footprint table does not match the block catalog");
  }
  LevelAssignment out;
  out.kind = regions.kind;
  for (const auto& region : regions.regions) out.names.push_back(region.name);
  out.names.emplace_back(kUnassigned);
  out.blocks = RefTable(catalog.size(), k);
  const std::uint32_t unassigned = out.unassigned_index();

  auto run = [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> present;
    for (std::size_t b = begin; b < end; ++b) {
      const std::uint64_t block_hash = mix(seed ^ fnv1a(catalog.keys[b]));
      for (std::size_t r = 0; r < k; ++r) {
        present.clear();
        for (std::uint32_t row : catalog.lots_of(b)) {
          if (seq.record(row, r)) present.push_back(row);
        }
        if (present.empty()) continue;
        if (r > 0 && footprints.get(b, r) != kNone && footprints.get(b, r) == footprints.get(b, r - 1) &&
            out.blocks.get(b, r - 1) != kNone) {
          out.blocks.set(b, r, out.blocks.get(b, r - 1));
          continue;
        }
        const std::uint32_t pick = present[mix(block_hash + r) % present.size()];
        const Point p = representative_point(seq.record(pick, r)->shape);
        const auto region = regions.locate(p);
        out.blocks.set(b, r, region ? static_cast<std::uint32_t>(*region) : unassigned);
      }
    }
  };
  const std::size_t n = catalog.size();
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, n / 256));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run, n * t / workers, n * (t + 1) / workers);
    run(0, n / workers);
  }
  for (std::uint32_t v : out.blocks.cells()) out.unassigned_slots += v == unassigned;
  return out;
}

}  // namespace chronicle
