#include "chronicle/dedup.hpp"

#include <algorithm>
#include <cstring>
#include <iomanip>
#include <sstream>
#include <thread>

namespace chronicle {

// ---- ShapeStore ------------------------------------------------------------

void ShapeStore::clear() {
  points_.clear();
  ring_offsets_.assign(1, 0);
  part_offsets_.assign(1, 0);
  shape_offsets_.assign(1, 0);
}

std::uint32_t ShapeStore::append(const Polygon& poly) {
  auto push_ring = [&](const Ring& ring) {
    points_.insert(points_.end(), ring.begin(), ring.end());
    ring_offsets_.push_back(static_cast<std::uint32_t>(points_.size()));
  };
  for (const auto& part : poly.parts) {
    push_ring(part.outer);
    for (const auto& hole : part.holes) push_ring(hole);
    part_offsets_.push_back(static_cast<std::uint32_t>(ring_offsets_.size() - 1));
  }
  shape_offsets_.push_back(static_cast<std::uint32_t>(part_offsets_.size() - 1));
  return static_cast<std::uint32_t>(size() - 1);
}

Polygon ShapeStore::get(std::uint32_t shape) const {
  Polygon poly;
  const std::uint32_t p0 = shape_offsets_.at(shape), p1 = shape_offsets_.at(shape + 1);
  poly.parts.resize(p1 - p0);
  for (std::uint32_t p = p0; p < p1; ++p) {
    auto& part = poly.parts[p - p0];
    for (std::uint32_t r = part_offsets_[p]; r < part_offsets_[p + 1]; ++r) {
      Ring ring(points_.begin() + ring_offsets_[r], points_.begin() + ring_offsets_[r + 1]);
      if (r == part_offsets_[p]) {
        part.outer = std::move(ring);
      } else {
        part.holes.push_back(std::move(ring));
      }
    }
  }
  return poly;
}

std::size_t ShapeStore::entry_bytes(std::uint32_t shape) const noexcept {
  const std::uint32_t p0 = shape_offsets_[shape], p1 = shape_offsets_[shape + 1];
  const std::uint32_t r0 = part_offsets_[p0], r1 = part_offsets_[p1];
  const std::uint32_t v = ring_offsets_[r1] - ring_offsets_[r0];
  return v * sizeof(Point) + (r1 - r0 + p1 - p0 + 1) * sizeof(std::uint32_t);
}

std::size_t ShapeStore::bytes() const noexcept {
  return points_.capacity() * sizeof(Point) +
         (ring_offsets_.capacity() + part_offsets_.capacity() + shape_offsets_.capacity()) *
             sizeof(std::uint32_t);
}

std::uint32_t ShapeStore::append_all(const ShapeStore& other) {
  const auto base_shape = static_cast<std::uint32_t>(size());
  const auto base_point = static_cast<std::uint32_t>(points_.size());
  const auto base_ring = static_cast<std::uint32_t>(ring_offsets_.size() - 1);
  const auto base_part = static_cast<std::uint32_t>(part_offsets_.size() - 1);
  points_.insert(points_.end(), other.points_.begin(), other.points_.end());
  for (std::size_t i = 1; i < other.ring_offsets_.size(); ++i) ring_offsets_.push_back(other.ring_offsets_[i] + base_point);
  for (std::size_t i = 1; i < other.part_offsets_.size(); ++i) part_offsets_.push_back(other.part_offsets_[i] + base_ring);
  for (std::size_t i = 1; i < other.shape_offsets_.size(); ++i) shape_offsets_.push_back(other.shape_offsets_[i] + base_part);
  return base_shape;
}

ShapeStore ShapeStore::from_arrays(std::vector<Point> points, std::vector<std::uint32_t> rings,
                                   std::vector<std::uint32_t> parts, std::vector<std::uint32_t> shapes) {
  auto monotone = [](const std::vector<std::uint32_t>& v, std::size_t limit) {
    if (v.empty() || v.front() != 0 || v.back() != limit) return false;
    return std::is_sorted(v.begin(), v.end());
  };
  if (!monotone(rings, points.size()) || !monotone(parts, rings.size() - 1) ||
      !monotone(shapes, parts.size() - 1)) {
    throw DataError("inconsistent shape offset tables");
  }
  for (std::size_t p = 0; p + 1 < parts.size(); ++p) {
    if (parts[p] == parts[p + 1]) throw DataError("polygon part without rings");
  }
  ShapeStore s;
  s.points_ = std::move(points);
  s.ring_offsets_ = std::move(rings);
  s.part_offsets_ = std::move(parts);
  s.shape_offsets_ = std::move(shapes);
  return s;
}

// ---- StringDictionary ------------------------------------------------------

std::uint32_t StringDictionary::intern(std::string_view value) {
  if (value.empty()) return 0;
  auto it = codes_.find(std::string(value));
  if (it != codes_.end()) return it->second;
  const auto code = static_cast<std::uint32_t>(values_.size());
  values_.emplace_back(value);
  codes_.emplace(values_.back(), code);
  return code;
}

std::uint32_t StringDictionary::find(std::string_view value) const {
  if (value.empty()) return 0;
  auto it = codes_.find(std::string(value));
  return it == codes_.end() ? kNone : it->second;
}

std::size_t StringDictionary::bytes() const noexcept {
  std::size_t n = values_.capacity() * sizeof(std::string);
  for (const auto& v : values_) n += v.capacity() > 15 ? v.capacity() + 1 : 0;
  // Hash index: one node (key + code + next pointer + hash) per value plus buckets.
  n += codes_.size() * (sizeof(std::string) + 2 * sizeof(void*) + sizeof(std::uint32_t)) +
       codes_.bucket_count() * sizeof(void*);
  return n;
}

StringDictionary StringDictionary::from_values(std::vector<std::string> values) {
  if (values.empty() || !values.front().empty()) throw DataError("dictionary must start with the invalid value");
  StringDictionary d;
  d.values_ = std::move(values);
  for (std::uint32_t i = 1; i < d.values_.size(); ++i) {
    if (!d.codes_.emplace(d.values_[i], i).second) throw DataError("duplicate dictionary value");
  }
  return d;
}

// ---- equivalence -----------------------------------------------------------

void DedupOptions::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0,1]");
}

double overlap_ratio(const Polygon& a, const Polygon& b) {
  const double area_a = area(a);
  const double area_b = area(b);
  const double denom = std::max(area_a, area_b);
  if (!(denom > 0.0)) return 0.0;
  if (a == b) return 1.0;
  return std::min(1.0, intersection_area(a, b) / denom);
}

bool geometry_equivalent(const Polygon& a, const Polygon& b, double epsilon, OverlapRule rule) {
  const double ratio = overlap_ratio(a, b);
  return rule == OverlapRule::AtLeast ? ratio >= epsilon : ratio <= epsilon;
}

namespace {

struct GeometryChunk {
  ShapeStore shapes;
  std::vector<std::uint32_t> refs;  // (row - begin) x releases, local shape indices
};

GeometryChunk dedup_rows(const ReleaseSequence& seq, const DedupOptions& options,
                         std::size_t begin, std::size_t end) {
  const std::size_t k = seq.release_count();
  GeometryChunk chunk;
  chunk.refs.assign((end - begin) * k, kNone);
  for (std::size_t row = begin; row < end; ++row) {
    const Polygon* previous = nullptr;  // raw predecessor
    Polygon representative;
    std::uint32_t current = kNone;
    for (std::size_t r = 0; r < k; ++r) {
      const RawRecord* rec = seq.record(row, r);
      if (!rec) continue;
      bool reuse = false;
      if (current != kNone) {
        const Polygon& against =
            options.chain == ChainMode::Representative ? representative : *previous;
        reuse = geometry_equivalent(rec->shape, against, options.epsilon, options.rule);
      }
      if (!reuse) {
        current = chunk.shapes.append(rec->shape);
        representative = rec->shape;
      }
      chunk.refs[(row - begin) * k + r] = current;
      previous = &rec->shape;
    }
  }
  return chunk;
}

bool same_bits(double a, double b) noexcept { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

GeometryContainer dedup_geometries(const ReleaseSequence& seq, const DedupOptions& options) {
  options.validate();
  const std::size_t rows = seq.lots().size();
  const std::size_t k = seq.release_count();
  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(1, rows / 1024));
  std::vector<GeometryChunk> chunks(threads);
  std::vector<std::size_t> bounds(threads + 1);
  for (std::size_t t = 0; t <= threads; ++t) bounds[t] = rows * t / threads;
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) {
      pool.emplace_back([&, t] { chunks[t] = dedup_rows(seq, options, bounds[t], bounds[t + 1]); });
    }
    chunks[0] = dedup_rows(seq, options, bounds[0], bounds[1]);
  }
  GeometryContainer gc;
  gc.lot_refs = RefTable(rows, k);
  auto& cells = gc.lot_refs.cells();
  for (std::size_t t = 0; t < threads; ++t) {
    const std::uint32_t offset = gc.shapes.append_all(chunks[t].shapes);
    const auto& local = chunks[t].refs;
    for (std::size_t i = 0; i < local.size(); ++i) {
      cells[bounds[t] * k + i] = local[i] == kNone ? kNone : local[i] + offset;
    }
  }
  return gc;
}

AttributeContainer dedup_attributes(const ReleaseSequence& seq, const AttributeSchema& schema) {
  const std::size_t rows = seq.lots().size();
  const std::size_t k = seq.release_count();
  AttributeContainer ac;
  for (AttributeKind kind : kAllKinds) {
    auto& pool = ac.pool(kind);
    pool.kind = kind;
    pool.width = schema.width(kind);
    pool.refs = RefTable(rows, k);
  }
  const std::size_t stable_w = schema.width(AttributeKind::NumericalStable);
  const std::size_t unstable_w = schema.width(AttributeKind::NumericalUnstable);
  const std::size_t cat_w = schema.width(AttributeKind::Categorical);
  auto& cat = ac.pool(AttributeKind::Categorical);
  auto& stable = ac.pool(AttributeKind::NumericalStable);
  auto& unstable = ac.pool(AttributeKind::NumericalUnstable);

  std::vector<std::uint32_t> codes(cat_w);
  for (std::size_t row = 0; row < rows; ++row) {
    std::uint32_t cur_cat = kNone, cur_stable = kNone, cur_unstable = kNone;
    for (std::size_t r = 0; r < k; ++r) {
      const RawRecord* rec = seq.record(row, r);
      if (!rec) continue;
      for (std::size_t c = 0; c < cat_w; ++c) codes[c] = ac.dictionary.intern(rec->categorical[c]);
      if (cur_cat == kNone || !std::equal(codes.begin(), codes.end(), cat.codes.begin() + cur_cat * cat_w)) {
        cur_cat = static_cast<std::uint32_t>(cat.size());
        cat.codes.insert(cat.codes.end(), codes.begin(), codes.end());
      }
      cat.refs.set(row, r, cur_cat);

      auto numeric_step = [&](AttributePool& pool, std::uint32_t& cur, std::size_t offset, std::size_t width) {
        const double* values = rec->numeric.data() + offset;
        bool same = cur != kNone;
        for (std::size_t c = 0; same && c < width; ++c) same = same_bits(values[c], pool.numbers[cur * width + c]);
        if (!same) {
          cur = static_cast<std::uint32_t>(pool.size());
          pool.numbers.insert(pool.numbers.end(), values, values + width);
        }
        pool.refs.set(row, r, cur);
      };
      if (stable_w > 0) numeric_step(stable, cur_stable, 0, stable_w);
      if (unstable_w > 0) numeric_step(unstable, cur_unstable, stable_w, unstable_w);
    }
  }
  return ac;
}

// ---- redundancy report -------------------------------------------------------

namespace {

template <typename EntryBytes>
CategoryRedundancy measure(std::string name, const RefTable& refs, std::size_t entries,
                           EntryBytes entry_bytes) {
  CategoryRedundancy c;
  c.category = std::move(name);
  std::vector<bool> used(entries, false);
  for (std::size_t row = 0; row < refs.rows(); ++row) {
    bool any = false;
    for (std::uint32_t v : refs.row(row)) {
      if (v == kNone) continue;
      any = true;
      ++c.slots;
      c.bytes_before += entry_bytes(v);
      if (!used[v]) {
        used[v] = true;
        ++c.stored;
        c.bytes_after += entry_bytes(v);
      }
    }
    if (any) ++c.first;
  }
  c.bytes_after += c.slots * sizeof(std::uint32_t);
  const double denom = static_cast<double>(c.slots - c.first);
  c.fraction = denom > 0 ? std::clamp(1.0 - static_cast<double>(c.stored - c.first) / denom, 0.0, 1.0) : 1.0;
  return c;
}

}  // namespace

RedundancyReport redundancy_report(const GeometryContainer& gc, const AttributeContainer& ac) {
  RedundancyReport report;
  report.categories[0] = measure("geometry", gc.lot_refs, gc.shapes.size(),
                                 [&](std::uint32_t v) { return gc.shapes.entry_bytes(v); });
  for (AttributeKind kind : kAllKinds) {
    const auto& pool = ac.pool(kind);
    report.categories[1 + static_cast<std::size_t>(kind)] =
        measure(std::string(to_string(kind)), pool.refs, pool.size(),
                [&](std::uint32_t) { return pool.entry_bytes(); });
  }
  return report;
}

std::string RedundancyReport::table() const {
  std::ostringstream out;
  out << std::left << std::setw(20) << "category" << std::right << std::setw(12) << "redundant%"
      << std::setw(12) << "stored" << std::setw(12) << "slots" << std::setw(16) << "bytes_before"
      << std::setw(16) << "bytes_after" << '\n';
  for (const auto& c : categories) {
    out << std::left << std::setw(20) << c.category << std::right << std::setw(12) << std::fixed
        << std::setprecision(1) << 100.0 * c.fraction << std::setw(12) << c.stored << std::setw(12)
        << c.slots << std::setw(16) << c.bytes_before << std::setw(16) << c.bytes_after << '\n';
  }
  return out.str();
}

std::string RedundancyReport::csv() const {
  std::ostringstream out;
  out << "category,redundant_fraction,stored,first,slots,bytes_before,bytes_after\n";
  out << std::setprecision(6);
  for (const auto& c : categories) {
    out << c.category << ',' << c.fraction << ',' << c.stored << ',' << c.first << ',' << c.slots
        << ',' << c.bytes_before << ',' << c.bytes_after << '\n';
  }
  return out.str();
}

}  // namespace chronicle
