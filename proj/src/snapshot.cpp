#include "chronicle/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <type_traits>
#include <vector>

#include "json.hpp"

namespace chronicle {

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes a little-endian host");

namespace {

enum Section : std::uint32_t {
  kMeta = 1,
  kLots = 2,
  kShapes = 3,
  kLotRefs = 4,
  kDictionary = 5,
  kPools = 6,
  kBlockRefs = 7,
  kBoroughs = 8,
  kLevels = 9,
};

constexpr std::size_t kEntrySize = 24;  // id, reserved, offset, size

class Writer {
 public:
  template <typename T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.append(p, sizeof(T));
  }
  void str(std::string_view s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
  }
  template <typename T>
  void array(const std::vector<T>& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    put<std::uint64_t>(v.size());
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
  }
  void refs(const RefTable& t) {
    put<std::uint64_t>(t.rows());
    put<std::uint64_t>(t.cols());
    array(t.cells());
  }
  void strings(const std::vector<std::string>& v) {
    put<std::uint64_t>(v.size());
    for (const auto& s : v) str(s);
  }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  template <typename T>
  std::vector<T> array() {
    const auto n = get<std::uint64_t>();
    if (n > (data_.size() - pos_) / sizeof(T)) throw DataError("snapshot array exceeds its section");
    std::vector<T> v(n);
    std::memcpy(v.data(), data_.data() + pos_, n * sizeof(T));
    pos_ += n * sizeof(T);
    return v;
  }
  RefTable refs() {
    const auto rows = get<std::uint64_t>();
    const auto cols = get<std::uint64_t>();
    auto cells = array<std::uint32_t>();
    if (rows * cols != cells.size()) throw DataError("snapshot reference table has the wrong size");
    RefTable t(rows, cols);
    t.cells() = std::move(cells);
    return t;
  }
  std::vector<std::string> strings() {
    const auto n = get<std::uint64_t>();
    if (n > data_.size() - pos_) throw DataError("snapshot string list exceeds its section");
    std::vector<std::string> v;
    v.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) v.push_back(str());
    return v;
  }
  void finish() const {
    if (pos_ != data_.size()) throw DataError("trailing bytes in snapshot section");
  }

 private:
  void need(std::size_t n) const {
    if (n > data_.size() - pos_) throw DataError("truncated snapshot section");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

void check_refs(const RefTable& t, std::size_t rows, std::size_t cols, std::size_t limit, const char* what) {
  if (t.rows() != rows || t.cols() != cols) throw DataError(std::string(what) + " table has the wrong shape");
  for (std::uint32_t v : t.cells()) {
    if (v != kNone && v >= limit) throw DataError(std::string(what) + " reference out of range");
  }
}

}  // namespace

std::string serialize_snapshot(const Store& store) {
  std::vector<std::pair<std::uint32_t, std::string>> sections;

  {
    nlohmann::json meta;
    nlohmann::json timeline = nlohmann::json::array();
    for (const auto& r : store.timeline) timeline.push_back(r.to_string());
    meta["timeline"] = timeline;
    meta["schema"] = schema_to_json(store.schema);
    meta["epsilon"] = store.dedup.epsilon;
    meta["overlap_rule"] = store.dedup.rule == OverlapRule::AtLeast ? "at-least" : "at-most";
    meta["chain"] = store.dedup.chain == ChainMode::Representative ? "representative" : "predecessor";
    meta["seed"] = store.seed;
    sections.emplace_back(kMeta, meta.dump());
  }
  {
    Writer w;
    w.put<std::uint64_t>(store.lots.size());
    for (const auto& id : store.lots) {
      w.put<std::uint32_t>(static_cast<std::uint32_t>(id.borough()));
      w.str(id.block());
      w.str(id.lot());
    }
    sections.emplace_back(kLots, w.take());
  }
  {
    Writer w;
    const auto& s = store.geometry.shapes;
    w.array(s.points());
    w.array(s.ring_offsets());
    w.array(s.part_offsets());
    w.array(s.shape_offsets());
    sections.emplace_back(kShapes, w.take());
  }
  {
    Writer w;
    w.refs(store.geometry.lot_refs);
    sections.emplace_back(kLotRefs, w.take());
  }
  {
    Writer w;
    w.strings(store.attributes.dictionary.values());
    sections.emplace_back(kDictionary, w.take());
  }
  {
    Writer w;
    for (const auto& pool : store.attributes.pools) {
      w.put<std::uint32_t>(static_cast<std::uint32_t>(pool.kind));
      w.put<std::uint64_t>(pool.width);
      w.array(pool.numbers);
      w.array(pool.codes);
      w.refs(pool.refs);
    }
    sections.emplace_back(kPools, w.take());
  }
  {
    Writer w;
    w.refs(store.block_shapes);
    sections.emplace_back(kBlockRefs, w.take());
  }
  {
    Writer w;
    w.put<std::uint64_t>(store.boroughs.size());
    for (const auto& b : store.boroughs) {
      w.put<std::int32_t>(b.code);
      w.str(b.name);
      w.put<std::uint32_t>(b.shape);
    }
    w.put<std::uint32_t>(store.city_shape);
    sections.emplace_back(kBoroughs, w.take());
  }
  {
    Writer w;
    for (const auto& level : store.levels) {
      w.put<std::uint32_t>(static_cast<std::uint32_t>(level.kind));
      w.strings(level.names);
      w.array(level.shapes);
      w.refs(level.assignment);
      w.put<std::uint64_t>(level.unassigned_slots);
    }
    sections.emplace_back(kLevels, w.take());
  }

  Writer header;
  header.put<std::uint64_t>(0);  // magic, copied in below
  header.put<std::uint32_t>(kSnapshotVersion);
  header.put<std::uint32_t>(static_cast<std::uint32_t>(sections.size()));
  std::uint64_t offset = 16 + kEntrySize * sections.size();
  auto align = [](std::uint64_t v) { return (v + 7) & ~std::uint64_t{7}; };
  offset = align(offset);
  for (const auto& [id, body] : sections) {
    header.put<std::uint32_t>(id);
    header.put<std::uint32_t>(0);
    header.put<std::uint64_t>(offset);
    header.put<std::uint64_t>(body.size());
    offset = align(offset + body.size());
  }
  std::string out = header.take();
  std::memcpy(out.data(), kSnapshotMagic.data(), 8);
  for (const auto& [id, body] : sections) {
    out.resize(align(out.size()), '\0');
    out += body;
  }
  return out;
}

Store deserialize_snapshot(std::string_view bytes) {
  if (bytes.size() < 16 || bytes.substr(0, 8) != kSnapshotMagic) throw LoadError("not a snapshot file");
  Reader head(bytes.substr(8, 8));
  const auto version = head.get<std::uint32_t>();
  if (version != kSnapshotVersion) throw LoadError("unsupported snapshot version " + std::to_string(version));
  const auto count = head.get<std::uint32_t>();
  if (bytes.size() < 16 + std::uint64_t{count} * kEntrySize) throw LoadError("truncated snapshot header");
  std::map<std::uint32_t, std::string_view> sections;
  Reader table(bytes.substr(16, std::size_t{count} * kEntrySize));
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto id = table.get<std::uint32_t>();
    table.get<std::uint32_t>();
    const auto offset = table.get<std::uint64_t>();
    const auto size = table.get<std::uint64_t>();
    if (offset > bytes.size() || size > bytes.size() - offset) throw LoadError("snapshot section out of bounds");
    sections[id] = bytes.substr(offset, size);
  }
  auto section = [&](Section id) {
    auto it = sections.find(id);
    if (it == sections.end()) throw LoadError("snapshot lacks section " + std::to_string(id));
    return Reader(it->second);
  };

  Store store;
  try {
    auto meta = nlohmann::json::parse(sections.count(kMeta) ? sections[kMeta] : std::string_view{});
    for (const auto& r : meta.at("timeline")) store.timeline.push_back(ReleaseId::parse(r.get<std::string>()));
    store.schema = schema_from_json(meta.at("schema"));
    store.dedup.epsilon = meta.at("epsilon").get<double>();
    store.dedup.rule = meta.at("overlap_rule") == "at-most" ? OverlapRule::AtMost : OverlapRule::AtLeast;
    store.dedup.chain = meta.at("chain") == "predecessor" ? ChainMode::Predecessor : ChainMode::Representative;
    store.seed = meta.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("snapshot metadata: ") + e.what());
  }
  const std::size_t k = store.timeline.size();

  {
    Reader r = section(kLots);
    const auto n = r.get<std::uint64_t>();
    store.lots.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto borough = static_cast<int>(r.get<std::uint32_t>());
      std::string block = r.str();
      std::string lot = r.str();
      store.lots.emplace_back(borough, block, lot);
    }
    r.finish();
    if (!std::is_sorted(store.lots.begin(), store.lots.end())) throw DataError("snapshot lots are not sorted");
  }
  {
    Reader r = section(kShapes);
    auto points = r.array<Point>();
    auto rings = r.array<std::uint32_t>();
    auto parts = r.array<std::uint32_t>();
    auto shapes = r.array<std::uint32_t>();
    r.finish();
    store.geometry.shapes = ShapeStore::from_arrays(std::move(points), std::move(rings), std::move(parts),
                                                    std::move(shapes));
  }
  const std::size_t shape_count = store.geometry.shapes.size();
  {
    Reader r = section(kLotRefs);
    store.geometry.lot_refs = r.refs();
    r.finish();
    check_refs(store.geometry.lot_refs, store.lots.size(), k, shape_count, "lot geometry");
  }
  {
    Reader r = section(kDictionary);
    store.attributes.dictionary = StringDictionary::from_values(r.strings());
    r.finish();
  }
  {
    Reader r = section(kPools);
    for (AttributeKind kind : kAllKinds) {
      auto& pool = store.attributes.pool(kind);
      if (r.get<std::uint32_t>() != static_cast<std::uint32_t>(kind)) throw DataError("snapshot pools out of order");
      pool.kind = kind;
      pool.width = r.get<std::uint64_t>();
      if (pool.width != store.schema.width(kind)) throw DataError("snapshot pool width disagrees with schema");
      pool.numbers = r.array<double>();
      pool.codes = r.array<std::uint32_t>();
      pool.refs = r.refs();
      check_refs(pool.refs, store.lots.size(), k, pool.size(), "attribute");
      for (std::uint32_t c : pool.codes) {
        if (c >= store.attributes.dictionary.size()) throw DataError("dictionary code out of range");
      }
    }
    r.finish();
  }
  store.blocks = catalog_blocks(store.lots);
  {
    Reader r = section(kBlockRefs);
    store.block_shapes = r.refs();
    r.finish();
    check_refs(store.block_shapes, store.blocks.size(), k, shape_count, "block geometry");
  }
  {
    Reader r = section(kBoroughs);
    const auto n = r.get<std::uint64_t>();
    for (std::uint64_t i = 0; i < n; ++i) {
      Borough b;
      b.code = r.get<std::int32_t>();
      b.name = r.str();
      b.shape = r.get<std::uint32_t>();
      if (b.shape != kNone && b.shape >= shape_count) throw DataError("borough shape out of range");
      store.boroughs.push_back(std::move(b));
    }
    store.city_shape = r.get<std::uint32_t>();
    r.finish();
    if (store.city_shape != kNone && store.city_shape >= shape_count) throw DataError("city shape out of range");
  }
  {
    Reader r = section(kLevels);
    for (auto& level : store.levels) {
      level.kind = static_cast<RegionKind>(r.get<std::uint32_t>());
      level.names = r.strings();
      level.shapes = r.array<std::uint32_t>();
      level.assignment = r.refs();
      level.unassigned_slots = r.get<std::uint64_t>();
      if (level.names.empty() || level.shapes.size() != level.names.size()) {
        throw DataError("snapshot region level is inconsistent");
      }
      check_refs(level.assignment, store.blocks.size(), k, level.names.size(), "region assignment");
    }
    r.finish();
  }
  return store;
}

void write_snapshot(const Store& store, const std::filesystem::path& path) {
  const std::string bytes = serialize_snapshot(store);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write snapshot " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw LoadError("short write to snapshot " + path.string());
}

Store read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open snapshot " + path.string());
  std::string bytes;
  in.seekg(0, std::ios::end);
  bytes.resize(static_cast<std::size_t>(in.tellg()));
  in.seekg(0);
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!in) throw LoadError("cannot read snapshot " + path.string());
  return deserialize_snapshot(bytes);
}

}  // namespace chronicle
