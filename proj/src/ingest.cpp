#include "chronicle/ingest.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <thread>
#include <mutex>
#include <unordered_set>
#include <variant>

#include "chronicle/geojson.hpp"

namespace chronicle {

std::size_t RejectionReport::total() const noexcept {
  std::size_t n = 0;
  for (const auto& [reason, count] : counts) n += count;
  return n;
}

void RejectionReport::merge(const RejectionReport& other) {
  for (const auto& [reason, count] : other.counts) counts[reason] += count;
}

namespace {

using nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::optional<int> parse_borough(const json& v) {
  if (v.is_number_integer()) return v.get<int>();
  if (!v.is_string()) return std::nullopt;
  const std::string s = v.get<std::string>();
  static const std::pair<const char*, int> letters[] = {
      {"MN", 1}, {"BX", 2}, {"BK", 3}, {"QN", 4}, {"SI", 5}};
  for (auto [code, n] : letters) {
    if (s == code) return n;
  }
  int n = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return n;
}

std::optional<std::string> code_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return std::nullopt;
}

double numeric_value(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    double d = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec == std::errc{} && p == s.data() + s.size() && !s.empty()) return d;
  }
  return kInvalidNumber;
}

std::string categorical_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return v.dump();
  return {};
}

/// Parses one feature line; returns a reject reason on failure.
std::variant<RawRecord, std::string> parse_feature(std::string_view line,
                                                   const AttributeSchema& schema,
                                                   const RenameTable& renames) {
  json feature;
  try {
    feature = json::parse(line);
  } catch (const json::exception&) {
    return std::string("unparseable feature");
  }
  if (!feature.is_object()) return std::string("unparseable feature");
  const auto props_it = feature.find("properties");
  if (props_it == feature.end() || !props_it->is_object()) return std::string("missing id");
  const json& props = *props_it;

  RawRecord rec;
  rec.numeric.assign(schema.numeric_width(), kInvalidNumber);
  rec.categorical.assign(schema.width(AttributeKind::Categorical), std::string{});

  std::optional<int> borough;
  std::optional<std::string> block, lot, bbl;
  for (const auto& [key, value] : props.items()) {
    const std::string k = lower(key);
    if (k == "borough" || k == "borocode") {
      if (!borough) borough = parse_borough(value);
      continue;
    }
    if (k == "block") { block = code_string(value); continue; }
    if (k == "lot") { lot = code_string(value); continue; }
    if (k == "bbl") { bbl = code_string(value); continue; }
    const auto attr = schema.find(renames.canonical(key));
    if (!attr) continue;
    const AttributeSlot slot = schema.slot(*attr);
    if (is_numeric(slot.kind)) {
      rec.numeric[schema.numeric_offset(slot)] = numeric_value(value);
    } else {
      rec.categorical[slot.column] = categorical_value(value);
    }
  }
  if (!borough || !block || !lot || block->empty() || lot->empty()) {
    return std::string("missing id");
  }
  try {
    rec.id = LotId(*borough, *block, *lot);
  } catch (const DataError&) {
    return std::string("missing id");
  }
  if (bbl && *bbl != rec.id.bbl()) return std::string("inconsistent id");

  const auto geom_it = feature.find("geometry");
  if (geom_it == feature.end() || geom_it->is_null()) return std::string("missing geometry");
  try {
    rec.shape = geojson::parse_geometry(*geom_it);
  } catch (const std::exception&) {
    return std::string("unparseable geometry");
  }
  return rec;
}

}  // namespace

RawRelease load_release(const std::filesystem::path& path, ReleaseId release,
                        const AttributeSchema& schema, const RenameTable& renames) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read release file " + path.string());
  RawRelease out;
  out.release = release;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto parsed = parse_feature(line, schema, renames);
    if (auto* rec = std::get_if<RawRecord>(&parsed)) {
      out.records.push_back(std::move(*rec));
    } else {
      out.load_rejects.add(std::get<std::string>(parsed));
    }
  }
  if (in.bad()) throw LoadError("read error in " + path.string());
  return out;
}

std::optional<ReleaseId> release_from_filename(const std::filesystem::path& path) {
  const std::string name = path.filename().string();
  constexpr std::string_view ext = ".geojsonl";
  if (name.size() <= ext.size() || !name.ends_with(ext)) return std::nullopt;
  try {
    return ReleaseId::parse(std::string_view(name).substr(0, name.size() - ext.size()));
  } catch (const InvalidRelease&) {
    return std::nullopt;
  }
}

std::string release_filename(ReleaseId release) { return release.to_string() + ".geojsonl"; }

std::pair<RawRelease, RejectionReport> clean_records(RawRelease raw) {
  RejectionReport report;
  std::unordered_set<std::string> seen;
  seen.reserve(raw.records.size());
  std::vector<RawRecord> kept;
  kept.reserve(raw.records.size());
  for (auto& rec : raw.records) {
    normalize(rec.shape);
    if (auto reason = validate(rec.shape)) {
      report.add(*reason);
      continue;
    }
    if (!seen.insert(rec.id.bbl()).second) {
      report.add("duplicate id");
      continue;
    }
    kept.push_back(std::move(rec));
  }
  raw.records = std::move(kept);
  return {std::move(raw), std::move(report)};
}

std::optional<std::size_t> ReleaseSequence::lot_row(std::string_view bbl) const {
  auto it = std::lower_bound(lots_.begin(), lots_.end(), bbl,
                             [](const LotId& a, std::string_view b) { return a.bbl() < b; });
  if (it == lots_.end() || it->bbl() != bbl) return std::nullopt;
  return static_cast<std::size_t>(it - lots_.begin());
}

const RawRecord* ReleaseSequence::find(std::string_view bbl, ReleaseId release) const {
  const auto row = lot_row(bbl);
  if (!row) return nullptr;
  auto it = std::lower_bound(timeline_.begin(), timeline_.end(), release);
  if (it == timeline_.end() || *it != release) return nullptr;
  return record(*row, static_cast<std::size_t>(it - timeline_.begin()));
}

std::size_t ReleaseSequence::record_count() const noexcept {
  std::size_t n = 0;
  for (const auto& r : releases_) n += r.records.size();
  return n;
}

ReleaseSequence consolidate(std::vector<RawRelease> releases) {
  ReleaseSequence seq;
  for (std::size_t i = 1; i < releases.size(); ++i) {
    if (!(releases[i - 1].release < releases[i].release)) {
      throw DataError("releases not strictly increasing at " + releases[i].release.to_string());
    }
  }
  std::vector<const LotId*> ids;
  for (const auto& r : releases) {
    seq.timeline_.push_back(r.release);
    for (const auto& rec : r.records) ids.push_back(&rec.id);
  }
  std::sort(ids.begin(), ids.end(), [](const LotId* a, const LotId* b) { return *a < *b; });
  ids.erase(std::unique(ids.begin(), ids.end(),
                        [](const LotId* a, const LotId* b) { return *a == *b; }),
            ids.end());
  seq.lots_.reserve(ids.size());
  for (const LotId* id : ids) seq.lots_.push_back(*id);

  const std::size_t k = releases.size();
  seq.slots_.assign(seq.lots_.size() * k, kNone);
  for (std::size_t r = 0; r < k; ++r) {
    const auto& records = releases[r].records;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const std::size_t row = *seq.lot_row(records[i].id.bbl());
      auto& slot = seq.slots_[row * k + r];
      if (slot != kNone) {
        throw DataError("duplicate lot " + records[i].id.bbl() + " in release " +
                        releases[r].release.to_string());
      }
      slot = static_cast<std::uint32_t>(i);
    }
  }
  seq.releases_ = std::move(releases);
  return seq;
}

LoadedCorpus load_directory(const std::filesystem::path& dir, const AttributeSchema& schema,
                            const RenameTable& renames, unsigned threads) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw LoadError("not a directory: " + dir.string());
  std::vector<std::pair<ReleaseId, std::filesystem::path>> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (auto id = release_from_filename(entry.path())) files.emplace_back(*id, entry.path());
  }
  if (files.empty()) throw LoadError("no release files (<year>.<half>.geojsonl) in " + dir.string());
  std::sort(files.begin(), files.end());

  std::vector<RawRelease> cleaned(files.size());
  std::vector<RejectionReport> reports(files.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        RawRelease raw = load_release(files[i].second, files[i].first, schema, renames);
        RejectionReport report = raw.load_rejects;
        auto [clean, clean_report] = clean_records(std::move(raw));
        report.merge(clean_report);
        cleaned[i] = std::move(clean);
        reports[i] = std::move(report);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned n = std::max(1u, std::min<unsigned>(threads, files.size()));
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  LoadedCorpus corpus;
  for (std::size_t i = 0; i < files.size(); ++i) corpus.rejects.emplace_back(files[i].first, reports[i]);
  corpus.sequence = consolidate(std::move(cleaned));
  return corpus;
}

}  // namespace chronicle
