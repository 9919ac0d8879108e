#include "chronicle/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

namespace chronicle {

namespace {

constexpr double kBlockWidth = 200.0;
constexpr double kBlockHeight = 100.0;
constexpr double kStreet = 30.0;
constexpr double kRiver = 1000.0;
constexpr double kMinPieceWidth = 2.0;

const char* const kBoroughAbbrev[] = {"MN", "BX", "BK", "QN", "SI"};

enum class Template : std::uint8_t { Rect, LShape, TwoPart, Courtyard };

/// Uniform doubles in [0,1) that do not depend on the standard library's
/// distribution implementations.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * (*this)(); }
  std::size_t index(std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>((*this)() * static_cast<double>(n)));
  }

 private:
  std::mt19937_64 engine_;
};

struct LotState {
  LotId id;
  std::uint32_t block = 0;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  double width_factor = 1.0;
  Template shape = Template::Rect;
  bool alive = true;
  std::size_t born = 0;  // release index of first occurrence
  std::vector<double> numeric;
  std::vector<std::string> categorical;
  std::vector<bool> numeric_missing;
};

struct BlockState {
  int borough = 0;
  std::string code;
  std::vector<std::uint32_t> lots;  // x order
  std::uint32_t next_lot_number = 1;
};

const std::vector<std::string>& categorical_domain(std::string_view name) {
  static const std::vector<std::string> landuse = {"01", "02", "03", "04", "05", "06",
                                                   "07", "08", "09", "10", "11"};
  static const std::vector<std::string> bldgclass = {"A1", "A5", "B1", "B2", "C0", "C4",
                                                     "D4", "K1", "O4", "R4", "V0", "W1"};
  static const std::vector<std::string> spdist = {"MiD", "TA", "CL", "HY", "125", "LIC", "HRP"};
  static const std::vector<std::string> other = {"C0", "C1", "C2", "C3", "C4",
                                                 "C5", "C6", "C7", "C8", "C9"};
  if (name == "LANDUSE") return landuse;
  if (name == "BLDGCLASS") return bldgclass;
  if (name == "SPDIST") return spdist;
  return other;
}

double round_to(double v, double step) { return std::round(v / step) * step; }

std::string zero_pad(std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, value);
  return buf;
}

Polygon template_polygon(Template t) {
  auto rect = [](double u0, double v0, double u1, double v1) {
    return Ring{{u0, v0}, {u1, v0}, {u1, v1}, {u0, v1}};
  };
  Polygon p;
  switch (t) {
    case Template::Rect:
      p.parts.push_back({rect(0, 0, 1, 1), {}});
      break;
    case Template::LShape:
      p.parts.push_back({{{0, 0}, {1, 0}, {1, 0.6}, {0.6, 0.6}, {0.6, 1}, {0, 1}}, {}});
      break;
    case Template::TwoPart:
      p.parts.push_back({rect(0, 0, 1, 0.45), {}});
      p.parts.push_back({rect(0, 0.55, 1, 1), {}});
      break;
    case Template::Courtyard: {
      Ring hole = rect(0.3, 0.3, 0.7, 0.7);
      std::reverse(hole.begin(), hole.end());
      p.parts.push_back({rect(0, 0, 1, 1), {std::move(hole)}});
      break;
    }
  }
  return p;
}

Polygon lot_shape(const LotState& lot, Uniform* jitter, double jitter_scale) {
  Polygon p = template_polygon(lot.shape);
  const double w = (lot.x1 - lot.x0) * lot.width_factor;
  const double h = lot.y1 - lot.y0;
  const double delta = jitter_scale * std::min(w, h);
  auto map = [&](Ring& ring) {
    for (Point& pt : ring) {
      pt = {lot.x0 + pt.x * w, lot.y0 + pt.y * h};
      if (jitter) {
        pt.x += jitter->range(-delta, delta);
        pt.y += jitter->range(-delta, delta);
      }
    }
  };
  for (auto& part : p.parts) {
    map(part.outer);
    for (auto& hole : part.holes) map(hole);
  }
  return p;
}

Polygon rect_polygon(double x0, double y0, double x1, double y1) {
  Polygon p;
  p.parts.push_back({{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, {}});
  return p;
}

ReleaseId nth_release(ReleaseId first, std::size_t n) {
  const std::size_t halves = static_cast<std::size_t>(first.half - 1) + n;
  return {first.year + static_cast<int>(halves / 2), static_cast<int>(halves % 2) + 1};
}

class Generator {
 public:
  Generator(const SynthParams& params, std::uint64_t seed)
      : params_(params), schema_(default_schema()), rng_(seed) {
    manifest_.seed = seed;
    manifest_.params = params;
  }

  SynthCorpus run() {
    layout();
    for (std::size_t r = 0; r < params_.releases; ++r) {
      if (r > 0) transition(r);
      emit(r);
    }
    finish_manifest();
    corpus_.manifest = std::move(manifest_);
    return std::move(corpus_);
  }

 private:
  void layout() {
    const std::size_t blocks_total =
        (params_.lots + params_.lots_per_block - 1) / params_.lots_per_block;
    const std::size_t per_borough = (blocks_total + params_.boroughs - 1) / params_.boroughs;
    const std::size_t nps = params_.neighborhoods_per_side;
    const std::size_t per_nbhd = std::max<std::size_t>(1, (per_borough + nps * nps - 1) / (nps * nps));
    const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(per_nbhd))));
    const double cell_w = kBlockWidth + kStreet;
    const double cell_h = kBlockHeight + kStreet;
    const double nbhd_w = static_cast<double>(side) * cell_w;
    const double nbhd_h = static_cast<double>(side) * cell_h;
    const double borough_w = static_cast<double>(nps) * nbhd_w;
    const double borough_h = static_cast<double>(nps) * nbhd_h;
    const std::size_t dps = params_.districts_per_side;

    std::size_t remaining = params_.lots;
    for (std::size_t b = 0; b < params_.boroughs; ++b) {
      const int code = static_cast<int>(b + 1);
      const std::string bname = borough_name(code);
      const std::string abbrev = b < 5 ? kBoroughAbbrev[b] : "B" + std::to_string(code);
      const double bx = static_cast<double>(b) * (borough_w + kRiver);
      corpus_.boroughs.push_back({bname, rect_polygon(bx, 0, bx + borough_w, borough_h)});
      for (std::size_t i = 0; i < dps; ++i) {
        for (std::size_t j = 0; j < dps; ++j) {
          const double w = borough_w / static_cast<double>(dps);
          const double h = borough_h / static_cast<double>(dps);
          corpus_.districts.push_back(
              {district_name(abbrev, i * dps + j),
               rect_polygon(bx + static_cast<double>(j) * w, static_cast<double>(i) * h,
                            bx + static_cast<double>(j + 1) * w, static_cast<double>(i + 1) * h)});
        }
      }
      std::size_t block_number = 1;
      for (std::size_t ni = 0; ni < nps; ++ni) {
        for (std::size_t nj = 0; nj < nps; ++nj) {
          const double nx = bx + static_cast<double>(nj) * nbhd_w;
          const double ny = static_cast<double>(ni) * nbhd_h;
          const std::string nname = abbrev + "-N" + zero_pad(ni * nps + nj + 1, 2);
          corpus_.neighborhoods.push_back({nname, rect_polygon(nx, ny, nx + nbhd_w, ny + nbhd_h)});
          for (std::size_t k = 0; k < per_nbhd && remaining > 0; ++k) {
            const double cx = nx + static_cast<double>(k % side) * cell_w + kStreet / 2;
            const double cy = ny + static_cast<double>(k / side) * cell_h + kStreet / 2;
            const std::size_t n = std::min(remaining, params_.lots_per_block);
            remaining -= n;
            add_block(code, zero_pad(block_number++, 5), cx, cy, n);
            const std::string& key = blocks_.back().code;
            const std::string block_key = std::to_string(code) + key;
            corpus_.block_neighborhood[block_key] = nname;
            const double mid_x = cx + kBlockWidth / 2 - bx;
            const double mid_y = cy + kBlockHeight / 2;
            const auto dj = std::min(dps - 1, static_cast<std::size_t>(mid_x / (borough_w / static_cast<double>(dps))));
            const auto di = std::min(dps - 1, static_cast<std::size_t>(mid_y / (borough_h / static_cast<double>(dps))));
            corpus_.block_district[block_key] = district_name(abbrev, di * dps + dj);
          }
        }
      }
    }
  }

  static std::string district_name(const std::string& abbrev, std::size_t i) {
    return abbrev + "-CD" + zero_pad(i + 1, 2);
  }

  void add_block(int borough, std::string code, double x, double y, std::size_t n) {
    BlockState block;
    block.borough = borough;
    block.code = std::move(code);
    const auto block_index = static_cast<std::uint32_t>(blocks_.size());
    const double strip = kBlockWidth / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      LotState lot;
      lot.id = LotId(borough, block.code, zero_pad(block.next_lot_number++, 4));
      lot.block = block_index;
      lot.x0 = x + static_cast<double>(i) * strip;
      lot.x1 = lot.x0 + strip;
      lot.y0 = y;
      lot.y1 = y + kBlockHeight;
      const double t = rng_();
      lot.shape = t < 0.94 ? Template::Rect
                  : t < 0.97 ? Template::LShape
                  : t < 0.99 ? Template::TwoPart
                             : Template::Courtyard;
      initial_attributes(lot);
      block.lots.push_back(static_cast<std::uint32_t>(lots_.size()));
      lots_.push_back(std::move(lot));
    }
    blocks_.push_back(std::move(block));
  }

  std::size_t attr(std::string_view name) const { return *schema_.find(name); }
  double& num(LotState& lot, std::string_view name) {
    return lot.numeric[schema_.numeric_offset(schema_.slot(attr(name)))];
  }

  void initial_attributes(LotState& lot) {
    lot.numeric.assign(schema_.numeric_width(), 0.0);
    lot.categorical.assign(schema_.width(AttributeKind::Categorical), {});
    lot.numeric_missing.assign(schema_.numeric_width(), false);
    for (std::size_t i = 0; i < lot.numeric_missing.size(); ++i) {
      lot.numeric_missing[i] = rng_() < params_.missing_prob;
    }
    static const double resid_far[] = {0.5, 0.9, 1.25, 2.43, 3.44, 6.02, 10.0};
    static const double comm_far[] = {0.0, 1.0, 2.0, 3.4, 5.0, 6.0, 10.0, 15.0};
    const double lotarea = std::round(area(lot_shape(lot, nullptr, 0)));
    num(lot, "LOTAREA") = lotarea;
    const double bldg = std::round(lotarea * rng_.range(0.3, 4.0));
    num(lot, "BLDGAREA") = bldg;
    const double res = std::round(bldg * rng_());
    num(lot, "RESAREA") = res;
    num(lot, "COMAREA") = bldg - res;
    num(lot, "NUMBLDGS") = 1.0 + static_cast<double>(rng_.index(3));
    num(lot, "NUMFLOORS") = 1.0 + std::floor(rng_() * rng_() * 30.0);
    num(lot, "RESIDFAR") = resid_far[rng_.index(std::size(resid_far))];
    num(lot, "COMMFAR") = comm_far[rng_.index(std::size(comm_far))];
    const double land = std::round(lotarea * rng_.range(5.0, 150.0));
    num(lot, "ASSESSLAND") = land;
    num(lot, "ASSESSTOTAL") = std::round(land * rng_.range(1.2, 6.0));
    num(lot, "BUILTFAR") = round_to(bldg / lotarea, 0.01);

    for (std::size_t c = 0; c < lot.categorical.size(); ++c) {
      const std::string& name = schema_.attributes()[schema_.members(AttributeKind::Categorical)[c]].name;
      const auto& domain = categorical_domain(name);
      const double u = rng_();
      if (name == "SPDIST" && u < 0.85) {
        lot.categorical[c].clear();  // most lots carry no special district
      } else {
        lot.categorical[c] = domain[rng_.index(domain.size())];
      }
    }
  }

  void change_categorical(LotState& lot, double pick, double value) {
    std::vector<std::size_t> valid;
    for (std::size_t c = 0; c < lot.categorical.size(); ++c) {
      if (!lot.categorical[c].empty()) valid.push_back(c);
    }
    if (valid.empty()) return;
    const std::size_t c = valid[std::min(valid.size() - 1, static_cast<std::size_t>(pick * static_cast<double>(valid.size())))];
    const std::string& name = schema_.attributes()[schema_.members(AttributeKind::Categorical)[c]].name;
    const auto& domain = categorical_domain(name);
    const auto cur = static_cast<std::size_t>(std::find(domain.begin(), domain.end(), lot.categorical[c]) - domain.begin());
    const std::size_t step = 1 + std::min(domain.size() - 2, static_cast<std::size_t>(value * static_cast<double>(domain.size() - 1)));
    lot.categorical[c] = domain[(cur + step) % domain.size()];
  }

  void change_stable(LotState& lot, double pick, double value) {
    const auto& members = schema_.members(AttributeKind::NumericalStable);
    std::vector<std::size_t> valid;
    for (std::size_t c = 0; c < members.size(); ++c) {
      if (!lot.numeric_missing[c]) valid.push_back(c);
    }
    if (valid.empty()) return;
    const std::size_t c = valid[std::min(valid.size() - 1, static_cast<std::size_t>(pick * static_cast<double>(valid.size())))];
    double& v = lot.numeric[c];
    const double old = v;
    const std::string& name = schema_.attributes()[members[c]].name;
    if (name == "NUMBLDGS" || name == "NUMFLOORS") {
      v = (value < 0.5 && v > 1.0) ? v - 1.0 : v + 1.0;
    } else if (name == "RESIDFAR" || name == "COMMFAR") {
      v = round_to(v + 0.25 + value * 2.0, 0.01);
    } else {
      v = std::round(v * (1.05 + 0.25 * value)) + 1.0;
    }
    if (v == old) v = old + 1.0;
  }

  void change_unstable(LotState& lot, double value) {
    const auto& members = schema_.members(AttributeKind::NumericalUnstable);
    const std::size_t base = schema_.width(AttributeKind::NumericalStable);
    bool changed = false;
    for (std::size_t c = 0; c < members.size(); ++c) {
      if (lot.numeric_missing[base + c]) continue;
      double& v = lot.numeric[base + c];
      const double old = v;
      const double factor = 0.97 + 0.13 * value;
      v = schema_.attributes()[members[c]].name == "BUILTFAR" ? round_to(v * factor, 0.01)
                                                               : std::round(v * factor);
      if (!changed && v == old) v = old + 1.0;
      changed = true;
    }
  }

  void transition(std::size_t r) {
    std::size_t slots = 0, geometry = 0, reshapes = 0;
    for (auto& block : blocks_) {
      const std::vector<std::uint32_t> order = block.lots;
      for (std::size_t pos = 0; pos < order.size(); ++pos) {
        LotState& lot = lots_[order[pos]];
        if (!lot.alive) continue;  // absorbed earlier in this transition
        // Fixed draw count per lot keeps outcomes of one event type
        // independent of the other probabilities.
        const double u_geom = rng_(), u_cat = rng_(), u_stable = rng_(), u_unstable = rng_();
        const double aux1 = rng_(), aux2 = rng_(), aux3 = rng_();
        ++slots;

        const double p_split = params_.split_prob;
        const double p_merge = p_split + params_.merge_prob;
        const double p_reshape = p_merge + params_.geometry_change_prob;
        bool geometry_event = false;
        if (u_geom < p_split) {
          geometry_event = split(block, order[pos], r, aux1);
        } else if (u_geom < p_merge) {
          geometry_event = merge(block, order[pos], r);
        } else if (u_geom < p_reshape) {
          lot.width_factor = lot.width_factor < 1.0 ? 1.0 : 0.5 + 0.3 * aux1;
          geometry_event = true;
          ++reshapes;
        }
        if (geometry_event) ++geometry;

        LotState& cur = lots_[order[pos]];  // split may reallocate lots_
        if (u_cat < params_.categorical_change_prob) change_categorical(cur, aux2, aux3);
        if (u_stable < params_.stable_change_prob) change_stable(cur, aux3, aux2);
        if (u_unstable < params_.unstable_change_prob) change_unstable(cur, aux2);
      }
    }
    manifest_.transition_slots.push_back(slots);
    manifest_.transition_geometry_changes.push_back(geometry);
    manifest_.transition_reshapes.push_back(reshapes);
    manifest_.geometry_changes += geometry;
    manifest_.continuing_slots += slots;
  }

  bool split(BlockState& block, std::uint32_t index, std::size_t r, double aux) {
    LotState& lot = lots_[index];
    const double width = lot.x1 - lot.x0;
    const double fraction = 0.2 + 0.1 * aux;
    if (width * fraction < kMinPieceWidth) return false;
    LotState piece = lot;
    const double xm = lot.x0 + width * fraction;
    lot.x1 = xm;
    lot.width_factor = 1.0;
    lot.shape = Template::Rect;
    piece.x0 = xm;
    piece.width_factor = 1.0;
    piece.shape = Template::Rect;
    piece.born = r;
    piece.id = LotId(block.borough, block.code, zero_pad(block.next_lot_number++, 4));
    const auto pos = std::find(block.lots.begin(), block.lots.end(), index);
    block.lots.insert(pos + 1, static_cast<std::uint32_t>(lots_.size()));
    lots_.push_back(std::move(piece));
    ++manifest_.splits;
    return true;
  }

  bool merge(BlockState& block, std::uint32_t index, std::size_t r) {
    const auto pos = std::find(block.lots.begin(), block.lots.end(), index);
    if (pos + 1 == block.lots.end()) return false;
    LotState& lot = lots_[index];
    LotState& next = lots_[*(pos + 1)];
    if (next.born == r) return false;  // created by a split in this transition
    const double own = lot.x1 - lot.x0;
    const double other = next.x1 - next.x0;
    if (other < 0.2 * own) return false;
    lot.x1 = next.x1;
    lot.width_factor = 1.0;
    lot.shape = Template::Rect;
    next.alive = false;
    block.lots.erase(pos + 1);
    ++manifest_.merges;
    return true;
  }

  void emit(std::size_t r) {
    RawRelease release;
    release.release = nth_release(params_.first_release, r);
    std::vector<bool> numeric_unavailable(schema_.numeric_width(), false);
    std::vector<bool> categorical_unavailable(schema_.width(AttributeKind::Categorical), false);
    for (const auto& [name, before] : params_.unavailable_before) {
      const auto a = schema_.find(name);
      if (!a || r >= before) continue;
      const AttributeSlot slot = schema_.slot(*a);
      if (is_numeric(slot.kind)) {
        numeric_unavailable[schema_.numeric_offset(slot)] = true;
      } else {
        categorical_unavailable[slot.column] = true;
      }
    }
    std::size_t count = 0;
    for (const auto& block : blocks_) {
      for (std::uint32_t index : block.lots) {
        const LotState& lot = lots_[index];
        const bool jitter = rng_() < params_.jitter_prob;
        if (jitter) ++manifest_.jitters;
        RawRecord rec;
        rec.id = lot.id;
        rec.shape = lot_shape(lot, jitter ? &rng_ : nullptr, params_.jitter_scale);
        rec.numeric = lot.numeric;
        for (std::size_t i = 0; i < rec.numeric.size(); ++i) {
          if (lot.numeric_missing[i] || numeric_unavailable[i]) rec.numeric[i] = kInvalidNumber;
        }
        rec.categorical = lot.categorical;
        for (std::size_t i = 0; i < rec.categorical.size(); ++i) {
          if (categorical_unavailable[i]) rec.categorical[i].clear();
        }
        release.records.push_back(std::move(rec));
        ++count;
      }
    }
    std::sort(release.records.begin(), release.records.end(),
              [](const RawRecord& a, const RawRecord& b) { return a.id < b.id; });
    count_attribute_changes(release);
    manifest_.lots_per_release.push_back(count);
    corpus_.releases.push_back(std::move(release));
  }

  /// Realized set changes, measured on the emitted tuples of continuing lots.
  void count_attribute_changes(const RawRelease& current) {
    if (corpus_.releases.empty()) return;
    const RawRelease& prev = corpus_.releases.back();
    const std::size_t stable_w = schema_.width(AttributeKind::NumericalStable);
    auto same_bits = [](double a, double b) {
      return std::memcmp(&a, &b, sizeof(double)) == 0;
    };
    std::size_t j = 0;
    for (const auto& rec : current.records) {
      while (j < prev.records.size() && prev.records[j].id < rec.id) ++j;
      if (j == prev.records.size() || !(prev.records[j].id == rec.id)) continue;
      const RawRecord& old = prev.records[j];
      if (rec.categorical != old.categorical) ++manifest_.categorical_changes;
      bool stable_same = true, unstable_same = true;
      for (std::size_t i = 0; i < rec.numeric.size(); ++i) {
        if (!same_bits(rec.numeric[i], old.numeric[i])) (i < stable_w ? stable_same : unstable_same) = false;
      }
      if (!stable_same) ++manifest_.stable_changes;
      if (!unstable_same) ++manifest_.unstable_changes;
    }
  }

  void finish_manifest() {
    manifest_.expected_geometry =
        1.0 - std::min(1.0, params_.geometry_change_prob + params_.split_prob + params_.merge_prob);
    manifest_.expected_categorical = 1.0 - params_.categorical_change_prob;
    manifest_.expected_stable = 1.0 - params_.stable_change_prob;
    manifest_.expected_unstable = 1.0 - params_.unstable_change_prob;
  }

  const SynthParams& params_;
  AttributeSchema schema_;
  Uniform rng_;
  std::vector<LotState> lots_;
  std::vector<BlockState> blocks_;
  SynthManifest manifest_;
  SynthCorpus corpus_;
};

}  // namespace

void SynthParams::validate() const {
  if (lots == 0) throw ValidationError("lot count must be positive");
  if (releases == 0) throw ValidationError("release count must be positive");
  if (boroughs == 0 || neighborhoods_per_side == 0 || districts_per_side == 0 || lots_per_block == 0) {
    throw ValidationError("region layout counts must be positive");
  }
  for (double p : {geometry_change_prob, categorical_change_prob, stable_change_prob,
                   unstable_change_prob, split_prob, merge_prob, jitter_prob, missing_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("probabilities must lie in [0,1]");
  }
  if (geometry_change_prob + split_prob + merge_prob > 1.0) {
    throw ValidationError("geometry, split and merge probabilities must sum to at most 1");
  }
  if (!(jitter_scale >= 0.0 && jitter_scale < 0.05)) {
    throw ValidationError("jitter scale must lie in [0, 0.05)");
  }
}

SynthCorpus generate_synthetic(const SynthParams& params, std::uint64_t seed) {
  params.validate();
  return Generator(params, seed).run();
}

nlohmann::json SynthManifest::to_json() const {
  const auto& p = params;
  nlohmann::json unavailable = nlohmann::json::object();
  for (const auto& [name, before] : p.unavailable_before) unavailable[name] = before;
  return {
      {"seed", seed},
      {"params",
       {{"lots", p.lots},
        {"releases", p.releases},
        {"first_release", p.first_release.to_string()},
        {"boroughs", p.boroughs},
        {"neighborhoods_per_side", p.neighborhoods_per_side},
        {"districts_per_side", p.districts_per_side},
        {"lots_per_block", p.lots_per_block},
        {"jitter_scale", p.jitter_scale},
        {"missing_prob", p.missing_prob},
        {"unavailable_before", unavailable}}},
      {"planted_probabilities",
       {{"geometry", p.geometry_change_prob},
        {"categorical", p.categorical_change_prob},
        {"numerical-stable", p.stable_change_prob},
        {"numerical-unstable", p.unstable_change_prob},
        {"split", p.split_prob},
        {"merge", p.merge_prob},
        {"jitter", p.jitter_prob}}},
      {"expected_redundancy",
       {{"geometry", expected_geometry},
        {"categorical", expected_categorical},
        {"numerical-stable", expected_stable},
        {"numerical-unstable", expected_unstable}}},
      {"realized",
       {{"geometry_changes", geometry_changes},
        {"categorical_changes", categorical_changes},
        {"numerical-stable_changes", stable_changes},
        {"numerical-unstable_changes", unstable_changes},
        {"splits", splits},
        {"merges", merges},
        {"jitters", jitters},
        {"continuing_slots", continuing_slots},
        {"lots_per_release", lots_per_release},
        {"transition_slots", transition_slots},
        {"transition_geometry_changes", transition_geometry_changes},
        {"transition_reshapes", transition_reshapes}}},
  };
}

SynthManifest SynthManifest::from_json(const nlohmann::json& j) {
  SynthManifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  const auto& p = j.at("params");
  m.params.lots = p.at("lots");
  m.params.releases = p.at("releases");
  m.params.first_release = ReleaseId::parse(p.at("first_release").get<std::string>());
  m.params.boroughs = p.at("boroughs");
  m.params.neighborhoods_per_side = p.at("neighborhoods_per_side");
  m.params.districts_per_side = p.at("districts_per_side");
  m.params.lots_per_block = p.at("lots_per_block");
  m.params.jitter_scale = p.at("jitter_scale");
  m.params.missing_prob = p.at("missing_prob");
  for (const auto& [name, before] : p.at("unavailable_before").items()) {
    m.params.unavailable_before[name] = before.get<std::size_t>();
  }
  const auto& pp = j.at("planted_probabilities");
  m.params.geometry_change_prob = pp.at("geometry");
  m.params.categorical_change_prob = pp.at("categorical");
  m.params.stable_change_prob = pp.at("numerical-stable");
  m.params.unstable_change_prob = pp.at("numerical-unstable");
  m.params.split_prob = pp.at("split");
  m.params.merge_prob = pp.at("merge");
  m.params.jitter_prob = pp.at("jitter");
  const auto& e = j.at("expected_redundancy");
  m.expected_geometry = e.at("geometry");
  m.expected_categorical = e.at("categorical");
  m.expected_stable = e.at("numerical-stable");
  m.expected_unstable = e.at("numerical-unstable");
  const auto& r = j.at("realized");
  m.geometry_changes = r.at("geometry_changes");
  m.categorical_changes = r.at("categorical_changes");
  m.stable_changes = r.at("numerical-stable_changes");
  m.unstable_changes = r.at("numerical-unstable_changes");
  m.splits = r.at("splits");
  m.merges = r.at("merges");
  m.jitters = r.at("jitters");
  m.continuing_slots = r.at("continuing_slots");
  m.lots_per_release = r.at("lots_per_release").get<std::vector<std::size_t>>();
  m.transition_slots = r.at("transition_slots").get<std::vector<std::size_t>>();
  m.transition_geometry_changes = r.at("transition_geometry_changes").get<std::vector<std::size_t>>();
  m.transition_reshapes = r.at("transition_reshapes").get<std::vector<std::size_t>>();
  return m;
}

namespace {

nlohmann::json feature_json(const RawRecord& rec, const AttributeSchema& schema) {
  nlohmann::json props = {{"bbl", rec.id.bbl()},
                          {"borough", rec.id.borough()},
                          {"block", std::string(rec.id.block())},
                          {"lot", std::string(rec.id.lot())}};
  for (std::size_t a = 0; a < schema.size(); ++a) {
    const auto& def = schema.attributes()[a];
    if (is_numeric(def.kind)) {
      const double v = rec.number(schema, a);
      props[def.name] = is_invalid(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
    } else {
      const std::string& s = rec.text(schema, a);
      props[def.name] = s.empty() ? nlohmann::json(nullptr) : nlohmann::json(s);
    }
  }
  return {{"type", "Feature"}, {"properties", props}, {"geometry", geojson::to_geometry(rec.shape)}};
}

}  // namespace

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "regions");
  const AttributeSchema schema = default_schema();
  for (const auto& release : corpus.releases) {
    const auto path = dir / release_filename(release.release);
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path.string());
    for (const auto& rec : release.records) out << feature_json(rec, schema).dump() << '\n';
  }
  {
    std::ofstream out(dir / "manifest.json");
    out << corpus.manifest.to_json().dump(2) << '\n';
  }
  save_schema(schema, dir / "schema.json");
  save_rename_table(default_renames(), dir / "renames.csv");
  geojson::write_named_collection(corpus.neighborhoods, dir / "regions" / "neighborhoods.geojson");
  geojson::write_named_collection(corpus.districts, dir / "regions" / "districts.geojson");
  geojson::write_named_collection(corpus.boroughs, dir / "regions" / "boroughs.geojson");
}

}  // namespace chronicle
