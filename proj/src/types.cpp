#include "chronicle/types.hpp"

#include <algorithm>
#include <charconv>

namespace chronicle {

std::string ReleaseId::to_string() const {
  return std::to_string(year) + "." + std::to_string(half);
}

ReleaseId ReleaseId::parse(std::string_view text) {
  auto fail = [&]() -> ReleaseId {
    throw InvalidRelease("malformed release id '" + std::string(text) + "'");
  };
  ReleaseId id;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, id.year);
  if (ec != std::errc{} || id.year < 0) return fail();
  if (p == end) return id;
  if (*p != '.' || p + 2 != end) return fail();
  id.half = p[1] - '0';
  if (id.half != 1 && id.half != 2) return fail();
  return id;
}

std::size_t release_index(const Timeline& timeline, ReleaseId release) {
  auto it = std::lower_bound(timeline.begin(), timeline.end(), release);
  if (it == timeline.end() || *it != release) {
    throw InvalidRelease("release " + release.to_string() + " is outside the timeline");
  }
  return static_cast<std::size_t>(it - timeline.begin());
}

LotId::LotId(int borough, std::string_view block, std::string_view lot) {
  if (borough < 0 || borough > 255) throw DataError("borough code out of range");
  if (block.size() > 255) throw DataError("block code too long");
  borough_ = static_cast<std::uint8_t>(borough);
  bbl_ = std::to_string(borough);
  prefix_len_ = static_cast<std::uint8_t>(bbl_.size());
  block_len_ = static_cast<std::uint8_t>(block.size());
  bbl_.append(block);
  bbl_.append(lot);
}

std::string borough_name(int code) {
  static const char* const names[] = {"Manhattan", "Bronx", "Brooklyn", "Queens", "Staten Island"};
  if (code >= 1 && code <= 5) return names[code - 1];
  return "Borough " + std::to_string(code);
}

}  // namespace chronicle
