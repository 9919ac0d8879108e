#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chronicle {

/// Marker for "no reference" in index and reference tables.
inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input could not be read or parsed at all.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Input was readable but violates a structural precondition.
class DataError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A region path could not be resolved. `depth` is 1-based.
class NotFound : public Error {
 public:
  NotFound(std::size_t depth, std::string segment)
      : Error("not found at depth " + std::to_string(depth) + ": '" + segment + "'"),
        depth_(depth),
        segment_(std::move(segment)) {}

  std::size_t depth() const noexcept { return depth_; }
  const std::string& segment() const noexcept { return segment_; }

 private:
  std::size_t depth_;
  std::string segment_;
};

class InvalidRelease : public Error {
 public:
  using Error::Error;
};

/// Attribute is unknown or its kind does not support the requested operation.
class AttributeError : public Error {
 public:
  AttributeError(std::string attribute, const std::string& what)
      : Error(what), attribute_(std::move(attribute)) {}
  const std::string& attribute() const noexcept { return attribute_; }

 private:
  std::string attribute_;
};

/// One dated release of the dataset, e.g. 2011.1 = first half of 2011.
struct ReleaseId {
  int year = 0;
  int half = 1;

  auto operator<=>(const ReleaseId&) const = default;

  std::string to_string() const;
  /// Accepts "2011.1", "2011.2" and bare "2011" (first half).
  static ReleaseId parse(std::string_view text);
};

using Timeline = std::vector<ReleaseId>;

/// Index of `release` in `timeline`, or throws InvalidRelease.
std::size_t release_index(const Timeline& timeline, ReleaseId release);

/// Borough / block / lot identifier. The composite key (BBL) is the
/// concatenation borough||block||lot; block and lot are views into it.
class LotId {
 public:
  LotId() = default;
  LotId(int borough, std::string_view block, std::string_view lot);

  int borough() const noexcept { return borough_; }
  std::string_view block() const noexcept {
    return std::string_view(bbl_).substr(prefix_len_, block_len_);
  }
  std::string_view lot() const noexcept {
    return std::string_view(bbl_).substr(prefix_len_ + block_len_);
  }
  /// Borough code followed by block code; identifies a block city-wide.
  std::string_view block_key() const noexcept {
    return std::string_view(bbl_).substr(0, prefix_len_ + block_len_);
  }
  const std::string& bbl() const noexcept { return bbl_; }

  friend bool operator==(const LotId& a, const LotId& b) { return a.bbl_ == b.bbl_; }
  friend auto operator<=>(const LotId& a, const LotId& b) { return a.bbl_ <=> b.bbl_; }

 private:
  std::string bbl_;
  std::uint8_t borough_ = 0;
  std::uint8_t prefix_len_ = 0;
  std::uint8_t block_len_ = 0;
};

/// Borough display name for a borough code (1..5 use NYC names).
std::string borough_name(int code);

}  // namespace chronicle
