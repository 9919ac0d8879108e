#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "chronicle/store.hpp"

namespace chronicle {

inline constexpr std::string_view kSnapshotMagic = "CHRONSNP";
inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Little-endian binary image of a Store; see docs/snapshot-format.md.
/// Deterministic: equal stores serialize to identical bytes.
std::string serialize_snapshot(const Store& store);
/// Throws LoadError on a bad magic, version or section table and DataError
/// on inconsistent contents.
Store deserialize_snapshot(std::string_view bytes);

void write_snapshot(const Store& store, const std::filesystem::path& path);
Store read_snapshot(const std::filesystem::path& path);

}  // namespace chronicle
