#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "chronicle/geojson.hpp"
#include "chronicle/ingest.hpp"

namespace chronicle {

/// Knobs of the synthetic corpus generator. Defaults mimic the change rates
/// observed on the NYC land-use releases.
struct SynthParams {
  std::size_t lots = 100000;
  std::size_t releases = 20;
  ReleaseId first_release{2002, 1};

  /// Per surviving lot and release transition.
  double geometry_change_prob = 0.08;
  double categorical_change_prob = 0.21;
  double stable_change_prob = 0.30;
  double unstable_change_prob = 0.76;
  double split_prob = 0.002;
  double merge_prob = 0.002;
  /// Re-digitization noise that must NOT count as a geometry change.
  double jitter_prob = 0.05;
  double jitter_scale = 0.002;
  /// Per lot and numeric attribute: value permanently missing.
  double missing_prob = 0.01;
  /// Attributes invalid for every lot before the given release index.
  std::map<std::string, std::size_t> unavailable_before;

  std::size_t boroughs = 5;
  std::size_t neighborhoods_per_side = 4;
  std::size_t districts_per_side = 2;
  std::size_t lots_per_block = 10;

  /// Throws ValidationError on non-positive counts or probabilities outside [0,1].
  void validate() const;
};

/// What the generator planted, for verification against measured redundancy.
struct SynthManifest {
  std::uint64_t seed = 0;
  SynthParams params;
  /// Analytical expected redundant fraction per category.
  double expected_geometry = 0;
  double expected_categorical = 0;
  double expected_stable = 0;
  double expected_unstable = 0;
  /// Exact planted counts.
  std::size_t geometry_changes = 0;  // reshapes + splits + merges on surviving lots
  std::size_t categorical_changes = 0;
  std::size_t stable_changes = 0;
  std::size_t unstable_changes = 0;
  std::size_t splits = 0;
  std::size_t merges = 0;
  std::size_t jitters = 0;
  /// Lot slots that continue from the previous release.
  std::size_t continuing_slots = 0;
  std::vector<std::size_t> lots_per_release;
  /// Per transition (index t = change from release t to t+1).
  std::vector<std::size_t> transition_slots;
  std::vector<std::size_t> transition_geometry_changes;
  std::vector<std::size_t> transition_reshapes;

  nlohmann::json to_json() const;
  static SynthManifest from_json(const nlohmann::json& j);
};

struct SynthCorpus {
  std::vector<RawRelease> releases;
  SynthManifest manifest;
  std::vector<geojson::NamedShape> neighborhoods;
  std::vector<geojson::NamedShape> districts;
  std::vector<geojson::NamedShape> boroughs;
  /// Ground truth: block key -> region name per region set.
  std::map<std::string, std::string> block_neighborhood;
  std::map<std::string, std::string> block_district;
};

/// Deterministic in (params, seed). Records are emitted in BBL order.
SynthCorpus generate_synthetic(const SynthParams& params, std::uint64_t seed);

/// Writes release files, manifest.json, schema.json, renames.csv and
/// regions/{neighborhoods,districts,boroughs}.geojson under `dir`.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace chronicle
