#pragma once

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "chronicle/ingest.hpp"
#include "chronicle/store.hpp"

namespace chronicle {

/// Inputs of a directory ingest. Unset paths default to the files
/// `write_corpus` lays out under `dir` when they exist: schema.json,
/// renames.csv and regions/{neighborhoods,districts,boroughs}.geojson.
/// A missing schema or rename table falls back to the built-in ones; a
/// missing region file leaves every block unassigned at that level.
struct PipelineOptions {
  std::filesystem::path dir;
  std::optional<std::filesystem::path> schema;
  std::optional<std::filesystem::path> renames;
  std::optional<std::filesystem::path> neighborhoods;
  std::optional<std::filesystem::path> districts;
  std::optional<std::filesystem::path> boroughs;
  DedupOptions dedup;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct PipelineResult {
  Store store;
  std::vector<std::pair<ReleaseId, RejectionReport>> rejects;
  std::size_t records = 0;
};

PipelineResult run_pipeline(const PipelineOptions& options);

/// The cleaned release sequence alone, as the naive oracle consumes it.
struct RawInputs {
  AttributeSchema schema;
  LoadedCorpus corpus;
};
RawInputs load_raw(const PipelineOptions& options);

/// One line per release and reason, then a total.
std::string rejection_table(const std::vector<std::pair<ReleaseId, RejectionReport>>& rejects);

}  // namespace chronicle
