#include "chronicle/pipeline.hpp"

#include <sstream>

namespace chronicle {

namespace {

std::optional<std::filesystem::path> or_default(const std::optional<std::filesystem::path>& given,
                                                const std::filesystem::path& fallback) {
  if (given) return given;
  std::error_code ec;
  if (std::filesystem::is_regular_file(fallback, ec)) return fallback;
  return std::nullopt;
}

std::vector<geojson::NamedShape> shapes_or_empty(const std::optional<std::filesystem::path>& path) {
  return path ? geojson::read_named_collection(*path) : std::vector<geojson::NamedShape>{};
}

}  // namespace

RawInputs load_raw(const PipelineOptions& o) {
  const auto schema_path = or_default(o.schema, o.dir / "schema.json");
  const auto renames_path = or_default(o.renames, o.dir / "renames.csv");
  AttributeSchema schema = schema_path ? load_schema(*schema_path) : default_schema();
  const RenameTable renames = renames_path ? load_rename_table(*renames_path) : default_renames();
  LoadedCorpus corpus = load_directory(o.dir, schema, renames, o.threads);
  return {std::move(schema), std::move(corpus)};
}

PipelineResult run_pipeline(const PipelineOptions& o) {
  o.dedup.validate();
  auto [schema, corpus] = load_raw(o);
  PreprocessOptions pre;
  pre.dedup = o.dedup;
  pre.dedup.threads = o.threads;
  pre.seed = o.seed;
  pre.neighborhoods = shapes_or_empty(or_default(o.neighborhoods, o.dir / "regions" / "neighborhoods.geojson"));
  pre.districts = shapes_or_empty(or_default(o.districts, o.dir / "regions" / "districts.geojson"));
  pre.boroughs = shapes_or_empty(or_default(o.boroughs, o.dir / "regions" / "boroughs.geojson"));

  PipelineResult result{preprocess(corpus.sequence, schema, pre), std::move(corpus.rejects),
                        corpus.sequence.record_count()};
  return result;
}

std::string rejection_table(const std::vector<std::pair<ReleaseId, RejectionReport>>& rejects) {
  std::ostringstream out;
  std::size_t total = 0;
  out << "release,reason,count\n";
  for (const auto& [release, report] : rejects) {
    for (const auto& [reason, n] : report.counts) out << release.to_string() << ',' << reason << ',' << n << '\n';
    total += report.total();
  }
  out << "all,total," << total << '\n';
  return out.str();
}

}  // namespace chronicle
