#include "chronicle/synth.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace chronicle;

TEST_CASE("the generator is deterministic in its seed") {
  const auto params = fixture::small_params(150, 4);
  const SynthCorpus a = generate_synthetic(params, 5);
  const SynthCorpus b = generate_synthetic(params, 5);
  const SynthCorpus c = generate_synthetic(params, 6);
  CHECK(a.manifest.to_json() == b.manifest.to_json());
  REQUIRE(a.releases.size() == b.releases.size());
  for (std::size_t r = 0; r < a.releases.size(); ++r) {
    REQUIRE(a.releases[r].records.size() == b.releases[r].records.size());
    for (std::size_t i = 0; i < a.releases[r].records.size(); ++i) {
      CHECK(a.releases[r].records[i].id == b.releases[r].records[i].id);
      CHECK(a.releases[r].records[i].shape == b.releases[r].records[i].shape);
    }
  }
  bool differs = false;
  for (std::size_t r = 0; r < a.releases.size() && !differs; ++r) {
    differs = a.releases[r].records.size() != c.releases[r].records.size() ||
              !(a.releases[r].records[0].shape == c.releases[r].records[0].shape) ||
              a.releases[r].records[0].numeric != c.releases[r].records[0].numeric;
  }
  CHECK(differs);
}

TEST_CASE("generator parameters are validated") {
  SynthParams p = fixture::small_params();
  p.lots = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  CHECK_THROWS_AS(generate_synthetic(p, 1), ValidationError);
  p = fixture::small_params();
  p.releases = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = fixture::small_params();
  p.geometry_change_prob = 1.5;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("releases are sorted, valid and within the manifest counts") {
  const auto& corpus = fixture::shared_corpus();
  const SynthCorpus& s = corpus.synth;
  REQUIRE(s.manifest.lots_per_release.size() == s.releases.size());
  for (std::size_t r = 0; r < s.releases.size(); ++r) {
    const auto& recs = s.releases[r].records;
    CHECK(recs.size() == s.manifest.lots_per_release[r]);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK_FALSE(validate(recs[i].shape).has_value());
      if (i) CHECK(recs[i - 1].id < recs[i].id);
    }
    if (r) CHECK(s.releases[r - 1].release < s.releases[r].release);
  }
  CHECK(s.manifest.geometry_changes <= s.manifest.continuing_slots);
}

TEST_CASE("manifest JSON round trips") {
  const auto& m = fixture::shared_corpus().synth.manifest;
  const SynthManifest back = SynthManifest::from_json(m.to_json());
  CHECK(back.to_json() == m.to_json());
}

TEST_CASE("written corpora load back identically") {
  const auto params = fixture::small_params(100, 3);
  const SynthCorpus s = generate_synthetic(params, 9);
  fixture::TempDir dir;
  write_corpus(s, dir.path());
  CHECK(std::filesystem::exists(dir.path() / "manifest.json"));
  CHECK(std::filesystem::exists(dir.path() / "regions" / "neighborhoods.geojson"));
  const AttributeSchema schema = load_schema(dir.path() / "schema.json");
  const LoadedCorpus loaded = load_directory(dir.path(), schema, load_rename_table(dir.path() / "renames.csv"));
  REQUIRE(loaded.sequence.release_count() == s.releases.size());
  for (std::size_t r = 0; r < s.releases.size(); ++r) {
    const auto& a = s.releases[r].records;
    const auto& b = loaded.sequence.releases()[r].records;
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].id == b[i].id);
      CHECK(overlap_ratio(a[i].shape, b[i].shape) == doctest::Approx(1.0));
      CHECK(a[i].categorical == b[i].categorical);
      for (std::size_t k = 0; k < a[i].numeric.size(); ++k) {
        CHECK((a[i].numeric[k] == b[i].numeric[k] || (is_invalid(a[i].numeric[k]) && is_invalid(b[i].numeric[k]))));
      }
    }
  }
}
