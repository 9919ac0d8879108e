#include <fstream>

#include "chronicle/ingest.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace chronicle;

namespace {

std::string feature(const std::string& block, const std::string& lot, const std::string& extra,
                    const std::string& coords = "[[[0,0],[1,0],[1,1],[0,1],[0,0]]]") {
  return R"({"type":"Feature","geometry":{"type":"Polygon","coordinates":)" + coords +
         R"(},"properties":{"borough":1,"block":")" + block + R"(","lot":")" + lot + "\"" + extra + "}}\n";
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("release ids parse and order") {
  CHECK(ReleaseId::parse("2011.2") == ReleaseId{2011, 2});
  CHECK(ReleaseId::parse("2011") == ReleaseId{2011, 1});
  CHECK(ReleaseId{2011, 1} < ReleaseId{2011, 2});
  CHECK(ReleaseId{2011, 2}.to_string() == "2011.2");
  CHECK_THROWS_AS(ReleaseId::parse("2011.3"), InvalidRelease);
  CHECK_THROWS_AS(ReleaseId::parse("soon"), InvalidRelease);
  CHECK(release_from_filename("x/2009.1.geojsonl") == std::optional<ReleaseId>(ReleaseId{2009, 1}));
  CHECK_FALSE(release_from_filename("notes.txt").has_value());
  CHECK(release_filename({2009, 2}) == "2009.2.geojsonl");
}

TEST_CASE("lot ids compose the BBL") {
  const LotId id(3, "01234", "0056");
  CHECK(id.bbl() == "3012340056");
  CHECK(id.block() == "01234");
  CHECK(id.lot() == "0056");
  CHECK(id.block_key() == "301234");
  CHECK(borough_name(3) == "Brooklyn");
  CHECK(borough_name(9) == "Borough 9");
}

TEST_CASE("load_release applies renames and marks missing values invalid") {
  fixture::TempDir dir;
  const auto path = dir.path() / "2010.1.geojsonl";
  write(path, feature("00001", "0001", R"(,"LotArea":"2500","LandUse":"04","BLDGAREA":null)") +
                  feature("00001", "0002", R"(,"LOTAREA":"n/a")") + "not json\n" +
                  R"({"type":"Feature","geometry":null,"properties":{"borough":1,"block":"00002","lot":"0001"}})" "\n" +
                  R"({"type":"Feature","geometry":null,"properties":{"block":"00002"}})" "\n");
  const AttributeSchema schema = default_schema();
  const RawRelease raw = load_release(path, {2010, 1}, schema, default_renames());
  REQUIRE(raw.records.size() == 2);
  const auto lotarea = *schema.find("LOTAREA");
  const auto landuse = *schema.find("LANDUSE");
  const auto bldgarea = *schema.find("BLDGAREA");
  CHECK(raw.records[0].number(schema, lotarea) == 2500);
  CHECK(raw.records[0].text(schema, landuse) == "04");
  CHECK(is_invalid(raw.records[0].number(schema, bldgarea)));
  CHECK(is_invalid(raw.records[1].number(schema, lotarea)));
  CHECK(raw.records[1].text(schema, landuse).empty());
  CHECK(raw.load_rejects.counts.at("unparseable feature") == 1);
  CHECK(raw.load_rejects.counts.at("missing geometry") == 1);
  CHECK(raw.load_rejects.counts.at("missing id") == 1);
  CHECK(raw.load_rejects.total() == 3);
}

TEST_CASE("clean_records drops invalid shapes and duplicates and is idempotent") {
  fixture::TempDir dir;
  const auto path = dir.path() / "2010.1.geojsonl";
  write(path, feature("00001", "0001", "") + feature("00001", "0001", "") +
                  feature("00001", "0002", "", "[[[0,0],[1,1],[2,2],[0,0]]]") +
                  feature("00001", "0003", "", "[[[0,0],[0,1],[1,1],[1,0],[0,0]]]"));
  auto [clean, report] = clean_records(load_release(path, {2010, 1}, default_schema()));
  CHECK(clean.records.size() == 2);
  CHECK(report.counts.at("duplicate id") == 1);
  CHECK(report.total() == 2);
  // Clockwise input comes out counter-clockwise.
  CHECK(signed_area(clean.records[1].shape.parts[0].outer) > 0);
  const auto before = clean.records;
  auto [again, report2] = clean_records(std::move(clean));
  CHECK(report2.total() == 0);
  REQUIRE(again.records.size() == before.size());
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(again.records[i].shape == before[i].shape);
}

TEST_CASE("consolidate aligns lots across releases") {
  const auto& corpus = fixture::shared_corpus();
  const ReleaseSequence& seq = corpus.sequence;
  CHECK(seq.release_count() == corpus.synth.releases.size());
  CHECK(std::is_sorted(seq.lots().begin(), seq.lots().end()));
  std::size_t records = 0;
  for (std::size_t r = 0; r < seq.release_count(); ++r) {
    records += seq.releases()[r].records.size();
    for (const auto& rec : seq.releases()[r].records) {
      const auto row = seq.lot_row(rec.id.bbl());
      REQUIRE(row);
      CHECK(seq.record(*row, r) == &rec);
    }
  }
  CHECK(seq.record_count() == records);

  auto releases = corpus.synth.releases;
  std::swap(releases[0], releases[1]);
  CHECK_THROWS_AS(consolidate(releases), DataError);
}

TEST_CASE("load_directory rejects empty directories and reads release files") {
  fixture::TempDir dir;
  CHECK_THROWS_AS(load_directory(dir.path(), default_schema(), {}), LoadError);
  CHECK_THROWS_AS(load_directory(dir.path() / "missing", default_schema(), {}), LoadError);
  write(dir.path() / "2001.1.geojsonl", feature("00001", "0001", ""));
  write(dir.path() / "2001.2.geojsonl", feature("00001", "0001", "") + feature("00001", "0001", ""));
  write(dir.path() / "README", "ignored");
  const LoadedCorpus c = load_directory(dir.path(), default_schema(), {}, 2);
  CHECK(c.sequence.release_count() == 2);
  CHECK(c.sequence.lots().size() == 1);
  REQUIRE(c.rejects.size() == 2);
  CHECK(c.rejects[1].second.counts.at("duplicate id") == 1);
}

TEST_CASE("rename tables round trip") {
  fixture::TempDir dir;
  RenameTable t;
  t.add("LotArea", "LOTAREA");
  save_rename_table(t, dir.path() / "r.csv");
  const RenameTable back = load_rename_table(dir.path() / "r.csv");
  CHECK(back.canonical("LotArea") == "LOTAREA");
  CHECK(back.canonical("Other") == "Other");
}

TEST_CASE("schema files round trip") {
  fixture::TempDir dir;
  const AttributeSchema s = default_schema();
  save_schema(s, dir.path() / "s.json");
  const AttributeSchema back = load_schema(dir.path() / "s.json");
  CHECK(back == s);
  for (const auto& a : s.attributes()) CHECK(back.def(a.name)->kind == a.kind);
}
