#include "chronicle/protocol.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace chronicle;
using nlohmann::json;

TEST_CASE("query bodies parse with defaults") {
  const QueryRequest q = parse_query(json::parse(R"({"type":"aggregate","attribute":"LOTAREA"})"));
  CHECK(q.path == std::vector<std::string>{"NYC"});
  CHECK(q.fn == AggregateFn::Sum);
  CHECK_FALSE(q.release.has_value());
  CHECK_FALSE(q.has_regions);
  const QueryRequest m = parse_query(json::parse(
      R"({"type":"matrix","path":["NYC","Bronx"],"attribute":"LOTAREA","fn":"avg","mode":"delta","delta":"absolute",
          "base":"2003.1","sort":{"by":"release","release":2004},"regions":"community-district","skip_blocks":true})"));
  CHECK(m.mode == MatrixMode::Delta);
  CHECK(m.delta == DeltaKind::Absolute);
  CHECK(*m.base == ReleaseId{2003, 1});
  CHECK(*m.sort_release == ReleaseId{2004, 1});
  CHECK(m.tree.regions == RegionKind::CommunityDistrict);
  CHECK(m.tree.skip_blocks);
  CHECK(m.has_regions);
  CHECK_FALSE(parse_query(json::parse(R"({"type":"matrix","attribute":"A","sort":"name"})")).sort_release);
}

TEST_CASE("malformed query bodies") {
  CHECK_THROWS_AS(parse_query(json::array()), BadRequest);
  CHECK_THROWS_AS(parse_query(json::parse(R"({"attribute":"A"})")), BadRequest);
  CHECK_THROWS_AS(parse_query(json::parse(R"({"type":"aggregate"})")), BadRequest);
  CHECK_THROWS_AS(parse_query(json::parse(R"({"type":"aggregate","attribute":3})")), BadRequest);
  CHECK_THROWS_AS(parse_query(json::parse(R"({"type":"aggregate","attribute":"A","path":[]})")), BadRequest);
  CHECK_THROWS_AS(parse_query(json::parse(R"({"type":"aggregate","attribute":"A","bins":0})")), BadRequest);
  CHECK_THROWS_AS(parse_query(json::parse(R"({"type":"aggregate","attribute":"A","fn":"median"})")), ValidationError);
  CHECK_THROWS_AS(parse_query(json::parse(R"({"type":"aggregate","attribute":"A","release":"soon"})")),
                  InvalidRelease);
  CHECK_NOTHROW(parse_query(json::parse(R"({"type":"geometries"})")));
}

TEST_CASE("execute answers every query type and is byte-stable") {
  const auto& corpus = fixture::shared_corpus();
  Engine engine(corpus.store);
  const auto snap = engine.current();
  const std::string borough = engine.indexes().tree({}).path_of(engine.indexes().tree({}).children_of(0)[0])[1];
  const json matrix = execute(*snap, json{{"type", "matrix"}, {"path", {"NYC", borough}}, {"attribute", "LOTAREA"}});
  CHECK(matrix["matrix"]["columns"].size() == corpus.store->release_count());
  CHECK(matrix["matrix"]["cells"].size() == matrix["matrix"]["rows"].size());
  CHECK(matrix["snapshot"] == 0);
  const json again = execute(*snap, json{{"type", "matrix"}, {"path", {"NYC", borough}}, {"attribute", "LOTAREA"}});
  CHECK(matrix.dump() == again.dump());

  const json agg = execute(*snap, json{{"type", "aggregate"}, {"attribute", "BBL"}, {"fn", "count"}});
  CHECK(agg["release"] == corpus.store->timeline.back().to_string());
  CHECK(agg["value"].get<double>() == static_cast<double>(corpus.store->lots_in_release(corpus.store->release_count() - 1)));

  const json geo = execute(*snap, json{{"type", "geometries"}});
  REQUIRE(geo["features"].size() == corpus.store->boroughs.size());
  const json& polys = geo["features"][0]["polygons"];
  CHECK(polys[0][0].size() % 2 == 0);
  CHECK(polys[0][0][0].is_number());

  const json hist = execute(*snap, json{{"type", "histogram"}, {"attribute", "LOTAREA"}, {"bins", 4}});
  CHECK(hist["counts"].size() == 4);
  CHECK(hist["edges"].size() == 5);

  const json s = execute(*snap, json{{"type", "series"}, {"attribute", "LOTAREA"}, {"rows", {borough}}});
  CHECK(s["series"][0]["mode"] == "delta");
  CHECK(s["series"][0]["values"][0].is_null());

  CHECK_THROWS_AS(execute(*snap, json{{"type", "pie"}, {"attribute", "LOTAREA"}}), BadRequest);
  CHECK_THROWS_AS(execute(*snap, json{{"type", "aggregate"}, {"attribute", "LOTAREA"}, {"release", "1990.1"}}),
                  InvalidRelease);
  CHECK_THROWS_AS(execute(*snap, json{{"type", "aggregate"}, {"attribute", "LOTAREA"}, {"path", {"NYC", "Gotham"}}}),
                  NotFound);
}

TEST_CASE("meta lists timeline, attributes, region kinds and boroughs") {
  const auto& corpus = fixture::shared_corpus();
  Engine engine(corpus.store);
  const json m = meta_json(engine);
  CHECK(m["timeline"].size() == corpus.store->release_count());
  CHECK(m["region_kinds"] == json{"neighborhood", "community-district"});
  CHECK(m["boroughs"].size() == corpus.store->boroughs.size());
  bool has_lotarea = false, has_bbl = false;
  for (const auto& a : m["attributes"]) {
    has_lotarea = has_lotarea || a["name"] == "LOTAREA";
    has_bbl = has_bbl || a["name"] == "BBL";
  }
  CHECK(has_lotarea);
  CHECK(has_bbl);
  CHECK(m["filter"].is_null());
}
