#include "chronicle/bench.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace chronicle;
using nlohmann::json;

TEST_CASE("bench query files are validated") {
  const auto ok = parse_bench_queries(json::parse(
      R"([{"name":"q","level":"city","budget_ms":20,"query":{"type":"aggregate","attribute":"LOTAREA"}}])"));
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].budget_ms == 20);
  CHECK_THROWS_AS(parse_bench_queries(json::object()), ValidationError);
  CHECK_THROWS_AS(parse_bench_queries(json::parse(R"([{"name":"q"}])")), ValidationError);
  CHECK_THROWS_AS(parse_bench_queries(json::parse(R"([{"name":"q","budget_ms":0,"query":{}}])")), ValidationError);
  CHECK_THROWS_AS(load_bench_queries("/nonexistent/q.json"), LoadError);
}

TEST_CASE("default queries cover four levels and all run") {
  Engine engine(fixture::shared_corpus().store);
  const auto queries = default_bench_queries(engine);
  CHECK(queries.size() == 8);
  for (const auto& q : queries) CHECK_NOTHROW(execute(*engine.current(), q.query));
  const auto results = run_bench(engine, queries, 3, 2);
  REQUIRE(results.size() == queries.size());
  for (const auto& r : results) {
    CHECK(r.trials == 3);
    CHECK(r.min_ms <= r.mean_ms);
    CHECK(r.mean_ms <= r.max_ms);
  }
  CHECK(bench_csv(results).rfind("name,level,trials,mean_ms,min_ms,max_ms,budget_ms,within_budget\n", 0) == 0);
  CHECK(bench_table(results).find(queries[0].name) != std::string::npos);
}

TEST_CASE("memory report counts resident bytes against the snapshot size") {
  Engine engine(fixture::shared_corpus().store);
  const MemoryReport m = memory_report(engine, 1000);
  CHECK(m.resident_bytes >= engine.indexes().resident_bytes());
  CHECK(m.factor() == doctest::Approx(static_cast<double>(m.resident_bytes) / 1000));
  CHECK(MemoryReport{}.factor() == 0);
}

TEST_CASE("compare_answers reports the first difference") {
  const json a = json::parse(R"({"value":10,"matrix":{"rows":["a","b"],"cells":[[1,null],[2,3]]}})");
  CHECK_FALSE(compare_answers(a, a, AggregateFn::Count));
  json b = a;
  b["matrix"]["cells"][1][1] = 3.0000000001;
  CHECK(compare_answers(a, b, AggregateFn::Count));
  CHECK_FALSE(compare_answers(a, b, AggregateFn::Sum));
  b["matrix"]["cells"][0][1] = 1;
  CHECK(compare_answers(a, b, AggregateFn::Sum));
  b = a;
  b["matrix"]["rows"][1] = "c";
  CHECK(compare_answers(a, b, AggregateFn::Sum));
  // Keys present only in the engine answer are ignored.
  json extra = a;
  extra["snapshot"] = 4;
  CHECK_FALSE(compare_answers(extra, a, AggregateFn::Sum));
}
