#include <thread>

#include "chronicle/protocol.hpp"
#include "chronicle/server.hpp"
#include "chronicle/snapshot.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "httplib.h"

using namespace chronicle;
using nlohmann::json;

namespace {

std::shared_ptr<Engine> make_engine() { return std::make_shared<Engine>(fixture::shared_corpus().store); }

json body_of(const ApiResponse& r) { return json::parse(r.body); }

double lot_count(Api& api) {
  return body_of(api.handle("POST", "/api/query", R"({"type":"aggregate","attribute":"BBL","fn":"count"})"))["value"]
      .get<double>();
}

}  // namespace

TEST_CASE("endpoints answer 503 until the engine is attached") {
  Api api;
  CHECK(api.handle("GET", "/api/meta", "").status == 503);
  CHECK(api.handle("POST", "/api/query", "{}").status == 503);
  api.fail("boom");
  CHECK(body_of(api.handle("GET", "/api/meta", ""))["message"].get<std::string>().find("boom") != std::string::npos);
  api.attach(make_engine());
  CHECK(api.handle("GET", "/api/meta", "").status == 200);
}

TEST_CASE("status codes") {
  Api api(make_engine());
  CHECK(api.handle("GET", "/api/nothing", "").status == 404);
  CHECK(api.handle("PUT", "/api/meta", "").status == 405);
  CHECK(api.handle("POST", "/api/query", "").status == 400);
  CHECK(api.handle("POST", "/api/query", "{not json").status == 400);
  CHECK(api.handle("POST", "/api/query", R"({"attribute":"LOTAREA"})").status == 400);
  const ApiResponse bad_path =
      api.handle("POST", "/api/query", R"({"type":"aggregate","attribute":"LOTAREA","path":["NYC","Gotham"]})");
  CHECK(bad_path.status == 404);
  CHECK(body_of(bad_path)["depth"] == 2);
  const ApiResponse bad_attr = api.handle("POST", "/api/query", R"({"type":"aggregate","attribute":"HEIGHT"})");
  CHECK(bad_attr.status == 422);
  CHECK(body_of(bad_attr)["attribute"] == "HEIGHT");
  CHECK(api.handle("POST", "/api/query", R"({"type":"aggregate","attribute":"LANDUSE","fn":"sum"})").status == 422);
  CHECK(api.handle("POST", "/api/query", R"({"type":"aggregate","attribute":"LOTAREA","release":"1900.1"})").status ==
        422);
  CHECK(api.handle("POST", "/api/filter", R"({"attribute":"NOPE","op":">","value":1})").status == 422);
  CHECK(api.handle("POST", "/api/filter", R"({"attribute":"LOTAREA","op":"??","value":1})").status == 422);
}

TEST_CASE("filter set then delete restores counts") {
  Api api(make_engine());
  const double before = lot_count(api);
  const ApiResponse set = api.handle("POST", "/api/filter", R"({"attribute":"LOTAREA","op":">","value":1500})");
  CHECK(set.status == 202);
  CHECK(body_of(set)["snapshot"].get<int>() > 0);
  const double during = lot_count(api);
  CHECK(during < before);
  CHECK(body_of(api.handle("GET", "/api/meta", ""))["filter"]["attribute"] == "LOTAREA");
  CHECK(api.handle("DELETE", "/api/filter", "").status == 202);
  CHECK(lot_count(api) == before);
}

TEST_CASE("session defaults apply to queries that omit tree options") {
  Api api(make_engine());
  const ApiResponse set = api.handle("POST", "/api/filter", R"({"filter":null,"regions":"community-district"})");
  CHECK(set.status == 202);
  CHECK(api.session().regions == RegionKind::CommunityDistrict);
  const auto& store = *fixture::shared_corpus().store;
  const std::string borough = store.boroughs[0].name;
  const json m = body_of(api.handle("POST", "/api/query",
                                    json{{"type", "matrix"}, {"path", {"NYC", borough}}, {"attribute", "LOTAREA"}}.dump()));
  const auto& districts = store.level(RegionKind::CommunityDistrict).names;
  for (const auto& row : m["matrix"]["rows"]) {
    CHECK(std::find(districts.begin(), districts.end(), row.get<std::string>()) != districts.end());
  }
  CHECK(body_of(api.handle("GET", "/api/meta", ""))["session"]["regions"] == "community-district");
}

TEST_CASE("a block's geometry response has one feature per lot") {
  Api api(make_engine());
  const auto& tree = api.engine()->indexes().tree({});
  std::uint32_t node = tree.root();
  while (tree.node(node).level != Level::Block) node = tree.children_of(node)[0];
  const std::string release = fixture::shared_corpus().store->timeline.back().to_string();
  const json g = body_of(api.handle("POST", "/api/query",
                                    json{{"type", "geometries"}, {"path", tree.path_of(node)}, {"release", release}}.dump()));
  std::size_t lots = 0;
  for (auto c : tree.children_of(node)) lots += tree.exists(c, fixture::shared_corpus().store->release_count() - 1);
  CHECK(g["features"].size() == lots);
}

TEST_CASE("loopback HTTP server with CORS") {
  Api api(make_engine());
  ServerConfig config;
  config.snapshot = "unused";
  config.port = 0;
  HttpServer server(api, config);
  const int port = server.bind();
  std::jthread loop([&] { server.listen(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  const auto meta = client.Get("/api/meta", {{"X-Chronicle-Session", "abc"}});
  REQUIRE(meta);
  CHECK(meta->status == 200);
  CHECK(meta->get_header_value("Access-Control-Allow-Origin") == "*");
  CHECK(json::parse(meta->body)["timeline"].size() == fixture::shared_corpus().store->release_count());

  const auto q = client.Post("/api/query", R"({"type":"aggregate","attribute":"BBL","fn":"count"})", "application/json");
  REQUIRE(q);
  CHECK(q->status == 200);
  const auto q2 = client.Post("/api/query", R"({"type":"aggregate","attribute":"BBL","fn":"count"})", "application/json");
  CHECK(q->body == q2->body);

  const auto f = client.Post("/api/filter", R"({"attribute":"LOTAREA","op":">","value":1500})", "application/json");
  REQUIRE(f);
  CHECK(f->status == 202);
  const auto d = client.Delete("/api/filter");
  REQUIRE(d);
  CHECK(d->status == 202);
  const auto opt = client.Options("/api/query");
  REQUIRE(opt);
  CHECK(opt->status == 204);
  CHECK(opt->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);
  server.stop();
}

TEST_CASE("server config validation and store loading") {
  ServerConfig c;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.snapshot = "x.snap";
  c.data.emplace();
  c.data->dir = "d";
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.data.reset();
  c.port = 70000;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.port = 1;
  CHECK_THROWS_AS(load_store(c), LoadError);

  fixture::TempDir dir;
  write_snapshot(*fixture::shared_corpus().store, dir.path() / "s.snap");
  c.snapshot = dir.path() / "s.snap";
  CHECK(load_store(c)->lots.size() == fixture::shared_corpus().store->lots.size());
}

TEST_CASE("run_server reports a missing snapshot and stops") {
  ServerConfig c;
  c.snapshot = "/nonexistent/s.snap";
  c.port = 0;
  std::vector<std::string> lines;
  const int status = run_server(c, [&](const std::string& l) { lines.push_back(l); });
  CHECK(status == 2);
  CHECK(lines.back().find("load failed") != std::string::npos);
}
