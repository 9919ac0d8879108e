#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CHRONICLE_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run("").status == 1);
  CHECK(run("frobnicate").status == 1);
  CHECK(run("synth").status == 1);
  fixture::TempDir dir;
  CHECK(run("synth --lots 0 --out " + dir.path().string()).status == 1);
  CHECK(run("bench --snapshot x --oracle-check").status == 1);
  CHECK(run("--help").status == 0);
}

TEST_CASE("data errors exit 2") {
  fixture::TempDir dir;
  CHECK(run("ingest " + dir.path().string() + " --out " + (dir.path() / "s.snap").string()).status == 2);
  CHECK(run("bench --snapshot " + (dir.path() / "missing.snap").string()).status == 2);
}

TEST_CASE("synth, ingest, bench and oracle end to end") {
  fixture::TempDir dir;
  const auto data = dir.path() / "data";
  const auto snap = dir.path() / "s.snap";
  const Run synth = run("synth --lots 400 --releases 4 --seed 5 --out " + data.string());
  REQUIRE(synth.status == 0);

  const Run ingest = run("ingest " + data.string() + " --out " + snap.string() + " --report-csv " +
                         (dir.path() / "r.csv").string());
  REQUIRE(ingest.status == 0);
  CHECK(ingest.out.find("geometry") != std::string::npos);
  CHECK(slurp(dir.path() / "r.csv").rfind("category,", 0) == 0);

  // Re-ingesting with another thread count writes the same bytes.
  const auto snap2 = dir.path() / "s2.snap";
  REQUIRE(run("ingest " + data.string() + " --threads 1 --out " + snap2.string()).status == 0);
  CHECK(slurp(snap) == slurp(snap2));

  const Run bench = run("bench --snapshot " + snap.string() + " --trials 2 --csv " + (dir.path() / "b.csv").string() +
                        " --oracle-check --data " + data.string());
  CHECK(bench.status == 0);
  CHECK(bench.out.find("MISMATCH") == std::string::npos);
  CHECK(slurp(dir.path() / "b.csv").rfind("name,level", 0) == 0);

  const Run oracle = run("oracle --snapshot " + snap.string() + " --data " + data.string() +
                         " --check --query '{\"type\":\"matrix\",\"attribute\":\"LOTAREA\",\"fn\":\"avg\"}'" +
                         " --filter '{\"attribute\":\"LOTAREA\",\"op\":\">\",\"value\":1000}'");
  CHECK(oracle.status == 0);
  CHECK(oracle.out.find("MATCH") != std::string::npos);
  CHECK(oracle.out.find("MISMATCH") == std::string::npos);
  CHECK(run("oracle --snapshot " + snap.string() + " --data " + data.string() +
            " --query '{\"type\":\"aggregate\",\"attribute\":\"NOPE\"}'")
            .status == 2);

  SUBCASE("budget violations exit 3") {
    std::ofstream(dir.path() / "q.json")
        << R"([{"name":"tiny","level":"city","budget_ms":1e-9,"query":{"type":"matrix","attribute":"LOTAREA"}}])";
    CHECK(run("bench --snapshot " + snap.string() + " --trials 1 --queries " + (dir.path() / "q.json").string())
              .status == 3);
    CHECK(run("bench --snapshot " + snap.string() + " --trials 1 --max-overhead 0.01").status == 3);
  }
}
