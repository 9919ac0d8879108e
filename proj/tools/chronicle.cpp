// chronicle: synth, ingest, bench, serve and oracle subcommands.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "chronicle/bench.hpp"
#include "chronicle/pipeline.hpp"
#include "chronicle/protocol.hpp"
#include "chronicle/server.hpp"
#include "chronicle/snapshot.hpp"
#include "chronicle/synth.hpp"

using namespace chronicle;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kBudget = 3;

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

void add_dedup_flags(CLI::App& cmd, PipelineOptions& o) {
  static const std::map<std::string, OverlapRule> rules{{"at-least", OverlapRule::AtLeast},
                                                        {"at-most", OverlapRule::AtMost}};
  static const std::map<std::string, ChainMode> chains{{"representative", ChainMode::Representative},
                                                       {"predecessor", ChainMode::Predecessor}};
  cmd.add_option("--epsilon", o.dedup.epsilon, "overlap threshold in (0,1]")->capture_default_str();
  cmd.add_option("--rule", o.dedup.rule, "at-least | at-most")->transform(CLI::CheckedTransformer(rules));
  cmd.add_option("--chain", o.dedup.chain, "representative | predecessor")->transform(CLI::CheckedTransformer(chains));
  cmd.add_option("--seed", o.seed, "seed for representative-lot choice")->capture_default_str();
  cmd.add_option("--schema", o.schema, "schema JSON (default <dir>/schema.json or built-in)");
  cmd.add_option("--renames", o.renames, "rename table CSV (default <dir>/renames.csv or built-in)");
  cmd.add_option("--neighborhoods", o.neighborhoods, "neighborhood boundaries GeoJSON");
  cmd.add_option("--districts", o.districts, "community district boundaries GeoJSON");
  cmd.add_option("--boroughs", o.boroughs, "borough boundaries GeoJSON");
}

json read_json_arg(const std::string& arg) {
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) return json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw LoadError("cannot open " + arg);
  return json::parse(in);
}


int run_synth(const SynthParams& params, std::uint64_t seed, const std::filesystem::path& out) {
  const SynthCorpus corpus = generate_synthetic(params, seed);
  write_corpus(corpus, out);
  std::cout << "wrote " << corpus.releases.size() << " releases to " << out.string() << '\n'
            << corpus.manifest.to_json().dump(2) << '\n';
  return kOk;
}

int run_ingest(const PipelineOptions& options, const std::filesystem::path& out, const std::string& report_csv) {
  const auto start = std::chrono::steady_clock::now();
  const PipelineResult result = run_pipeline(options);
  const double preprocess_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_snapshot(result.store, out);
  const RedundancyReport report = result.store.redundancy();
  std::cout << "rejections\n" << rejection_table(result.rejects) << '\n'
            << "redundancy\n" << report.table() << '\n'
            << "lots " << result.store.lots.size() << ", records " << result.records << ", releases "
            << result.store.release_count() << '\n'
            << "preprocess " << preprocess_s << " s, snapshot " << std::filesystem::file_size(out) << " bytes at " << out.string()
            << '\n';
  if (!report_csv.empty()) {
    std::ofstream csv(report_csv);
    if (!csv) throw LoadError("cannot write " + report_csv);
    csv << report.csv();
  }
  return kOk;
}

struct BenchArgs {
  std::filesystem::path snapshot;
  std::string queries;
  std::size_t trials = 10;
  unsigned workers = 1;
  std::string csv;
  double max_overhead = 4.0;
  bool oracle_check = false;
  PipelineOptions data;
};

int run_bench_cmd(const BenchArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  auto store = std::make_shared<const Store>(read_snapshot(a.snapshot));
  Engine engine(store, default_threads());
  const MemoryReport memory = memory_report(engine, std::filesystem::file_size(a.snapshot));
  const double load_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto queries = a.queries.empty() ? default_bench_queries(engine) : parse_bench_queries(read_json_arg(a.queries));
  const auto results = run_bench(engine, queries, a.trials, a.workers);
  std::cout << bench_table(results) << '\n'
            << "load+index " << load_s << " s\n"
            << "memory overhead " << memory.factor() << "x (" << memory.resident_bytes << " resident / "
            << memory.preprocessed_bytes << " snapshot bytes, limit " << a.max_overhead << "x)\n";
  if (!a.csv.empty()) {
    std::ofstream csv(a.csv);
    if (!csv) throw LoadError("cannot write " + a.csv);
    csv << bench_csv(results);
  }

  int status = kOk;
  if (a.oracle_check) {
    const RawInputs raw = load_raw(a.data);
    const NaiveOracle oracle(raw.corpus.sequence, *store);
    std::size_t mismatches = 0;
    for (const auto& q : queries) {
      const QueryRequest request = parse_query(q.query);
      const json got = execute(*engine.current(), request);
      const json want = oracle_answer(oracle, *store, request, nullptr);
      if (auto diff = compare_answers(got, want, request.fn)) {
        ++mismatches;
        std::cout << "oracle mismatch in '" << q.name << "': " << *diff << '\n';
      }
    }
    std::cout << "oracle check: " << queries.size() - mismatches << "/" << queries.size() << " match\n";
    if (mismatches) status = kDataError;
  }
  const bool over = std::any_of(results.begin(), results.end(), [](const BenchResult& r) { return !r.within_budget(); });
  if (over || memory.factor() > a.max_overhead) status = status ? status : kBudget;
  return status;
}

struct OracleArgs {
  std::filesystem::path snapshot;
  std::string query;
  std::string filter;
  bool check = false;
  PipelineOptions data;
};

int run_oracle_cmd(const OracleArgs& a) {
  auto store = std::make_shared<const Store>(read_snapshot(a.snapshot));
  const RawInputs raw = load_raw(a.data);
  const NaiveOracle oracle(raw.corpus.sequence, *store);
  const QueryRequest request = parse_query(read_json_arg(a.query));
  std::optional<FilterExpr> filter;
  if (!a.filter.empty()) filter = parse_filter(read_json_arg(a.filter));
  const json want = oracle_answer(oracle, *store, request, filter ? &*filter : nullptr);
  std::cout << want.dump(2) << '\n';
  if (!a.check) return kOk;
  Engine engine(store, default_threads());
  if (filter) engine.apply_filter(*filter);
  const json got = execute(*engine.current(), request);
  if (auto diff = compare_answers(got, want, request.fn)) {
    std::cout << "MISMATCH " << *diff << '\n';
    return kDataError;
  }
  std::cout << "MATCH\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal land-parcel engine"};
  app.require_subcommand(1);

  SynthParams params;
  std::uint64_t synth_seed = 1;
  std::filesystem::path synth_out;
  std::string first_release = params.first_release.to_string();
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--lots", params.lots, "lots in the first release")->capture_default_str();
  synth->add_option("--releases", params.releases, "number of releases")->capture_default_str();
  synth->add_option("--seed", synth_seed, "generator seed")->capture_default_str();
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--first-release", first_release, "first release, e.g. 2002.1")->capture_default_str();
  synth->add_option("--geometry-change", params.geometry_change_prob)->capture_default_str();
  synth->add_option("--categorical-change", params.categorical_change_prob)->capture_default_str();
  synth->add_option("--stable-change", params.stable_change_prob)->capture_default_str();
  synth->add_option("--unstable-change", params.unstable_change_prob)->capture_default_str();
  synth->add_option("--split", params.split_prob)->capture_default_str();
  synth->add_option("--merge", params.merge_prob)->capture_default_str();
  synth->add_option("--jitter", params.jitter_prob)->capture_default_str();
  synth->add_option("--missing", params.missing_prob)->capture_default_str();
  synth->add_option("--boroughs", params.boroughs)->capture_default_str();
  synth->add_option("--lots-per-block", params.lots_per_block)->capture_default_str();

  PipelineOptions ingest_opts;
  ingest_opts.threads = default_threads();
  std::filesystem::path ingest_out;
  std::string report_csv;
  auto* ingest = app.add_subcommand("ingest", "clean, deduplicate and write a snapshot");
  ingest->add_option("dir", ingest_opts.dir, "directory of <year>.<half>.geojsonl files")->required();
  ingest->add_option("--out", ingest_out, "snapshot path")->required();
  ingest->add_option("--threads", ingest_opts.threads)->capture_default_str();
  ingest->add_option("--report-csv", report_csv, "write the redundancy report as CSV");
  add_dedup_flags(*ingest, ingest_opts);

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "query latency and memory overhead");
  bench->add_option("--snapshot", bench_args.snapshot)->required();
  bench->add_option("--queries", bench_args.queries, "bench JSON file (default: built-in queries)");
  bench->add_option("--trials", bench_args.trials)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--workers", bench_args.workers, "parallel query workers")->capture_default_str();
  bench->add_option("--csv", bench_args.csv, "write results as CSV");
  bench->add_option("--max-overhead", bench_args.max_overhead)->capture_default_str();
  auto* check_flag = bench->add_flag("--oracle-check", bench_args.oracle_check, "diff every query against the naive scan");
  bench->add_option("--data", bench_args.data.dir, "release directory for --oracle-check")->needs(check_flag);
  check_flag->needs(bench->get_option("--data"));

  ServerConfig server_config;
  PipelineOptions serve_data;
  std::optional<std::filesystem::path> serve_snapshot;
  std::string serve_static;
  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  serve->add_option("--snapshot", serve_snapshot);
  serve->add_option("--data", serve_data.dir, "ingest this directory at startup instead of a snapshot");
  serve->add_option("--port", server_config.port)->capture_default_str();
  serve->add_option("--host", server_config.host)->capture_default_str();
  serve->add_option("--static", serve_static, "directory of UI assets");
  serve->add_option("--cors-origin", server_config.cors_origin)->capture_default_str();
  serve->add_option("--threads", server_config.threads)->capture_default_str();
  add_dedup_flags(*serve, serve_data);

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "answer a query by naive scan of the raw releases");
  oracle->add_option("--snapshot", oracle_args.snapshot)->required();
  oracle->add_option("--data", oracle_args.data.dir, "release directory")->required();
  oracle->add_option("--query", oracle_args.query, "query JSON or file")->required();
  oracle->add_option("--filter", oracle_args.filter, "filter JSON or file");
  oracle->add_flag("--check", oracle_args.check, "also run the engine and diff");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) {
      params.first_release = ReleaseId::parse(first_release);
      return run_synth(params, synth_seed, synth_out);
    }
    if (*ingest) return run_ingest(ingest_opts, ingest_out, report_csv);
    if (*bench) return run_bench_cmd(bench_args);
    if (*oracle) return run_oracle_cmd(oracle_args);
    if (*serve) {
      server_config.apply_env();
      if (serve_snapshot) server_config.snapshot = serve_snapshot;
      if (!serve_data.dir.empty()) server_config.data = serve_data;
      if (!serve_static.empty()) server_config.static_dir = serve_static;
      return run_server(server_config, [](const std::string& line) { std::cerr << line << std::endl; });
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}
