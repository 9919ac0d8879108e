#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chronicle/engine.hpp"
#include "chronicle/oracle.hpp"
#include "chronicle/protocol.hpp"
#include "json.hpp"

namespace chronicle {

/// One benchmark entry: {"name":..,"level":..,"budget_ms":..,"query":{..}}
/// where query is an /api/query body.
struct BenchQuery {
  std::string name;
  std::string level;
  double budget_ms = 500;
  nlohmann::json query;
};

/// Throws LoadError on unreadable files and ValidationError on non-positive
/// budgets or entries without a query.
std::vector<BenchQuery> load_bench_queries(const std::filesystem::path& path);
std::vector<BenchQuery> parse_bench_queries(const nlohmann::json& doc);

/// Aggregate and matrix queries at the city, borough, region and block
/// levels of the largest borough, with budgets 500/500/100/50 ms.
std::vector<BenchQuery> default_bench_queries(const Engine& engine);

struct BenchResult {
  std::string name;
  std::string level;
  double budget_ms = 0;
  double mean_ms = 0;
  double min_ms = 0;
  double max_ms = 0;
  std::size_t trials = 0;
  bool within_budget() const noexcept { return mean_ms < budget_ms; }
};

/// Runs every query `trials` times against the current snapshot. With
/// workers > 1 each trial issues the query from every worker at once and the
/// per-call latencies are averaged.
std::vector<BenchResult> run_bench(const Engine& engine, const std::vector<BenchQuery>& queries,
                                   std::size_t trials = 10, unsigned workers = 1);

std::string bench_table(const std::vector<BenchResult>& results);
std::string bench_csv(const std::vector<BenchResult>& results);

struct MemoryReport {
  std::size_t resident_bytes = 0;
  std::size_t preprocessed_bytes = 0;
  double factor() const noexcept {
    return preprocessed_bytes ? static_cast<double>(resident_bytes) / static_cast<double>(preprocessed_bytes) : 0.0;
  }
};

/// Resident store plus all four trees against the snapshot size.
MemoryReport memory_report(const Engine& engine, std::size_t snapshot_bytes);

/// The oracle's answer to an aggregate, matrix, series, histogram or
/// geometries request, in the same JSON shape `execute` produces (the
/// geometries answer lists feature names only).
nlohmann::json oracle_answer(const NaiveOracle& oracle, const Store& store, const QueryRequest& request,
                             const FilterExpr* filter);

/// First difference between an engine answer and an oracle answer, or
/// nullopt. Numbers compare exactly for count/min/max and within `rel_tol`
/// relative error otherwise.
std::optional<std::string> compare_answers(const nlohmann::json& engine, const nlohmann::json& oracle,
                                           AggregateFn fn, double rel_tol = 1e-9);

}  // namespace chronicle
