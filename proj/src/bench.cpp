#include "chronicle/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace chronicle {

using nlohmann::json;

std::vector<BenchQuery> parse_bench_queries(const json& doc) {
  if (!doc.is_array()) throw ValidationError("bench file must hold a JSON array");
  std::vector<BenchQuery> out;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("query") || !item["query"].is_object()) {
      throw ValidationError("bench entry without a query object");
    }
    BenchQuery q;
    q.name = item.value("name", "query " + std::to_string(out.size() + 1));
    q.level = item.value("level", std::string{});
    q.budget_ms = item.value("budget_ms", 500.0);
    if (!(q.budget_ms > 0)) throw ValidationError("budget of '" + q.name + "' must be positive");
    q.query = item["query"];
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<BenchQuery> load_bench_queries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open bench file " + path.string());
  try {
    return parse_bench_queries(json::parse(in));
  } catch (const json::exception& e) {
    throw LoadError("bench file " + path.string() + ": " + e.what());
  }
}

std::vector<BenchQuery> default_bench_queries(const Engine& engine) {
  const auto& tree = engine.indexes().tree({});
  auto largest_child = [&](std::uint32_t node) -> std::optional<std::uint32_t> {
    std::optional<std::uint32_t> best;
    for (std::uint32_t c : tree.children_of(node)) {
      const auto& n = tree.node(c);
      if (!best || n.leaf_end - n.leaf_begin > tree.node(*best).leaf_end - tree.node(*best).leaf_begin) best = c;
    }
    return best;
  };
  std::vector<BenchQuery> out;
  auto add = [&](const std::string& level, double budget, std::uint32_t node) {
    const auto path = tree.path_of(node);
    std::string label = path.back();
    out.push_back({level + " aggregate " + label, level, budget,
                   {{"type", "aggregate"}, {"path", path}, {"attribute", "LOTAREA"}, {"fn", "sum"}}});
    out.push_back({level + " matrix " + label, level, budget,
                   {{"type", "matrix"}, {"path", path}, {"attribute", "ASSESSTOTAL"}, {"fn", "avg"}, {"mode", "delta"}}});
  };
  add("city", 500, tree.root());
  const auto borough = largest_child(tree.root());
  if (!borough) return out;
  add("borough", 500, *borough);
  const auto region = largest_child(*borough);
  if (!region) return out;
  add("region", 100, *region);
  const auto block = largest_child(*region);
  if (block && tree.node(*block).level == Level::Block) add("block", 50, *block);
  return out;
}

std::vector<BenchResult> run_bench(const Engine& engine, const std::vector<BenchQuery>& queries, std::size_t trials,
                                   unsigned workers) {
  using clock = std::chrono::steady_clock;
  std::vector<BenchResult> results;
  workers = std::max(1u, workers);
  for (const auto& q : queries) {
    const QueryRequest request = parse_query(q.query);
    BenchResult res{q.name, q.level, q.budget_ms};
    std::vector<double> samples;
    for (std::size_t t = 0; t < trials; ++t) {
      std::vector<double> lat(workers);
      auto one = [&](unsigned w) {
        const auto snapshot = engine.current();
        const auto start = clock::now();
        const json answer = execute(*snapshot, request);
        lat[w] = std::chrono::duration<double, std::milli>(clock::now() - start).count();
        if (answer.is_null()) lat[w] = -1;
      };
      {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(one, w);
        one(0);
      }
      for (double l : lat) samples.push_back(l);
    }
    res.trials = trials;
    if (!samples.empty()) {
      double sum = 0;
      for (double s : samples) sum += s;
      res.mean_ms = sum / static_cast<double>(samples.size());
      res.min_ms = *std::min_element(samples.begin(), samples.end());
      res.max_ms = *std::max_element(samples.begin(), samples.end());
    }
    results.push_back(std::move(res));
  }
  return results;
}

std::string bench_table(const std::vector<BenchResult>& results) {
  std::ostringstream out;
  out << std::left << std::setw(40) << "query" << std::setw(10) << "level" << std::right << std::setw(12) << "mean_ms"
      << std::setw(12) << "min_ms" << std::setw(12) << "max_ms" << std::setw(12) << "budget_ms" << "  status\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& r : results) {
    out << std::left << std::setw(40) << r.name << std::setw(10) << r.level << std::right << std::setw(12) << r.mean_ms
        << std::setw(12) << r.min_ms << std::setw(12) << r.max_ms << std::setw(12) << r.budget_ms << "  "
        << (r.within_budget() ? "ok" : "OVER") << '\n';
  }
  return out.str();
}

std::string bench_csv(const std::vector<BenchResult>& results) {
  std::ostringstream out;
  out << "name,level,trials,mean_ms,min_ms,max_ms,budget_ms,within_budget\n" << std::setprecision(6);
  for (const auto& r : results) {
    out << '"' << r.name << "\"," << r.level << ',' << r.trials << ',' << r.mean_ms << ',' << r.min_ms << ','
        << r.max_ms << ',' << r.budget_ms << ',' << (r.within_budget() ? "true" : "false") << '\n';
  }
  return out.str();
}

MemoryReport memory_report(const Engine& engine, std::size_t snapshot_bytes) {
  engine.indexes().build_all();
  MemoryReport m;
  m.resident_bytes = engine.indexes().resident_bytes();
  m.preprocessed_bytes = snapshot_bytes;
  return m;
}

namespace {

std::size_t release_arg(const Store& store, const std::optional<ReleaseId>& release) {
  return release ? release_index(store.timeline, *release) : store.timeline.size() - 1;
}

std::vector<Cell> oracle_delta(const std::vector<Cell>& v, DeltaKind kind, std::optional<std::size_t> base) {
  std::vector<Cell> out(v.size());
  for (std::size_t c = 1; c < v.size(); ++c) {
    const std::size_t p = base ? *base : c - 1;
    if ((base && c <= *base) || !v[p] || !v[c]) continue;
    if (kind == DeltaKind::Absolute) {
      out[c] = *v[c] - *v[p];
    } else if (*v[p] != 0) {
      out[c] = (*v[c] - *v[p]) / std::abs(*v[p]);
    }
  }
  return out;
}

json cells(const std::vector<Cell>& v) {
  json a = json::array();
  for (const auto& c : v) a.push_back(cell_json(c));
  return a;
}

}  // namespace

json oracle_answer(const NaiveOracle& oracle, const Store& store, const QueryRequest& q, const FilterExpr* filter) {
  json out{{"type", q.type}, {"path", q.path}};
  if (q.type == "geometries") {
    const std::size_t r = release_arg(store, q.release);
    json features = json::array();
    for (const auto& name : oracle.visible_children(q.path, r, filter, q.tree)) features.push_back({{"name", name}});
    out["release"] = store.timeline[r].to_string();
    out["features"] = features;
    return out;
  }
  out["attribute"] = q.attribute;
  if (q.type == "histogram") {
    const std::size_t r = release_arg(store, q.release);
    const Histogram h = oracle.histogram(q.path, q.attribute, q.bins, r, filter, q.tree);
    out["release"] = store.timeline[r].to_string();
    out["edges"] = h.edges;
    out["counts"] = h.counts;
    return out;
  }
  out["fn"] = to_string(q.fn);
  if (q.type == "aggregate") {
    const std::size_t r = release_arg(store, q.release);
    out["release"] = store.timeline[r].to_string();
    out["value"] = cell_json(oracle.aggregate(q.path, q.attribute, q.fn, r, filter, q.tree));
    return out;
  }
  std::optional<std::size_t> base;
  if (q.base) base = release_index(store.timeline, *q.base);
  auto rows = oracle.matrix_values(q.path, q.attribute, q.fn, filter, q.tree);
  if (q.type == "matrix") {
    std::vector<std::pair<std::string, std::vector<Cell>>> shaped;
    for (auto& [name, values] : rows) {
      shaped.emplace_back(name, q.mode == MatrixMode::Delta ? oracle_delta(values, q.delta, base) : values);
    }
    if (q.sort_release) {
      const std::size_t c = release_index(store.timeline, *q.sort_release);
      std::stable_sort(shaped.begin(), shaped.end(), [&](const auto& a, const auto& b) {
        const Cell &x = a.second[c], &y = b.second[c];
        if (x.has_value() != y.has_value()) return x.has_value();
        if (x && *x != *y) return *x > *y;
        return a.first < b.first;
      });
    }
    json names = json::array(), grid = json::array();
    for (const auto& [name, values] : shaped) {
      names.push_back(name);
      grid.push_back(cells(values));
    }
    out["matrix"] = {{"rows", names}, {"cells", grid}};
    return out;
  }
  if (q.type == "series") {
    json list = json::array();
    const MatrixMode mode = complement(q.mode);
    for (const auto& name : q.rows) {
      auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.first == name; });
      if (it == rows.end()) throw NotFound(q.path.size() + 1, name);
      list.push_back({{"name", name},
                      {"mode", to_string(mode)},
                      {"values", cells(mode == MatrixMode::Delta ? oracle_delta(it->second, q.delta, base) : it->second)}});
    }
    out["series"] = list;
    return out;
  }
  throw BadRequest("unknown query type '" + q.type + "'");
}

namespace {

std::optional<std::string> compare(const json& e, const json& o, bool exact, double tol, const std::string& where) {
  if (o.is_number() && e.is_number()) {
    const double a = e.get<double>(), b = o.get<double>();
    if (exact ? a != b : std::abs(a - b) > tol * std::max({std::abs(a), std::abs(b), 1e-300})) {
      std::ostringstream msg;
      msg << std::setprecision(17) << where << ": engine " << a << " vs oracle " << b;
      return msg.str();
    }
    return std::nullopt;
  }
  if (o.is_object()) {
    if (!e.is_object()) return where + ": engine answer is not an object";
    for (const auto& [key, value] : o.items()) {
      if (!e.contains(key)) return where + ": engine answer lacks '" + key + "'";
      if (auto d = compare(e[key], value, exact, tol, where + "." + key)) return d;
    }
    return std::nullopt;
  }
  if (o.is_array()) {
    if (!e.is_array() || e.size() != o.size()) return where + ": array sizes differ";
    for (std::size_t i = 0; i < o.size(); ++i) {
      if (auto d = compare(e[i], o[i], exact, tol, where + "[" + std::to_string(i) + "]")) return d;
    }
    return std::nullopt;
  }
  if (e != o) return where + ": engine " + e.dump() + " vs oracle " + o.dump();
  return std::nullopt;
}

}  // namespace

std::optional<std::string> compare_answers(const json& engine, const json& oracle, AggregateFn fn, double rel_tol) {
  const bool exact = fn == AggregateFn::Count || fn == AggregateFn::Min || fn == AggregateFn::Max;
  const std::string type = oracle.value("type", "");
  // Histogram edges derive from exact min/max; counts are exact.
  if (type == "histogram") return compare(engine, oracle, true, 0, "answer");
  if (type == "matrix" || type == "series") {
    // Delta cells divide two sums; keep the relative tolerance for them.
    return compare(engine, oracle, exact && engine.contains("matrix") && engine["matrix"].value("mode", "") == "value",
                   rel_tol, "answer");
  }
  return compare(engine, oracle, exact, rel_tol, "answer");
}

}  // namespace chronicle
