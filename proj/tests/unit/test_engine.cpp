#include <atomic>
#include <random>
#include <thread>

#include "chronicle/engine.hpp"
#include "chronicle/oracle.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace chronicle;

TEST_CASE("filters publish new snapshots and clearing restores the unfiltered one") {
  const auto& corpus = fixture::shared_corpus();
  Engine engine(corpus.store);
  CHECK(engine.current()->id() == 0);
  CHECK(engine.current() == engine.unfiltered());
  const auto id = engine.apply_filter(FilterExpr::leaf("LOTAREA", FilterOp::Gt, {1000.0}));
  CHECK(id > 0);
  CHECK(engine.current()->id() == id);
  CHECK(engine.current()->filter().has_value());
  CHECK(engine.apply_filter(FilterExpr::leaf("LOTAREA", FilterOp::Gt, {1.0})) > id);
  CHECK(engine.clear_filter() == 0);
  CHECK(engine.current() == engine.unfiltered());
  // Invalid expressions are rejected before anything is published.
  const auto before = engine.current();
  CHECK_THROWS_AS(engine.apply_filter(FilterExpr::leaf("NOPE", FilterOp::Gt, {1.0})), ValidationError);
  CHECK(engine.current() == before);
}

TEST_CASE("a tautology leaves counts unchanged") {
  const auto& corpus = fixture::shared_corpus();
  Engine engine(corpus.store);
  const AttributeRef& bbl = engine.catalog().at(kBblAttribute);
  auto total = [&](std::size_t r) {
    const auto ctx = engine.current()->context({});
    return aggregate(ctx, ctx.tree.root(), bbl, AggregateFn::Count, r);
  };
  const auto before = total(0);
  engine.apply_filter(FilterExpr::any({FilterExpr::leaf("LOTAREA", FilterOp::Invalid),
                                       FilterExpr::negate(FilterExpr::leaf("LOTAREA", FilterOp::Invalid))}));
  CHECK(total(0) == before);
}

TEST_CASE("readers see the old or the new snapshot during swaps, never a mix") {
  const auto& corpus = fixture::shared_corpus();
  Engine engine(corpus.store, 2);
  const NaiveOracle oracle(corpus.sequence, *corpus.store);
  const FilterExpr filter = FilterExpr::leaf("LOTAREA", FilterOp::Gt, {1500.0});
  const std::size_t r = corpus.store->release_count() - 1;
  const double old_total = static_cast<double>(oracle.lot_count(r, nullptr));
  const double new_total = static_cast<double>(oracle.lot_count(r, &filter));
  REQUIRE(old_total != new_total);

  std::atomic<bool> done{false};
  std::atomic<std::size_t> reads{0}, mixed{0};
  {
    std::vector<std::jthread> readers;
    for (int t = 0; t < 4; ++t) {
      readers.emplace_back([&] {
        const AttributeRef& bbl = engine.catalog().at(kBblAttribute);
        while (!done) {
          const auto snap = engine.current();
          const auto ctx = snap->context({});
          double sum = 0;
          // Sum over boroughs, so a mixed view would show up as a wrong total.
          for (auto b : ctx.tree.children_of(ctx.tree.root())) {
            sum += aggregate(ctx, b, bbl, AggregateFn::Count, r).value_or(0);
          }
          if (sum != old_total && sum != new_total) ++mixed;
          ++reads;
        }
      });
    }
    for (int i = 0; i < 20; ++i) {
      if (i % 2 == 0) {
        engine.apply_filter(filter);
      } else {
        engine.clear_filter();
      }
    }
    done = true;
  }
  CHECK(reads > 0);
  CHECK(mixed == 0);
}
