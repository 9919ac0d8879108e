#include <random>

#include "chronicle/engine.hpp"
#include "chronicle/query.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "random_queries.hpp"

using namespace chronicle;

namespace {

std::vector<TreeOptions> all_trees() {
  std::vector<TreeOptions> out;
  for (RegionKind k : kAllRegionKinds) {
    for (bool skip : {false, true}) out.push_back({k, skip});
  }
  return out;
}

double count_of(const QueryContext& ctx, std::uint32_t node, const AttributeRef& bbl, std::size_t r) {
  return aggregate(ctx, node, bbl, AggregateFn::Count, r).value_or(0);
}

}  // namespace

TEST_CASE("tree shape: levels, sorted children and contiguous leaves") {
  const auto& corpus = fixture::shared_corpus();
  const IndexSet indexes(corpus.store);
  for (const TreeOptions& o : all_trees()) {
    const SpatioTemporalIndex& tree = indexes.tree(o);
    CHECK(tree.name(tree.root()) == kCityName);
    for (std::uint32_t id = 0; id < tree.node_count(); ++id) {
      const IndexNode& n = tree.node(id);
      const auto kids = tree.children_of(id);
      std::uint32_t leaf = n.leaf_begin;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        const IndexNode& c = tree.node(kids[i]);
        CHECK(c.parent == id);
        CHECK(c.leaf_begin == leaf);
        leaf = c.leaf_end;
        if (i) CHECK(tree.name(kids[i - 1]) < tree.name(kids[i]));
        Level expected = static_cast<Level>(static_cast<int>(n.level) + 1);
        if (o.skip_blocks && expected == Level::Block) expected = Level::Lot;
        CHECK(c.level == expected);
      }
      if (!kids.empty()) CHECK(leaf == n.leaf_end);
      if (n.level == Level::Lot) CHECK(n.leaf_end == n.leaf_begin + 1);
    }
  }
}

TEST_CASE("resolve and path_of are inverse; unknown segments report their depth") {
  const auto& corpus = fixture::shared_corpus();
  const IndexSet indexes(corpus.store);
  const SpatioTemporalIndex& tree = indexes.tree({});
  for (std::uint32_t id = 0; id < tree.node_count(); id += 7) CHECK(tree.resolve(tree.path_of(id)) == id);

  const auto borough = tree.children_of(tree.root())[0];
  std::vector<std::string> path = tree.path_of(borough);
  path.push_back("No Such Region");
  try {
    tree.resolve(path);
    FAIL("expected NotFound");
  } catch (const NotFound& e) {
    CHECK(e.depth() == 3);
    CHECK(e.segment() == "No Such Region");
  }
  CHECK_THROWS_AS(tree.resolve(std::vector<std::string>{"LA"}), NotFound);
  CHECK_THROWS_AS(tree.resolve(std::vector<std::string>{}), NotFound);
}

TEST_CASE("each existing lot has exactly one member leaf per release") {
  const auto& corpus = fixture::shared_corpus();
  const Store& store = *corpus.store;
  const IndexSet indexes(corpus.store);
  for (const TreeOptions& o : all_trees()) {
    const SpatioTemporalIndex& tree = indexes.tree(o);
    std::vector<std::size_t> hits(store.lots.size() * store.release_count(), 0);
    for (std::uint32_t leaf = 0; leaf < tree.leaf_count(); ++leaf) {
      for (std::size_t r = 0; r < store.release_count(); ++r) {
        if (tree.leaf_member(leaf, r)) ++hits[tree.leaf_lot(leaf) * store.release_count() + r];
      }
    }
    for (std::size_t row = 0; row < store.lots.size(); ++row) {
      for (std::size_t r = 0; r < store.release_count(); ++r) {
        CHECK(hits[row * store.release_count() + r] == (store.lot_exists(row, r) ? 1u : 0u));
      }
    }
  }
}

TEST_CASE("partition: child lot counts add up to the parent, filtered and unfiltered") {
  const auto& corpus = fixture::shared_corpus();
  Engine engine(corpus.store, 2);
  std::mt19937_64 rng(31);
  const AttributeRef& bbl = engine.catalog().at(kBblAttribute);
  for (int variant = 0; variant < 4; ++variant) {
    if (variant > 0) engine.apply_filter(randq::random_filter(rng, engine.catalog()));
    const auto snapshot = engine.current();
    for (const TreeOptions& o : all_trees()) {
      const QueryContext ctx = snapshot->context(o);
      for (std::size_t r = 0; r < corpus.store->release_count(); ++r) {
        std::size_t expected = 0;
        for (std::size_t row = 0; row < corpus.store->lots.size(); ++row) {
          expected += corpus.store->lot_exists(row, r) && (ctx.pass.all() || ctx.pass.pass(row, r));
        }
        CHECK(count_of(ctx, ctx.tree.root(), bbl, r) == static_cast<double>(expected));
        for (std::uint32_t id = 0; id < ctx.tree.node_count(); ++id) {
          const auto kids = ctx.tree.children_of(id);
          if (kids.empty()) continue;
          double sum = 0;
          for (std::uint32_t c : kids) sum += count_of(ctx, c, bbl, r);
          CHECK(sum == count_of(ctx, id, bbl, r));
        }
      }
    }
  }
}

TEST_CASE("existence bits follow leaf membership") {
  const auto& corpus = fixture::shared_corpus();
  const IndexSet indexes(corpus.store);
  const SpatioTemporalIndex& tree = indexes.tree({RegionKind::CommunityDistrict, false});
  for (std::uint32_t id = 0; id < tree.node_count(); ++id) {
    const IndexNode& n = tree.node(id);
    for (std::size_t r = 0; r < corpus.store->release_count(); ++r) {
      bool any = false;
      for (std::uint32_t leaf = n.leaf_begin; leaf < n.leaf_end && !any; ++leaf) any = tree.leaf_member(leaf, r);
      CHECK(tree.exists(id, r) == any);
      CHECK((tree.geometry_ref(id, r) != kNone) == any);
    }
  }
}

TEST_CASE("index set builds trees lazily and shares them") {
  const auto& corpus = fixture::shared_corpus();
  const IndexSet indexes(corpus.store);
  const std::size_t before = indexes.resident_bytes();
  const SpatioTemporalIndex& a = indexes.tree({});
  CHECK(&a == &indexes.tree({}));
  CHECK(indexes.resident_bytes() > before);
  indexes.build_all();
  CHECK(indexes.resident_bytes() > before + a.resident_bytes());
}
