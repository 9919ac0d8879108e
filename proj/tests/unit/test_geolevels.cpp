#include <random>

#include "chronicle/geolevels.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "shapes.hpp"

using namespace chronicle;

namespace {

double boundary_distance(const Ring& ring, Point p) {
  double best = 1e300;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point a = ring[i], b = ring[(i + 1) % ring.size()];
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
    best = std::min(best, std::hypot(p.x - a.x - t * dx, p.y - a.y - t * dy));
  }
  return best;
}

Polygon u_shape() {
  return fixture::ring_polygon({{0, 0}, {10, 0}, {10, 10}, {8, 10}, {8, 2}, {2, 2}, {2, 10}, {0, 10}});
}

}  // namespace

TEST_CASE("point in polygon agrees with the winding-number oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-8, 8);
  std::size_t checked = 0;
  for (int t = 0; t < 200; ++t) {
    const Ring star = shapes::random_star(rng, {0, 0}, 6);
    const Polygon poly = fixture::ring_polygon(star);
    for (int k = 0; k < 50; ++k) {
      const Point p{u(rng), u(rng)};
      if (boundary_distance(star, p) < 1e-9) continue;
      CHECK(point_in_polygon(p, poly) == (oracle::winding_number(star, p) != 0));
      ++checked;
    }
  }
  CHECK(checked > 9000);
}

TEST_CASE("point in polygon handles holes and boundaries") {
  Polygon p = fixture::square(0, 0, 10);
  p.parts[0].holes.push_back({{4, 4}, {6, 4}, {6, 6}, {4, 6}});
  normalize(p);
  CHECK(point_in_polygon({1, 1}, p));
  CHECK_FALSE(point_in_polygon({5, 5}, p));
  CHECK(point_in_polygon({0, 5}, p));
  CHECK(point_in_polygon({10, 10}, p));
  CHECK_FALSE(point_in_polygon({11, 5}, p));
}

TEST_CASE("representative point lies inside concave polygons") {
  const Polygon u = u_shape();
  // The centroid of a U falls in its notch.
  CHECK_FALSE(point_in_polygon(centroid(u), u));
  const Point r = representative_point(u);
  CHECK(oracle::inside(u, r));
  const Point pole = pole_of_inaccessibility(u);
  CHECK(oracle::inside(u, pole));

  std::mt19937_64 rng(22);
  for (int t = 0; t < 200; ++t) {
    const Polygon star = fixture::ring_polygon(shapes::random_star(rng, {3, 4}, 5));
    CHECK(oracle::inside(star, representative_point(star)));
  }
}

TEST_CASE("pole of a rectangle is its center") {
  const Point p = pole_of_inaccessibility(fixture::rect(0, 0, 10, 2), 1e-6);
  CHECK(p.x == doctest::Approx(5).epsilon(1e-3));
  CHECK(p.y == doctest::Approx(1).epsilon(1e-3));
}

TEST_CASE("region sets validate names and locate first match") {
  std::vector<geojson::NamedShape> shapes{{"A", fixture::square(0, 0, 10)}, {"B", fixture::square(5, 0, 10)}};
  const RegionSet set = RegionSet::make(RegionKind::Neighborhood, shapes);
  CHECK(set.locate({1, 1}) == std::optional<std::size_t>(0));
  CHECK(set.locate({7, 1}) == std::optional<std::size_t>(0));
  CHECK(set.locate({12, 1}) == std::optional<std::size_t>(1));
  CHECK_FALSE(set.locate({30, 1}).has_value());

  CHECK_THROWS_AS(RegionSet::make(RegionKind::Neighborhood, {{"A", fixture::square(0, 0, 1)}, {"A", fixture::square(2, 0, 1)}}),
                  ValidationError);
  CHECK_THROWS_AS(RegionSet::make(RegionKind::Neighborhood, {{"", fixture::square(0, 0, 1)}}), ValidationError);
  CHECK_THROWS_AS(RegionSet::make(RegionKind::Neighborhood, {{std::string(kUnassigned), fixture::square(0, 0, 1)}}),
                  ValidationError);
}

TEST_CASE("region kind names round trip") {
  for (RegionKind k : kAllRegionKinds) CHECK(parse_region_kind(to_string(k)) == k);
  CHECK(parse_region_kind("district") == RegionKind::CommunityDistrict);
  CHECK_THROWS_AS(parse_region_kind("ward"), ValidationError);
}

TEST_CASE("block catalog groups lots by borough and block") {
  const std::vector<LotId> lots{{1, "00001", "0001"}, {1, "00001", "0002"}, {1, "00002", "0001"}, {2, "00001", "0001"}};
  const BlockCatalog c = catalog_blocks(lots);
  REQUIRE(c.size() == 3);
  CHECK(c.lots_of(0).size() == 2);
  CHECK(c.lot_block[2] == 1);
  CHECK(c.boroughs[2] == 2);
  CHECK(c.find(lots[3].block_key()) == std::optional<std::size_t>(2));
  CHECK_FALSE(c.find("999999").has_value());
}

TEST_CASE("block assignment matches the generator's ground truth") {
  const auto& corpus = fixture::shared_corpus();
  const Store& store = *corpus.store;
  for (RegionKind kind : kAllRegionKinds) {
    const RegionLevel& level = store.level(kind);
    const auto& truth = kind == RegionKind::Neighborhood ? corpus.synth.block_neighborhood : corpus.synth.block_district;
    std::size_t checked = 0;
    for (std::size_t b = 0; b < store.blocks.size(); ++b) {
      const auto it = truth.find(store.blocks.keys[b]);
      for (std::size_t r = 0; r < store.release_count(); ++r) {
        const std::uint32_t name = level.assignment.get(b, r);
        if (name == kNone || it == truth.end()) continue;
        CHECK(level.names[name] == it->second);
        ++checked;
      }
    }
    CHECK(checked > 0);
    CHECK(level.unassigned_slots == 0);
  }
}

TEST_CASE("assignment is deterministic in the seed and covers every block with lots") {
  const auto& corpus = fixture::shared_corpus();
  const Store& store = *corpus.store;
  const auto again = fixture::make_corpus(fixture::small_params(), 7);
  for (RegionKind kind : kAllRegionKinds) {
    CHECK(again.store->level(kind).assignment == store.level(kind).assignment);
    const RefTable& a = store.level(kind).assignment;
    for (std::size_t b = 0; b < store.blocks.size(); ++b) {
      for (std::size_t r = 0; r < store.release_count(); ++r) {
        bool has_lot = false;
        for (std::uint32_t row : store.blocks.lots_of(b)) has_lot = has_lot || store.lot_exists(row, r);
        CHECK((a.get(b, r) != kNone) == has_lot);
      }
    }
  }
}

TEST_CASE("blocks outside every region are unassigned") {
  const auto& corpus = fixture::shared_corpus();
  RegionSet far = RegionSet::make(RegionKind::Neighborhood, {{"Far", fixture::square(1e6, 1e6, 1)}});
  const auto footprints = block_footprints(corpus.sequence, corpus.store->blocks);
  const LevelAssignment la = assign_blocks(corpus.sequence, corpus.store->blocks, footprints.lot_refs, far, 1);
  CHECK(la.names.back() == kUnassigned);
  std::size_t slots = 0;
  for (auto v : la.blocks.cells()) {
    if (v != kNone) {
      CHECK(v == la.unassigned_index());
      ++slots;
    }
  }
  CHECK(la.unassigned_slots == slots);
}
