#include <cmath>
#include <random>

#include "chronicle/dedup.hpp"
#include "chronicle/geometry.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "shapes.hpp"

using namespace chronicle;

TEST_CASE("area of a square with a hole") {
  Polygon p = fixture::square(0, 0, 10);
  p.parts[0].holes.push_back({{2, 2}, {4, 2}, {4, 4}, {2, 4}});
  normalize(p);
  CHECK(area(p) == doctest::Approx(96));
  CHECK(signed_area(p.parts[0].outer) > 0);
  CHECK(signed_area(p.parts[0].holes[0]) < 0);
}

TEST_CASE("normalize drops closing and repeated vertices and is idempotent") {
  Polygon p;
  p.parts.push_back({{{0, 0}, {0, 1}, {0, 1}, {1, 1}, {1, 0}, {0, 0}}, {}});
  normalize(p);
  CHECK(p.parts[0].outer.size() == 4);
  CHECK(signed_area(p.parts[0].outer) > 0);
  Polygon again = p;
  normalize(again);
  CHECK(again == p);
}

TEST_CASE("validate rejects degenerate rings") {
  CHECK_FALSE(validate(fixture::square(0, 0, 1)).has_value());
  Polygon line;
  line.parts.push_back({{{0, 0}, {1, 1}, {2, 2}}, {}});
  normalize(line);
  CHECK(validate(line).has_value());
  Polygon two;
  two.parts.push_back({{{0, 0}, {1, 1}}, {}});
  CHECK(validate(two).has_value());
  CHECK(validate(Polygon{}).has_value());
  Polygon bowtie;
  bowtie.parts.push_back({{{0, 0}, {4, 4}, {4, 0}, {0, 1}}, {}});
  CHECK(validate(bowtie) == std::optional<std::string>("self-intersection"));
}

TEST_CASE("intersection area of simple configurations") {
  const Polygon a = fixture::square(0, 0, 2);
  CHECK(intersection_area(a, fixture::square(1, 1, 2)) == doctest::Approx(1));
  CHECK(intersection_area(a, fixture::square(2, 0, 2)) == doctest::Approx(0));
  CHECK(intersection_area(a, fixture::square(5, 5, 1)) == 0);
  CHECK(intersection_area(a, a) == doctest::Approx(4));
}

TEST_CASE("intersection area matches the clipping oracle on random convex/star pairs") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto [convex, star] = shapes::random_pair(rng);
    const double expected = oracle::shoelace(oracle::clip_convex(star, convex));
    const double got = intersection_area(fixture::ring_polygon(convex), fixture::ring_polygon(star));
    CHECK(std::abs(got - expected) <= 1e-9 * std::max(1.0, expected));
  }
}

TEST_CASE("overlap ratio matches the oracle and is symmetric") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 300; ++i) {
    const auto [convex, star] = shapes::random_pair(rng);
    const Polygon a = fixture::ring_polygon(convex), b = fixture::ring_polygon(star);
    const double ratio = overlap_ratio(a, b);
    CHECK(std::abs(ratio - oracle::overlap_ratio(convex, star)) <= 1e-9);
    CHECK(std::abs(ratio - overlap_ratio(b, a)) <= 1e-12);
    CHECK(ratio >= 0);
    CHECK(ratio <= 1 + 1e-12);
  }
}

TEST_CASE("convex hull contains every input point") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 50; ++t) {
    std::vector<Point> pts(40);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const Ring hull = convex_hull(pts);
    REQUIRE(hull.size() >= 3);
    CHECK(signed_area(hull) > 0);
    for (const auto& p : pts) {
      // Strictly inside or on the hull boundary.
      bool on_edge = false;
      for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point a = hull[i], b = hull[(i + 1) % hull.size()];
        const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        if (std::abs(cross) < 1e-9) on_edge = true;
      }
      CHECK((on_edge || oracle::winding_number(hull, p) != 0));
    }
  }
}

TEST_CASE("centroid and bbox") {
  const Polygon p = fixture::rect(1, 2, 3, 6);
  const Point c = centroid(p);
  CHECK(c.x == doctest::Approx(2));
  CHECK(c.y == doctest::Approx(4));
  const BBox b = bbox(p);
  CHECK(b.min_x == 1);
  CHECK(b.max_y == 6);
  CHECK(b.contains({2, 3}));
  CHECK_FALSE(b.contains({0, 3}));
}

TEST_CASE("simplify keeps rings valid") {
  Ring wiggly;
  for (int i = 0; i < 100; ++i) {
    const double a = 2 * M_PI * i / 100;
    wiggly.push_back({std::cos(a) * (1 + 0.001 * (i % 2)), std::sin(a) * (1 + 0.001 * (i % 2))});
  }
  const Polygon p = fixture::ring_polygon(wiggly);
  const Polygon s = simplify(p, 0.01);
  CHECK(vertex_count(s) < vertex_count(p));
  CHECK_FALSE(validate(s).has_value());
  CHECK(simplify(fixture::square(0, 0, 1), 10).parts[0].outer.size() >= 3);
}
