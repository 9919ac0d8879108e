#pragma once

// Random polygons for the geometry oracles.

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "chronicle/geometry.hpp"

namespace shapes {

using chronicle::Point;
using chronicle::Ring;

/// Counter-clockwise convex ring: hull of random points in a disk.
inline Ring random_convex(std::mt19937_64& rng, Point center, double radius) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Point> pts(8 + static_cast<int>(u(rng) * 12));
  for (auto& p : pts) {
    const double a = 2 * M_PI * u(rng), r = radius * std::sqrt(u(rng));
    p = {center.x + r * std::cos(a), center.y + r * std::sin(a)};
  }
  return chronicle::convex_hull(pts);
}

/// Counter-clockwise star-shaped ring around `center`.
inline Ring random_star(std::mt19937_64& rng, Point center, double radius) {
  std::uniform_real_distribution<double> u(0, 1);
  const int n = 5 + static_cast<int>(u(rng) * 15);
  // One angle per sector keeps every gap below pi, so the ring is simple.
  std::vector<double> angles(n);
  for (int k = 0; k < n; ++k) angles[k] = 2 * M_PI * (k + 0.9 * u(rng)) / n;
  Ring ring;
  for (double a : angles) {
    const double r = radius * (0.3 + 0.7 * u(rng));
    ring.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  return ring;
}

/// Convex and star rings with nearby centers, so most pairs overlap. Some
/// pairs are near-identical to populate high overlap ratios.
inline std::pair<Ring, Ring> random_pair(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const Point c{100 + 50 * u(rng), 200 + 50 * u(rng)};
  const double radius = 1 + 4 * (u(rng) + 1);
  Ring convex = random_convex(rng, c, radius);
  Ring star;
  if (u(rng) > 0.5) {
    // Radially perturbed copy of the convex ring; angular order around the
    // vertex mean is kept, so the copy stays simple.
    Point m{0, 0};
    for (const auto& p : convex) m = {m.x + p.x / convex.size(), m.y + p.y / convex.size()};
    const double s = 0.05 * (u(rng) + 1);
    for (const auto& p : convex) {
      const double k = 1 + s * u(rng);
      star.push_back({m.x + (p.x - m.x) * k, m.y + (p.y - m.y) * k});
    }
  } else {
    const Point d{c.x + radius * 0.5 * u(rng), c.y + radius * 0.5 * u(rng)};
    star = random_star(rng, d, radius * (0.5 + 0.5 * (u(rng) + 1)));
  }
  return {std::move(convex), std::move(star)};
}

}  // namespace shapes
