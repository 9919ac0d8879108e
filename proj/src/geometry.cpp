#include "chronicle/geometry.hpp"

#include <algorithm>
#include <cmath>

#define BOOST_GEOMETRY_NO_ROBUSTNESS
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

namespace chronicle {

namespace bg = boost::geometry;

namespace {

using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, /*ClockWise=*/false, /*Closed=*/false>;
using BMulti = bg::model::multi_polygon<BPolygon>;
using BRing = bg::model::ring<BPoint, false, false>;

bool self_intersects(const Ring& ring) {
  BRing r;
  r.reserve(ring.size());
  for (Point p : ring) r.emplace_back(p.x, p.y);
  return bg::intersects(r);
}

BMulti to_boost(const Polygon& poly) {
  BMulti out;
  out.reserve(poly.parts.size());
  for (const auto& part : poly.parts) {
    BPolygon& bp = out.emplace_back();
    bp.outer().reserve(part.outer.size());
    for (Point p : part.outer) bp.outer().emplace_back(p.x, p.y);
    for (const auto& hole : part.holes) {
      auto& inner = bp.inners().emplace_back();
      inner.reserve(hole.size());
      for (Point p : hole) inner.emplace_back(p.x, p.y);
    }
  }
  return out;
}

void dedupe_ring(Ring& ring) {
  if (ring.empty()) return;
  Ring out;
  out.reserve(ring.size());
  for (Point p : ring) {
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  ring.swap(out);
}

std::size_t distinct_vertices(const Ring& ring) {
  Ring sorted = ring;
  std::sort(sorted.begin(), sorted.end(),
            [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

double cross(Point o, Point a, Point b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double segment_distance(Point p, Point a, Point b) noexcept {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

void douglas_peucker(const Ring& pts, std::size_t first, std::size_t last, double tol,
                     std::vector<bool>& keep) {
  if (last <= first + 1) return;
  double best = -1;
  std::size_t index = first;
  const Point b = pts[last % pts.size()];
  for (std::size_t i = first + 1; i < last; ++i) {
    const double d = segment_distance(pts[i], pts[first], b);
    if (d > best) {
      best = d;
      index = i;
    }
  }
  if (best > tol) {
    keep[index] = true;
    douglas_peucker(pts, first, index, tol, keep);
    douglas_peucker(pts, index, last, tol, keep);
  }
}

Ring simplify_ring(const Ring& ring, double tol) {
  if (ring.size() <= 3) return ring;
  // Split the closed ring at the vertex farthest from vertex 0.
  std::size_t far = 0;
  double best = -1;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    const double d = std::hypot(ring[i].x - ring[0].x, ring[i].y - ring[0].y);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  std::vector<bool> keep(ring.size(), false);
  keep[0] = keep[far] = true;
  douglas_peucker(ring, 0, far, tol, keep);
  douglas_peucker(ring, far, ring.size(), tol, keep);
  Ring out;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (keep[i]) out.push_back(ring[i]);
  }
  if (out.size() < 3 || signed_area(out) == 0.0) return ring;
  return out;
}

}  // namespace

double signed_area(std::span<const Point> ring) noexcept {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    twice += (ring[j].x * ring[i].y) - (ring[i].x * ring[j].y);
  }
  return 0.5 * twice;
}

double area(const Polygon& poly) noexcept {
  double total = 0.0;
  for (const auto& part : poly.parts) {
    total += std::abs(signed_area(part.outer));
    for (const auto& hole : part.holes) total -= std::abs(signed_area(hole));
  }
  return total;
}

std::size_t vertex_count(const Polygon& poly) noexcept {
  std::size_t n = 0;
  for (const auto& part : poly.parts) {
    n += part.outer.size();
    for (const auto& hole : part.holes) n += hole.size();
  }
  return n;
}

BBox bbox(const Polygon& poly) noexcept {
  BBox box{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (const auto& part : poly.parts) {
    for (Point p : part.outer) {
      box.min_x = std::min(box.min_x, p.x);
      box.min_y = std::min(box.min_y, p.y);
      box.max_x = std::max(box.max_x, p.x);
      box.max_y = std::max(box.max_y, p.y);
    }
  }
  return box;
}

void normalize(Polygon& poly) {
  for (auto& part : poly.parts) {
    dedupe_ring(part.outer);
    if (signed_area(part.outer) < 0) std::reverse(part.outer.begin(), part.outer.end());
    for (auto& hole : part.holes) {
      dedupe_ring(hole);
      if (signed_area(hole) > 0) std::reverse(hole.begin(), hole.end());
    }
  }
}

std::optional<std::string> validate(const Polygon& poly) {
  if (poly.parts.empty()) return "missing geometry";
  for (const auto& part : poly.parts) {
    if (distinct_vertices(part.outer) < 3) return "degenerate ring";
    for (const auto& hole : part.holes) {
      if (distinct_vertices(hole) < 3 || signed_area(hole) == 0.0) return "degenerate ring";
    }
    if (!(std::abs(signed_area(part.outer)) > 0.0)) return "zero area";
    if (self_intersects(part.outer)) return "self-intersection";
    for (const auto& hole : part.holes) {
      if (self_intersects(hole)) return "self-intersection";
    }
  }
  return std::nullopt;
}

double intersection_area(const Polygon& a, const Polygon& b) {
  if (a.parts.empty() || b.parts.empty()) return 0.0;
  if (!bbox(a).intersects(bbox(b))) return 0.0;
  const BMulti ma = to_boost(a);
  const BMulti mb = to_boost(b);
  BMulti out;
  try {
    bg::intersection(ma, mb, out);
  } catch (const bg::exception&) {
    // Self-intersecting input; report no overlap so the shape is kept as distinct.
    return 0.0;
  }
  return std::max(0.0, static_cast<double>(bg::area(out)));
}

Point centroid(const Polygon& poly) noexcept {
  double cx = 0, cy = 0, total = 0;
  auto accumulate = [&](const Ring& ring, double sign) {
    const std::size_t n = ring.size();
    if (n < 3) return;
    const Point o = ring[0];
    double a2 = 0, sx = 0, sy = 0;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const double xj = ring[j].x - o.x, yj = ring[j].y - o.y;
      const double xi = ring[i].x - o.x, yi = ring[i].y - o.y;
      const double f = xj * yi - xi * yj;
      a2 += f;
      sx += (xj + xi) * f;
      sy += (yj + yi) * f;
    }
    if (a2 == 0) return;
    const double s = (a2 > 0 ? 1.0 : -1.0) * sign;
    const double ring_area = 0.5 * std::abs(a2) * sign;
    cx += s * sx / 6.0 + ring_area * o.x;
    cy += s * sy / 6.0 + ring_area * o.y;
    total += ring_area;
  };
  for (const auto& part : poly.parts) {
    accumulate(part.outer, 1.0);
    for (const auto& hole : part.holes) accumulate(hole, -1.0);
  }
  if (total == 0) {
    const BBox box = bbox(poly);
    return {(box.min_x + box.max_x) / 2, (box.min_y + box.max_y) / 2};
  }
  return {cx / total, cy / total};
}

Ring convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(),
            [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Ring hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

Polygon hull_of(std::span<const Polygon* const> shapes) {
  std::vector<Point> pts;
  for (const Polygon* shape : shapes) {
    for (const auto& part : shape->parts) pts.insert(pts.end(), part.outer.begin(), part.outer.end());
  }
  Polygon out;
  Ring hull = convex_hull(std::move(pts));
  if (hull.size() >= 3) out.parts.push_back({std::move(hull), {}});
  return out;
}

Polygon simplify(const Polygon& poly, double tolerance) {
  if (!(tolerance > 0)) return poly;
  Polygon out;
  out.parts.reserve(poly.parts.size());
  for (const auto& part : poly.parts) {
    PolygonPart p;
    p.outer = simplify_ring(part.outer, tolerance);
    for (const auto& hole : part.holes) p.holes.push_back(simplify_ring(hole, tolerance));
    out.parts.push_back(std::move(p));
  }
  return out;
}

}  // namespace chronicle
