#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chronicle {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Ring vertices without the repeated closing vertex.
using Ring = std::vector<Point>;

struct PolygonPart {
  Ring outer;
  std::vector<Ring> holes;
  friend bool operator==(const PolygonPart&, const PolygonPart&) = default;
};

/// Planar (multi)polygon. After normalize(), outer rings are
/// counter-clockwise and holes clockwise.
struct Polygon {
  std::vector<PolygonPart> parts;
  friend bool operator==(const Polygon&, const Polygon&) = default;
};

struct BBox {
  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;

  bool intersects(const BBox& o) const noexcept {
    return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
  }
  bool contains(Point p) const noexcept {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

/// Shoelace area, positive for counter-clockwise rings.
double signed_area(std::span<const Point> ring) noexcept;

/// Outer areas minus hole areas, independent of orientation.
double area(const Polygon& poly) noexcept;

std::size_t vertex_count(const Polygon& poly) noexcept;

BBox bbox(const Polygon& poly) noexcept;

/// Drops repeated closing and consecutive duplicate vertices and fixes ring
/// orientation. Idempotent.
void normalize(Polygon& poly);

/// Reason the polygon is unusable, or nullopt when it satisfies the ring
/// invariants (>= 3 distinct vertices per ring, positive outer area, no
/// ring crossing itself).
std::optional<std::string> validate(const Polygon& poly);

/// Area of the intersection of two normalized polygons. Shared edges and
/// touching vertices contribute zero.
double intersection_area(const Polygon& a, const Polygon& b);

/// Area-weighted centroid of all parts (holes subtracted).
Point centroid(const Polygon& poly) noexcept;

/// Convex hull (counter-clockwise, no collinear vertices) of a point cloud.
Ring convex_hull(std::vector<Point> points);

/// Convex hull of every outer-ring vertex of the given shapes.
Polygon hull_of(std::span<const Polygon* const> shapes);

/// Douglas-Peucker per ring. Rings that would fall below three vertices are
/// kept unsimplified.
Polygon simplify(const Polygon& poly, double tolerance);

}  // namespace chronicle
