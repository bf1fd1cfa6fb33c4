#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace polylay {

/// A position in layout units; one unit is the target edge length.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2& operator+=(Point2 o) { x += o.x; y += o.y; return *this; }
  Point2& operator-=(Point2 o) { x -= o.x; y -= o.y; return *this; }
  Point2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend Point2 operator+(Point2 a, Point2 b) { return a += b; }
  friend Point2 operator-(Point2 a, Point2 b) { return a -= b; }
  friend Point2 operator*(Point2 a, double s) { return a *= s; }
  friend Point2 operator*(double s, Point2 a) { return a *= s; }
  friend Point2 operator-(Point2 a) { return {-a.x, -a.y}; }
  bool operator==(const Point2&) const = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double norm2(Point2 a) { return dot(a, a); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shoelace area; positive for counterclockwise vertex order.
inline double signed_area(std::span<const Point2> pts) {
  if (pts.size() < 3) throw GeometryError("signed_area: need at least 3 points");
  double twice = 0.0;
  for (std::size_t i = 0, n = pts.size(); i < n; ++i) {
    twice += cross(pts[i], pts[(i + 1) % n]);
  }
  return 0.5 * twice;
}

/// Sum of the cyclic edge lengths.
inline double perimeter(std::span<const Point2> pts) {
  if (pts.size() < 2) throw GeometryError("perimeter: need at least 2 points");
  double p = 0.0;
  for (std::size_t i = 0, n = pts.size(); i < n; ++i) p += distance(pts[i], pts[(i + 1) % n]);
  return p;
}

/// Minimum of P^2 / A over n-gons, attained by the regular n-gon: 4n tan(pi/n).
inline double iso_constant(int n) {
  if (n < 3) throw GeometryError("iso_constant: n must be >= 3");
  return 4.0 * n * std::tan(std::numbers::pi / n);
}

/// Circumradius of the regular unit-edge n-gon. Digons get half an edge and
/// monogons zero.
inline double circumradius_regular(int n) {
  if (n <= 0) throw GeometryError("circumradius_regular: n must be >= 1");
  if (n == 1) return 0.0;
  if (n == 2) return 0.5;
  return 0.5 / std::sin(std::numbers::pi / n);
}

/// Inradius (apothem) of the regular unit-edge n-gon.
inline double apothem_regular(int n) {
  if (n < 3) throw GeometryError("apothem_regular: n must be >= 3");
  return 0.5 / std::tan(std::numbers::pi / n);
}

/// Unsigned angle in [0, pi] between pivot->c1 and pivot->c2.
inline double angle_at_pivot(Point2 pivot, Point2 c1, Point2 c2) {
  const Point2 u = c1 - pivot;
  const Point2 w = c2 - pivot;
  if ((u.x == 0.0 && u.y == 0.0) || (w.x == 0.0 && w.y == 0.0)) {
    throw GeometryError("angle_at_pivot: zero-length segment");
  }
  return std::atan2(std::abs(cross(u, w)), dot(u, w));
}

inline Point2 vertex_centroid(std::span<const Point2> pts) {
  Point2 c;
  for (const auto& p : pts) c += p;
  return c * (1.0 / static_cast<double>(pts.size()));
}

/// Indices of the convex hull in counterclockwise order (monotone chain).
/// Collinear points on hull edges are dropped; a fully collinear input yields
/// its two extreme points, and coincident input a single index.
inline std::vector<std::size_t> convex_hull(std::span<const Point2> pts) {
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].x < pts[b].x || (pts[a].x == pts[b].x && (pts[a].y < pts[b].y ||
                                                            (pts[a].y == pts[b].y && a < b)));
  });
  idx.erase(std::unique(idx.begin(), idx.end(),
                        [&](std::size_t a, std::size_t b) { return pts[a] == pts[b]; }),
            idx.end());
  if (idx.size() <= 2) return idx;

  auto turn = [&](std::size_t o, std::size_t a, std::size_t b) {
    return cross(pts[a] - pts[o], pts[b] - pts[o]);
  };
  std::vector<std::size_t> hull(2 * idx.size());
  std::size_t k = 0;
  for (std::size_t i : idx) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], i) <= 0) --k;
    hull[k++] = i;
  }
  for (std::size_t j = idx.size() - 1, lower = k + 1; j-- > 0;) {
    const std::size_t i = idx[j];
    while (k >= lower && turn(hull[k - 2], hull[k - 1], i) <= 0) --k;
    hull[k++] = i;
  }
  hull.resize(k - 1);
  return hull;
}

/// Area centroid of the convex hull of `pts`; falls back to the mean of the
/// hull points when the hull has no area.
inline Point2 hull_centroid(std::span<const Point2> pts) {
  const auto hull = convex_hull(pts);
  std::vector<Point2> h;
  h.reserve(hull.size());
  for (std::size_t i : hull) h.push_back(pts[i]);
  if (h.size() < 3) return vertex_centroid(h);
  // Triangulate from the first hull vertex; offsets keep the sums well scaled.
  const Point2 o = h[0];
  double area2 = 0.0;
  Point2 acc;
  for (std::size_t i = 1; i + 1 < h.size(); ++i) {
    const Point2 a = h[i] - o;
    const Point2 b = h[i + 1] - o;
    const double t = cross(a, b);
    area2 += t;
    acc += (a + b) * t;
  }
  if (area2 <= 0.0) return vertex_centroid(h);
  return o + acc * (1.0 / (3.0 * area2));
}

struct Starrization {
  std::vector<std::size_t> order;
  bool degenerate = false;
};

/// Orders points by angle around the area centroid of their convex hull.
/// Equal angles are ordered by increasing distance from that centroid.
inline Starrization starrize(std::span<const Point2> pts) {
  if (pts.size() < 3) throw GeometryError("starrize: need at least 3 points");
  Starrization s;
  s.order.resize(pts.size());
  std::iota(s.order.begin(), s.order.end(), std::size_t{0});
  const bool coincident = std::all_of(pts.begin(), pts.end(),
                                      [&](const Point2& p) { return p == pts[0]; });
  if (coincident) {
    s.degenerate = true;
    return s;
  }
  const Point2 ref = hull_centroid(pts);
  std::vector<double> angle(pts.size()), radius(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point2 d = pts[i] - ref;
    angle[i] = std::atan2(d.y, d.x);
    radius[i] = norm2(d);
  }
  std::sort(s.order.begin(), s.order.end(), [&](std::size_t a, std::size_t b) {
    if (angle[a] != angle[b]) return angle[a] < angle[b];
    if (radius[a] != radius[b]) return radius[a] < radius[b];
    return a < b;
  });
  return s;
}

namespace detail {

inline int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0) - (v < 0);
}

inline bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

inline bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace detail

/// O(n^2) simplicity test of the closed polygon through `pts` in order: no two
/// non-adjacent edges touch, and adjacent edges meet only at their shared
/// endpoint.
inline bool is_simple(std::span<const Point2> pts) {
  const std::size_t n = pts.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (pts[i] == pts[(i + 1) % n]) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = pts[i], b = pts[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2 c = pts[j], d = pts[(j + 1) % n];
      const bool next = (j == i + 1);
      const bool wrap = (i == 0 && j == n - 1);
      if (next || wrap) {
        // Shared endpoint s; the other two endpoints must not fold back onto
        // the opposite edge.
        const Point2 s = next ? b : a;
        const Point2 p = next ? a : b;
        const Point2 q = next ? d : c;
        if (n == 3) {
          if (detail::orientation(p, s, q) == 0) return false;
          continue;
        }
        if (detail::orientation(p, s, q) == 0 && dot(p - s, q - s) > 0) return false;
        continue;
      }
      if (detail::segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

}  // namespace polylay
