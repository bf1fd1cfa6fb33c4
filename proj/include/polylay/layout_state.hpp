#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "polylay/geometry.hpp"
#include "polylay/hypergraph.hpp"

namespace polylay {

/// Geometry of one layout: a position per entity, a cyclic vertex order per
/// relationship and an orientation angle per monogon. Indexed densely like the
/// owning Hypergraph.
///
/// Orders: cardinality >= 3 holds the starrized cyclic order; digons and
/// monogons hold their sorted members. Angles of non-monogons stay 0.
struct LayoutState {
  std::vector<Point2> positions;
  std::vector<std::vector<int>> orders;
  std::vector<double> monogon_angles;
  std::vector<int> fixed;

  bool operator==(const LayoutState&) const = default;
};

inline LayoutState make_layout_state(const Hypergraph& h) {
  LayoutState s;
  s.positions.assign(h.num_entities(), Point2{});
  s.orders.reserve(h.num_relationships());
  for (const auto& r : h.relationships()) s.orders.push_back(r.members);
  s.monogon_angles.assign(h.num_relationships(), 0.0);
  return s;
}

inline std::vector<Point2> polygon_points(const LayoutState& s, int r) {
  const auto& order = s.orders[static_cast<std::size_t>(r)];
  std::vector<Point2> pts;
  pts.reserve(order.size());
  for (int v : order) pts.push_back(s.positions[static_cast<std::size_t>(v)]);
  return pts;
}

/// Re-derives the cyclic order of relationship `r` from current positions.
/// Returns false when the positions were fully coincident (order untouched).
inline bool starrize_relationship(const Hypergraph& h, LayoutState& s, int r) {
  const auto& members = h.relationship(r).members;
  if (members.size() < 3) return true;
  std::vector<Point2> pts;
  pts.reserve(members.size());
  for (int v : members) pts.push_back(s.positions[static_cast<std::size_t>(v)]);
  const Starrization st = starrize(pts);
  auto& order = s.orders[static_cast<std::size_t>(r)];
  if (st.degenerate) return false;
  order.resize(members.size());
  for (std::size_t i = 0; i < st.order.size(); ++i) order[i] = members[st.order[i]];
  return true;
}

inline void starrize_all(const Hypergraph& h, LayoutState& s) {
  for (std::size_t r = 0; r < h.num_relationships(); ++r) {
    starrize_relationship(h, s, static_cast<int>(r));
  }
}

/// True when every cardinality >= 3 order is a simple polygon.
inline bool all_orders_simple(const Hypergraph& h, const LayoutState& s) {
  for (std::size_t r = 0; r < h.num_relationships(); ++r) {
    if (h.relationships()[r].cardinality() < 3) continue;
    if (!is_simple(polygon_points(s, static_cast<int>(r)))) return false;
  }
  return true;
}

inline Point2 direction(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Center of the waterdrop drawn for monogon `r`.
inline Point2 monogon_center(const LayoutState& s, int r, double center_dist) {
  const int v = s.orders[static_cast<std::size_t>(r)].front();
  return s.positions[static_cast<std::size_t>(v)] +
         direction(s.monogon_angles[static_cast<std::size_t>(r)]) * center_dist;
}

}  // namespace polylay
