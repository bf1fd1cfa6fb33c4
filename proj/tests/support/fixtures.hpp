#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "polylay/hypergraph.hpp"
#include "polylay/layout_state.hpp"

namespace polylay::testing {

using Members = std::vector<std::pair<std::string, std::vector<std::string>>>;

/// Entities are collected from the members in first-seen order.
inline Hypergraph graph(const Members& rels) {
  std::vector<Entity> ents;
  std::map<std::string, bool> seen;
  for (const auto& [rid, m] : rels) {
    for (const auto& id : m) {
      if (!seen[id]) {
        seen[id] = true;
        ents.push_back({id, "", {}});
      }
    }
  }
  return Hypergraph(std::move(ents), rels);
}

/// State with the given positions; orders starrized.
inline LayoutState place(const Hypergraph& h, const std::map<std::string, Point2>& pos) {
  LayoutState s = make_layout_state(h);
  for (const auto& [id, p] : pos) s.positions[static_cast<std::size_t>(h.entity_index(id))] = p;
  starrize_all(h, s);
  return s;
}

inline LayoutState random_state(const Hypergraph& h, std::mt19937_64& rng, double side) {
  std::uniform_real_distribution<double> u(0.0, side);
  std::uniform_real_distribution<double> a(0.0, 2 * std::numbers::pi);
  LayoutState s = make_layout_state(h);
  for (auto& p : s.positions) p = {u(rng), u(rng)};
  for (std::size_t r = 0; r < h.num_relationships(); ++r) {
    if (h.relationships()[r].cardinality() == 1) s.monogon_angles[r] = a(rng);
  }
  starrize_all(h, s);
  return s;
}

inline std::vector<Point2> regular_polygon(int n, Point2 center = {}, double phase = 0.0) {
  const double r = 0.5 / std::sin(std::numbers::pi / n);
  std::vector<Point2> p;
  for (int i = 0; i < n; ++i) {
    const double t = phase + 2 * std::numbers::pi * i / n;
    p.push_back(center + Point2{r * std::cos(t), r * std::sin(t)});
  }
  return p;
}

}  // namespace polylay::testing
