#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polylay/geometry.hpp"
#include "polylay/hypergraph.hpp"
#include "polylay/layout_state.hpp"

namespace polylay {

enum class InitScheme { kForceDirected, kCircular, kRandom };

inline InitScheme parse_init_scheme(std::string_view s) {
  if (s == "fd" || s == "force_directed") return InitScheme::kForceDirected;
  if (s == "circle" || s == "circular") return InitScheme::kCircular;
  if (s == "random") return InitScheme::kRandom;
  throw std::invalid_argument("unknown init scheme '" + std::string(s) + "'");
}

inline const char* to_string(InitScheme s) {
  switch (s) {
    case InitScheme::kForceDirected: return "fd";
    case InitScheme::kCircular: return "circle";
    case InitScheme::kRandom: return "random";
  }
  return "?";
}

struct InitConfig {
  InitScheme scheme = InitScheme::kForceDirected;
  std::uint64_t seed = 1;
  int fd_iterations = 500;
  double target_scale = 1.0;

  void validate() const {
    if (fd_iterations < 1) throw std::invalid_argument("fd_iterations must be >= 1");
    if (!(target_scale > 0.0)) throw std::invalid_argument("target_scale must be > 0");
  }
};

struct WeightedEdge {
  int a;
  int b;
  int weight;

  bool operator==(const WeightedEdge&) const = default;
};

/// Graph on the entities with an edge for every co-occurring pair, weighted by
/// the number of relationships the pair shares. Edges are sorted (a < b).
inline std::vector<WeightedEdge> clique_expand(const Hypergraph& h) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& r : h.relationships()) {
    for (std::size_t i = 0; i < r.members.size(); ++i) {
      for (std::size_t j = i + 1; j < r.members.size(); ++j) {
        const int a = std::min(r.members[i], r.members[j]);
        const int b = std::max(r.members[i], r.members[j]);
        ++count[{a, b}];
      }
    }
  }
  std::vector<WeightedEdge> edges;
  edges.reserve(count.size());
  for (const auto& [k, w] : count) edges.push_back({k.first, k.second, w});
  return edges;
}

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform
/// unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline void random_square(std::vector<Point2>& pos, std::mt19937_64& rng) {
  const double side = std::sqrt(static_cast<double>(pos.size()));
  for (auto& p : pos) {
    p.x = unit_uniform(rng) * side;
    p.y = unit_uniform(rng) * side;
  }
}

/// Spring-electrical embedding (attraction d^2/K along edges, repulsion
/// -C K^2/d between all pairs) with adaptive step cooling.
inline void spring_electrical(std::vector<Point2>& pos, const std::vector<WeightedEdge>& edges,
                              int iterations, std::mt19937_64& rng) {
  const std::size_t n = pos.size();
  if (n < 2) return;
  constexpr double kK = 1.0;
  constexpr double kC = 0.2;
  constexpr double kCooling = 0.9;

  // Separate exact coincidences.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pos[i] == pos[j]) {
        pos[j].x += (unit_uniform(rng) - 0.5) * 2e-6;
        pos[j].y += (unit_uniform(rng) - 0.5) * 2e-6;
      }
    }
  }

  double step = kK * std::sqrt(static_cast<double>(n)) * 0.1;
  double energy = std::numeric_limits<double>::infinity();
  int progress = 0;
  std::vector<Point2> force(n);
  for (int it = 0; it < iterations; ++it) {
    std::fill(force.begin(), force.end(), Point2{});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        Point2 d = pos[i] - pos[j];
        double d2 = norm2(d);
        if (d2 < 1e-18) {
          d = Point2{1e-9, 0.0};
          d2 = 1e-18;
        }
        const Point2 f = d * (kC * kK * kK / d2);  // magnitude C K^2 / |d|
        force[i] += f;
        force[j] -= f;
      }
    }
    for (const auto& e : edges) {
      const Point2 d = pos[static_cast<std::size_t>(e.b)] - pos[static_cast<std::size_t>(e.a)];
      const Point2 f = d * (norm(d) * e.weight / kK);  // magnitude w d^2 / K
      force[static_cast<std::size_t>(e.a)] += f;
      force[static_cast<std::size_t>(e.b)] -= f;
    }
    double next_energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = norm(force[i]);
      next_energy += m * m;
      if (m > 0.0) pos[i] += force[i] * (step / m);
    }
    if (next_energy < energy) {
      if (++progress >= 5) {
        progress = 0;
        step /= kCooling;
      }
    } else {
      progress = 0;
      step *= kCooling;
    }
    energy = next_energy;
  }
}

inline void rescale_to_median_edge(std::vector<Point2>& pos, const std::vector<WeightedEdge>& edges,
                                   double target) {
  if (edges.empty()) return;
  std::vector<double> lengths;
  lengths.reserve(edges.size());
  for (const auto& e : edges) {
    lengths.push_back(distance(pos[static_cast<std::size_t>(e.a)], pos[static_cast<std::size_t>(e.b)]));
  }
  std::nth_element(lengths.begin(), lengths.begin() + static_cast<std::ptrdiff_t>(lengths.size() / 2),
                   lengths.end());
  const double median = lengths[lengths.size() / 2];
  if (!(median > 0.0)) return;
  const double s = target / median;
  for (auto& p : pos) p *= s;
}

}  // namespace detail

/// Spreads the monogons anchored at each vertex evenly around it, starting
/// at angle 0.
inline void spread_monogon_angles(const Hypergraph& h, LayoutState& s) {
  for (std::size_t v = 0; v < h.num_entities(); ++v) {
    std::vector<int> mono;
    for (int r : h.incident(static_cast<int>(v))) {
      if (h.relationship(r).cardinality() == 1) mono.push_back(r);
    }
    for (std::size_t k = 0; k < mono.size(); ++k) {
      s.monogon_angles[static_cast<std::size_t>(mono[k])] =
          2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(mono.size());
    }
  }
}

/// Positions every entity per the chosen scheme, then starrizes every
/// polygon. Deterministic in (h, cfg).
inline LayoutState initial_layout(const Hypergraph& h, const InitConfig& cfg) {
  cfg.validate();
  LayoutState s = make_layout_state(h);
  std::mt19937_64 rng(cfg.seed);
  const std::size_t n = h.num_entities();
  switch (cfg.scheme) {
    case InitScheme::kCircular: {
      const double radius = cfg.target_scale * static_cast<double>(n) / (2.0 * std::numbers::pi);
      for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        s.positions[i] = direction(a) * radius;
      }
      break;
    }
    case InitScheme::kRandom:
      detail::random_square(s.positions, rng);
      for (auto& p : s.positions) p *= cfg.target_scale;
      break;
    case InitScheme::kForceDirected: {
      const auto edges = clique_expand(h);
      detail::random_square(s.positions, rng);
      detail::spring_electrical(s.positions, edges, cfg.fd_iterations, rng);
      detail::rescale_to_median_edge(s.positions, edges, cfg.target_scale);
      break;
    }
  }
  spread_monogon_angles(h, s);
  starrize_all(h, s);
  return s;
}

}  // namespace polylay
