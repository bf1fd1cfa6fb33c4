#pragma once

// Straight-line re-implementation of the objective, written without any of
// the library's energy helpers. Used as a reference in tests. The scalar
// type is a parameter so finite differences can be taken in extended
// precision.

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "polylay/hypergraph.hpp"
#include "polylay/layout_state.hpp"
#include "polylay/weights.hpp"

namespace polylay::testing {

template <class R>
struct BruteBreakdownT {
  R pr = 0, pa = 0, ps = 0, pi = 0, mono = 0, dd = 0, total = 0;
};
using BruteBreakdown = BruteBreakdownT<double>;

template <class R>
class BruteEvaluator {
 public:
  using Pt = std::pair<R, R>;

  BruteEvaluator(const Hypergraph& h, const LayoutState& s, const Weights& w)
      : h_(h), s_(s), w_(w) {}

  BruteBreakdownT<R> run() const {
    BruteBreakdownT<R> out;
    const int n_rel = static_cast<int>(h_.num_relationships());
    for (int r = 0; r < n_rel; ++r) {
      const auto ids = order_ids(r);
      std::vector<Pt> pts;
      for (const auto& id : ids) pts.push_back(at(id));
      if (ids.size() >= 3) out.pr += iso_ratio_excess(pts);
      if (ids.size() == 2) out.pa += sq(len(pts[0], pts[1]) - 1);
      if (ids.size() >= 3) {
        for (std::size_t i = 0; i < pts.size(); ++i) out.pa += sq(len(pts[i], pts[(i + 1) % pts.size()]) - 1);
      }
    }
    for (int r1 = 0; r1 < n_rel; ++r1) {
      for (int r2 = r1 + 1; r2 < n_rel; ++r2) pair(r1, r2, out);
    }
    out.total = R(w_.k_pr) * out.pr + R(w_.k_pa) * out.pa + R(w_.k_ps) * (out.ps + out.mono) +
                R(w_.k_pi) * out.pi;
    return out;
  }

 private:
  static R sq(R x) { return x * x; }
  static R pi() { return std::numbers::pi_v<R>; }

  Pt at(const std::string& id) const {
    const auto& p = s_.positions[static_cast<std::size_t>(h_.entity_index(id))];
    return {R(p.x), R(p.y)};
  }

  static R len(Pt a, Pt b) { return std::hypot(b.first - a.first, b.second - a.second); }

  std::vector<std::string> order_ids(int r) const {
    std::vector<std::string> out;
    for (int v : s_.orders[static_cast<std::size_t>(r)]) out.push_back(h_.entity(v).id);
    return out;
  }

  std::set<std::string> member_ids(int r) const {
    std::set<std::string> out;
    for (int v : h_.relationship(r).members) out.insert(h_.entity(v).id);
    return out;
  }

  // Area by the trapezoid rule.
  static R area(const std::vector<Pt>& p) {
    R a = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const Pt& u = p[i];
      const Pt& w = p[(i + 1) % p.size()];
      a -= (w.first - u.first) * (w.second + u.second) / 2;
    }
    return a;
  }

  static R iso_ratio_excess(const std::vector<Pt>& p) {
    const R n = static_cast<R>(p.size());
    R per = 0;
    for (std::size_t i = 0; i < p.size(); ++i) per += len(p[i], p[(i + 1) % p.size()]);
    return per * per - 4 * n * std::tan(pi() / n) * area(p);
  }

  static R hinge(R x) { return x <= 0 ? x * x : R(0); }

  static R circumradius(std::size_t n) {
    if (n == 1) return 0;
    if (n == 2) return R(0.5);
    return R(0.5) / std::sin(pi() / static_cast<R>(n));
  }

  static R apothem(std::size_t n) {
    if (n < 3) return 0;
    return R(0.5) * std::cos(pi() / static_cast<R>(n)) / std::sin(pi() / static_cast<R>(n));
  }

  Pt mean(int r) const {
    R x = 0, y = 0;
    const auto ids = member_ids(r);
    for (const auto& id : ids) {
      x += at(id).first;
      y += at(id).second;
    }
    return {x / static_cast<R>(ids.size()), y / static_cast<R>(ids.size())};
  }

  Pt drop_center(int r) const {
    const Pt v = at(*member_ids(r).begin());
    const R l = R(s_.monogon_angles[static_cast<std::size_t>(r)]);
    const R cd = R(w_.monogon_center_dist);
    return {v.first + cd * std::cos(l), v.second + cd * std::sin(l)};
  }

  // Sum over runs between consecutive shared vertices in `order`.
  R evenness(const std::vector<std::string>& order, const std::set<std::string>& shared,
             std::vector<std::string>* induced) const {
    const std::size_t n = order.size();
    std::size_t first = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (shared.count(order[i])) {
        first = i;
        break;
      }
    }
    const R ideal = static_cast<R>(n) / static_cast<R>(shared.size());
    R e = 0, run = 0;
    if (induced) induced->clear();
    for (std::size_t k = 0; k < n; ++k) {
      const std::string& a = order[(first + k) % n];
      const std::string& b = order[(first + k + 1) % n];
      if (k == 0 || shared.count(a)) {
        if (k > 0) e += sq(run - ideal);
        run = 0;
        if (induced) induced->push_back(a);
      }
      run += len(at(a), at(b));
    }
    e += sq(run - ideal);
    return e;
  }

  void pair(int r1, int r2, BruteBreakdownT<R>& out) const {
    const auto m1 = member_ids(r1), m2 = member_ids(r2);
    const std::size_t n1 = m1.size(), n2 = m2.size();
    std::set<std::string> shared;
    std::set_intersection(m1.begin(), m1.end(), m2.begin(), m2.end(),
                          std::inserter(shared, shared.begin()));
    if (n1 == 1 || n2 == 1) {
      if (shared.empty()) return;
      // Monogon repulsion, from the monogon's point of view.
      auto rep = [](R weight, Pt a, Pt b) {
        const R d = len(a, b);
        return std::min(weight / (d * d), R(1e12));
      };
      if (n1 == 1 && n2 == 1) {
        out.mono += rep(R(w_.w_mono_pair), drop_center(r1), drop_center(r2));
      } else if (n1 == 1) {
        out.mono += rep(R(w_.w_mono), drop_center(r1), mean(r2));
      } else {
        out.mono += rep(R(w_.w_mono), drop_center(r2), mean(r1));
      }
      return;
    }
    const Pt c1 = mean(r1), c2 = mean(r2);
    if (shared.empty()) {
      out.ps += hinge(len(c1, c2) - (circumradius(n1) + circumradius(n2) + R(w_.d_b)));
    } else if (shared.size() == 1) {
      const Pt p = at(*shared.begin());
      const R t1 = std::atan2(c1.second - p.second, c1.first - p.first);
      const R t2 = std::atan2(c2.second - p.second, c2.first - p.first);
      R a = std::fabs(t1 - t2);
      if (a > pi()) a = 2 * pi() - a;
      if (len(p, c1) == 0 || len(p, c2) == 0) a = 0;
      const R a0 = pi() * ((R(n1) - 2) / (2 * R(n1)) + (R(n2) - 2) / (2 * R(n2))) + R(w_.a_b);
      out.ps += hinge(a - a0);
    } else if (shared.size() == 2) {
      out.ps += hinge(len(c1, c2) - (apothem(n1) + apothem(n2)));
    } else {
      std::vector<std::string> induced;
      out.pi += evenness(order_ids(r1), shared, &induced);
      out.pi += evenness(order_ids(r2), shared, nullptr);
      std::vector<Pt> pts;
      for (const auto& id : induced) pts.push_back(at(id));
      out.pi += iso_ratio_excess(pts);
    }
  }

  const Hypergraph& h_;
  const LayoutState& s_;
  const Weights& w_;
};

template <class R = double>
inline BruteBreakdownT<R> brute_force_energy(const Hypergraph& h, const LayoutState& s,
                                             const Weights& w) {
  return BruteEvaluator<R>(h, s, w).run();
}

}  // namespace polylay::testing
