#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "polylay/geometry.hpp"
#include "polylay/hypergraph.hpp"
#include "polylay/layout_state.hpp"
#include "polylay/weights.hpp"

namespace polylay {

/// Largest value a single monogon repulsion may contribute.
inline constexpr double kMonogonRepulsionCap = 1e12;

struct EnergyBreakdown {
  double e_pr = 0.0;
  double e_pa = 0.0;
  double e_ps = 0.0;
  double e_pi = 0.0;
  double e_dd = 0.0;
  double e_ps_monogons = 0.0;
  double total = 0.0;
  bool singular = false;

  EnergyBreakdown& operator+=(const EnergyBreakdown& o) {
    e_pr += o.e_pr;
    e_pa += o.e_pa;
    e_ps += o.e_ps;
    e_pi += o.e_pi;
    e_dd += o.e_dd;
    e_ps_monogons += o.e_ps_monogons;
    total += o.total;
    singular = singular || o.singular;
    return *this;
  }
};

/// Gradient of an energy with respect to one layout's free variables.
struct LayoutGradient {
  std::vector<Point2> positions;
  std::vector<double> angles;

  void reset(const Hypergraph& h) {
    positions.assign(h.num_entities(), Point2{});
    angles.assign(h.num_relationships(), 0.0);
  }
};

namespace detail {

inline Point2 pos(const LayoutState& s, int v) { return s.positions[static_cast<std::size_t>(v)]; }

/// P^2 - C_n * A over the cyclic sequence `order`; n is the order's length.
inline double regularity_term(const LayoutState& s, std::span<const int> order, double scale,
                              Point2* grad) {
  const std::size_t n = order.size();
  const double c = iso_constant(static_cast<int>(n));
  double per = 0.0;
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = pos(s, order[i]);
    const Point2 b = pos(s, order[(i + 1) % n]);
    per += distance(a, b);
    area2 += cross(a, b);
  }
  const double value = per * per - c * 0.5 * area2;
  if (grad) {
    for (std::size_t i = 0; i < n; ++i) {
      const int ia = order[i];
      const int ib = order[(i + 1) % n];
      const int iprev = order[(i + n - 1) % n];
      const Point2 a = pos(s, ia);
      const Point2 b = pos(s, ib);
      const double len = distance(a, b);
      if (len > 0.0) {
        const Point2 t = (b - a) * (2.0 * per * scale / len);
        grad[ia] -= t;
        grad[ib] += t;
      }
      const Point2 prev = pos(s, iprev);
      // dA/dx_i = (y_{i+1} - y_{i-1}) / 2, dA/dy_i = (x_{i-1} - x_{i+1}) / 2
      grad[ia] -= Point2{b.y - prev.y, prev.x - b.x} * (0.5 * c * scale);
    }
  }
  return value;
}

inline double edge_length_term(const LayoutState& s, int a, int b, double scale, Point2* grad) {
  const Point2 d = pos(s, b) - pos(s, a);
  const double len = norm(d);
  const double x = len - 1.0;
  if (grad && len > 0.0) {
    const Point2 g = d * (2.0 * x * scale / len);
    grad[a] -= g;
    grad[b] += g;
  }
  return x * x;
}

/// f(d - target) with f(x) = x^2 for x <= 0, between the vertex centroids of
/// two member lists.
inline double centroid_distance_term(std::span<const int> m1, Point2 c1,
                                     std::span<const int> m2, Point2 c2, double target,
                                     double scale, Point2* grad) {
  const Point2 diff = c1 - c2;
  const double d2 = norm2(diff);
  if (d2 > target * target) return 0.0;
  const double d = std::sqrt(d2);
  const double x = d - target;
  if (grad && d > 0.0) {
    const Point2 g = diff * (2.0 * x * scale / d);
    const Point2 g1 = g * (1.0 / static_cast<double>(m1.size()));
    const Point2 g2 = g * (1.0 / static_cast<double>(m2.size()));
    for (int v : m1) grad[v] += g1;
    for (int v : m2) grad[v] -= g2;
  }
  return x * x;
}

}  // namespace detail

/// Single-layout objective over one hypergraph. Holds a reference to the
/// hypergraph, which must outlive the model.
class EnergyModel {
 public:
  EnergyModel(const Hypergraph& h, Weights w) : h_(&h), w_(w) {
    w_.validate();
    const std::size_t nr = h.num_relationships();
    std::map<std::pair<int, int>, std::vector<int>> shared;
    for (std::size_t v = 0; v < h.num_entities(); ++v) {
      const auto& inc = h.incident(static_cast<int>(v));
      for (std::size_t i = 0; i < inc.size(); ++i) {
        for (std::size_t j = i + 1; j < inc.size(); ++j) {
          shared[{std::min(inc[i], inc[j]), std::max(inc[i], inc[j])}].push_back(
              static_cast<int>(v));
        }
      }
    }
    shares_.assign(nr * nr, 0);
    for (auto& [key, verts] : shared) {
      shares_[static_cast<std::size_t>(key.first) * nr + static_cast<std::size_t>(key.second)] = 1;
      sharing_.push_back({key.first, key.second, std::move(verts)});
    }
    for (std::size_t r = 0; r < nr; ++r) {
      if (h.relationships()[r].cardinality() >= 2) polygons_.push_back(static_cast<int>(r));
      if (h.relationships()[r].cardinality() == 1) monogons_.push_back(static_cast<int>(r));
    }
  }

  const Hypergraph& hypergraph() const { return *h_; }
  const Weights& weights() const { return w_; }

  double e_pr(const LayoutState& s) const { return pr(s, 0.0, nullptr); }
  double e_pa(const LayoutState& s) const { return pa(s, 0.0, nullptr); }

  double e_ps_pair(const LayoutState& s, int r1, int r2, bool* singular = nullptr) const {
    if (r1 == r2) throw DataError("e_ps_pair: relationship paired with itself");
    if (h_->relationship(r1).cardinality() < 2 || h_->relationship(r2).cardinality() < 2) {
      return 0.0;  // monogons are separated by e_ps_monogon
    }
    const auto shared = shared_members(*h_, r1, r2);
    bool flag = false;
    const double e = ps_pair(s, r1, r2, shared, centroid(s, r1), centroid(s, r2), 0.0, nullptr,
                             flag);
    if (singular) *singular = flag;
    return e;
  }

  double e_pi_pair(const LayoutState& s, int r1, int r2) const {
    const auto shared = shared_members(*h_, r1, r2);
    if (shared.size() < 3) return 0.0;
    return pi_pair(s, r1, r2, shared, 0.0, nullptr);
  }

  double e_ps(const LayoutState& s) const { return evaluate(s).e_ps; }
  double e_pi(const LayoutState& s) const { return evaluate(s).e_pi; }

  double e_ps_monogon(const LayoutState& s, bool* singular = nullptr) const {
    bool flag = false;
    const double e = monogons(s, 0.0, nullptr, nullptr, flag);
    if (singular) *singular = flag;
    return e;
  }

  /// Component values and their weighted sum (no E_DD in single-view mode).
  /// With `grad`, the gradient of `total` is added into it (it must be sized
  /// via LayoutGradient::reset); polygon orders are held fixed.
  EnergyBreakdown evaluate(const LayoutState& s, LayoutGradient* grad = nullptr) const {
    EnergyBreakdown b;
    Point2* gp = grad ? grad->positions.data() : nullptr;
    double* ga = grad ? grad->angles.data() : nullptr;

    b.e_pr = pr(s, w_.k_pr, gp);
    b.e_pa = pa(s, w_.k_pa, gp);

    const std::size_t nr = h_->num_relationships();
    std::vector<Point2> centroids(nr);
    for (std::size_t r = 0; r < nr; ++r) centroids[r] = centroid(s, static_cast<int>(r));

    // Disjoint polygon pairs.
    for (std::size_t i = 0; i < polygons_.size(); ++i) {
      const int r1 = polygons_[i];
      const auto& m1 = h_->relationship(r1).members;
      const double rho1 = circumradius_regular(static_cast<int>(m1.size()));
      for (std::size_t j = i + 1; j < polygons_.size(); ++j) {
        const int r2 = polygons_[j];
        if (shares_[static_cast<std::size_t>(r1) * nr + static_cast<std::size_t>(r2)]) continue;
        const auto& m2 = h_->relationship(r2).members;
        const double target =
            rho1 + circumradius_regular(static_cast<int>(m2.size())) + w_.d_b;
        b.e_ps += detail::centroid_distance_term(m1, centroids[static_cast<std::size_t>(r1)],
                                                 m2, centroids[static_cast<std::size_t>(r2)],
                                                 target, w_.k_ps, gp);
      }
    }
    // Pairs sharing vertices.
    for (const auto& sp : sharing_) {
      const auto c1 = h_->relationship(sp.r1).cardinality();
      const auto c2 = h_->relationship(sp.r2).cardinality();
      if (c1 < 2 || c2 < 2) continue;
      if (sp.shared.size() >= 3) {
        b.e_pi += pi_pair(s, sp.r1, sp.r2, sp.shared, w_.k_pi, gp);
      } else {
        b.e_ps += ps_pair(s, sp.r1, sp.r2, sp.shared, centroids[static_cast<std::size_t>(sp.r1)],
                          centroids[static_cast<std::size_t>(sp.r2)], w_.k_ps, gp, b.singular);
      }
    }
    b.e_ps_monogons = monogons(s, w_.k_ps, gp, ga, b.singular);
    b.total = w_.k_pr * b.e_pr + w_.k_pa * b.e_pa + w_.k_ps * (b.e_ps + b.e_ps_monogons) +
              w_.k_pi * b.e_pi;
    return b;
  }

  /// k_PS * E_PS(monogons): the only single-view term that depends on the
  /// monogon angles. Adds its angle gradient into `angle_grad` when given.
  double monogon_objective(const LayoutState& s, double* angle_grad, bool* singular = nullptr) const {
    bool flag = false;
    const double e = w_.k_ps * monogons(s, w_.k_ps, nullptr, angle_grad, flag);
    if (singular) *singular = flag;
    return e;
  }

  const std::vector<int>& monogon_ids() const { return monogons_; }

  /// Vertex centroid of a relationship, or the waterdrop center for a monogon.
  Point2 center(const LayoutState& s, int r) const {
    if (h_->relationship(r).cardinality() == 1) {
      return monogon_center(s, r, w_.monogon_center_dist);
    }
    return centroid(s, r);
  }

 private:
  struct SharedPair {
    int r1;
    int r2;
    std::vector<int> shared;
  };

  Point2 centroid(const LayoutState& s, int r) const {
    const auto& m = h_->relationship(r).members;
    Point2 c;
    for (int v : m) c += detail::pos(s, v);
    return c * (1.0 / static_cast<double>(m.size()));
  }

  double pr(const LayoutState& s, double scale, Point2* grad) const {
    double e = 0.0;
    for (std::size_t r = 0; r < h_->num_relationships(); ++r) {
      if (h_->relationships()[r].cardinality() < 3) continue;
      e += detail::regularity_term(s, s.orders[r], scale, grad);
    }
    return e;
  }

  double pa(const LayoutState& s, double scale, Point2* grad) const {
    double e = 0.0;
    for (std::size_t r = 0; r < h_->num_relationships(); ++r) {
      const auto& o = s.orders[r];
      if (o.size() < 2) continue;
      if (o.size() == 2) {
        e += detail::edge_length_term(s, o[0], o[1], scale, grad);
        continue;
      }
      for (std::size_t i = 0; i < o.size(); ++i) {
        e += detail::edge_length_term(s, o[i], o[(i + 1) % o.size()], scale, grad);
      }
    }
    return e;
  }

  double ps_pair(const LayoutState& s, int r1, int r2, const std::vector<int>& shared, Point2 c1,
                 Point2 c2, double scale, Point2* grad, bool& singular) const {
    const auto& m1 = h_->relationship(r1).members;
    const auto& m2 = h_->relationship(r2).members;
    const int n1 = static_cast<int>(m1.size());
    const int n2 = static_cast<int>(m2.size());
    switch (shared.size()) {
      case 0:
        return detail::centroid_distance_term(
            m1, c1, m2, c2, circumradius_regular(n1) + circumradius_regular(n2) + w_.d_b, scale,
            grad);
      case 1:
        return angle_term(s, shared.front(), m1, c1, m2, c2, scale, grad, singular);
      case 2: {
        auto apothem = [](int n) { return n >= 3 ? apothem_regular(n) : 0.0; };
        return detail::centroid_distance_term(m1, c1, m2, c2, apothem(n1) + apothem(n2), scale,
                                              grad);
      }
      default:
        return 0.0;
    }
  }

  double angle_term(const LayoutState& s, int pivot, const std::vector<int>& m1, Point2 c1,
                    const std::vector<int>& m2, Point2 c2, double scale, Point2* grad,
                    bool& singular) const {
    const double n1 = static_cast<double>(m1.size());
    const double n2 = static_cast<double>(m2.size());
    const double a0 = std::numbers::pi * ((n1 - 2.0) / (2.0 * n1) + (n2 - 2.0) / (2.0 * n2)) + w_.a_b;
    const Point2 p = detail::pos(s, pivot);
    const Point2 u = c1 - p;
    const Point2 w = c2 - p;
    const double uu = norm2(u);
    const double ww = norm2(w);
    if (uu == 0.0 || ww == 0.0) {
      singular = true;
      return a0 * a0;
    }
    const double phi = std::atan2(cross(u, w), dot(u, w));
    const double theta = std::abs(phi);
    const double x = theta - a0;
    if (x > 0.0) return 0.0;
    if (grad) {
      const double sgn = phi >= 0.0 ? 1.0 : -1.0;
      const double k = 2.0 * x * scale * sgn;
      const Point2 gu = Point2{u.y, -u.x} * (k / uu);
      const Point2 gw = Point2{-w.y, w.x} * (k / ww);
      for (int v : m1) grad[v] += gu * (1.0 / n1);
      for (int v : m2) grad[v] += gw * (1.0 / n2);
      grad[pivot] -= gu + gw;
    }
    return x * x;
  }

  /// Division energy of the shared vertices against one polygon's order.
  double division_term(const LayoutState& s, const std::vector<int>& order,
                       const std::vector<int>& shared, double scale, Point2* grad,
                       std::vector<int>* induced) const {
    const std::size_t n = order.size();
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(shared.begin(), shared.end(), order[i]) != shared.end()) slots.push_back(i);
    }
    if (slots.size() != shared.size()) {
      throw std::logic_error("division_term: shared vertices missing from polygon order");
    }
    if (induced) {
      induced->clear();
      for (std::size_t k : slots) induced->push_back(order[k]);
    }
    const double ideal = static_cast<double>(n) / static_cast<double>(slots.size());
    double e = 0.0;
    for (std::size_t j = 0; j < slots.size(); ++j) {
      const std::size_t begin = slots[j];
      const std::size_t end = j + 1 < slots.size() ? slots[j + 1] : slots[0] + n;
      double run = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        run += distance(detail::pos(s, order[k % n]), detail::pos(s, order[(k + 1) % n]));
      }
      const double x = run - ideal;
      e += x * x;
      if (grad) {
        for (std::size_t k = begin; k < end; ++k) {
          const int a = order[k % n];
          const int b = order[(k + 1) % n];
          const Point2 d = detail::pos(s, b) - detail::pos(s, a);
          const double len = norm(d);
          if (len == 0.0) continue;
          const Point2 g = d * (2.0 * x * scale / len);
          grad[a] -= g;
          grad[b] += g;
        }
      }
    }
    return e;
  }

  double pi_pair(const LayoutState& s, int r1, int r2, const std::vector<int>& shared, double scale,
                 Point2* grad) const {
    std::vector<int> induced;
    double e = division_term(s, s.orders[static_cast<std::size_t>(r1)], shared, scale, grad,
                             &induced);
    e += division_term(s, s.orders[static_cast<std::size_t>(r2)], shared, scale, grad, nullptr);
    e += detail::regularity_term(s, induced, scale, grad);
    return e;
  }

  double monogons(const LayoutState& s, double scale, Point2* grad, double* angle_grad,
                  bool& singular) const {
    const double cd = w_.monogon_center_dist;
    double e = 0.0;
    for (int m : monogons_) {
      const int v = h_->relationship(m).members.front();
      const double lm = s.monogon_angles[static_cast<std::size_t>(m)];
      const Point2 cm = detail::pos(s, v) + direction(lm) * cd;
      const Point2 dcm{-std::sin(lm) * cd, std::cos(lm) * cd};
      for (int r : h_->incident(v)) {
        if (r == m) continue;
        const auto& mr = h_->relationship(r).members;
        const bool pair = mr.size() == 1;
        if (pair && r < m) continue;  // unordered monogon pairs counted once
        const double w = pair ? w_.w_mono_pair : w_.w_mono;
        const Point2 other = pair ? monogon_center(s, r, cd) : centroid(s, r);
        const Point2 diff = cm - other;
        const double d2 = norm2(diff);
        if (d2 * kMonogonRepulsionCap <= w) {
          singular = true;
          e += kMonogonRepulsionCap;
          continue;
        }
        e += w / d2;
        // dE/d(diff) = -2 w diff / d^4
        const Point2 g = diff * (-2.0 * w * scale / (d2 * d2));
        if (pair) {
          if (angle_grad) {
            const double lr = s.monogon_angles[static_cast<std::size_t>(r)];
            const Point2 dcr{-std::sin(lr) * cd, std::cos(lr) * cd};
            angle_grad[m] += dot(g, dcm);
            angle_grad[r] -= dot(g, dcr);
          }
          continue;
        }
        if (grad) {
          grad[v] += g;
          const Point2 gr = g * (1.0 / static_cast<double>(mr.size()));
          for (int k : mr) grad[k] -= gr;
        }
        if (angle_grad) angle_grad[m] += dot(g, dcm);
      }
    }
    return e;
  }

  const Hypergraph* h_;
  Weights w_;
  std::vector<SharedPair> sharing_;
  std::vector<char> shares_;
  std::vector<int> polygons_;
  std::vector<int> monogons_;
};

// ---------------------------------------------------------------------------
// Dual distance

/// E_DD between a primal layout and its dual. The primal side sums, over
/// primal vertices, the squared distance to the center of the dual polygon
/// they map to; with `symmetric`, the dual vertices are pulled toward their
/// primal polygons the same way. Monogon centers are waterdrop centers.
/// Gradients (scaled by `scale`) are added when the pointers are non-null.
inline double dual_distance_energy(const EnergyModel& primal, const LayoutState& sp,
                                   const EnergyModel& dual, const LayoutState& sd,
                                   const DualIndex& ix, bool symmetric, double scale = 0.0,
                                   LayoutGradient* gp = nullptr, LayoutGradient* gd = nullptr) {
  auto side = [scale](const LayoutState& vs, const EnergyModel& pm,
                      const LayoutState& ps, const std::vector<int>& vertex_to_polygon,
                      LayoutGradient* gv, LayoutGradient* gpoly) {
    const Hypergraph& ph = pm.hypergraph();
    const double cd = pm.weights().monogon_center_dist;
    double e = 0.0;
    for (std::size_t v = 0; v < vertex_to_polygon.size(); ++v) {
      const int r = vertex_to_polygon[v];
      const Point2 diff = vs.positions[v] - pm.center(ps, r);
      e += norm2(diff);
      if (!gv) continue;
      const Point2 g = diff * (2.0 * scale);
      gv->positions[v] += g;
      const auto& members = ph.relationship(r).members;
      const Point2 gm = g * (1.0 / static_cast<double>(members.size()));
      for (int k : members) gpoly->positions[static_cast<std::size_t>(k)] -= gm;
      if (members.size() == 1) {
        const double l = ps.monogon_angles[static_cast<std::size_t>(r)];
        gpoly->angles[static_cast<std::size_t>(r)] -= dot(g, Point2{-std::sin(l), std::cos(l)} * cd);
      }
    }
    return e;
  };
  double e = side(sp, dual, sd, ix.vertex_to_dual_edge, gp, gd);
  if (symmetric) {
    // Dual vertex u = image(r) is pulled toward primal polygon r.
    std::vector<int> u_to_r(ix.edge_to_dual_vertex.size());
    for (std::size_t r = 0; r < ix.edge_to_dual_vertex.size(); ++r) {
      u_to_r[static_cast<std::size_t>(ix.edge_to_dual_vertex[r])] = static_cast<int>(r);
    }
    e += side(sd, primal, sp, u_to_r, gd, gp);
  }
  return e;
}

/// Primal + dual objective coupled by k_DD * E_DD. Both hypergraphs and the
/// map must outlive it.
class JointEnergy {
 public:
  JointEnergy(const Hypergraph& primal, const Hypergraph& dual, const DualMap& dm, Weights w)
      : primal_(primal, w), dual_(dual, w), ix_(index_dual_map(primal, dual, dm)), w_(w) {}

  const EnergyModel& primal() const { return primal_; }
  const EnergyModel& dual() const { return dual_; }
  const DualIndex& index() const { return ix_; }
  const Weights& weights() const { return w_; }

  EnergyBreakdown evaluate(const LayoutState& sp, const LayoutState& sd,
                           LayoutGradient* gp = nullptr, LayoutGradient* gd = nullptr) const {
    EnergyBreakdown b = primal_.evaluate(sp, gp);
    b += dual_.evaluate(sd, gd);
    b.e_dd = e_dd(sp, sd, w_.k_dd, gp, gd);
    b.total += w_.k_dd * b.e_dd;
    return b;
  }

  double e_dd(const LayoutState& sp, const LayoutState& sd, double scale = 0.0,
              LayoutGradient* gp = nullptr, LayoutGradient* gd = nullptr) const {
    return dual_distance_energy(primal_, sp, dual_, sd, ix_, w_.dd_symmetric, scale, gp, gd);
  }

  /// Angle-dependent part of the total: monogon repulsion in both views plus
  /// k_DD * E_DD.
  double monogon_objective(const LayoutState& sp, const LayoutState& sd, double* ga_primal,
                           double* ga_dual) const {
    double e = primal_.monogon_objective(sp, ga_primal) + dual_.monogon_objective(sd, ga_dual);
    if (ga_primal || ga_dual) {
      LayoutGradient gp, gd;
      gp.reset(primal_.hypergraph());
      gd.reset(dual_.hypergraph());
      e += w_.k_dd * e_dd(sp, sd, w_.k_dd, &gp, &gd);
      if (ga_primal) for (std::size_t r = 0; r < gp.angles.size(); ++r) ga_primal[r] += gp.angles[r];
      if (ga_dual) for (std::size_t r = 0; r < gd.angles.size(); ++r) ga_dual[r] += gd.angles[r];
    } else {
      e += w_.k_dd * e_dd(sp, sd);
    }
    return e;
  }

 private:
  EnergyModel primal_;
  EnergyModel dual_;
  DualIndex ix_;
  Weights w_;
};

inline EnergyBreakdown total_energy(const Hypergraph& h, const LayoutState& s, const Weights& w) {
  return EnergyModel(h, w).evaluate(s);
}

inline EnergyBreakdown total_energy(const Hypergraph& primal, const LayoutState& sp,
                                    const Hypergraph& dual, const LayoutState& sd,
                                    const DualMap& dm, const Weights& w) {
  return JointEnergy(primal, dual, dm, w).evaluate(sp, sd);
}

}  // namespace polylay
