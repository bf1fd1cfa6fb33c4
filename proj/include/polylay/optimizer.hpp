#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polylay/energy.hpp"
#include "polylay/hypergraph.hpp"
#include "polylay/layout_state.hpp"
#include "polylay/lbfgs.hpp"
#include "polylay/weights.hpp"

namespace polylay {

enum class Mode { kPrimal, kDual, kJoint };

inline Mode parse_mode(std::string_view s) {
  if (s == "primal") return Mode::kPrimal;
  if (s == "dual") return Mode::kDual;
  if (s == "joint") return Mode::kJoint;
  throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::kPrimal: return "primal";
    case Mode::kDual: return "dual";
    case Mode::kJoint: return "joint";
  }
  return "?";
}

/// Which two vertices are pinned. Empty `ids` selects the endpoints of the
/// first edge of the highest-cardinality polygon.
struct FixedVertexPolicy {
  std::vector<std::string> ids;
  // Rescale the layout so the pinned pair starts at unit distance, letting
  // the pinned edge reach its ideal length.
  bool normalize = true;
};

enum class AcceptKind { kInitial, kLineSearch, kSwap, kMonogon };

/// A configuration the optimizer committed to. `dual` is null outside joint
/// mode.
struct AcceptEvent {
  AcceptKind kind;
  double total;
  const LayoutState* primal;
  const LayoutState* dual;
};

struct RoundLog {
  int round;
  EnergyBreakdown breakdown;
  int swaps;
  double seconds;
};

struct OptimizeConfig {
  Mode mode = Mode::kPrimal;
  Weights weights = Weights::single_view();
  int max_rounds = 50;
  int lbfgs_memory = 10;
  int lbfgs_max_iters = 200;
  double rel_tol = 1e-6;
  bool swap_enabled = true;
  FixedVertexPolicy fixed_vertex_policy;
  std::uint64_t seed = 1;

  std::function<void(const AcceptEvent&)> on_accept;
  std::function<void(const RoundLog&)> on_round;

  void validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be > 0");
    if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
    if (lbfgs_memory < 1 || lbfgs_max_iters < 1) {
      throw std::invalid_argument("lbfgs memory and iteration limits must be >= 1");
    }
    weights.validate();
  }

  LbfgsParams lbfgs() const {
    LbfgsParams p;
    p.memory = lbfgs_memory;
    p.max_iterations = lbfgs_max_iters;
    return p;
  }
};

struct OptimizeReport {
  int rounds = 0;
  std::vector<EnergyBreakdown> breakdown_history;
  int swaps_accepted = 0;
  double wall_time = 0.0;
  bool converged = false;
};

/// Picks the pinned pair per policy.
inline std::vector<int> choose_fixed_vertices(const Hypergraph& h, const LayoutState& s,
                                              const FixedVertexPolicy& policy) {
  std::vector<int> fixed;
  if (!policy.ids.empty()) {
    if (policy.ids.size() != 2 || policy.ids[0] == policy.ids[1]) {
      throw std::invalid_argument("fixed vertex policy needs two distinct ids");
    }
    for (const auto& id : policy.ids) fixed.push_back(h.entity_index(id));
    return fixed;
  }
  int best = -1;
  for (std::size_t r = 0; r < h.num_relationships(); ++r) {
    const auto c = h.relationships()[r].cardinality();
    if (c >= 2 && (best < 0 || c > h.relationship(best).cardinality())) best = static_cast<int>(r);
  }
  if (best >= 0) {
    const auto& o = s.orders[static_cast<std::size_t>(best)];
    return {o[0], o[1]};
  }
  for (std::size_t v = 0; v < std::min<std::size_t>(2, h.num_entities()); ++v) {
    fixed.push_back(static_cast<int>(v));
  }
  return fixed;
}

/// Scales the layout about the first pinned vertex so the pinned pair ends
/// at unit distance. A similarity keeps every polygon order intact.
inline void normalize_gauge(const Hypergraph& h, LayoutState& s) {
  if (s.fixed.size() != 2) return;
  const Point2 a = s.positions[static_cast<std::size_t>(s.fixed[0])];
  const Point2 b = s.positions[static_cast<std::size_t>(s.fixed[1])];
  const double len = norm(b - a);
  if (len > 0.0) {
    for (auto& p : s.positions) p = a + (p - a) * (1.0 / len);
  } else {
    s.positions[static_cast<std::size_t>(s.fixed[1])] = a + Point2{1.0, 0.0};
  }
  starrize_all(h, s);
}

namespace detail {

/// One or two layouts optimized together, with the objective that couples
/// them.
class Problem {
 public:
  Problem(const EnergyModel& m, LayoutState& s) : joint_(nullptr) { add(m, s); }
  Problem(const JointEnergy& j, LayoutState& p, LayoutState& d) : joint_(&j) {
    add(j.primal(), p);
    add(j.dual(), d);
  }

  struct View {
    const EnergyModel* model;
    LayoutState* state;
    std::vector<char> fixed;
  };

  std::vector<View>& views() { return views_; }
  const Hypergraph& graph(std::size_t i) const { return views_[i].model->hypergraph(); }

  EnergyBreakdown evaluate(std::vector<LayoutGradient>* grads = nullptr) const {
    LayoutGradient* g0 = grads ? &(*grads)[0] : nullptr;
    if (joint_) {
      return joint_->evaluate(*views_[0].state, *views_[1].state, g0,
                              grads ? &(*grads)[1] : nullptr);
    }
    return views_[0].model->evaluate(*views_[0].state, g0);
  }

  /// The part of the total that depends on monogon angles.
  double monogon_objective(std::vector<LayoutGradient>* grads) const {
    double* a0 = grads ? (*grads)[0].angles.data() : nullptr;
    if (joint_) {
      return joint_->monogon_objective(*views_[0].state, *views_[1].state, a0,
                                       grads ? (*grads)[1].angles.data() : nullptr);
    }
    return views_[0].model->monogon_objective(*views_[0].state, a0);
  }

  std::vector<LayoutGradient> zero_gradients() const {
    std::vector<LayoutGradient> g(views_.size());
    for (std::size_t i = 0; i < views_.size(); ++i) g[i].reset(graph(i));
    return g;
  }

  void restarrize() {
    for (std::size_t i = 0; i < views_.size(); ++i) starrize_all(graph(i), *views_[i].state);
  }

  void notify(const std::function<void(const AcceptEvent&)>& cb, AcceptKind kind,
              double total) const {
    if (!cb) return;
    cb(AcceptEvent{kind, total, views_[0].state, joint_ ? views_[1].state : nullptr});
  }

 private:
  void add(const EnergyModel& m, LayoutState& s) {
    View v{&m, &s, std::vector<char>(m.hypergraph().num_entities(), 0)};
    for (int f : s.fixed) v.fixed[static_cast<std::size_t>(f)] = 1;
    views_.push_back(std::move(v));
  }

  const JointEnergy* joint_;
  std::vector<View> views_;
};

struct FreeVar {
  std::size_t view;
  std::size_t entity;
};

inline std::vector<FreeVar> free_positions(Problem& p) {
  std::vector<FreeVar> vars;
  for (std::size_t i = 0; i < p.views().size(); ++i) {
    const auto& v = p.views()[i];
    for (std::size_t e = 0; e < v.state->positions.size(); ++e) {
      if (!v.fixed[e]) vars.push_back({i, e});
    }
  }
  return vars;
}

inline void apply_positions(Problem& p, const std::vector<FreeVar>& vars,
                            const std::vector<double>& x) {
  for (std::size_t k = 0; k < vars.size(); ++k) {
    auto& pos = p.views()[vars[k].view].state->positions[vars[k].entity];
    pos.x = x[2 * k];
    pos.y = x[2 * k + 1];
  }
  p.restarrize();
}

/// Line-search descent over the free coordinates. Polygon orders are
/// re-derived at every trial point.
inline LbfgsResult line_search_phase(Problem& p, const LbfgsParams& params,
                                     const std::function<void(const AcceptEvent&)>& on_accept) {
  const auto vars = free_positions(p);
  std::vector<double> x(2 * vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const Point2 q = p.views()[vars[k].view].state->positions[vars[k].entity];
    x[2 * k] = q.x;
    x[2 * k + 1] = q.y;
  }
  auto grads = p.zero_gradients();
  auto objective = [&](const std::vector<double>& xv, std::vector<double>& g) {
    apply_positions(p, vars, xv);
    for (auto& gr : grads) std::fill(gr.positions.begin(), gr.positions.end(), Point2{});
    const double f = p.evaluate(&grads).total;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const Point2 gk = grads[vars[k].view].positions[vars[k].entity];
      g[2 * k] = gk.x;
      g[2 * k + 1] = gk.y;
    }
    return f;
  };
  auto on_iterate = [&](const std::vector<double>& xv, double f) {
    if (!on_accept) return;
    apply_positions(p, vars, xv);
    p.notify(on_accept, AcceptKind::kLineSearch, f);
  };
  const LbfgsResult res = lbfgs_minimize(objective, x, params, on_iterate);
  apply_positions(p, vars, x);
  return res;
}

inline std::vector<int> id_sorted(const Hypergraph& h) {
  std::vector<int> ids(h.num_relationships());
  for (std::size_t r = 0; r < ids.size(); ++r) ids[r] = static_cast<int>(r);
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    return h.relationship(a).id < h.relationship(b).id;
  });
  return ids;
}

/// Sweeps every vertex pair inside every polygon, keeping swaps that
/// strictly lower the total, until a sweep accepts nothing.
inline int swap_phase(Problem& p, const std::function<void(const AcceptEvent&)>& on_accept) {
  double current = p.evaluate().total;
  int accepted = 0;
  std::vector<std::pair<int, std::vector<int>>> saved;
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t vi = 0; vi < p.views().size(); ++vi) {
      auto& view = p.views()[vi];
      const Hypergraph& h = p.graph(vi);
      LayoutState& s = *view.state;
      for (int r : id_sorted(h)) {
        const std::size_t n = h.relationship(r).cardinality();
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = i + 1; j < n; ++j) {
            const int u = s.orders[static_cast<std::size_t>(r)][i];
            const int v = s.orders[static_cast<std::size_t>(r)][j];
            if (view.fixed[static_cast<std::size_t>(u)] || view.fixed[static_cast<std::size_t>(v)]) {
              continue;
            }
            saved.clear();
            auto touch = [&](int vertex) {
              for (int q : h.incident(vertex)) {
                if (std::none_of(saved.begin(), saved.end(),
                                 [q](const auto& e) { return e.first == q; })) {
                  saved.emplace_back(q, s.orders[static_cast<std::size_t>(q)]);
                }
              }
            };
            touch(u);
            touch(v);
            std::swap(s.positions[static_cast<std::size_t>(u)],
                      s.positions[static_cast<std::size_t>(v)]);
            for (const auto& e : saved) starrize_relationship(h, s, e.first);
            const double trial = p.evaluate().total;
            if (trial < current) {
              current = trial;
              ++accepted;
              improved = true;
              p.notify(on_accept, AcceptKind::kSwap, trial);
            } else {
              std::swap(s.positions[static_cast<std::size_t>(u)],
                        s.positions[static_cast<std::size_t>(v)]);
              for (auto& e : saved) s.orders[static_cast<std::size_t>(e.first)] = std::move(e.second);
            }
          }
        }
      }
    }
  }
  return accepted;
}

inline void monogon_phase(Problem& p, const LbfgsParams& params,
                          const std::function<void(const AcceptEvent&)>& on_accept) {
  std::vector<std::pair<std::size_t, int>> vars;
  for (std::size_t vi = 0; vi < p.views().size(); ++vi) {
    for (int m : p.views()[vi].model->monogon_ids()) vars.emplace_back(vi, m);
  }
  if (vars.empty()) return;
  auto angle = [&](std::size_t k) -> double& {
    return p.views()[vars[k].first].state->monogon_angles[static_cast<std::size_t>(vars[k].second)];
  };

  // Coordinate scan: aiming straight at an incident center is stationary.
  constexpr int kDirections = 72;
  double current = p.monogon_objective(nullptr);
  bool scanned = false;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const double original = angle(k);
    double best = original;
    for (int d = 0; d < kDirections; ++d) {
      angle(k) = 2.0 * std::numbers::pi * d / kDirections;
      const double e = p.monogon_objective(nullptr);
      if (e < current) {
        current = e;
        best = angle(k);
        scanned = true;
      }
    }
    angle(k) = best;
  }
  if (scanned) p.notify(on_accept, AcceptKind::kMonogon, p.evaluate().total);

  std::vector<double> x(vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) x[k] = angle(k);
  auto grads = p.zero_gradients();
  auto objective = [&](const std::vector<double>& xv, std::vector<double>& g) {
    for (std::size_t k = 0; k < vars.size(); ++k) angle(k) = xv[k];
    for (auto& gr : grads) std::fill(gr.angles.begin(), gr.angles.end(), 0.0);
    const double f = p.monogon_objective(&grads);
    for (std::size_t k = 0; k < vars.size(); ++k) {
      g[k] = grads[vars[k].first].angles[static_cast<std::size_t>(vars[k].second)];
    }
    return f;
  };
  auto on_iterate = [&](const std::vector<double>& xv, double) {
    if (!on_accept) return;
    for (std::size_t k = 0; k < vars.size(); ++k) angle(k) = xv[k];
    p.notify(on_accept, AcceptKind::kMonogon, p.evaluate().total);
  };
  lbfgs_minimize(objective, x, params, on_iterate);
  for (std::size_t k = 0; k < vars.size(); ++k) angle(k) = x[k];
}

inline OptimizeReport run_rounds(Problem& p, const OptimizeConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  OptimizeReport rep;
  EnergyBreakdown b = p.evaluate();
  rep.breakdown_history.push_back(b);
  p.notify(cfg.on_accept, AcceptKind::kInitial, b.total);
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    const auto t0 = clock::now();
    const double before = b.total;
    line_search_phase(p, cfg.lbfgs(), cfg.on_accept);
    const int swaps = cfg.swap_enabled ? swap_phase(p, cfg.on_accept) : 0;
    rep.swaps_accepted += swaps;
    b = p.evaluate();
    rep.breakdown_history.push_back(b);
    rep.rounds = round;
    if (cfg.on_round) {
      cfg.on_round(RoundLog{round, b, swaps,
                            std::chrono::duration<double>(clock::now() - t0).count()});
    }
    if (before - b.total <= cfg.rel_tol * std::abs(before)) {
      rep.converged = true;
      break;
    }
  }
  monogon_phase(p, cfg.lbfgs(), cfg.on_accept);
  rep.breakdown_history.push_back(p.evaluate());
  rep.wall_time = std::chrono::duration<double>(clock::now() - start).count();
  return rep;
}

}  // namespace detail

/// Quasi-Newton descent of `objective` over every non-fixed position of
/// `state` (fixed = state.fixed). Orders are restarrized at every trial
/// point. Returns the L-BFGS summary; `state` holds the best layout found.
inline LbfgsResult lbfgs_minimize(const EnergyModel& objective, LayoutState& state,
                                  const LbfgsParams& params = {}) {
  detail::Problem p(objective, state);
  return detail::line_search_phase(p, params, nullptr);
}

/// Improving pair swaps until none is left. Returns the number accepted.
inline int pair_swap_pass(const EnergyModel& objective, LayoutState& state) {
  detail::Problem p(objective, state);
  return detail::swap_phase(p, nullptr);
}

/// Minimizes the monogon term over the orientation angles only.
inline void optimize_monogon_angles(const EnergyModel& objective, LayoutState& state,
                                    const LbfgsParams& params = {}) {
  detail::Problem p(objective, state);
  detail::monogon_phase(p, params, nullptr);
}

inline void optimize_monogon_angles(const JointEnergy& objective, LayoutState& primal,
                                    LayoutState& dual, const LbfgsParams& params = {}) {
  detail::Problem p(objective, primal, dual);
  detail::monogon_phase(p, params, nullptr);
}

struct OptimizeResult {
  LayoutState state;
  OptimizeReport report;
};

/// Single-view optimization (primal or dual mode; pass the hypergraph of the
/// view being laid out).
inline OptimizeResult optimize(const Hypergraph& h, const LayoutState& init,
                               const OptimizeConfig& cfg) {
  cfg.validate();
  if (cfg.mode == Mode::kJoint) throw std::invalid_argument("optimize: use joint_optimize");
  OptimizeResult out{init, {}};
  LayoutState& s = out.state;
  starrize_all(h, s);
  s.fixed = choose_fixed_vertices(h, s, cfg.fixed_vertex_policy);
  if (cfg.fixed_vertex_policy.normalize) normalize_gauge(h, s);
  const EnergyModel model(h, cfg.weights);
  detail::Problem p(model, s);
  out.report = detail::run_rounds(p, cfg);
  return out;
}

struct JointResult {
  LayoutState primal;
  LayoutState dual;
  OptimizeReport report;
};

/// Both views as one variable vector, coupled by k_DD * E_DD. Only the primal
/// layout is pinned.
inline JointResult joint_optimize(const Hypergraph& h, const Hypergraph& h_dual, const DualMap& dm,
                                  const LayoutState& init_primal, const LayoutState& init_dual,
                                  const OptimizeConfig& cfg) {
  cfg.validate();
  if (cfg.mode != Mode::kJoint) throw std::invalid_argument("joint_optimize: mode must be joint");
  JointResult out{init_primal, init_dual, {}};
  starrize_all(h, out.primal);
  starrize_all(h_dual, out.dual);
  out.primal.fixed = choose_fixed_vertices(h, out.primal, cfg.fixed_vertex_policy);
  out.dual.fixed.clear();
  if (cfg.fixed_vertex_policy.normalize) normalize_gauge(h, out.primal);
  const JointEnergy energy(h, h_dual, dm, cfg.weights);
  detail::Problem p(energy, out.primal, out.dual);
  out.report = detail::run_rounds(p, cfg);
  return out;
}

}  // namespace polylay
