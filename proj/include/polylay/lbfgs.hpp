#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <utility>
#include <vector>

namespace polylay {

struct LbfgsParams {
  int memory = 10;
  int max_iterations = 200;
  // Stop when the gradient's max-norm falls below this.
  double gtol = 1e-10;
  // Stop when one iteration lowers f by less than ftol * max(|f|, 1e-300).
  double ftol = 1e-13;
  double c1 = 1e-4;  // sufficient decrease
  double c2 = 0.9;   // curvature
  int max_line_search = 40;
};

enum class LbfgsStatus {
  kGradientSmall,
  kNoProgress,
  kMaxIterations,
  kLineSearchFailed,
};

struct LbfgsResult {
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::kMaxIterations;

  bool converged() const {
    return status == LbfgsStatus::kGradientSmall || status == LbfgsStatus::kNoProgress;
  }
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db), clamped
/// into the interior of [a, b]; falls back to bisection.
inline double cubic_step(double a, double fa, double da, double b, double fb, double db) {
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  double t = 0.5 * (a + b);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = db - da + 2.0 * d2;
    if (denom != 0.0) {
      const double c = b - (b - a) * (db + d2 - d1) / denom;
      if (std::isfinite(c)) t = c;
    }
  }
  const double margin = 0.1 * (hi - lo);
  return std::clamp(t, lo + margin, hi - margin);
}

}  // namespace detail

/// Limited-memory BFGS. `objective(x, g)` returns f(x) and writes the gradient
/// into g (same size as x). `on_iterate(x, f)` is called after every accepted
/// step. On return `x` holds the best point found, which never has a higher
/// objective than the starting point.
template <class Objective, class OnIterate>
LbfgsResult lbfgs_minimize(Objective&& objective, std::vector<double>& x, const LbfgsParams& p,
                           OnIterate&& on_iterate) {
  const std::size_t n = x.size();
  LbfgsResult res;
  std::vector<double> g(n), d(n), xt(n), gt(n);
  double f = objective(x, g);
  res.evaluations = 1;
  res.f = f;
  if (n == 0 || detail::max_abs(g) <= p.gtol) {
    res.status = LbfgsStatus::kGradientSmall;
    return res;
  }

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> mem;
  std::vector<double> alpha(static_cast<std::size_t>(p.memory));

  for (res.iterations = 0; res.iterations < p.max_iterations; ++res.iterations) {
    // Two-loop recursion: d = -H g.
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    for (std::size_t k = mem.size(); k-- > 0;) {
      alpha[k] = mem[k].rho * detail::dot(mem[k].s, d);
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[k] * mem[k].y[i];
    }
    if (!mem.empty()) {
      const auto& last = mem.back();
      const double gamma = detail::dot(last.s, last.y) / detail::dot(last.y, last.y);
      for (double& v : d) v *= gamma;
    }
    for (std::size_t k = 0; k < mem.size(); ++k) {
      const double beta = mem[k].rho * detail::dot(mem[k].y, d);
      for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[k] - beta) * mem[k].s[i];
    }
    double slope = detail::dot(g, d);
    if (!(slope < 0.0)) {
      mem.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = detail::dot(g, d);
    }

    // Strong Wolfe line search along d.
    const double f0 = f;
    double step = mem.empty() ? std::min(1.0, 1.0 / std::sqrt(detail::dot(d, d))) : 1.0;
    double best_f = f0;
    std::vector<double> best_g, best_x;
    auto eval = [&](double a, double& fa, double& da) {
      for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + a * d[i];
      fa = objective(xt, gt);
      ++res.evaluations;
      da = detail::dot(gt, d);
      if (std::isfinite(fa) && fa < best_f) {
        best_f = fa;
        best_g = gt;
        best_x = xt;
      }
    };
    double a_prev = 0.0, f_prev = f0, d_prev = slope;
    double a_lo = 0, f_lo = 0, d_lo = 0, a_hi = 0, f_hi = 0, d_hi = 0;
    bool zoom = false, done = false;
    int evals = 0;
    for (; evals < p.max_line_search && !zoom && !done; ++evals) {
      double fa, da;
      eval(step, fa, da);
      if (!std::isfinite(fa) || fa > f0 + p.c1 * step * slope || (evals > 0 && fa >= f_prev)) {
        a_lo = a_prev, f_lo = f_prev, d_lo = d_prev;
        a_hi = step, f_hi = fa, d_hi = da;
        zoom = true;
      } else if (std::abs(da) <= -p.c2 * slope) {
        done = true;
      } else if (da >= 0.0) {
        a_lo = step, f_lo = fa, d_lo = da;
        a_hi = a_prev, f_hi = f_prev, d_hi = d_prev;
        zoom = true;
      } else {
        a_prev = step, f_prev = fa, d_prev = da;
        step *= 2.0;
      }
    }
    for (; zoom && !done && evals < p.max_line_search; ++evals) {
      if (!std::isfinite(f_hi)) {
        step = 0.5 * (a_lo + a_hi);
      } else {
        step = detail::cubic_step(a_lo, f_lo, d_lo, a_hi, f_hi, d_hi);
      }
      double fa, da;
      eval(step, fa, da);
      if (!std::isfinite(fa) || fa > f0 + p.c1 * step * slope || fa >= f_lo) {
        a_hi = step, f_hi = fa, d_hi = da;
      } else {
        if (std::abs(da) <= -p.c2 * slope) {
          done = true;
          break;
        }
        if (da * (a_hi - a_lo) >= 0.0) a_hi = a_lo, f_hi = f_lo, d_hi = d_lo;
        a_lo = step, f_lo = fa, d_lo = da;
      }
      if (std::abs(a_hi - a_lo) <= 1e-16 * std::max(1.0, std::abs(a_lo))) break;
    }
    // Take the lowest point seen; strict decrease is all the caller relies on.
    if (!(best_f < f0)) {
      res.status = LbfgsStatus::kLineSearchFailed;
      break;
    }
    Pair pr;
    pr.s.resize(n);
    pr.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      pr.s[i] = best_x[i] - x[i];
      pr.y[i] = best_g[i] - g[i];
    }
    x = best_x;
    g = best_g;
    f = best_f;
    res.f = f;
    on_iterate(x, f);

    const double sy = detail::dot(pr.s, pr.y);
    if (sy > 1e-12 * std::sqrt(detail::dot(pr.s, pr.s) * detail::dot(pr.y, pr.y))) {
      pr.rho = 1.0 / sy;
      mem.push_back(std::move(pr));
      if (static_cast<int>(mem.size()) > p.memory) mem.pop_front();
    }
    if (detail::max_abs(g) <= p.gtol) {
      res.status = LbfgsStatus::kGradientSmall;
      ++res.iterations;
      return res;
    }
    if (f0 - f <= p.ftol * std::max(std::abs(f0), 1e-300)) {
      res.status = LbfgsStatus::kNoProgress;
      ++res.iterations;
      return res;
    }
  }
  if (res.iterations >= p.max_iterations) res.status = LbfgsStatus::kMaxIterations;
  return res;
}

template <class Objective>
LbfgsResult lbfgs_minimize(Objective&& objective, std::vector<double>& x, const LbfgsParams& p) {
  return lbfgs_minimize(std::forward<Objective>(objective), x, p,
                        [](const std::vector<double>&, double) {});
}

}  // namespace polylay
