#pragma once

#include <numbers>
#include <stdexcept>

namespace polylay {

/// Coefficients of the scalarized objective and the constants the separation
/// terms depend on.
struct Weights {
  double k_pr = 0.30;
  double k_pa = 0.16;
  double k_ps = 0.36;
  double k_pi = 0.18;
  double k_dd = 0.0;

  double d_b = 0.2;                        // buffer distance, layout units
  double a_b = std::numbers::pi / 18.0;    // buffer angle, radians
  double w_mono_pair = 0.1;                // monogon vs monogon
  double w_mono = 1.0;                     // monogon vs any other polygon
  double monogon_center_dist = 0.5;        // vertex to waterdrop center
  bool dd_symmetric = true;

  static Weights single_view() { return {}; }

  static Weights joint() {
    Weights w;
    w.k_pr = w.k_pa = w.k_ps = w.k_pi = w.k_dd = 0.2;
    return w;
  }

  void validate() const {
    for (double v : {k_pr, k_pa, k_ps, k_pi, k_dd, d_b, a_b, w_mono_pair, w_mono,
                     monogon_center_dist}) {
      if (!(v >= 0.0)) throw std::invalid_argument("weights must be non-negative");
    }
  }

  bool operator==(const Weights&) const = default;
};

}  // namespace polylay
