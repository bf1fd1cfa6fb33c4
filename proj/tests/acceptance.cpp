// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// run with a criterion number to execute just that one.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "exhaustive.hpp"
#include "fixtures.hpp"
#include "polylay/polylay.hpp"
#include "synthetic.hpp"

using namespace polylay;
using namespace polylay::testing;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kRegularityTol = 1e-6;
constexpr double kRegularitySeconds = 1.0;
constexpr int kStarrizeTrials = 10000;
constexpr int kGradientLayouts = 100;
constexpr double kFdStep = 1e-6;
constexpr double kFdRelTol = 1e-5;
constexpr double kFdMagnitudeFloor = 1e-8;
constexpr double kOracleTol = 1e-12;
constexpr double kSmallSeconds = 30.0;
constexpr double kLargeSeconds = 1800.0;
constexpr double kMinGrowthExponent = 1.0;
constexpr int kDualTrials = 50;
constexpr int kRotations = 360;

const fs::path kDataDir = POLYLAY_DATA_DIR;
const fs::path kTestDataDir = POLYLAY_TEST_DATA_DIR;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Hypergraph load(const fs::path& p) { return parse_hypergraph(slurp(p)); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double tol(double v) { return kOracleTol * std::max(1.0, std::abs(v)); }

// Criterion 1 -------------------------------------------------------------

Outcome regularity_optimum() {
  bool ok = true;
  std::string worst;
  double worst_e = 0, worst_t = 0;
  for (int n = 3; n <= 12; ++n) {
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("v" + std::to_string(i));
    const auto h = graph({{"r", ids}});
    const auto init = initial_layout(h, {InitScheme::kRandom, static_cast<std::uint64_t>(n)});
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = optimize(h, init, OptimizeConfig{});
    const double t = seconds_since(t0);
    const EnergyModel m(h, Weights::single_view());
    const double e = m.e_pr(out.state) + m.e_pa(out.state);
    worst_e = std::max(worst_e, e);
    worst_t = std::max(worst_t, t);
    if (!(e <= kRegularityTol) || !(t <= kRegularitySeconds)) {
      ok = false;
      worst += " n=" + std::to_string(n) + fmt("(E=%.3g", e) + fmt(",t=%.3gs)", t);
    }
  }
  return {ok, "max E_PR+E_PA=" + fmt("%.3g", worst_e) + " max time=" + fmt("%.3gs", worst_t) + worst};
}

// Criterion 2 -------------------------------------------------------------

struct Dataset {
  std::string name;
  Hypergraph h;
};

std::vector<Dataset> run_datasets() {
  return {{"small", load(kDataDir / "small.json")},
          {"synthetic_40_15", load(kTestDataDir / "synthetic_40_15.json")},
          {"synthetic_81_22", load(kDataDir / "synthetic_81_22.json")}};
}

/// Every configuration the optimizer accepts during one run.
struct RunCheck {
  const Hypergraph* primal = nullptr;
  const Hypergraph* dual = nullptr;
  long accepted = 0;
  long not_simple = 0;
  long increases = 0;
  long weak_swaps = 0;
  double last = std::numeric_limits<double>::infinity();

  std::function<void(const AcceptEvent&)> callback() {
    return [this](const AcceptEvent& e) {
      ++accepted;
      if (!all_orders_simple(*primal, *e.primal)) ++not_simple;
      if (e.dual && !all_orders_simple(*dual, *e.dual)) ++not_simple;
      if (accepted > 1) {
        if (e.total > last) ++increases;
        if (e.kind == AcceptKind::kSwap && !(e.total < last)) ++weak_swaps;
      }
      last = e.total;
    };
  }
};

struct ModeRun {
  std::string label;
  RunCheck check;
  OptimizeReport report;
};

ModeRun run_mode(const Dataset& d, Mode mode) {
  ModeRun r{d.name + "/" + to_string(mode), {}, {}};
  OptimizeConfig cfg;
  cfg.mode = mode;
  cfg.weights = mode == Mode::kJoint ? Weights::joint() : Weights::single_view();
  const InitConfig init{InitScheme::kForceDirected, 1};
  if (mode == Mode::kPrimal) {
    r.check.primal = &d.h;
    cfg.on_accept = r.check.callback();
    r.report = optimize(d.h, initial_layout(d.h, init), cfg).report;
    return r;
  }
  const auto [dual, dm] = dualize(d.h);
  if (mode == Mode::kDual) {
    r.check.primal = &dual;
    cfg.on_accept = r.check.callback();
    r.report = optimize(dual, initial_layout(dual, init), cfg).report;
    return r;
  }
  r.check.primal = &d.h;
  r.check.dual = &dual;
  cfg.on_accept = r.check.callback();
  r.report = joint_optimize(d.h, dual, dm, initial_layout(d.h, init), initial_layout(dual, init), cfg)
                 .report;
  return r;
}

Outcome simplicity_invariant() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> size(3, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long bad_trials = 0, skipped = 0;
  for (int t = 0; t < kStarrizeTrials; ++t) {
    const int n = size(rng);
    std::vector<Point2> pts(static_cast<std::size_t>(n));
    // Every fifth trial snaps to a coarse grid to provoke collinear and
    // equal-angle points.
    for (auto& p : pts) {
      p = {u(rng), u(rng)};
      if (t % 5 == 0) p = {std::round(p.x * 4) / 4, std::round(p.y * 4) / 4};
    }
    std::set<std::pair<double, double>> distinct;
    for (auto p : pts) distinct.insert({p.x, p.y});
    // Duplicate or fully collinear points admit no simple polygon at all.
    const bool collinear = std::all_of(pts.begin(), pts.end(), [&](Point2 p) {
      return cross(pts[1] - pts[0], p - pts[0]) == 0.0;
    });
    if (distinct.size() != pts.size() || collinear) {
      ++skipped;
      continue;
    }
    const auto st = starrize(pts);
    std::vector<Point2> ordered;
    for (auto i : st.order) ordered.push_back(pts[i]);
    if (!is_simple(ordered)) ++bad_trials;
  }
  long configs = 0, bad_configs = 0;
  for (const auto& d : run_datasets()) {
    for (Mode mode : {Mode::kPrimal, Mode::kJoint}) {
      const auto r = run_mode(d, mode);
      configs += r.check.accepted;
      bad_configs += r.check.not_simple;
    }
  }
  return {bad_trials == 0 && bad_configs == 0,
          std::to_string(kStarrizeTrials) + " starrize trials (" + std::to_string(skipped) +
              " degenerate skipped), " + std::to_string(bad_trials) + " violations; " + std::to_string(configs) + " accepted configurations, " +
              std::to_string(bad_configs) + " violations"};
}

// Criterion 3 -------------------------------------------------------------

Outcome gradient_correctness() {
  const auto h = synthetic_hypergraph(20, 6, 3);
  const EnergyModel model(h, Weights::single_view());
  std::mt19937_64 rng(3);
  double worst = 0;
  long checked = 0;
  auto compare = [&](double an, double fd) {
    if (std::abs(an) <= kFdMagnitudeFloor) return;
    ++checked;
    worst = std::max(worst, std::abs(an - fd) / std::abs(an));
  };
  for (int t = 0; t < kGradientLayouts; ++t) {
    auto s = random_state(h, rng, std::sqrt(20.0));
    LayoutGradient g;
    g.reset(h);
    model.evaluate(s, &g);
    // Central differences of the independent evaluator in extended precision,
    // so rounding in the energy does not swamp small components.
    auto central = [&](double& x) {
      const double x0 = x;
      const double xp = x0 + kFdStep, xm = x0 - kFdStep;
      x = xp;
      const long double fp = brute_force_energy<long double>(h, s, model.weights()).total;
      x = xm;
      const long double fm = brute_force_energy<long double>(h, s, model.weights()).total;
      x = x0;
      return static_cast<double>((fp - fm) / (static_cast<long double>(xp) - xm));
    };
    for (std::size_t v = 0; v < h.num_entities(); ++v) {
      compare(g.positions[v].x, central(s.positions[v].x));
      compare(g.positions[v].y, central(s.positions[v].y));
    }
    for (int r : model.monogon_ids()) {
      compare(g.angles[static_cast<std::size_t>(r)], central(s.monogon_angles[static_cast<std::size_t>(r)]));
    }
  }
  return {worst < kFdRelTol, std::to_string(h.num_entities()) + " vertices/" +
                                 std::to_string(h.num_relationships()) + " edges, " +
                                 std::to_string(checked) + " components, max rel err " +
                                 fmt("%.3g", worst)};
}

// Criterion 4 -------------------------------------------------------------

Outcome monotone_descent() {
  long runs = 0, accepted = 0, increases = 0, weak_swaps = 0, history = 0;
  std::string where;
  for (const auto& d : run_datasets()) {
    for (Mode mode : {Mode::kPrimal, Mode::kDual, Mode::kJoint}) {
      const auto r = run_mode(d, mode);
      ++runs;
      accepted += r.check.accepted;
      increases += r.check.increases;
      weak_swaps += r.check.weak_swaps;
      const auto& hist = r.report.breakdown_history;
      for (std::size_t i = 1; i < hist.size(); ++i) {
        if (hist[i].total > hist[i - 1].total) ++history;
      }
      if (r.check.increases || r.check.weak_swaps) where += " " + r.label;
    }
  }
  return {increases == 0 && weak_swaps == 0 && history == 0,
          std::to_string(runs) + " runs, " + std::to_string(accepted) + " accepted steps, " +
              std::to_string(increases) + " increases, " + std::to_string(weak_swaps) +
              " non-strict swaps, " + std::to_string(history) + " history increases" + where};
}

// Criterion 5 -------------------------------------------------------------

Outcome small_instance_oracles() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kTestDataDir / "corpus")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  const Weights w = Weights::single_view();
  std::mt19937_64 rng(5);
  int graphs = 0, energy_bad = 0, swap_runs = 0, swap_bad = 0;
  std::string misses;
  for (const auto& f : files) {
    const auto h = load(f);
    if (h.num_relationships() > 3 || h.num_entities() > 9) continue;
    ++graphs;
    const EnergyModel m(h, w);
    for (int t = 0; t < 50; ++t) {
      const auto s = random_state(h, rng, 2.5);
      const auto got = m.evaluate(s);
      const auto want = brute_force_energy(h, s, w);
      if (std::abs(got.total - want.total) > tol(want.total)) ++energy_bad;
    }
    for (int t = 0; t < 5; ++t) {
      const auto s0 = random_state(h, rng, 2.5);
      auto s = s0;
      pair_swap_pass(m, s);
      const double got = m.evaluate(s).total;
      const double best = exhaustive_swap_minimum(m, s0);
      ++swap_runs;
      if (std::abs(got - best) > tol(best)) {
        ++swap_bad;
        misses += " " + f.stem().string() + "#" + std::to_string(t) + fmt("(%.4g", got) +
                  fmt(" vs %.4g)", best);
      }
    }
  }
  return {energy_bad == 0 && swap_bad == 0,
          std::to_string(graphs) + " hypergraphs; energy mismatches " + std::to_string(energy_bad) +
              "/" + std::to_string(graphs * 50) + "; swap pass off exhaustive minimum " +
              std::to_string(swap_bad) + "/" + std::to_string(swap_runs) + misses};
}

// Criterion 6 -------------------------------------------------------------

double time_layout(const Hypergraph& h, int repeats = 1) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    optimize(h, initial_layout(h, {InitScheme::kForceDirected, 1}), OptimizeConfig{});
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

Outcome timing_anchor() {
  const double t81 = time_layout(load(kDataDir / "synthetic_81_22.json"));
  const double t527 = time_layout(synthetic_hypergraph(527, 232, 527));
  const std::vector<std::pair<std::size_t, std::size_t>> sizes = {{50, 14}, {100, 27}, {200, 54}, {400, 109}};
  std::vector<double> lx, ly;
  std::string series;
  for (auto [v, r] : sizes) {
    const double t = time_layout(synthetic_hypergraph(v, r, v), 3);
    lx.push_back(std::log(static_cast<double>(v)));
    ly.push_back(std::log(t));
    series += " " + std::to_string(v) + ":" + fmt("%.3gs", t);
  }
  const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4, my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  return {t81 <= kSmallSeconds && t527 <= kLargeSeconds && slope > kMinGrowthExponent,
          "81/22 " + fmt("%.3gs", t81) + ", 527/232 " + fmt("%.3gs", t527) + ", growth exponent " +
              fmt("%.2f", slope) + " (" + series.substr(1) + ")"};
}

// Criterion 7 -------------------------------------------------------------

Hypergraph random_hypergraph(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 12);
  const int nv = count(rng), nr = count(rng);
  std::vector<std::vector<std::string>> members(static_cast<std::size_t>(nr));
  std::bernoulli_distribution coin(0.3);
  std::uniform_int_distribution<int> pick_r(0, nr - 1);
  std::vector<Entity> ents;
  for (int v = 0; v < nv; ++v) {
    const std::string id = "v" + std::to_string(v);
    ents.push_back({id, "", {}});
    bool used = false;
    for (auto& m : members) {
      if (coin(rng)) m.push_back(id), used = true;
    }
    if (!used) members[static_cast<std::size_t>(pick_r(rng))].push_back(id);
  }
  std::uniform_int_distribution<int> pick_v(0, nv - 1);
  std::vector<std::pair<std::string, std::vector<std::string>>> rels;
  for (int r = 0; r < nr; ++r) {
    auto& m = members[static_cast<std::size_t>(r)];
    if (m.empty()) m.push_back("v" + std::to_string(pick_v(rng)));
    rels.emplace_back("r" + std::to_string(r), m);
  }
  return Hypergraph(std::move(ents), std::move(rels));
}

/// Incidence as (entity id, relationship id) pairs.
std::set<std::pair<std::string, std::string>> incidence(const Hypergraph& h) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& r : h.relationships()) {
    for (int v : r.members) out.insert({h.entity(v).id, r.id});
  }
  return out;
}

Outcome dual_involution() {
  std::mt19937_64 rng(7);
  int bad = 0;
  for (int t = 0; t < kDualTrials; ++t) {
    const auto h = random_hypergraph(rng);
    const auto [d, m1] = dualize(h);
    const auto [dd, m2] = dualize(d);
    // Dual incidence is the transpose of the primal one.
    std::set<std::pair<std::string, std::string>> transposed;
    for (const auto& [v, r] : incidence(h)) {
      transposed.insert({m1.edge_to_dual_vertex.at(r), m1.vertex_to_dual_edge.at(v)});
    }
    // Mapping back through both duals recovers the original incidence.
    std::set<std::pair<std::string, std::string>> back;
    for (const auto& [v, r] : incidence(h)) {
      back.insert({m2.edge_to_dual_vertex.at(m1.vertex_to_dual_edge.at(v)),
                   m2.vertex_to_dual_edge.at(m1.edge_to_dual_vertex.at(r))});
    }
    const bool sizes = dd.num_entities() == h.num_entities() &&
                       dd.num_relationships() == h.num_relationships();
    if (transposed != incidence(d) || back != incidence(dd) || !sizes) ++bad;
  }
  return {bad == 0, std::to_string(kDualTrials) + " random hypergraphs, " + std::to_string(bad) +
                        " mismatches"};
}

// Criterion 8 -------------------------------------------------------------

/// Smallest E_DD over rigid motions of the dual layout: rotations on a
/// 1-degree grid, each with its optimal translation (E_DD is an unweighted
/// sum of squared distances, so the best shift is the mean residual).
double best_aligned_dd(const JointEnergy& je, const LayoutState& sp, const LayoutState& sd) {
  const DualIndex& ix = je.index();
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kRotations; ++k) {
    const double th = 2 * std::numbers::pi * k / kRotations;
    const double c = std::cos(th), s = std::sin(th);
    LayoutState rot = sd;
    for (auto& p : rot.positions) p = {c * p.x - s * p.y, s * p.x + c * p.y};
    for (int r : je.dual().monogon_ids()) rot.monogon_angles[static_cast<std::size_t>(r)] += th;
    Point2 sum{};
    double count = 0;
    for (std::size_t v = 0; v < ix.vertex_to_dual_edge.size(); ++v) {
      sum = sum + (sp.positions[v] - je.dual().center(rot, ix.vertex_to_dual_edge[v]));
      ++count;
    }
    if (je.weights().dd_symmetric) {
      for (std::size_t r = 0; r < ix.edge_to_dual_vertex.size(); ++r) {
        const auto u = static_cast<std::size_t>(ix.edge_to_dual_vertex[r]);
        sum = sum + (je.primal().center(sp, static_cast<int>(r)) - rot.positions[u]);
        ++count;
      }
    }
    const Point2 shift = sum * (1.0 / count);
    for (auto& p : rot.positions) p = p + shift;
    best = std::min(best, je.e_dd(sp, rot));
  }
  return best;
}

Outcome joint_coupling() {
  const auto h = load(kDataDir / "synthetic_81_22.json");
  const auto [d, dm] = dualize(h);
  const InitConfig init{InitScheme::kForceDirected, 1};
  const auto ip = initial_layout(h, init);
  const auto id = initial_layout(d, init);
  OptimizeConfig cfg;
  cfg.weights = Weights::joint();
  const JointEnergy je(h, d, dm, cfg.weights);

  const auto sp = optimize(h, ip, cfg).state;
  const auto sd = optimize(d, id, cfg).state;
  const double independent = best_aligned_dd(je, sp, sd);

  cfg.mode = Mode::kJoint;
  const auto joint = joint_optimize(h, d, dm, ip, id, cfg);
  const double coupled = je.e_dd(joint.primal, joint.dual);
  return {coupled <= independent, "joint E_DD " + fmt("%.6g", coupled) +
                                      " vs best-aligned independent " + fmt("%.6g", independent)};
}

// Criterion 9 -------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = "'" POLYLAY_CLI "' -q " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "polylay_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto q = [](const fs::path& p) { return "'" + p.string() + "'"; };
  int compared = 0, differ = 0, failed = 0;
  for (const auto& input : {kDataDir / "small.json", kDataDir / "synthetic_81_22.json"}) {
    for (const char* mode : {"primal", "dual", "joint"}) {
      std::string texts[2][3];
      for (int k = 0; k < 2; ++k) {
        const fs::path b = dir / ("run" + std::to_string(k) + ".bundle");
        const std::string flags = std::string("layout --mode ") + mode + " --init fd --seed 9 ";
        if (run_cli(flags + q(input) + " " + q(b)) != 0) ++failed;
        texts[k][0] = slurp(b);
        for (int v = 0; v < 2; ++v) {
          const char* view = v == 0 ? "primal" : "dual";
          if (v == 1 && std::string(mode) == "primal") continue;
          const fs::path svg = dir / "view.svg";
          if (run_cli(std::string("render --view ") + view + " " + q(b) + " " + q(svg)) != 0) ++failed;
          texts[k][1 + v] = slurp(svg);
        }
      }
      for (int i = 0; i < 3; ++i) {
        ++compared;
        if (texts[0][i] != texts[1][i] || (i < 2 && texts[0][i].empty())) ++differ;
      }
    }
  }
  fs::remove_all(dir);
  return {differ == 0 && failed == 0, std::to_string(compared) + " artifact pairs, " +
                                          std::to_string(differ) + " differ, " +
                                          std::to_string(failed) + " failed commands"};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "regularity optimum", regularity_optimum},
    {2, "simplicity invariant", simplicity_invariant},
    {3, "gradient correctness", gradient_correctness},
    {4, "monotone descent", monotone_descent},
    {5, "small-instance oracle equivalence", small_instance_oracles},
    {6, "timing anchor", timing_anchor},
    {7, "dual correctness", dual_involution},
    {8, "joint-mode coupling", joint_coupling},
    {9, "determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  bool all = true;
  for (const auto& c : kCriteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d %s: %s (%s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
