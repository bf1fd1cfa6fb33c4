#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "polylay/polylay.hpp"

namespace {

using namespace polylay;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNotConverged = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string output;
  std::string mode = "primal";
  std::string init = "fd";
  std::string view = "primal";
  std::uint64_t seed = 1;
  std::optional<double> k_pr, k_pa, k_ps, k_pi, k_dd, d_b, a_b, tol;
  std::optional<int> max_rounds;
  bool no_swaps = false;
  int verbose = 0;
  bool quiet = false;

  int verbosity() const { return quiet ? 0 : 1 + verbose; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) throw DataError("cannot write '" + path + "'");
}

std::string breakdown_fields(const EnergyBreakdown& b, const char* fmt) {
  std::string out;
  const std::pair<const char*, double> fields[] = {{"total", b.total}, {"e_pr", b.e_pr},
                                                   {"e_pa", b.e_pa},   {"e_ps", b.e_ps},
                                                   {"e_pi", b.e_pi},   {"e_dd", b.e_dd},
                                                   {"e_ps_mono", b.e_ps_monogons}};
  char buf[64];
  for (const auto& [name, v] : fields) {
    std::snprintf(buf, sizeof buf, fmt, v);
    if (!out.empty()) out += ' ';
    out += std::string(name) + "=" + buf;
  }
  return out;
}

Weights resolve_weights(const Options& o, Mode mode) {
  Weights w = mode == Mode::kJoint ? Weights::joint() : Weights::single_view();
  if (o.k_pr) w.k_pr = *o.k_pr;
  if (o.k_pa) w.k_pa = *o.k_pa;
  if (o.k_ps) w.k_ps = *o.k_ps;
  if (o.k_pi) w.k_pi = *o.k_pi;
  if (o.k_dd) w.k_dd = *o.k_dd;
  if (o.d_b) w.d_b = *o.d_b;
  if (o.a_b) w.a_b = *o.a_b;
  try {
    w.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return w;
}

OptimizeConfig resolve_config(const Options& o, Mode mode) {
  OptimizeConfig cfg;
  cfg.mode = mode;
  cfg.weights = resolve_weights(o, mode);
  cfg.seed = o.seed;
  cfg.swap_enabled = !o.no_swaps;
  if (o.tol) cfg.rel_tol = *o.tol;
  if (o.max_rounds) cfg.max_rounds = *o.max_rounds;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (o.verbosity() >= 1) {
    cfg.on_round = [](const RoundLog& r) {
      std::fprintf(stderr, "round=%d %s swaps=%d dt=%.3f\n", r.round,
                   breakdown_fields(r.breakdown, "%.10g").c_str(), r.swaps, r.seconds);
    };
  }
  return cfg;
}

/// Energy of the optimized view(s) as stored in a bundle.
EnergyBreakdown bundle_energy(const LayoutBundle& b) {
  const Mode mode = parse_mode(b.provenance.mode);
  const Weights& w = b.provenance.weights;
  if (mode == Mode::kPrimal) return total_energy(b.primal.hypergraph, b.primal.state, w);
  if (!b.dual) throw DataError("bundle: mode '" + b.provenance.mode + "' needs a dual view");
  if (mode == Mode::kDual) return total_energy(b.dual->hypergraph, b.dual->state, w);
  return total_energy(b.primal.hypergraph, b.primal.state, b.dual->hypergraph, b.dual->state,
                      *b.dual_map, w);
}

int run_layout(const Options& o) {
  Mode mode;
  InitScheme scheme;
  try {
    mode = parse_mode(o.mode);
    scheme = parse_init_scheme(o.init);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const OptimizeConfig cfg = resolve_config(o, mode);
  const Hypergraph h = parse_hypergraph(read_file(o.input));
  const InitConfig init{scheme, o.seed};

  LayoutBundle b{{h, initial_layout(h, init)}, std::nullopt, std::nullopt, {}, {}};
  b.style.monogon_center_dist = cfg.weights.monogon_center_dist;
  b.provenance.seed = o.seed;
  b.provenance.weights = cfg.weights;
  b.provenance.mode = to_string(mode);
  b.provenance.init = to_string(scheme);

  bool converged = true;
  if (mode == Mode::kPrimal) {
    auto res = optimize(h, b.primal.state, cfg);
    b.primal.state = std::move(res.state);
    converged = res.report.converged;
  } else {
    auto [d, dm] = dualize(h);
    LayoutState dual_init = initial_layout(d, init);
    if (mode == Mode::kDual) {
      auto res = optimize(d, dual_init, cfg);
      b.dual = ViewLayout{d, std::move(res.state)};
      converged = res.report.converged;
    } else {
      auto res = joint_optimize(h, d, dm, b.primal.state, dual_init, cfg);
      b.primal.state = std::move(res.primal);
      b.dual = ViewLayout{d, std::move(res.dual)};
      converged = res.report.converged;
    }
    b.dual_map = std::move(dm);
  }
  b.provenance.converged = converged;
  quantize_state(b.primal.state);
  if (b.dual) quantize_state(b.dual->state);
  write_file(o.output, write_bundle(b));

  if (o.verbosity() >= 1) {
    std::fprintf(stderr, "final %s converged=%s\n",
                 breakdown_fields(bundle_energy(b), "%.17g").c_str(), converged ? "true" : "false");
  }
  if (!converged) {
    std::fprintf(stderr, "polylay: round limit reached before convergence; bundle written\n");
    return kNotConverged;
  }
  return kOk;
}

int run_render(const Options& o) {
  View view;
  try {
    view = parse_view(o.view);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_file(o.output, render_svg(read_bundle(read_file(o.input)), view));
  return kOk;
}

int run_stats(const Options& o) {
  const LayoutBundle b = read_bundle(read_file(o.input));
  const EnergyBreakdown e = bundle_energy(b);
  std::printf("mode=%s %s singular=%s\n", b.provenance.mode.c_str(),
              breakdown_fields(e, "%.17g").c_str(), e.singular ? "true" : "false");
  return kOk;
}

int run_dualize(const Options& o) {
  const auto [d, dm] = dualize(parse_hypergraph(read_file(o.input)));
  write_file(o.output, serialize_hypergraph(d));
  return kOk;
}

void add_io(CLI::App* cmd, Options& o, bool with_output) {
  cmd->add_option("input", o.input, "Input file")->required();
  if (with_output) cmd->add_option("output", o.output, "Output file")->required();
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Polygon layouts for hypergraphs"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("-v,--verbose", o.verbose, "More log output")->envname("POLYLAY_VERBOSE");
  app.add_flag("-q,--quiet", o.quiet, "No log output")->envname("POLYLAY_QUIET");

  auto* layout = app.add_subcommand("layout", "Optimize a hypergraph and write a layout bundle");
  add_io(layout, o, true);
  layout->add_option("--mode", o.mode, "primal, dual or joint")->envname("POLYLAY_MODE");
  layout->add_option("--init", o.init, "fd, circle or random")->envname("POLYLAY_INIT");
  layout->add_option("--seed", o.seed, "Random seed")->envname("POLYLAY_SEED");
  layout->add_option("--k-pr", o.k_pr, "Regularity weight")->envname("POLYLAY_K_PR");
  layout->add_option("--k-pa", o.k_pa, "Edge length weight")->envname("POLYLAY_K_PA");
  layout->add_option("--k-ps", o.k_ps, "Separation weight")->envname("POLYLAY_K_PS");
  layout->add_option("--k-pi", o.k_pi, "Intersection weight")->envname("POLYLAY_K_PI");
  layout->add_option("--k-dd", o.k_dd, "Primal-dual coupling weight")->envname("POLYLAY_K_DD");
  layout->add_option("--db", o.d_b, "Buffer distance")->envname("POLYLAY_DB");
  layout->add_option("--ab", o.a_b, "Buffer angle in radians")->envname("POLYLAY_AB");
  layout->add_option("--tol", o.tol, "Relative improvement that ends the rounds")
      ->envname("POLYLAY_TOL");
  layout->add_option("--max-rounds", o.max_rounds, "Round limit")->envname("POLYLAY_MAX_ROUNDS");
  layout->add_flag("--no-swaps", o.no_swaps, "Disable pair swaps")->envname("POLYLAY_NO_SWAPS");

  auto* render = app.add_subcommand("render", "Render one view of a bundle as SVG");
  add_io(render, o, true);
  render->add_option("--view", o.view, "primal or dual")->envname("POLYLAY_VIEW");

  auto* stats = app.add_subcommand("stats", "Print the energy breakdown of a bundle");
  add_io(stats, o, false);

  auto* dual = app.add_subcommand("dualize", "Write the dual hypergraph");
  add_io(dual, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*layout) return run_layout(o);
    if (*render) return run_render(o);
    if (*stats) return run_stats(o);
    return run_dualize(o);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "polylay: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "polylay: %s\n", e.what());
    return kData;
  }
}
