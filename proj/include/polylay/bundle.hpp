#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "polylay/hypergraph.hpp"
#include "polylay/layout_state.hpp"
#include "polylay/weights.hpp"

namespace polylay {

inline constexpr const char* kToolVersion = "0.1.0";

struct ViewLayout {
  Hypergraph hypergraph;
  LayoutState state;
};

struct Style {
  std::string palette = "set3-12";
  double monogon_radius = 0.25;
  double monogon_center_dist = 0.5;

  bool operator==(const Style&) const = default;
};

struct Provenance {
  std::uint64_t seed = 0;
  Weights weights;
  std::string mode = "primal";
  std::string init = "fd";
  std::string tool_version = kToolVersion;
  // False when the optimizer stopped at its round limit.
  bool converged = true;

  bool operator==(const Provenance&) const = default;
};

/// Everything the renderer and the viewer need: primal (and optionally dual)
/// geometry, the correspondence between them, styling and run metadata.
struct LayoutBundle {
  ViewLayout primal;
  std::optional<ViewLayout> dual;
  std::optional<DualMap> dual_map;
  Style style;
  Provenance provenance;
};

/// Rounds to 9 significant digits, the precision bundles are stored at.
inline double round_sig9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // drop negative zero
}

/// Applies bundle precision to positions and angles in place.
inline void quantize_state(LayoutState& s) {
  for (auto& p : s.positions) {
    p.x = round_sig9(p.x);
    p.y = round_sig9(p.y);
  }
  for (auto& a : s.monogon_angles) a = round_sig9(a);
}

namespace detail {

inline void check_state(const Hypergraph& h, const LayoutState& s, const std::string& where) {
  if (s.positions.size() != h.num_entities() || s.orders.size() != h.num_relationships() ||
      s.monogon_angles.size() != h.num_relationships()) {
    throw DataError(where + ": layout does not match hypergraph");
  }
  for (std::size_t r = 0; r < h.num_relationships(); ++r) {
    auto a = s.orders[r];
    auto b = h.relationships()[r].members;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      throw DataError(where + ".orders." + h.relationships()[r].id +
                      ": not a permutation of the members");
    }
  }
  for (int f : s.fixed) {
    if (f < 0 || static_cast<std::size_t>(f) >= h.num_entities()) {
      throw DataError(where + ".fixed: index out of range");
    }
  }
}

inline nlohmann::json view_to_json(const ViewLayout& v) {
  const Hypergraph& h = v.hypergraph;
  nlohmann::json positions = nlohmann::json::object();
  for (std::size_t i = 0; i < h.num_entities(); ++i) {
    positions[h.entities()[i].id] = {round_sig9(v.state.positions[i].x),
                                     round_sig9(v.state.positions[i].y)};
  }
  nlohmann::json orders = nlohmann::json::object();
  nlohmann::json angles = nlohmann::json::object();
  for (std::size_t r = 0; r < h.num_relationships(); ++r) {
    const auto& rel = h.relationships()[r];
    nlohmann::json o = nlohmann::json::array();
    for (int e : v.state.orders[r]) o.push_back(h.entity(e).id);
    orders[rel.id] = std::move(o);
    if (rel.cardinality() == 1) angles[rel.id] = round_sig9(v.state.monogon_angles[r]);
  }
  nlohmann::json fixed = nlohmann::json::array();
  for (int f : v.state.fixed) fixed.push_back(h.entity(f).id);
  return {{"hypergraph", to_json(h)},
          {"positions", std::move(positions)},
          {"orders", std::move(orders)},
          {"monogon_angles", std::move(angles)},
          {"fixed", std::move(fixed)}};
}

inline double require_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw DataError(where + ": expected a number");
  return j.get<double>();
}

inline ViewLayout view_from_json(const nlohmann::json& j, const std::string& where) {
  ViewLayout v{hypergraph_from_json(require(j, "hypergraph", where)), {}};
  const Hypergraph& h = v.hypergraph;
  v.state = make_layout_state(h);
  const auto& positions = require(j, "positions", where);
  const auto& orders = require(j, "orders", where);
  const auto& angles = require(j, "monogon_angles", where);
  for (std::size_t i = 0; i < h.num_entities(); ++i) {
    const auto& id = h.entities()[i].id;
    const std::string w = where + ".positions." + id;
    const auto& p = require(positions, id.c_str(), where + ".positions");
    if (!p.is_array() || p.size() != 2) throw DataError(w + ": expected [x, y]");
    v.state.positions[i] = {require_number(p[0], w), require_number(p[1], w)};
  }
  for (std::size_t r = 0; r < h.num_relationships(); ++r) {
    const auto& rel = h.relationships()[r];
    const std::string w = where + ".orders." + rel.id;
    const auto& o = require(orders, rel.id.c_str(), where + ".orders");
    if (!o.is_array()) throw DataError(w + ": expected an array");
    std::vector<int> order;
    for (const auto& e : o) order.push_back(h.entity_index(require_string(e, w)));
    v.state.orders[r] = std::move(order);
    if (rel.cardinality() == 1) {
      v.state.monogon_angles[r] = require_number(
          require(angles, rel.id.c_str(), where + ".monogon_angles"),
          where + ".monogon_angles." + rel.id);
    }
  }
  if (auto it = j.find("fixed"); it != j.end()) {
    for (const auto& e : *it) v.state.fixed.push_back(h.entity_index(require_string(e, where + ".fixed")));
  }
  check_state(h, v.state, where);
  return v;
}

inline nlohmann::json weights_to_json(const Weights& w) {
  return {{"k_pr", w.k_pr},
          {"k_pa", w.k_pa},
          {"k_ps", w.k_ps},
          {"k_pi", w.k_pi},
          {"k_dd", w.k_dd},
          {"d_b", w.d_b},
          {"a_b", w.a_b},
          {"w_mono_pair", w.w_mono_pair},
          {"w_mono", w.w_mono},
          {"monogon_center_dist", w.monogon_center_dist},
          {"dd_symmetric", w.dd_symmetric}};
}

inline Weights weights_from_json(const nlohmann::json& j) {
  Weights w;
  const std::string where = "provenance.weights";
  w.k_pr = require_number(require(j, "k_pr", where), where);
  w.k_pa = require_number(require(j, "k_pa", where), where);
  w.k_ps = require_number(require(j, "k_ps", where), where);
  w.k_pi = require_number(require(j, "k_pi", where), where);
  w.k_dd = require_number(require(j, "k_dd", where), where);
  w.d_b = require_number(require(j, "d_b", where), where);
  w.a_b = require_number(require(j, "a_b", where), where);
  w.w_mono_pair = require_number(require(j, "w_mono_pair", where), where);
  w.w_mono = require_number(require(j, "w_mono", where), where);
  w.monogon_center_dist = require_number(require(j, "monogon_center_dist", where), where);
  const auto& sym = require(j, "dd_symmetric", where);
  if (!sym.is_boolean()) throw DataError(where + ".dd_symmetric: expected a boolean");
  w.dd_symmetric = sym.get<bool>();
  return w;
}

}  // namespace detail

/// Serializes with sorted keys and 9 significant digits. Throws DataError
/// when the parts are inconsistent.
inline std::string write_bundle(const LayoutBundle& b) {
  detail::check_state(b.primal.hypergraph, b.primal.state, "primal");
  nlohmann::json doc;
  doc["primal"] = detail::view_to_json(b.primal);
  if (b.dual) {
    if (!b.dual_map) throw DataError("bundle: dual layout present without dual_map");
    detail::check_state(b.dual->hypergraph, b.dual->state, "dual");
    index_dual_map(b.primal.hypergraph, b.dual->hypergraph, *b.dual_map);
    doc["dual"] = detail::view_to_json(*b.dual);
    doc["dual_map"] = {{"edge_to_dual_vertex", b.dual_map->edge_to_dual_vertex},
                       {"vertex_to_dual_edge", b.dual_map->vertex_to_dual_edge}};
  } else if (b.dual_map) {
    throw DataError("bundle: dual_map present without dual layout");
  }
  doc["style"] = {{"palette", b.style.palette},
                  {"monogon_radius", b.style.monogon_radius},
                  {"monogon_center_dist", b.style.monogon_center_dist}};
  doc["provenance"] = {{"seed", b.provenance.seed},
                       {"weights", detail::weights_to_json(b.provenance.weights)},
                       {"mode", b.provenance.mode},
                       {"init", b.provenance.init},
                       {"tool_version", b.provenance.tool_version},
                       {"converged", b.provenance.converged}};
  return doc.dump(1) + "\n";
}

inline LayoutBundle read_bundle(std::string_view text) {
  using detail::require;
  using detail::require_number;
  using detail::require_string;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed bundle: ") + e.what());
  }
  LayoutBundle b{detail::view_from_json(require(doc, "primal", "bundle"), "primal"),
                 std::nullopt, std::nullopt, {}, {}};
  if (auto it = doc.find("dual"); it != doc.end()) {
    b.dual = detail::view_from_json(*it, "dual");
    const auto& dm = require(doc, "dual_map", "bundle");
    DualMap map;
    for (const auto& [k, v] : require(dm, "edge_to_dual_vertex", "dual_map").items()) {
      map.edge_to_dual_vertex.emplace(k, require_string(v, "dual_map.edge_to_dual_vertex"));
    }
    for (const auto& [k, v] : require(dm, "vertex_to_dual_edge", "dual_map").items()) {
      map.vertex_to_dual_edge.emplace(k, require_string(v, "dual_map.vertex_to_dual_edge"));
    }
    index_dual_map(b.primal.hypergraph, b.dual->hypergraph, map);
    b.dual_map = std::move(map);
  } else if (doc.contains("dual_map")) {
    throw DataError("bundle: dual_map present without dual layout");
  }
  const auto& style = require(doc, "style", "bundle");
  b.style.palette = require_string(require(style, "palette", "style"), "style.palette");
  b.style.monogon_radius = require_number(require(style, "monogon_radius", "style"), "style.monogon_radius");
  b.style.monogon_center_dist =
      require_number(require(style, "monogon_center_dist", "style"), "style.monogon_center_dist");
  const auto& prov = require(doc, "provenance", "bundle");
  const auto& seed = require(prov, "seed", "provenance");
  if (!seed.is_number_unsigned()) throw DataError("provenance.seed: expected an unsigned integer");
  b.provenance.seed = seed.get<std::uint64_t>();
  b.provenance.weights = detail::weights_from_json(require(prov, "weights", "provenance"));
  b.provenance.mode = require_string(require(prov, "mode", "provenance"), "provenance.mode");
  b.provenance.init = require_string(require(prov, "init", "provenance"), "provenance.init");
  b.provenance.tool_version =
      require_string(require(prov, "tool_version", "provenance"), "provenance.tool_version");
  if (auto it = prov.find("converged"); it != prov.end()) {
    if (!it->is_boolean()) throw DataError("provenance.converged: expected a boolean");
    b.provenance.converged = it->get<bool>();
  }
  return b;
}

}  // namespace polylay
