#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace polylay {

/// Raised for malformed or inconsistent input data. The message carries a
/// location such as `relationships[2].members[0]`.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Entity {
  std::string id;
  std::string label;
  std::map<std::string, std::string> attrs;

  bool operator==(const Entity&) const = default;
};

struct Relationship {
  std::string id;
  // Entity indices, sorted by entity id.
  std::vector<int> members;

  std::size_t cardinality() const { return members.size(); }
  bool operator==(const Relationship&) const = default;
};

/// Entities plus a multiset of relationships over them. Immutable once built;
/// all queries are by dense index with id lookup on the side.
class Hypergraph {
 public:
  Hypergraph() = default;

  /// Validates and indexes. Relationship members are given as entity ids.
  Hypergraph(std::vector<Entity> entities,
             std::vector<std::pair<std::string, std::vector<std::string>>> relationships)
      : entities_(std::move(entities)) {
    for (std::size_t i = 0; i < entities_.size(); ++i) {
      auto [it, fresh] = entity_index_.emplace(entities_[i].id, static_cast<int>(i));
      if (!fresh) {
        throw DataError("entities[" + std::to_string(i) + "]: duplicate id '" +
                        entities_[i].id + "'");
      }
    }
    incident_.resize(entities_.size());
    relationships_.reserve(relationships.size());
    for (std::size_t r = 0; r < relationships.size(); ++r) {
      auto& [rid, member_ids] = relationships[r];
      const std::string where = "relationships[" + std::to_string(r) + "]";
      if (!relationship_index_.emplace(rid, static_cast<int>(r)).second) {
        throw DataError(where + ": duplicate id '" + rid + "'");
      }
      if (member_ids.empty()) {
        throw DataError(where + ": empty relationship '" + rid + "'");
      }
      Relationship rel{rid, {}};
      for (std::size_t m = 0; m < member_ids.size(); ++m) {
        auto it = entity_index_.find(member_ids[m]);
        if (it == entity_index_.end()) {
          throw DataError(where + ".members[" + std::to_string(m) + "]: dangling member '" +
                          member_ids[m] + "'");
        }
        rel.members.push_back(it->second);
      }
      std::sort(rel.members.begin(), rel.members.end(), [this](int a, int b) {
        return entities_[a].id < entities_[b].id;
      });
      if (std::adjacent_find(rel.members.begin(), rel.members.end()) != rel.members.end()) {
        throw DataError(where + ": duplicate member in '" + rid + "'");
      }
      for (int v : rel.members) incident_[v].push_back(static_cast<int>(r));
      relationships_.push_back(std::move(rel));
    }
    for (std::size_t v = 0; v < entities_.size(); ++v) {
      if (incident_[v].empty()) {
        throw DataError("entities[" + std::to_string(v) + "]: orphan entity '" +
                        entities_[v].id + "'");
      }
    }
  }

  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_relationships() const { return relationships_.size(); }

  const std::vector<Entity>& entities() const { return entities_; }
  const std::vector<Relationship>& relationships() const { return relationships_; }
  const Entity& entity(int v) const { return entities_.at(static_cast<std::size_t>(v)); }
  const Relationship& relationship(int r) const {
    return relationships_.at(static_cast<std::size_t>(r));
  }

  /// Relationships containing entity `v`, in input order.
  const std::vector<int>& incident(int v) const { return incident_.at(static_cast<std::size_t>(v)); }

  std::optional<int> find_entity(std::string_view id) const {
    auto it = entity_index_.find(std::string(id));
    if (it == entity_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<int> find_relationship(std::string_view id) const {
    auto it = relationship_index_.find(std::string(id));
    if (it == relationship_index_.end()) return std::nullopt;
    return it->second;
  }
  int entity_index(std::string_view id) const {
    if (auto v = find_entity(id)) return *v;
    throw DataError("unknown entity id '" + std::string(id) + "'");
  }
  int relationship_index(std::string_view id) const {
    if (auto r = find_relationship(id)) return *r;
    throw DataError("unknown relationship id '" + std::string(id) + "'");
  }

  bool contains(int r, int v) const {
    const auto& m = relationships_.at(static_cast<std::size_t>(r)).members;
    return std::find(m.begin(), m.end(), v) != m.end();
  }

  std::size_t max_cardinality() const {
    std::size_t best = 0;
    for (const auto& r : relationships_) best = std::max(best, r.cardinality());
    return best;
  }

  bool operator==(const Hypergraph& o) const {
    return entities_ == o.entities_ && relationships_ == o.relationships_;
  }

 private:
  std::vector<Entity> entities_;
  std::vector<Relationship> relationships_;
  std::vector<std::vector<int>> incident_;
  std::unordered_map<std::string, int> entity_index_;
  std::unordered_map<std::string, int> relationship_index_;
};

// ---------------------------------------------------------------------------
// Queries

/// Number of relationships containing `v`.
inline std::size_t vertex_degree(const Hypergraph& h, std::string_view v) {
  return h.incident(h.entity_index(v)).size();
}

/// Indices of the members shared by relationships `r1` and `r2`, in the sorted
/// member order of `r1`.
inline std::vector<int> shared_members(const Hypergraph& h, int r1, int r2) {
  const auto& a = h.relationship(r1).members;
  const auto& b = h.relationship(r2).members;
  std::vector<int> out;
  for (int v : a) {
    if (std::find(b.begin(), b.end(), v) != b.end()) out.push_back(v);
  }
  return out;
}

/// Number of other relationships sharing at least one member with `r`.
inline std::size_t polygon_degree(const Hypergraph& h, std::string_view r) {
  const int ri = h.relationship_index(r);
  std::vector<char> seen(h.num_relationships(), 0);
  std::size_t count = 0;
  for (int v : h.relationship(ri).members) {
    for (int other : h.incident(v)) {
      if (other != ri && !seen[static_cast<std::size_t>(other)]) {
        seen[static_cast<std::size_t>(other)] = 1;
        ++count;
      }
    }
  }
  return count;
}

inline std::vector<std::string> shared_vertices(const Hypergraph& h, std::string_view r1,
                                                std::string_view r2) {
  const int a = h.relationship_index(r1);
  const int b = h.relationship_index(r2);
  if (a == b) throw DataError("shared_vertices: relationship '" + std::string(r1) +
                              "' compared with itself");
  std::vector<std::string> out;
  for (int v : shared_members(h, a, b)) out.push_back(h.entity(v).id);
  return out;
}

// ---------------------------------------------------------------------------
// Duality

/// Correspondence between a hypergraph and its dual. Primal relationship `r`
/// becomes dual entity `edge_to_dual_vertex[r]`; primal entity `v` becomes dual
/// relationship `vertex_to_dual_edge[v]`.
struct DualMap {
  std::map<std::string, std::string> edge_to_dual_vertex;
  std::map<std::string, std::string> vertex_to_dual_edge;

  bool operator==(const DualMap&) const = default;
};

inline std::string dual_id(std::string_view primal_id) {
  return "dual:" + std::string(primal_id);
}

inline std::pair<Hypergraph, DualMap> dualize(const Hypergraph& h) {
  DualMap dm;
  std::vector<Entity> dual_entities;
  dual_entities.reserve(h.num_relationships());
  for (const auto& r : h.relationships()) {
    const std::string id = dual_id(r.id);
    dual_entities.push_back(Entity{id, r.id, {}});
    dm.edge_to_dual_vertex.emplace(r.id, id);
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> dual_rels;
  dual_rels.reserve(h.num_entities());
  for (std::size_t v = 0; v < h.num_entities(); ++v) {
    const auto& e = h.entities()[v];
    std::vector<std::string> members;
    for (int r : h.incident(static_cast<int>(v))) {
      members.push_back(dual_id(h.relationship(r).id));
    }
    const std::string id = dual_id(e.id);
    dual_rels.emplace_back(id, std::move(members));
    dm.vertex_to_dual_edge.emplace(e.id, id);
  }
  return {Hypergraph(std::move(dual_entities), std::move(dual_rels)), std::move(dm)};
}

/// Dense-index view of a DualMap against concrete primal/dual hypergraphs.
struct DualIndex {
  std::vector<int> edge_to_dual_vertex;  // primal relationship -> dual entity
  std::vector<int> vertex_to_dual_edge;  // primal entity -> dual relationship
};

inline DualIndex index_dual_map(const Hypergraph& primal, const Hypergraph& dual,
                                const DualMap& dm) {
  if (dm.edge_to_dual_vertex.size() != primal.num_relationships() ||
      dm.vertex_to_dual_edge.size() != primal.num_entities() ||
      dual.num_entities() != primal.num_relationships() ||
      dual.num_relationships() != primal.num_entities()) {
    throw DataError("dual_map: size mismatch with primal/dual hypergraphs");
  }
  DualIndex ix;
  ix.edge_to_dual_vertex.assign(primal.num_relationships(), -1);
  ix.vertex_to_dual_edge.assign(primal.num_entities(), -1);
  std::vector<char> hit_v(dual.num_entities(), 0), hit_r(dual.num_relationships(), 0);
  for (const auto& [rid, uid] : dm.edge_to_dual_vertex) {
    const int r = primal.relationship_index(rid);
    const int u = dual.entity_index(uid);
    if (hit_v[static_cast<std::size_t>(u)]++) throw DataError("dual_map: '" + uid + "' mapped twice");
    ix.edge_to_dual_vertex[static_cast<std::size_t>(r)] = u;
  }
  for (const auto& [vid, eid] : dm.vertex_to_dual_edge) {
    const int v = primal.entity_index(vid);
    const int e = dual.relationship_index(eid);
    if (hit_r[static_cast<std::size_t>(e)]++) throw DataError("dual_map: '" + eid + "' mapped twice");
    ix.vertex_to_dual_edge[static_cast<std::size_t>(v)] = e;
  }
  // Incidence must be transposed.
  for (std::size_t v = 0; v < primal.num_entities(); ++v) {
    const int e = ix.vertex_to_dual_edge[v];
    std::vector<int> expect;
    for (int r : primal.incident(static_cast<int>(v))) {
      expect.push_back(ix.edge_to_dual_vertex[static_cast<std::size_t>(r)]);
    }
    std::vector<int> got = dual.relationship(e).members;
    std::sort(expect.begin(), expect.end());
    std::sort(got.begin(), got.end());
    if (expect != got) {
      throw DataError("dual_map: incidence of '" + primal.entity(static_cast<int>(v)).id +
                      "' is not transposed in the dual");
    }
  }
  return ix;
}

// ---------------------------------------------------------------------------
// Document format
//
//   { "entities": [ {"id": "a", "label": "...", "attrs": {"k": "v"}} ],
//     "relationships": [ {"id": "r1", "members": ["a", "b"]} ] }

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     const std::string& where) {
  if (!obj.is_object()) throw DataError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(where + ": missing field '" + key + "'");
  return *it;
}

inline std::string require_string(const nlohmann::json& j, const std::string& where) {
  if (!j.is_string()) throw DataError(where + ": expected a string");
  return j.get<std::string>();
}

}  // namespace detail

inline Hypergraph hypergraph_from_json(const nlohmann::json& doc) {
  using detail::require;
  using detail::require_string;
  const auto& ents = require(doc, "entities", "document");
  const auto& rels = require(doc, "relationships", "document");
  if (!ents.is_array()) throw DataError("entities: expected an array");
  if (!rels.is_array()) throw DataError("relationships: expected an array");

  std::vector<Entity> entities;
  for (std::size_t i = 0; i < ents.size(); ++i) {
    const std::string where = "entities[" + std::to_string(i) + "]";
    Entity e;
    e.id = require_string(require(ents[i], "id", where), where + ".id");
    if (auto it = ents[i].find("label"); it != ents[i].end()) {
      e.label = require_string(*it, where + ".label");
    }
    if (auto it = ents[i].find("attrs"); it != ents[i].end()) {
      if (!it->is_object()) throw DataError(where + ".attrs: expected an object");
      for (const auto& [k, v] : it->items()) {
        e.attrs.emplace(k, require_string(v, where + ".attrs." + k));
      }
    }
    entities.push_back(std::move(e));
  }

  std::vector<std::pair<std::string, std::vector<std::string>>> relationships;
  for (std::size_t i = 0; i < rels.size(); ++i) {
    const std::string where = "relationships[" + std::to_string(i) + "]";
    std::string id = require_string(require(rels[i], "id", where), where + ".id");
    const auto& members = require(rels[i], "members", where);
    if (!members.is_array()) throw DataError(where + ".members: expected an array");
    std::vector<std::string> ids;
    for (std::size_t m = 0; m < members.size(); ++m) {
      ids.push_back(require_string(members[m], where + ".members[" + std::to_string(m) + "]"));
    }
    relationships.emplace_back(std::move(id), std::move(ids));
  }
  return Hypergraph(std::move(entities), std::move(relationships));
}

inline Hypergraph parse_hypergraph(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed document: ") + e.what());
  }
  return hypergraph_from_json(doc);
}

inline nlohmann::json to_json(const Hypergraph& h) {
  nlohmann::json ents = nlohmann::json::array();
  for (const auto& e : h.entities()) {
    nlohmann::json j = {{"id", e.id}};
    if (!e.label.empty()) j["label"] = e.label;
    if (!e.attrs.empty()) j["attrs"] = e.attrs;
    ents.push_back(std::move(j));
  }
  nlohmann::json rels = nlohmann::json::array();
  for (const auto& r : h.relationships()) {
    nlohmann::json members = nlohmann::json::array();
    for (int v : r.members) members.push_back(h.entity(v).id);
    rels.push_back({{"id", r.id}, {"members", std::move(members)}});
  }
  return {{"entities", std::move(ents)}, {"relationships", std::move(rels)}};
}

inline std::string serialize_hypergraph(const Hypergraph& h) { return to_json(h).dump(2) + "\n"; }

}  // namespace polylay
