// Shuffle workloads: mapper/reducer placements on servers and the all-to-all
// demand matrix they induce.
#pragma once

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shuffleopt/common.hpp"
#include "shuffleopt/topology.hpp"

namespace shuffleopt {

struct Placement {
  std::vector<NodeId> mappers;   // one worker per entry
  std::vector<NodeId> reducers;

  std::uint64_t fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (NodeId m : mappers) h = fnv1a_append(h, static_cast<std::int64_t>(m));
    h = fnv1a_append(h, std::string("|"));
    for (NodeId r : reducers) h = fnv1a_append(h, static_cast<std::int64_t>(r));
    return h;
  }
};

// One mapper-to-reducer transfer. Colocated demands (src == snk) ride the
// server's internal loopback and never touch the network.
struct Demand {
  DemandId id = 0;
  NodeId src = 0;
  NodeId snk = 0;
  double volume_mb = 0.0;
  bool colocated = false;
};

struct DemandSet {
  std::vector<Demand> demands;
  double total_volume_mb = 0.0;
};

namespace detail {

inline void check_role(const Topology& t, const std::vector<NodeId>& role,
                       const char* role_name) {
  std::set<NodeId> seen;
  for (NodeId id : role) {
    const Node* n = t.find_node(id);
    if (!n)
      throw PlacementError(std::string(role_name) + " placed on unknown node " +
                           std::to_string(id));
    if (!is_server(n->kind))
      throw PlacementError(std::string(role_name) + " placed on non-server node '" +
                           n->label + "'");
    if (!seen.insert(id).second)
      throw PlacementError(std::string("duplicate ") + role_name + " on server '" +
                           n->label + "'");
  }
}

}  // namespace detail

// Resolve labels to server ids and validate role constraints. A server may
// host both a mapper and a reducer, but at most one worker of each role.
inline Placement make_placement(const Topology& t,
                                const std::vector<std::string>& mapper_labels,
                                const std::vector<std::string>& reducer_labels) {
  if (mapper_labels.empty()) throw PlacementError("placement needs at least one mapper");
  if (reducer_labels.empty()) throw PlacementError("placement needs at least one reducer");
  Placement p;
  for (const auto& lbl : mapper_labels) {
    auto id = t.node_by_label(lbl);
    if (!id) throw PlacementError("mapper label not found: " + lbl);
    p.mappers.push_back(*id);
  }
  for (const auto& lbl : reducer_labels) {
    auto id = t.node_by_label(lbl);
    if (!id) throw PlacementError("reducer label not found: " + lbl);
    p.reducers.push_back(*id);
  }
  detail::check_role(t, p.mappers, "mapper");
  detail::check_role(t, p.reducers, "reducer");
  return p;
}

// Deterministic random placement: Fisher-Yates over the server list with a
// hand-rolled index draw so results are identical across standard libraries.
inline Placement random_placement(const Topology& t, int mappers, int reducers,
                                  std::uint64_t seed) {
  std::vector<NodeId> servers;
  for (const auto& n : t.nodes)
    if (is_server(n.kind)) servers.push_back(n.id);
  if (mappers < 1 || reducers < 1)
    throw PlacementError("placement needs at least one mapper and one reducer");
  if (static_cast<size_t>(mappers) > servers.size() ||
      static_cast<size_t>(reducers) > servers.size())
    throw PlacementError("placement larger than server count (" +
                         std::to_string(servers.size()) + " servers)");
  std::mt19937_64 rng(seed);
  auto sample = [&](int count) {
    std::vector<NodeId> pool = servers;
    for (size_t i = pool.size() - 1; i > 0; --i) {
      size_t j = static_cast<size_t>(rng() % (i + 1));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(static_cast<size_t>(count));
    return pool;
  };
  Placement p;
  p.mappers = sample(mappers);
  p.reducers = sample(reducers);
  return p;
}

// All-to-all shuffle: M*R demands, each carrying total_volume_mb / (M*R).
// V = 0 is allowed (all demands zero); the model layer short-circuits it.
inline DemandSet make_graysort_demands(double total_volume_mb, const Placement& p) {
  if (total_volume_mb < 0) throw ParameterError("shuffle volume must be >= 0");
  if (p.mappers.empty() || p.reducers.empty())
    throw PlacementError("placement needs at least one mapper and one reducer");
  const double per = total_volume_mb / (static_cast<double>(p.mappers.size()) *
                                        static_cast<double>(p.reducers.size()));
  DemandSet set;
  set.total_volume_mb = total_volume_mb;
  set.demands.reserve(p.mappers.size() * p.reducers.size());
  DemandId next = 0;
  for (NodeId m : p.mappers)
    for (NodeId r : p.reducers) {
      Demand d;
      d.id = next++;
      d.src = m;
      d.snk = r;
      d.volume_mb = per;
      d.colocated = (m == r);
      set.demands.push_back(d);
    }
  return set;
}

inline double total_volume_mb(const std::vector<Demand>& demands) {
  double v = 0;
  for (const auto& d : demands) v += d.volume_mb;
  return v;
}

// Report-based counterpart of make_placement's checks.
inline ValidationReport validate_placement(const Topology& t, const Placement& p) {
  ValidationReport r;
  if (p.mappers.empty()) r.add("placement needs at least one mapper");
  if (p.reducers.empty()) r.add("placement needs at least one reducer");
  auto check = [&](const std::vector<NodeId>& role, const char* role_name) {
    std::set<NodeId> seen;
    for (NodeId id : role) {
      const Node* n = t.find_node(id);
      if (!n) {
        r.add(std::string(role_name) + " placed on unknown node " + std::to_string(id));
        continue;
      }
      if (!is_server(n->kind))
        r.add(std::string(role_name) + " placed on non-server node '" + n->label + "'");
      if (!seen.insert(id).second)
        r.add(std::string("duplicate ") + role_name + " on server '" + n->label + "'");
    }
  };
  check(p.mappers, "mapper");
  check(p.reducers, "reducer");
  return r;
}

// Demands that actually need the network.
inline std::vector<Demand> network_demands(const std::vector<Demand>& demands) {
  std::vector<Demand> out;
  for (const auto& d : demands)
    if (!d.colocated) out.push_back(d);
  return out;
}

// ---------------------------------------------------------------------------
// Document I/O
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json placement_to_json(const Placement& p, const Topology& t) {
  nlohmann::ordered_json doc;
  doc["mappers"] = nlohmann::ordered_json::array();
  doc["reducers"] = nlohmann::ordered_json::array();
  for (NodeId m : p.mappers) {
    const Node* n = t.find_node(m);
    if (!n) throw PlacementError("placement references unknown node " + std::to_string(m));
    doc["mappers"].push_back(n->label);
  }
  for (NodeId r : p.reducers) {
    const Node* n = t.find_node(r);
    if (!n) throw PlacementError("placement references unknown node " + std::to_string(r));
    doc["reducers"].push_back(n->label);
  }
  return doc;
}

inline Placement placement_from_json(const nlohmann::json& doc, const Topology& t) {
  if (!doc.contains("mappers") || !doc.contains("reducers"))
    throw ParseError("placement document: needs 'mappers' and 'reducers' arrays");
  std::vector<std::string> mappers, reducers;
  try {
    mappers = doc.at("mappers").get<std::vector<std::string>>();
    reducers = doc.at("reducers").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("placement document: 'mappers'/'reducers' must be arrays of labels");
  }
  return make_placement(t, mappers, reducers);
}

inline void save_placement(const Placement& p, const Topology& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << placement_to_json(p, t).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline Placement load_placement(const std::string& path, const Topology& t) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open placement document: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("placement document: ") + e.what());
  }
  return placement_from_json(doc, t);
}

}  // namespace shuffleopt
