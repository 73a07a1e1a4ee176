// Data-center network topologies: typed capacitated graphs with power
// annotations and optical-circuit constraint groups, plus the seven family
// generators and JSON document I/O.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shuffleopt/common.hpp"

namespace shuffleopt {

enum class NodeKind {
  Server,
  ToRSwitch,
  AggSwitch,
  CoreSwitch,
  PodSwitch,
  ElectricalCoreSwitch,
  OpticalCircuitSwitch,
  PonComponent,
};

inline const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Server: return "server";
    case NodeKind::ToRSwitch: return "tor";
    case NodeKind::AggSwitch: return "agg";
    case NodeKind::CoreSwitch: return "core";
    case NodeKind::PodSwitch: return "pod";
    case NodeKind::ElectricalCoreSwitch: return "electrical-core";
    case NodeKind::OpticalCircuitSwitch: return "optical-circuit";
    case NodeKind::PonComponent: return "pon";
  }
  return "?";
}

inline std::optional<NodeKind> node_kind_from_string(const std::string& s) {
  if (s == "server") return NodeKind::Server;
  if (s == "tor") return NodeKind::ToRSwitch;
  if (s == "agg") return NodeKind::AggSwitch;
  if (s == "core") return NodeKind::CoreSwitch;
  if (s == "pod") return NodeKind::PodSwitch;
  if (s == "electrical-core") return NodeKind::ElectricalCoreSwitch;
  if (s == "optical-circuit") return NodeKind::OpticalCircuitSwitch;
  if (s == "pon") return NodeKind::PonComponent;
  return std::nullopt;
}

// Passive optical parts draw no power; only servers may host workers.
inline bool is_passive(NodeKind k) { return k == NodeKind::PonComponent; }
inline bool is_server(NodeKind k) { return k == NodeKind::Server; }
// Powered network elements are everything that is neither a server nor passive.
inline bool is_powered_element(NodeKind k) {
  return !is_server(k) && !is_passive(k);
}

struct Node {
  NodeId id = 0;
  NodeKind kind = NodeKind::Server;
  std::string label;
  double power_active_w = 0.0;
  double power_idle_w = 0.0;
};

struct Link {
  LinkId id = 0;
  NodeId a = 0;
  NodeId b = 0;
  double capacity_mbps = 0.0;  // MBytes/s, per direction
  std::optional<GroupId> optical_group;
};

struct OpticalConstraintGroup {
  GroupId id = 0;
  std::vector<LinkId> members;
  std::map<NodeId, int> budgets;  // per-endpoint transceiver budget k
};

struct Topology {
  std::vector<Node> nodes;   // sorted by id
  std::vector<Link> links;   // sorted by id; may be non-dense after failures
  std::vector<OpticalConstraintGroup> groups;
  double server_rate_cap_mbps = 1000.0;  // R_max
  std::string arch_tag;
  // One past the largest link id ever assigned; failed links leave holes in
  // `links` but stay inside this universe so scenarios stay well-defined.
  int link_id_limit = 0;

  const Node* find_node(NodeId id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                               [](const Node& n, NodeId v) { return n.id < v; });
    if (it == nodes.end() || it->id != id) return nullptr;
    return &*it;
  }
  const Link* find_link(LinkId id) const {
    auto it = std::lower_bound(links.begin(), links.end(), id,
                               [](const Link& l, LinkId v) { return l.id < v; });
    if (it == links.end() || it->id != id) return nullptr;
    return &*it;
  }
  std::optional<NodeId> node_by_label(const std::string& label) const {
    for (const auto& n : nodes)
      if (n.label == label) return n.id;
    return std::nullopt;
  }

  std::uint64_t fingerprint() const {
    std::uint64_t h = fnv1a_append(1469598103934665603ULL, arch_tag);
    h = fnv1a_append(h, server_rate_cap_mbps);
    for (const auto& n : nodes) {
      h = fnv1a_append(h, static_cast<std::int64_t>(n.id));
      h = fnv1a_append(h, static_cast<std::int64_t>(n.kind));
      h = fnv1a_append(h, n.label);
      h = fnv1a_append(h, n.power_active_w);
      h = fnv1a_append(h, n.power_idle_w);
    }
    for (const auto& l : links) {
      h = fnv1a_append(h, static_cast<std::int64_t>(l.id));
      h = fnv1a_append(h, static_cast<std::int64_t>(l.a));
      h = fnv1a_append(h, static_cast<std::int64_t>(l.b));
      h = fnv1a_append(h, l.capacity_mbps);
      h = fnv1a_append(h, static_cast<std::int64_t>(
                              l.optical_group ? *l.optical_group : -1));
    }
    for (const auto& g : groups) {
      h = fnv1a_append(h, static_cast<std::int64_t>(g.id));
      for (LinkId m : g.members) h = fnv1a_append(h, static_cast<std::int64_t>(m));
      for (const auto& [n, k] : g.budgets) {
        h = fnv1a_append(h, static_cast<std::int64_t>(n));
        h = fnv1a_append(h, static_cast<std::int64_t>(k));
      }
    }
    return h;
  }
};

// Default power ratings per node kind; overridable via generator params.
struct PowerProfile {
  double switch_active_w = 200.0;
  double switch_idle_w = 100.0;
  double server_nic_w = 15.0;

  void apply(Node& n) const {
    switch (n.kind) {
      case NodeKind::Server:
        n.power_active_w = server_nic_w;
        n.power_idle_w = server_nic_w;
        break;
      case NodeKind::PonComponent:
        n.power_active_w = 0.0;
        n.power_idle_w = 0.0;
        break;
      default:
        n.power_active_w = switch_active_w;
        n.power_idle_w = switch_idle_w;
        break;
    }
  }
};

// Per-family generator parameters; unused fields are ignored by a family.
struct TopologyParams {
  // spine-leaf
  int spines = 4;
  int leaves = 4;
  int servers_per_leaf = 4;
  // fat-tree
  int k = 4;
  // bcube / dcell
  int n = 4;
  int level = 1;
  // c-through / helios
  int racks = 4;
  int servers_per_rack = 4;
  int pods = 4;
  int servers_per_pod = 4;
  int transceiver_budget = 0;  // 0 = family default (c-through 1, helios 2)
  double optical_capacity_mbps = 0.0;  // 0 = same as link capacity
  // pon-servercentric
  int groups_per_rack = 4;
  int servers_per_group = 1;
  // shared
  double link_capacity_mbps = 1000.0;
  double server_rate_cap_mbps = 1000.0;
  PowerProfile power;
};

namespace detail {

class TopologyBuilder {
 public:
  explicit TopologyBuilder(const TopologyParams& p) : params_(p) {}

  NodeId add_node(NodeKind kind, std::string label) {
    Node n;
    n.id = static_cast<NodeId>(topo_.nodes.size());
    n.kind = kind;
    n.label = std::move(label);
    params_.power.apply(n);
    topo_.nodes.push_back(std::move(n));
    return topo_.nodes.back().id;
  }

  LinkId add_link(NodeId a, NodeId b, double capacity = -1.0,
                  std::optional<GroupId> group = std::nullopt) {
    Link l;
    l.id = static_cast<LinkId>(topo_.links.size());
    l.a = a;
    l.b = b;
    l.capacity_mbps = capacity > 0 ? capacity : params_.link_capacity_mbps;
    l.optical_group = group;
    topo_.links.push_back(std::move(l));
    return topo_.links.back().id;
  }

  Topology finish(std::string arch_tag) {
    topo_.arch_tag = std::move(arch_tag);
    topo_.server_rate_cap_mbps = params_.server_rate_cap_mbps;
    topo_.link_id_limit = static_cast<int>(topo_.links.size());
    return std::move(topo_);
  }

  Topology topo_;
  TopologyParams params_;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ParameterError("invalid topology parameters: " + what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

inline Topology build_spine_leaf(const TopologyParams& p) {
  detail::require(p.spines >= 1, "spine-leaf requires spines >= 1");
  detail::require(p.leaves >= 1, "spine-leaf requires leaves >= 1");
  detail::require(p.servers_per_leaf >= 1, "spine-leaf requires servers_per_leaf >= 1");
  detail::TopologyBuilder b(p);
  std::vector<NodeId> servers, leaves, spines;
  for (int l = 0; l < p.leaves; ++l)
    for (int s = 0; s < p.servers_per_leaf; ++s)
      servers.push_back(b.add_node(NodeKind::Server,
                                   "rack" + std::to_string(l) + ".server" + std::to_string(s)));
  for (int l = 0; l < p.leaves; ++l)
    leaves.push_back(b.add_node(NodeKind::ToRSwitch, "leaf" + std::to_string(l)));
  for (int s = 0; s < p.spines; ++s)
    spines.push_back(b.add_node(NodeKind::CoreSwitch, "spine" + std::to_string(s)));
  for (int l = 0; l < p.leaves; ++l)
    for (int s = 0; s < p.servers_per_leaf; ++s)
      b.add_link(servers[static_cast<size_t>(l * p.servers_per_leaf + s)], leaves[static_cast<size_t>(l)]);
  for (int l = 0; l < p.leaves; ++l)
    for (int s = 0; s < p.spines; ++s)
      b.add_link(leaves[static_cast<size_t>(l)], spines[static_cast<size_t>(s)]);
  return b.finish("spine-leaf");
}

inline Topology build_fat_tree(const TopologyParams& p) {
  detail::require(p.k >= 2 && p.k % 2 == 0, "fat-tree requires even k >= 2");
  const int k = p.k;
  const int half = k / 2;
  detail::TopologyBuilder b(p);
  // k^3/4 servers under k*k/2 edge switches, k*k/2 aggs, (k/2)^2 cores.
  std::vector<NodeId> servers, edges, aggs, cores;
  for (int pod = 0; pod < k; ++pod)
    for (int e = 0; e < half; ++e)
      for (int s = 0; s < half; ++s)
        servers.push_back(b.add_node(
            NodeKind::Server, "rack" + std::to_string(pod * half + e) + ".server" + std::to_string(s)));
  for (int pod = 0; pod < k; ++pod)
    for (int e = 0; e < half; ++e)
      edges.push_back(b.add_node(NodeKind::ToRSwitch,
                                 "pod" + std::to_string(pod) + ".edge" + std::to_string(e)));
  for (int pod = 0; pod < k; ++pod)
    for (int a = 0; a < half; ++a)
      aggs.push_back(b.add_node(NodeKind::AggSwitch,
                                "pod" + std::to_string(pod) + ".agg" + std::to_string(a)));
  for (int c = 0; c < half * half; ++c)
    cores.push_back(b.add_node(NodeKind::CoreSwitch, "core" + std::to_string(c)));

  for (int pod = 0; pod < k; ++pod)
    for (int e = 0; e < half; ++e)
      for (int s = 0; s < half; ++s)
        b.add_link(servers[static_cast<size_t>((pod * half + e) * half + s)],
                   edges[static_cast<size_t>(pod * half + e)]);
  for (int pod = 0; pod < k; ++pod)
    for (int e = 0; e < half; ++e)
      for (int a = 0; a < half; ++a)
        b.add_link(edges[static_cast<size_t>(pod * half + e)], aggs[static_cast<size_t>(pod * half + a)]);
  // Agg a of each pod connects to cores [a*half, (a+1)*half).
  for (int pod = 0; pod < k; ++pod)
    for (int a = 0; a < half; ++a)
      for (int c = 0; c < half; ++c)
        b.add_link(aggs[static_cast<size_t>(pod * half + a)], cores[static_cast<size_t>(a * half + c)]);
  return b.finish("fat-tree");
}

inline Topology build_bcube(const TopologyParams& p) {
  detail::require(p.n >= 2, "bcube requires n >= 2");
  detail::require(p.level >= 0, "bcube requires level >= 0");
  const int n = p.n;
  const int levels = p.level + 1;
  long server_count = 1;
  for (int i = 0; i < levels; ++i) {
    server_count *= n;
    detail::require(server_count <= 4096, "bcube size too large (n^(level+1) > 4096)");
  }
  long switches_per_level = server_count / n;
  detail::TopologyBuilder b(p);
  std::vector<NodeId> servers;
  for (long s = 0; s < server_count; ++s)
    servers.push_back(b.add_node(NodeKind::Server, "server" + std::to_string(s)));
  // Level-l switch g attaches the n servers whose address differs in digit l.
  for (int l = 0; l < levels; ++l) {
    long stride = 1;
    for (int i = 0; i < l; ++i) stride *= n;
    for (long g = 0; g < switches_per_level; ++g) {
      NodeId sw = b.add_node(l == 0 ? NodeKind::ToRSwitch : NodeKind::AggSwitch,
                             "sw" + std::to_string(l) + "." + std::to_string(g));
      long low = g % stride;
      long high = g / stride;
      for (int d = 0; d < n; ++d) {
        long srv = high * stride * n + d * stride + low;
        b.add_link(servers[static_cast<size_t>(srv)], sw);
      }
    }
  }
  return b.finish("bcube");
}

namespace detail {

// DCell recursion. Returns the server node ids of the built sub-cell.
inline std::vector<NodeId> build_dcell_rec(TopologyBuilder& b, int n, int level,
                                           const std::string& prefix) {
  if (level == 0) {
    NodeId sw = b.add_node(NodeKind::ToRSwitch, prefix + "sw");
    std::vector<NodeId> servers;
    for (int s = 0; s < n; ++s) {
      NodeId srv = b.add_node(NodeKind::Server, prefix + "srv" + std::to_string(s));
      b.add_link(srv, sw);
      servers.push_back(srv);
    }
    return servers;
  }
  // DCell(n, l) = (t_{l-1} + 1) copies of DCell(n, l-1), full mesh of cells.
  long t_prev = n;
  for (int i = 1; i < level; ++i) {
    long cells = t_prev + 1;
    t_prev = cells * t_prev;
  }
  long cell_count = t_prev + 1;
  std::vector<std::vector<NodeId>> cells;
  for (long c = 0; c < cell_count; ++c)
    cells.push_back(build_dcell_rec(b, n, level - 1,
                                    prefix + "cell" + std::to_string(c) + "."));
  // Cell i's server (j-1) pairs with cell j's server i, for i < j.
  for (long i = 0; i < cell_count; ++i)
    for (long j = i + 1; j < cell_count; ++j)
      b.add_link(cells[static_cast<size_t>(i)][static_cast<size_t>(j - 1)],
                 cells[static_cast<size_t>(j)][static_cast<size_t>(i)]);
  return [&] {
    std::vector<NodeId> all;
    for (auto& c : cells) all.insert(all.end(), c.begin(), c.end());
    return all;
  }();
}

}  // namespace detail

inline Topology build_dcell(const TopologyParams& p) {
  detail::require(p.n >= 2, "dcell requires n >= 2");
  detail::require(p.level >= 0 && p.level <= 2, "dcell supports level 0..2");
  long t = p.n;
  for (int i = 1; i <= p.level; ++i) t = (t + 1) * t;
  detail::require(t <= 4096, "dcell size too large");
  detail::TopologyBuilder b(p);
  detail::build_dcell_rec(b, p.n, p.level, "");
  return b.finish("dcell");
}

inline Topology build_c_through(const TopologyParams& p) {
  detail::require(p.racks >= 2, "c-through requires racks >= 2");
  detail::require(p.servers_per_rack >= 1, "c-through requires servers_per_rack >= 1");
  const int budget = p.transceiver_budget > 0 ? p.transceiver_budget : 1;
  const double ocap = p.optical_capacity_mbps > 0 ? p.optical_capacity_mbps : p.link_capacity_mbps;
  detail::TopologyBuilder b(p);
  std::vector<NodeId> servers, tors;
  for (int r = 0; r < p.racks; ++r)
    for (int s = 0; s < p.servers_per_rack; ++s)
      servers.push_back(b.add_node(NodeKind::Server,
                                   "rack" + std::to_string(r) + ".server" + std::to_string(s)));
  for (int r = 0; r < p.racks; ++r)
    tors.push_back(b.add_node(NodeKind::ToRSwitch, "tor" + std::to_string(r)));
  NodeId root = b.add_node(NodeKind::ElectricalCoreSwitch, "eagg");
  for (int r = 0; r < p.racks; ++r)
    for (int s = 0; s < p.servers_per_rack; ++s)
      b.add_link(servers[static_cast<size_t>(r * p.servers_per_rack + s)], tors[static_cast<size_t>(r)]);
  for (int r = 0; r < p.racks; ++r) b.add_link(tors[static_cast<size_t>(r)], root);
  // Candidate rack-to-rack circuits through the optical switch: a matching
  // constrained by the per-ToR transceiver budget.
  OpticalConstraintGroup g;
  g.id = 0;
  for (int i = 0; i < p.racks; ++i)
    for (int j = i + 1; j < p.racks; ++j)
      g.members.push_back(b.add_link(tors[static_cast<size_t>(i)], tors[static_cast<size_t>(j)], ocap, 0));
  for (int r = 0; r < p.racks; ++r) g.budgets[tors[static_cast<size_t>(r)]] = budget;
  b.topo_.groups.push_back(std::move(g));
  return b.finish("c-through");
}

inline Topology build_helios(const TopologyParams& p) {
  detail::require(p.pods >= 2, "helios requires pods >= 2");
  detail::require(p.servers_per_pod >= 1, "helios requires servers_per_pod >= 1");
  const int budget = p.transceiver_budget > 0 ? p.transceiver_budget : 2;
  const double ocap = p.optical_capacity_mbps > 0 ? p.optical_capacity_mbps : p.link_capacity_mbps;
  detail::TopologyBuilder b(p);
  std::vector<NodeId> servers, podsw;
  for (int r = 0; r < p.pods; ++r)
    for (int s = 0; s < p.servers_per_pod; ++s)
      servers.push_back(b.add_node(NodeKind::Server,
                                   "rack" + std::to_string(r) + ".server" + std::to_string(s)));
  for (int r = 0; r < p.pods; ++r)
    podsw.push_back(b.add_node(NodeKind::PodSwitch, "podsw" + std::to_string(r)));
  NodeId ecore = b.add_node(NodeKind::ElectricalCoreSwitch, "ecore");
  for (int r = 0; r < p.pods; ++r)
    for (int s = 0; s < p.servers_per_pod; ++s)
      b.add_link(servers[static_cast<size_t>(r * p.servers_per_pod + s)], podsw[static_cast<size_t>(r)]);
  for (int r = 0; r < p.pods; ++r) b.add_link(podsw[static_cast<size_t>(r)], ecore);
  OpticalConstraintGroup g;
  g.id = 0;
  for (int i = 0; i < p.pods; ++i)
    for (int j = i + 1; j < p.pods; ++j)
      g.members.push_back(b.add_link(podsw[static_cast<size_t>(i)], podsw[static_cast<size_t>(j)], ocap, 0));
  for (int r = 0; r < p.pods; ++r) g.budgets[podsw[static_cast<size_t>(r)]] = budget;
  b.topo_.groups.push_back(std::move(g));
  return b.finish("helios");
}

inline Topology build_pon_servercentric(const TopologyParams& p) {
  detail::require(p.racks >= 1, "pon-servercentric requires racks >= 1");
  detail::require(p.groups_per_rack >= 1, "pon-servercentric requires groups_per_rack >= 1");
  detail::require(p.servers_per_group >= 1, "pon-servercentric requires servers_per_group >= 1");
  detail::TopologyBuilder b(p);
  std::vector<NodeId> servers;
  for (int r = 0; r < p.racks; ++r)
    for (int g = 0; g < p.groups_per_rack; ++g)
      for (int s = 0; s < p.servers_per_group; ++s)
        servers.push_back(b.add_node(NodeKind::Server,
                                     "rack" + std::to_string(r) + ".grp" + std::to_string(g) +
                                         ".srv" + std::to_string(s)));
  std::vector<NodeId> rack_pon;
  for (int r = 0; r < p.racks; ++r)
    rack_pon.push_back(b.add_node(NodeKind::PonComponent, "rack" + std::to_string(r) + ".pon"));
  NodeId core_pon = b.add_node(NodeKind::PonComponent, "pon.core");
  const int per_rack = p.groups_per_rack * p.servers_per_group;
  for (int r = 0; r < p.racks; ++r) {
    for (int g = 0; g < p.groups_per_rack; ++g) {
      for (int s = 0; s < p.servers_per_group; ++s) {
        NodeId srv = servers[static_cast<size_t>(r * per_rack + g * p.servers_per_group + s)];
        // Dual-homed: rack-level passive star plus global passive star.
        b.add_link(srv, rack_pon[static_cast<size_t>(r)]);
        b.add_link(srv, core_pon);
        // Intra-group mesh between sibling servers.
        for (int s2 = s + 1; s2 < p.servers_per_group; ++s2) {
          NodeId other = servers[static_cast<size_t>(r * per_rack + g * p.servers_per_group + s2)];
          b.add_link(srv, other);
        }
      }
    }
  }
  return b.finish("pon-servercentric");
}

inline Topology build_topology(const std::string& arch, const TopologyParams& p) {
  if (arch == "spine-leaf") return build_spine_leaf(p);
  if (arch == "fat-tree") return build_fat_tree(p);
  if (arch == "bcube") return build_bcube(p);
  if (arch == "dcell") return build_dcell(p);
  if (arch == "c-through") return build_c_through(p);
  if (arch == "helios") return build_helios(p);
  if (arch == "pon-servercentric") return build_pon_servercentric(p);
  throw ParameterError("unknown architecture tag: " + arch);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline ValidationReport validate_topology(const Topology& t) {
  ValidationReport r;
  if (t.nodes.empty()) {
    r.add("topology has no nodes");
    return r;
  }
  // Id density and uniqueness.
  for (size_t i = 0; i < t.nodes.size(); ++i)
    if (t.nodes[i].id != static_cast<NodeId>(i)) {
      r.add("node ids not dense: expected " + std::to_string(i) + ", found " +
            std::to_string(t.nodes[i].id));
      break;
    }
  for (size_t i = 0; i < t.links.size(); ++i)
    if (t.links[i].id != static_cast<LinkId>(i)) {
      r.add("link ids not dense: expected " + std::to_string(i) + ", found " +
            std::to_string(t.links[i].id));
      break;
    }
  std::set<std::string> labels;
  for (const auto& n : t.nodes) {
    if (!labels.insert(n.label).second) r.add("duplicate node label: " + n.label);
    if (n.power_idle_w < 0 || n.power_idle_w > n.power_active_w)
      r.add("node " + n.label + ": requires 0 <= power_idle <= power_active");
    if (is_passive(n.kind) && n.power_active_w != 0)
      r.add("node " + n.label + ": passive component must have power rating 0 W");
  }
  const NodeId node_count = static_cast<NodeId>(t.nodes.size());
  for (const auto& l : t.links) {
    if (l.capacity_mbps <= 0)
      r.add("link " + std::to_string(l.id) + ": capacity > 0 violated");
    if (l.a == l.b) r.add("link " + std::to_string(l.id) + ": endpoints must be distinct");
    if (l.a < 0 || l.a >= node_count || l.b < 0 || l.b >= node_count)
      r.add("link " + std::to_string(l.id) + ": endpoint out of range");
  }
  if (t.server_rate_cap_mbps <= 0) r.add("server_rate_cap > 0 violated");
  // Optical group consistency.
  for (const auto& g : t.groups) {
    for (LinkId m : g.members) {
      const Link* l = t.find_link(m);
      if (!l) {
        r.add("group " + std::to_string(g.id) + ": member link " + std::to_string(m) +
              " does not exist");
        continue;
      }
      if (!g.budgets.count(l->a) || !g.budgets.count(l->b))
        r.add("group " + std::to_string(g.id) + ": member link " + std::to_string(m) +
              " endpoint missing from budget map");
    }
    for (const auto& [n, k] : g.budgets)
      if (k < 1)
        r.add("group " + std::to_string(g.id) + ": budget for node " + std::to_string(n) +
              " must be >= 1");
  }
  // Connectivity over the undirected graph (optical candidates included).
  {
    std::vector<std::vector<NodeId>> adj(t.nodes.size());
    bool endpoints_ok = true;
    for (const auto& l : t.links) {
      if (l.a < 0 || l.a >= node_count || l.b < 0 || l.b >= node_count) {
        endpoints_ok = false;
        continue;
      }
      adj[static_cast<size_t>(l.a)].push_back(l.b);
      adj[static_cast<size_t>(l.b)].push_back(l.a);
    }
    if (endpoints_ok) {
      std::vector<char> seen(t.nodes.size(), 0);
      std::queue<NodeId> q;
      q.push(t.nodes.front().id);
      seen[static_cast<size_t>(t.nodes.front().id)] = 1;
      size_t reached = 1;
      while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        for (NodeId v : adj[static_cast<size_t>(u)])
          if (!seen[static_cast<size_t>(v)]) {
            seen[static_cast<size_t>(v)] = 1;
            ++reached;
            q.push(v);
          }
      }
      if (reached != t.nodes.size()) r.add("connected: graph is not connected");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Document I/O (JSON; deterministic field ordering on save)
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json topology_to_json(const Topology& t) {
  nlohmann::ordered_json doc;
  doc["arch_tag"] = t.arch_tag;
  doc["server_rate_cap_mbps"] = t.server_rate_cap_mbps;
  doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : t.nodes) {
    nlohmann::ordered_json jn;
    jn["id"] = n.id;
    jn["kind"] = to_string(n.kind);
    jn["label"] = n.label;
    jn["power_active_w"] = n.power_active_w;
    jn["power_idle_w"] = n.power_idle_w;
    doc["nodes"].push_back(std::move(jn));
  }
  doc["links"] = nlohmann::ordered_json::array();
  for (const auto& l : t.links) {
    nlohmann::ordered_json jl;
    jl["id"] = l.id;
    jl["a"] = l.a;
    jl["b"] = l.b;
    jl["capacity_mbps"] = l.capacity_mbps;
    if (l.optical_group) jl["optical_group"] = *l.optical_group;
    doc["links"].push_back(std::move(jl));
  }
  doc["groups"] = nlohmann::ordered_json::array();
  for (const auto& g : t.groups) {
    nlohmann::ordered_json jg;
    jg["id"] = g.id;
    jg["members"] = g.members;
    nlohmann::ordered_json budgets;
    for (const auto& [n, k] : g.budgets) budgets[std::to_string(n)] = k;
    jg["budgets"] = std::move(budgets);
    doc["groups"].push_back(std::move(jg));
  }
  return doc;
}

namespace detail {

template <typename T>
T get_field(const nlohmann::json& j, const char* field, const std::string& ctx) {
  if (!j.contains(field))
    throw ParseError("topology document: missing field '" + std::string(field) + "' in " + ctx);
  try {
    return j.at(field).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("topology document: bad value for field '" + std::string(field) + "' in " + ctx);
  }
}

}  // namespace detail

inline Topology topology_from_json(const nlohmann::json& doc) {
  Topology t;
  t.arch_tag = detail::get_field<std::string>(doc, "arch_tag", "document root");
  t.server_rate_cap_mbps = detail::get_field<double>(doc, "server_rate_cap_mbps", "document root");
  if (!doc.contains("nodes")) throw ParseError("topology document: missing field 'nodes'");
  for (const auto& jn : doc.at("nodes")) {
    Node n;
    n.id = detail::get_field<NodeId>(jn, "id", "node");
    const std::string ctx = "node " + std::to_string(n.id);
    auto kind = node_kind_from_string(detail::get_field<std::string>(jn, "kind", ctx));
    if (!kind) throw ParseError("topology document: unknown node kind in " + ctx);
    n.kind = *kind;
    n.label = detail::get_field<std::string>(jn, "label", ctx);
    n.power_active_w = detail::get_field<double>(jn, "power_active_w", ctx);
    n.power_idle_w = detail::get_field<double>(jn, "power_idle_w", ctx);
    t.nodes.push_back(std::move(n));
  }
  if (!doc.contains("links")) throw ParseError("topology document: missing field 'links'");
  for (const auto& jl : doc.at("links")) {
    Link l;
    l.id = detail::get_field<LinkId>(jl, "id", "link");
    const std::string ctx = "link " + std::to_string(l.id);
    l.a = detail::get_field<NodeId>(jl, "a", ctx);
    l.b = detail::get_field<NodeId>(jl, "b", ctx);
    l.capacity_mbps = detail::get_field<double>(jl, "capacity_mbps", ctx);
    if (jl.contains("optical_group"))
      l.optical_group = detail::get_field<GroupId>(jl, "optical_group", ctx);
    t.links.push_back(std::move(l));
  }
  if (doc.contains("groups")) {
    for (const auto& jg : doc.at("groups")) {
      OpticalConstraintGroup g;
      g.id = detail::get_field<GroupId>(jg, "id", "group");
      const std::string ctx = "group " + std::to_string(g.id);
      g.members = detail::get_field<std::vector<LinkId>>(jg, "members", ctx);
      if (!jg.contains("budgets")) throw ParseError("topology document: missing field 'budgets' in " + ctx);
      for (const auto& [key, val] : jg.at("budgets").items()) {
        try {
          g.budgets[std::stoi(key)] = val.get<int>();
        } catch (const std::exception&) {
          throw ParseError("topology document: bad budget entry in " + ctx);
        }
      }
      t.groups.push_back(std::move(g));
    }
  }
  std::sort(t.nodes.begin(), t.nodes.end(), [](const Node& x, const Node& y) { return x.id < y.id; });
  std::sort(t.links.begin(), t.links.end(), [](const Link& x, const Link& y) { return x.id < y.id; });
  t.link_id_limit = t.links.empty() ? 0 : t.links.back().id + 1;
  return t;
}

inline void save_topology(const Topology& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << topology_to_json(t).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline Topology load_topology_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("topology document: ") + e.what());
  }
  return topology_from_json(doc);
}

inline Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open topology document: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_topology_text(ss.str());
}

// Canonical "<labelA>--<labelB>" name for a link, used by scenario documents.
inline std::string link_label(const Topology& t, const Link& l) {
  const Node* a = t.find_node(l.a);
  const Node* b = t.find_node(l.b);
  return (a ? a->label : "?") + "--" + (b ? b->label : "?");
}

}  // namespace shuffleopt
