// Shared helpers for the test suites: small fixed topologies, deterministic
// random instances, a path-formulation oracle for the concurrent-flow rate,
// random feasible schedules for bound checks, and brute-force enumeration for
// small mixed-binary models.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "shuffleopt/shuffleopt.hpp"

namespace testutil {

using namespace shuffleopt;

// --------------------------------------------------------------------------
// Fixed micro-topologies
// --------------------------------------------------------------------------

// a -- s -- b: one switch, one path.
inline Topology line_topology(double cap_mbps = 1000.0) {
  TopologyParams p;
  p.link_capacity_mbps = cap_mbps;
  detail::TopologyBuilder b(p);
  const NodeId a = b.add_node(NodeKind::Server, "a");
  const NodeId bb = b.add_node(NodeKind::Server, "b");
  const NodeId s = b.add_node(NodeKind::ToRSwitch, "s");
  b.add_link(a, s);
  b.add_link(s, bb);
  return b.finish("test-line");
}

// a and b joined through two parallel switches s0, s1.
inline Topology parallel_topology(double cap_mbps = 1000.0) {
  TopologyParams p;
  p.link_capacity_mbps = cap_mbps;
  detail::TopologyBuilder b(p);
  const NodeId a = b.add_node(NodeKind::Server, "a");
  const NodeId bb = b.add_node(NodeKind::Server, "b");
  const NodeId s0 = b.add_node(NodeKind::ToRSwitch, "s0");
  const NodeId s1 = b.add_node(NodeKind::ToRSwitch, "s1");
  b.add_link(a, s0);
  b.add_link(s0, bb);
  b.add_link(a, s1);
  b.add_link(s1, bb);
  return b.finish("test-parallel");
}

inline DemandSet single_demand(const Topology& t, const std::string& src,
                               const std::string& snk, double volume_mb) {
  DemandSet d;
  Demand dem;
  dem.id = 0;
  dem.src = *t.node_by_label(src);
  dem.snk = *t.node_by_label(snk);
  dem.volume_mb = volume_mb;
  dem.colocated = dem.src == dem.snk;
  d.demands.push_back(dem);
  d.total_volume_mb = volume_mb;
  return d;
}

// --------------------------------------------------------------------------
// Random small instances for differential oracles
// --------------------------------------------------------------------------

struct RandomInstance {
  Topology topology;
  DemandSet demands;
};

// Sparse connected topology (spanning tree + a few extra links) with up to
// `max_nodes` nodes, plus up to `max_demands` server-to-server demands.
// Sparseness keeps the simple-path count small enough to enumerate.
inline RandomInstance random_instance(std::mt19937_64& rng, int max_nodes = 12,
                                      int max_demands = 4) {
  const int n_servers = 2 + static_cast<int>(rng() % 4);  // 2..5
  const int n_nodes =
      n_servers + 1 +
      static_cast<int>(rng() % static_cast<std::uint64_t>(max_nodes - n_servers));
  TopologyParams p;
  p.server_rate_cap_mbps = (rng() % 2 == 0) ? 1000.0 : 10000.0;
  detail::TopologyBuilder b(p);
  std::vector<NodeId> ids;
  for (int i = 0; i < n_nodes; ++i) {
    if (i < n_servers)
      ids.push_back(b.add_node(NodeKind::Server, "srv" + std::to_string(i)));
    else
      ids.push_back(b.add_node(NodeKind::ToRSwitch, "sw" + std::to_string(i - n_servers)));
  }
  auto cap = [&] { return 250.0 * static_cast<double>(1 + rng() % 4); };  // 250..1000
  std::set<std::pair<NodeId, NodeId>> used;
  auto add_edge = [&](NodeId u, NodeId v) {
    if (u > v) std::swap(u, v);
    if (u == v || !used.insert({u, v}).second) return;
    b.add_link(u, v, cap());
  };
  for (int i = 1; i < n_nodes; ++i)
    add_edge(ids[static_cast<size_t>(i)],
             ids[static_cast<size_t>(rng() % static_cast<std::uint64_t>(i))]);
  const int extra = static_cast<int>(rng() % 4);  // 0..3 shortcut links
  for (int e = 0; e < extra; ++e)
    add_edge(ids[static_cast<size_t>(rng() % static_cast<std::uint64_t>(n_nodes))],
             ids[static_cast<size_t>(rng() % static_cast<std::uint64_t>(n_nodes))]);

  RandomInstance inst;
  inst.topology = b.finish("test-random");
  const int n_demands = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_demands));
  DemandId next = 0;
  for (int d = 0; d < n_demands; ++d) {
    const NodeId src = ids[static_cast<size_t>(rng() % static_cast<std::uint64_t>(n_servers))];
    NodeId snk = src;
    while (snk == src)
      snk = ids[static_cast<size_t>(rng() % static_cast<std::uint64_t>(n_servers))];
    Demand dem;
    dem.id = next++;
    dem.src = src;
    dem.snk = snk;
    dem.volume_mb = 50.0 * static_cast<double>(1 + rng() % 20);  // 50..1000
    inst.demands.demands.push_back(dem);
    inst.demands.total_volume_mb += dem.volume_mb;
  }
  return inst;
}

// --------------------------------------------------------------------------
// Path-formulation oracle
// --------------------------------------------------------------------------

// All simple paths src -> snk as sequences of arc positions. Returns false if
// the cap was hit (callers should then skip the instance, not trust a
// truncated oracle).
inline bool enumerate_paths(const std::vector<Arc>& arcs, NodeId src, NodeId snk,
                            size_t max_paths, std::vector<std::vector<size_t>>& out) {
  std::map<NodeId, std::vector<std::pair<size_t, NodeId>>> adj;
  for (size_t a = 0; a < arcs.size(); ++a) adj[arcs[a].tail].push_back({a, arcs[a].head});
  std::vector<size_t> stack;
  std::set<NodeId> visited;
  bool truncated = false;
  auto dfs = [&](auto&& self, NodeId at) -> void {
    if (truncated) return;
    if (at == snk) {
      if (out.size() >= max_paths) {
        truncated = true;
        return;
      }
      out.push_back(stack);
      return;
    }
    visited.insert(at);
    auto it = adj.find(at);
    if (it != adj.end())
      for (const auto& [pos, to] : it->second) {
        if (visited.count(to)) continue;
        stack.push_back(pos);
        self(self, to);
        stack.pop_back();
      }
    visited.erase(at);
  };
  dfs(dfs, src);
  return !truncated;
}

// Concurrent-flow rate via the path formulation: variables are per-path
// flows, so the model shares nothing structural with the arc formulation.
// Returns nullopt when path enumeration would be truncated.
inline std::optional<double> path_lp_lambda(const Topology& t, const DemandSet& d,
                                            size_t max_paths = 20000) {
  const std::vector<Arc> arcs = make_arcs(t);
  const std::vector<Demand> network = network_demands(d.demands);
  std::vector<std::vector<std::vector<size_t>>> paths(network.size());
  for (size_t i = 0; i < network.size(); ++i)
    if (!enumerate_paths(arcs, network[i].src, network[i].snk, max_paths, paths[i]))
      return std::nullopt;

  OptModel m;
  m.sense = ObjSense::Maximize;
  m.stage_tag = "oracle-path";
  const int lam = m.add_var("lam", 0.0, kInf);
  // per-arc, per-server-direction term accumulation
  std::vector<std::vector<LinearTerm>> arc_terms(arcs.size());
  std::map<NodeId, std::vector<LinearTerm>> out_terms, in_terms;
  for (size_t i = 0; i < network.size(); ++i) {
    std::vector<LinearTerm> balance;
    for (size_t pi = 0; pi < paths[i].size(); ++pi) {
      const int xv = m.add_var("x_d" + std::to_string(i) + "_p" + std::to_string(pi), 0.0, kInf);
      balance.push_back({xv, 1.0});
      for (size_t pos : paths[i][pi]) {
        arc_terms[pos].push_back({xv, 1.0});
        const Arc& a = arcs[pos];
        if (is_server(t.find_node(a.tail)->kind)) out_terms[a.tail].push_back({xv, 1.0});
        if (is_server(t.find_node(a.head)->kind)) in_terms[a.head].push_back({xv, 1.0});
      }
    }
    balance.push_back({lam, -network[i].volume_mb});
    m.add_row("pathbal:d" + std::to_string(i), RowSense::EQ, 0.0, std::move(balance));
  }
  for (size_t pos = 0; pos < arcs.size(); ++pos) {
    if (arc_terms[pos].empty()) continue;
    m.add_row("pathcap:a" + std::to_string(arcs[pos].arc_id), RowSense::LE,
              arcs[pos].capacity, std::move(arc_terms[pos]));
  }
  for (auto& [node, terms] : out_terms)
    m.add_row("pathout:n" + std::to_string(node), RowSense::LE, t.server_rate_cap_mbps,
              std::move(terms));
  for (auto& [node, terms] : in_terms)
    m.add_row("pathin:n" + std::to_string(node), RowSense::LE, t.server_rate_cap_mbps,
              std::move(terms));
  m.objective = {{lam, 1.0}};

  const LpResult r = solve_lp(m);
  if (r.status != LpStatus::Optimal) throw SolverFailure("path oracle LP did not solve");
  return r.objective;
}

// Completion time of a random feasible schedule: one random simple path per
// demand, constant rates. Any such schedule needs at least the optimum time,
// so this yields an upper-bound check on no quantity other than T*.
// Returns nullopt if some demand has no path (disconnected).
inline std::optional<double> random_schedule_completion(const Topology& t, const DemandSet& d,
                                                        std::mt19937_64& rng) {
  const std::vector<Arc> arcs = make_arcs(t);
  const std::vector<Demand> network = network_demands(d.demands);
  std::map<size_t, double> arc_load;
  std::map<NodeId, double> out_load, in_load;
  for (const auto& dem : network) {
    std::vector<std::vector<size_t>> paths;
    enumerate_paths(arcs, dem.src, dem.snk, 2000, paths);
    if (paths.empty()) return std::nullopt;
    const auto& path = paths[static_cast<size_t>(rng() % paths.size())];
    for (size_t pos : path) {
      arc_load[pos] += dem.volume_mb;
      const Arc& a = arcs[pos];
      if (is_server(t.find_node(a.tail)->kind)) out_load[a.tail] += dem.volume_mb;
      if (is_server(t.find_node(a.head)->kind)) in_load[a.head] += dem.volume_mb;
    }
  }
  double completion = 0;
  for (const auto& [pos, load] : arc_load)
    completion = std::max(completion, load / arcs[pos].capacity);
  for (const auto& [node, load] : out_load)
    completion = std::max(completion, load / t.server_rate_cap_mbps);
  for (const auto& [node, load] : in_load)
    completion = std::max(completion, load / t.server_rate_cap_mbps);
  return completion;
}

// --------------------------------------------------------------------------
// Brute-force MILP oracle
// --------------------------------------------------------------------------

// Optimal objective by enumerating every 0/1 assignment of the binaries and
// solving the continuous remainder. nullopt = infeasible for all assignments.
inline std::optional<double> milp_enumerate(const OptModel& m) {
  std::vector<int> binaries;
  for (const auto& v : m.vars)
    if (v.kind == VarKind::Binary) binaries.push_back(v.id);
  if (binaries.size() > 20) throw ParameterError("enumeration oracle: too many binaries");
  std::vector<double> lb, ub;
  for (const auto& v : m.vars) {
    lb.push_back(v.lower);
    ub.push_back(v.upper);
  }
  std::optional<double> best;
  const bool maximize = m.sense == ObjSense::Maximize;
  for (std::uint64_t mask = 0; mask < (1ULL << binaries.size()); ++mask) {
    std::vector<double> flb = lb, fub = ub;
    bool valid = true;
    for (size_t i = 0; i < binaries.size(); ++i) {
      const double v = (mask >> i) & 1 ? 1.0 : 0.0;
      const auto j = static_cast<size_t>(binaries[i]);
      if (v < lb[j] - 1e-12 || v > ub[j] + 1e-12) {
        valid = false;  // assignment conflicts with the variable's own bounds
        break;
      }
      flb[j] = v;
      fub[j] = v;
    }
    if (!valid) continue;
    const LpResult r = solve_lp_bounded(m, flb, fub);
    if (r.status != LpStatus::Optimal) continue;
    if (!best || (maximize ? r.objective > *best : r.objective < *best)) best = r.objective;
  }
  return best;
}

// Random bounded mixed-binary model. With `anchor_feasible`, one random
// point is made feasible by construction so the instance cannot be vacuous.
inline OptModel random_milp(std::mt19937_64& rng, int n_binary, int n_continuous,
                            int n_rows, bool anchor_feasible) {
  OptModel m;
  m.sense = (rng() % 2 == 0) ? ObjSense::Maximize : ObjSense::Minimize;
  m.stage_tag = "oracle-milp";
  std::vector<int> vars;
  std::vector<double> anchor;
  for (int i = 0; i < n_binary; ++i) {
    vars.push_back(m.add_var("b" + std::to_string(i), 0.0, 1.0, VarKind::Binary));
    anchor.push_back(static_cast<double>(rng() % 2));
  }
  for (int i = 0; i < n_continuous; ++i) {
    const double hi = static_cast<double>(1 + rng() % 10);
    vars.push_back(m.add_var("c" + std::to_string(i), 0.0, hi));
    anchor.push_back(static_cast<double>(rng() % 11) / 10.0 * hi);
  }
  for (int r = 0; r < n_rows; ++r) {
    std::vector<LinearTerm> terms;
    double at_anchor = 0;
    for (size_t j = 0; j < vars.size(); ++j) {
      if (rng() % 3 == 0) continue;  // sparse-ish rows
      const double coef = static_cast<double>(static_cast<int>(rng() % 11) - 5);
      if (coef == 0) continue;
      terms.push_back({vars[j], coef});
      at_anchor += coef * anchor[j];
    }
    if (terms.empty()) continue;
    const RowSense sense = (rng() % 2 == 0) ? RowSense::LE : RowSense::GE;
    double rhs;
    if (anchor_feasible)
      rhs = sense == RowSense::LE ? at_anchor + static_cast<double>(rng() % 4)
                                  : at_anchor - static_cast<double>(rng() % 4);
    else
      rhs = static_cast<double>(static_cast<int>(rng() % 21) - 10);
    m.add_row("r" + std::to_string(r), sense, rhs, std::move(terms));
  }
  for (size_t j = 0; j < vars.size(); ++j) {
    const double coef = static_cast<double>(static_cast<int>(rng() % 19) - 9);
    if (coef != 0) m.objective.push_back({vars[j], coef});
  }
  return m;
}

}  // namespace testutil
