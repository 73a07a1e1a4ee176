// Two-stage optimization models over a (possibly degraded) topology:
//   Stage 1 — maximum concurrent flow: rate f_{d,a} for every demand and arc,
//             common scale lambda, objective max lambda; T* = 1/lambda*.
//   Stage 2 — minimum incremental network power subject to lambda staying
//             within (1+epsilon) of the Stage-1 optimum, binary u_n per
//             powered element.
// Optical candidate links carry binary y_l with per-endpoint transceiver
// budgets in both stages.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "shuffleopt/common.hpp"
#include "shuffleopt/failures.hpp"
#include "shuffleopt/topology.hpp"
#include "shuffleopt/workload.hpp"

namespace shuffleopt {

enum class VarKind { Continuous, Binary };
enum class RowSense { LE, GE, EQ };
enum class ObjSense { Minimize, Maximize };

struct Variable {
  int id = 0;
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarKind kind = VarKind::Continuous;
};

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
};

struct LinearConstraint {
  int id = 0;
  std::string tag;
  std::vector<LinearTerm> terms;
  RowSense sense = RowSense::LE;
  double rhs = 0.0;
};

struct OptModel {
  ObjSense sense = ObjSense::Maximize;
  std::vector<Variable> vars;
  std::vector<LinearConstraint> rows;
  std::vector<LinearTerm> objective;
  std::string stage_tag;
  std::uint64_t topology_fp = 0;
  std::uint64_t demand_fp = 0;

  int add_var(const std::string& name, double lower, double upper,
              VarKind kind = VarKind::Continuous) {
    Variable v;
    v.id = static_cast<int>(vars.size());
    v.name = name;
    v.lower = lower;
    v.upper = upper;
    v.kind = kind;
    vars.push_back(std::move(v));
    return vars.back().id;
  }

  int add_row(const std::string& tag, RowSense sense_, double rhs,
              std::vector<LinearTerm> terms) {
    LinearConstraint c;
    c.id = static_cast<int>(rows.size());
    c.tag = tag;
    c.sense = sense_;
    c.rhs = rhs;
    c.terms = std::move(terms);
    rows.push_back(std::move(c));
    return rows.back().id;
  }

  bool has_binaries() const {
    for (const auto& v : vars)
      if (v.kind == VarKind::Binary) return true;
    return false;
  }
};

// Structural sanity of a model, independent of any solution.
inline ValidationReport validate_model(const OptModel& m) {
  ValidationReport r;
  std::set<std::string> names;
  for (const auto& v : m.vars) {
    if (!names.insert(v.name).second) r.add("duplicate variable name: " + v.name);
    if (!(v.lower <= v.upper)) r.add("variable " + v.name + ": lower > upper");
    if (v.kind == VarKind::Binary && (v.lower < 0 || v.upper > 1))
      r.add("variable " + v.name + ": binary bounds outside [0,1]");
    if (std::isnan(v.lower) || std::isnan(v.upper))
      r.add("variable " + v.name + ": NaN bound");
  }
  const int n = static_cast<int>(m.vars.size());
  auto check_terms = [&](const std::vector<LinearTerm>& terms, const std::string& where) {
    std::set<int> seen;
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= n) {
        r.add(where + ": term references undeclared variable " + std::to_string(t.var));
        continue;
      }
      if (!seen.insert(t.var).second)
        r.add(where + ": duplicate term for variable " + m.vars[static_cast<size_t>(t.var)].name);
      if (!std::isfinite(t.coef)) r.add(where + ": non-finite coefficient");
    }
  };
  for (const auto& c : m.rows) {
    check_terms(c.terms, "constraint " + c.tag);
    if (!std::isfinite(c.rhs)) r.add("constraint " + c.tag + ": non-finite rhs");
  }
  check_terms(m.objective, "objective");
  return r;
}

// Worst violations of a candidate point, by category. Used by the solver's
// certificate check and surfaced as the harness's max_violation column.
struct ViolationReport {
  double constraint = 0.0;
  double bound = 0.0;
  double integrality = 0.0;
  std::string worst_tag;

  double max_violation() const { return std::max({constraint, bound, integrality}); }
};

inline ViolationReport evaluate_solution(const OptModel& m, const std::vector<double>& x) {
  if (x.size() != m.vars.size())
    throw ModelMismatchError("solution vector length does not match variable count");
  ViolationReport rep;
  for (const auto& v : m.vars) {
    const double xv = x[static_cast<size_t>(v.id)];
    double viol = std::max(v.lower - xv, xv - v.upper);
    if (viol > rep.bound) rep.bound = viol;
    if (v.kind == VarKind::Binary) {
      double frac = std::fabs(xv - std::round(xv));
      if (frac > rep.integrality) rep.integrality = frac;
    }
  }
  for (const auto& c : m.rows) {
    double lhs = 0;
    for (const auto& t : c.terms) lhs += t.coef * x[static_cast<size_t>(t.var)];
    double viol = 0;
    switch (c.sense) {
      case RowSense::LE: viol = lhs - c.rhs; break;
      case RowSense::GE: viol = c.rhs - lhs; break;
      case RowSense::EQ: viol = std::fabs(lhs - c.rhs); break;
    }
    if (viol > rep.constraint) {
      rep.constraint = viol;
      rep.worst_tag = c.tag;
    }
  }
  return rep;
}

inline double objective_value(const OptModel& m, const std::vector<double>& x) {
  double v = 0;
  for (const auto& t : m.objective) v += t.coef * x[static_cast<size_t>(t.var)];
  return v;
}

// ---------------------------------------------------------------------------
// Arcs and commodities
// ---------------------------------------------------------------------------

// Directed view of a link: arc 2*link_id runs a->b, 2*link_id+1 runs b->a.
// Arc ids stay stable when links fail (ids are not compacted).
struct Arc {
  int arc_id = 0;
  LinkId link = 0;
  NodeId tail = 0;
  NodeId head = 0;
  double capacity = 0.0;
  bool optical = false;
  GroupId group = -1;
};

inline std::vector<Arc> make_arcs(const Topology& t) {
  std::vector<Arc> arcs;
  arcs.reserve(t.links.size() * 2);
  for (const auto& l : t.links) {
    Arc fwd;
    fwd.arc_id = 2 * l.id;
    fwd.link = l.id;
    fwd.tail = l.a;
    fwd.head = l.b;
    fwd.capacity = l.capacity_mbps;
    fwd.optical = l.optical_group.has_value();
    fwd.group = l.optical_group ? *l.optical_group : -1;
    Arc rev = fwd;
    rev.arc_id = 2 * l.id + 1;
    rev.tail = l.b;
    rev.head = l.a;
    arcs.push_back(fwd);
    arcs.push_back(rev);
  }
  return arcs;
}

// PerDemand: one commodity per network demand (variables f_d{D}_a{A}).
// BySource: demands sharing a source are one commodity (f_s{S}_a{A}); the
// optimum is unchanged because any per-demand flow sums to a valid
// single-source flow and any single-source flow decomposes back.
enum class CommodityMode { PerDemand, BySource };

struct Commodity {
  std::string token;  // "d3" or "s7" — spliced into variable/constraint names
  NodeId source = 0;
  std::vector<std::pair<NodeId, double>> sinks;  // sink -> volume (MB)
  double total_volume = 0.0;
  std::vector<DemandId> members;
};

inline std::uint64_t demandset_fingerprint(const DemandSet& d) {
  std::uint64_t h = fnv1a_append(1469598103934665603ULL, d.total_volume_mb);
  for (const auto& dem : d.demands) {
    h = fnv1a_append(h, static_cast<std::int64_t>(dem.id));
    h = fnv1a_append(h, static_cast<std::int64_t>(dem.src));
    h = fnv1a_append(h, static_cast<std::int64_t>(dem.snk));
    h = fnv1a_append(h, dem.volume_mb);
  }
  return h;
}

inline std::vector<Commodity> make_commodities(const std::vector<Demand>& network,
                                               CommodityMode mode) {
  std::vector<Commodity> out;
  if (mode == CommodityMode::PerDemand) {
    for (const auto& d : network) {
      Commodity c;
      c.token = "d" + std::to_string(d.id);
      c.source = d.src;
      c.sinks.emplace_back(d.snk, d.volume_mb);
      c.total_volume = d.volume_mb;
      c.members.push_back(d.id);
      out.push_back(std::move(c));
    }
    return out;
  }
  std::map<NodeId, Commodity> by_src;
  for (const auto& d : network) {
    Commodity& c = by_src[d.src];
    c.source = d.src;
    c.sinks.emplace_back(d.snk, d.volume_mb);
    c.total_volume += d.volume_mb;
    c.members.push_back(d.id);
  }
  for (auto& [src, c] : by_src) {
    c.token = "s" + std::to_string(src);
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model bundles
// ---------------------------------------------------------------------------

struct ModelMeta {
  CommodityMode mode = CommodityMode::PerDemand;
  std::vector<Arc> arcs;
  std::vector<Commodity> commodities;
  int lambda_var = -1;
  std::vector<std::vector<int>> flow_var;  // [commodity][arc position] -> var id
  std::map<NodeId, int> u_var;             // stage 2 only
  std::map<LinkId, int> y_var;             // optical topologies only
  double lambda_target = 0.0;              // stage 2 only

  double lambda_value(const std::vector<double>& x) const {
    if (lambda_var < 0) throw ModelMismatchError("model has no lambda variable");
    return x[static_cast<size_t>(lambda_var)];
  }
  double arc_flow(const std::vector<double>& x, size_t arc_pos) const {
    double f = 0;
    for (const auto& per_commodity : flow_var)
      f += x[static_cast<size_t>(per_commodity[arc_pos])];
    return f;
  }
};

struct ModelBundle {
  OptModel model;
  ModelMeta meta;
};

struct Stage1Options {
  CommodityMode mode = CommodityMode::PerDemand;
};

struct Stage2Options {
  CommodityMode mode = CommodityMode::PerDemand;
  double epsilon = 0.0;                 // relative slack on the lambda target
  bool connectivity_fixes = true;       // force u_n where removal disconnects
  bool pair_cuts = true;                // u_a + u_b >= 1 covering cuts
  std::vector<NodeId> forced_active;    // externally probed must-run nodes
};

namespace detail {

// Shared structural core of both stages: flow variables, lambda, flow
// conservation, capacities, server rate caps, optical budgets.
struct StageCore {
  ModelBundle bundle;
  std::vector<Demand> network;  // positive-volume, non-colocated demands
};

inline StageCore build_core(const Topology& t, const DemandSet& d, CommodityMode mode,
                            const std::string& stage_tag) {
  if (d.total_volume_mb <= 0)
    throw DegenerateModelError(
        "total shuffle volume is zero: completion time is 0 without solving");
  StageCore core;
  for (const auto& dem : d.demands)
    if (!dem.colocated && dem.volume_mb > 0) core.network.push_back(dem);
  if (core.network.empty())
    throw DegenerateModelError(
        "all positive demands are colocated: no network transfer to optimize");
  throw_if_fatal(t, core.network, "model input");

  OptModel& m = core.bundle.model;
  ModelMeta& meta = core.bundle.meta;
  m.sense = ObjSense::Maximize;
  m.stage_tag = stage_tag;
  m.topology_fp = t.fingerprint();
  m.demand_fp = demandset_fingerprint(d);
  meta.mode = mode;
  meta.arcs = make_arcs(t);
  meta.commodities = make_commodities(core.network, mode);

  const size_t A = meta.arcs.size();
  const size_t C = meta.commodities.size();

  meta.lambda_var = m.add_var("lam", 0.0, kInf);
  meta.flow_var.assign(C, std::vector<int>(A, -1));
  for (size_t c = 0; c < C; ++c)
    for (size_t a = 0; a < A; ++a)
      meta.flow_var[c][a] = m.add_var(
          "f_" + meta.commodities[c].token + "_a" + std::to_string(meta.arcs[a].arc_id),
          0.0, meta.arcs[a].capacity);

  // One binary y_l per surviving optical candidate link.
  for (const auto& g : t.groups)
    for (LinkId l : g.members)
      if (!meta.y_var.count(l))
        meta.y_var[l] = m.add_var("y_l" + std::to_string(l), 0.0, 1.0, VarKind::Binary);

  // Incidence index: arcs out of / into each node.
  std::map<NodeId, std::vector<size_t>> out_arcs, in_arcs;
  for (size_t a = 0; a < A; ++a) {
    out_arcs[meta.arcs[a].tail].push_back(a);
    in_arcs[meta.arcs[a].head].push_back(a);
  }

  // Flow conservation: sum(out) - sum(in) = lambda * injection(node).
  for (size_t c = 0; c < C; ++c) {
    const Commodity& com = meta.commodities[c];
    std::map<NodeId, double> inj;
    inj[com.source] += com.total_volume;
    for (const auto& [snk, vol] : com.sinks) inj[snk] -= vol;
    for (const auto& n : t.nodes) {
      auto oit = out_arcs.find(n.id);
      auto iit = in_arcs.find(n.id);
      const bool touched = oit != out_arcs.end() || iit != in_arcs.end();
      const double injection = inj.count(n.id) ? inj[n.id] : 0.0;
      if (!touched && injection == 0.0) continue;
      std::vector<LinearTerm> terms;
      if (oit != out_arcs.end())
        for (size_t a : oit->second) terms.push_back({meta.flow_var[c][a], 1.0});
      if (iit != in_arcs.end())
        for (size_t a : iit->second) terms.push_back({meta.flow_var[c][a], -1.0});
      if (injection != 0.0) terms.push_back({meta.lambda_var, -injection});
      m.add_row("flowcons:" + com.token + ":n" + std::to_string(n.id), RowSense::EQ, 0.0,
                std::move(terms));
    }
  }

  // Arc capacity; optical arcs instead couple to their link's y binary.
  for (size_t a = 0; a < A; ++a) {
    std::vector<LinearTerm> terms;
    for (size_t c = 0; c < C; ++c) terms.push_back({meta.flow_var[c][a], 1.0});
    const Arc& arc = meta.arcs[a];
    if (arc.optical) {
      terms.push_back({meta.y_var.at(arc.link), -arc.capacity});
      m.add_row("ocap:a" + std::to_string(arc.arc_id), RowSense::LE, 0.0, std::move(terms));
    } else {
      m.add_row("cap:a" + std::to_string(arc.arc_id), RowSense::LE, arc.capacity,
                std::move(terms));
    }
  }

  // Server NIC rate caps, both directions.
  for (const auto& n : t.nodes) {
    if (!is_server(n.kind)) continue;
    auto oit = out_arcs.find(n.id);
    if (oit != out_arcs.end()) {
      std::vector<LinearTerm> terms;
      for (size_t a : oit->second)
        for (size_t c = 0; c < C; ++c) terms.push_back({meta.flow_var[c][a], 1.0});
      m.add_row("srvout:n" + std::to_string(n.id), RowSense::LE, t.server_rate_cap_mbps,
                std::move(terms));
    }
    auto iit = in_arcs.find(n.id);
    if (iit != in_arcs.end()) {
      std::vector<LinearTerm> terms;
      for (size_t a : iit->second)
        for (size_t c = 0; c < C; ++c) terms.push_back({meta.flow_var[c][a], 1.0});
      m.add_row("srvin:n" + std::to_string(n.id), RowSense::LE, t.server_rate_cap_mbps,
                std::move(terms));
    }
  }

  // Transceiver budgets per optical group endpoint.
  for (const auto& g : t.groups) {
    std::map<NodeId, std::vector<LinkId>> incident;
    for (LinkId lid : g.members) {
      const Link* l = t.find_link(lid);
      if (!l) continue;
      incident[l->a].push_back(lid);
      incident[l->b].push_back(lid);
    }
    for (const auto& [node, k] : g.budgets) {
      auto it = incident.find(node);
      if (it == incident.end()) continue;
      std::vector<LinearTerm> terms;
      for (LinkId lid : it->second) terms.push_back({meta.y_var.at(lid), 1.0});
      m.add_row("budget:g" + std::to_string(g.id) + ":n" + std::to_string(node),
                RowSense::LE, static_cast<double>(k), std::move(terms));
    }
  }

  return core;
}

// True when removing `victims` (their incident links) disconnects any demand.
inline bool removal_disconnects(const Topology& t, const std::vector<Demand>& network,
                                const std::set<NodeId>& victims) {
  Topology cut = t;
  cut.links.erase(std::remove_if(cut.links.begin(), cut.links.end(),
                                 [&](const Link& l) {
                                   return victims.count(l.a) || victims.count(l.b);
                                 }),
                  cut.links.end());
  return !disconnected_demands(cut, network).empty();
}

}  // namespace detail

inline ModelBundle build_stage1(const Topology& t, const DemandSet& d,
                                const Stage1Options& opt = {}) {
  detail::StageCore core = detail::build_core(t, d, opt.mode, "stage1");
  core.bundle.model.objective = {{core.bundle.meta.lambda_var, 1.0}};
  return std::move(core.bundle);
}

inline ModelBundle build_stage2(const Topology& t, const DemandSet& d, double lambda_star,
                                const Stage2Options& opt = {}) {
  if (lambda_star <= 0)
    throw ParameterError("stage 2 requires lambda_star > 0 from a solved stage 1");
  if (opt.epsilon < 0) throw ParameterError("stage 2 epsilon must be >= 0");
  detail::StageCore core = detail::build_core(t, d, opt.mode, "stage2");
  OptModel& m = core.bundle.model;
  ModelMeta& meta = core.bundle.meta;

  // Activation binary per powered element; big-M is the sum of incident arc
  // capacities (the tightest constant still valid for any feasible flow).
  std::map<NodeId, double> big_m;
  std::map<NodeId, std::vector<size_t>> incident;
  for (size_t a = 0; a < meta.arcs.size(); ++a) {
    const Arc& arc = meta.arcs[a];
    for (NodeId n : {arc.tail, arc.head}) {
      big_m[n] += arc.capacity;
      incident[n].push_back(a);
    }
  }
  for (const auto& n : t.nodes) {
    if (!is_powered_element(n.kind)) continue;
    meta.u_var[n.id] = m.add_var("u_n" + std::to_string(n.id), 0.0, 1.0, VarKind::Binary);
  }
  for (const auto& [node, uv] : meta.u_var) {
    auto it = incident.find(node);
    if (it == incident.end()) continue;  // isolated element: objective drives u to 0
    std::vector<LinearTerm> terms;
    for (size_t a : it->second)
      for (size_t c = 0; c < meta.commodities.size(); ++c)
        terms.push_back({meta.flow_var[c][a], 1.0});
    terms.push_back({uv, -big_m[node]});
    m.add_row("act:n" + std::to_string(node), RowSense::LE, 0.0, std::move(terms));
  }

  // Pin throughput to the Stage-1 optimum (with optional relative slack).
  meta.lambda_target = lambda_star / (1.0 + opt.epsilon);
  m.add_row("pinlambda", RowSense::GE, meta.lambda_target, {{meta.lambda_var, 1.0}});

  // Tightenings. Removal probes run on the connectivity structure only, so
  // every forced bound and covering cut is valid for any feasible flow.
  if (opt.connectivity_fixes) {
    for (auto& [node, uv] : meta.u_var) {
      if (!incident.count(node)) continue;
      if (detail::removal_disconnects(t, core.network, {node}))
        m.vars[static_cast<size_t>(uv)].lower = 1.0;
    }
  }
  for (NodeId node : opt.forced_active) {
    auto it = meta.u_var.find(node);
    if (it == meta.u_var.end())
      throw ModelMismatchError("forced_active node " + std::to_string(node) +
                               " has no activation variable");
    m.vars[static_cast<size_t>(it->second)].lower = 1.0;
  }
  if (opt.pair_cuts) {
    std::vector<NodeId> free_nodes;
    for (const auto& [node, uv] : meta.u_var)
      if (m.vars[static_cast<size_t>(uv)].lower < 1.0 && incident.count(node))
        free_nodes.push_back(node);
    for (size_t i = 0; i < free_nodes.size(); ++i)
      for (size_t j = i + 1; j < free_nodes.size(); ++j) {
        if (detail::removal_disconnects(t, core.network, {free_nodes[i], free_nodes[j]})) {
          m.add_row("cut:pair:n" + std::to_string(free_nodes[i]) + ":n" +
                        std::to_string(free_nodes[j]),
                    RowSense::GE, 1.0,
                    {{meta.u_var.at(free_nodes[i]), 1.0}, {meta.u_var.at(free_nodes[j]), 1.0}});
        }
      }
  }

  // Objective: incremental power of switching elements on.
  m.sense = ObjSense::Minimize;
  m.objective.clear();
  for (const auto& [node, uv] : meta.u_var) {
    const Node* n = t.find_node(node);
    const double delta = n->power_active_w - n->power_idle_w;
    if (delta != 0.0) m.objective.push_back({uv, delta});
  }
  return std::move(core.bundle);
}

// T = 1/lambda under the proportional-rate schedule; exact minimum makespan.
inline double completion_time_from_lambda(double lambda) {
  if (lambda <= 0) throw DomainError("completion time undefined for lambda <= 0");
  return 1.0 / lambda;
}

}  // namespace shuffleopt
