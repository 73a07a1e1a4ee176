// Evaluation harness: turns a JSON suite configuration into solved cases and
// result tables. For every (topology, scenario) pair it classifies fatality,
// solves stage 1 for the minimum completion time, tightens and solves stage 2
// for the energy-minimal activation, and derives the reported metrics.
//
// Completion times are solved once at a fixed reference volume and rescaled:
// the optimum is homogeneous in the shuffle volume, and solving near the
// capacity scale keeps the simplex residuals far below the certification
// tolerances.
#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "shuffleopt/common.hpp"
#include "shuffleopt/failures.hpp"
#include "shuffleopt/lpsolve.hpp"
#include "shuffleopt/metrics.hpp"
#include "shuffleopt/optmodel.hpp"
#include "shuffleopt/topology.hpp"
#include "shuffleopt/workload.hpp"

#include "json.hpp"

namespace shuffleopt {

struct EvalOptions {
  double epsilon = 0.0;                // stage-2 relative slack on the rate pin
  bool include_servers = false;        // count server NICs in the energy totals
  double reference_volume_mb = 1000.0; // volume the LPs are solved at
  CommodityMode mode = CommodityMode::BySource;
  bool stage2_enabled = true;
  LpOptions lp;
};

// Everything produced for one (topology, scenario) pair. Models and raw
// solutions are kept so callers can independently certify the results.
struct ScenarioEvaluation {
  RunMetrics metrics;
  ModelBundle stage1;
  LpResult stage1_lp;
  ModelBundle stage2;
  std::vector<double> stage2_x;
  bool has_stage2 = false;
  long stage2_nodes = 0;  // branch-and-bound nodes (0 = closed by probing)
};

namespace detail {

// Zero the upper bound of every flow variable on arcs touching `off`,
// confining all traffic to the remaining elements.
inline void zero_incident_flows(const ModelMeta& meta, const std::set<NodeId>& off,
                                std::vector<double>& ub) {
  if (off.empty()) return;
  for (size_t a = 0; a < meta.arcs.size(); ++a) {
    if (!off.count(meta.arcs[a].tail) && !off.count(meta.arcs[a].head)) continue;
    for (const auto& per_commodity : meta.flow_var)
      ub[static_cast<size_t>(per_commodity[a])] = 0.0;
  }
}

inline LpResult solve_stage_model(const OptModel& m, const LpOptions& lp,
                                  const std::string& what) {
  LpResult out;
  if (m.has_binaries()) {
    MilpOptions mo;
    mo.lp = lp;
    MilpResult mr = solve_milp(m, mo);
    if (mr.status != LpStatus::Optimal)
      throw SolverFailure(what + ": expected an optimum, got " +
                          std::string(to_string(mr.status)));
    out.status = mr.status;
    out.objective = mr.objective;
    out.dual_bound = mr.best_bound;
    out.x = std::move(mr.x);
    out.iterations = mr.lp_iterations;
    out.basis_tag = std::move(mr.basis_tag);
    return out;
  }
  out = solve_lp(m, lp);
  if (out.status != LpStatus::Optimal)
    throw SolverFailure(what + ": expected an optimum, got " +
                        std::string(to_string(out.status)));
  return out;
}

}  // namespace detail

// Solve one scenario end to end. The caller computes degradation afterwards,
// once the baseline of the same case is known.
inline ScenarioEvaluation evaluate_scenario(const Topology& t0, const Placement& pl,
                                            double volume_mb, const Scenario& sc,
                                            const EvalOptions& eo = {}) {
  ScenarioEvaluation ev;
  RunMetrics& mm = ev.metrics;
  mm.scenario = sc.name;
  mm.volume_mb = volume_mb;

  DemandSet actual = make_graysort_demands(volume_mb, pl);
  const Fatality fate = classify_scenario(t0, actual, sc);
  if (fate.fatal) {
    mm.fatal = true;
    mm.lambda = 0.0;
    mm.completion_s = kInf;
    mm.energy_j = kInf;
    mm.energy_active_j = kInf;
    return ev;
  }

  const Topology t = apply_scenario(t0, sc);

  // Nothing to move: the shuffle completes instantly and the network idles.
  if (actual.total_volume_mb <= 0 || network_demands(actual.demands).empty()) {
    mm.lambda = kInf;
    mm.completion_s = 0.0;
    for (const auto& n : t.nodes) {
      if (is_server(n.kind)) {
        if (eo.include_servers) {
          mm.active_power_w += n.power_active_w;
          ++mm.active_nodes;
        }
        continue;
      }
      if (!is_powered_element(n.kind)) continue;
      mm.idle_power_w += n.power_idle_w;
      ++mm.idle_nodes;
    }
    return ev;
  }

  // Stage 1 at the reference volume; rescale to the requested volume.
  DemandSet ref = make_graysort_demands(eo.reference_volume_mb, pl);
  Stage1Options s1;
  s1.mode = eo.mode;
  ev.stage1 = build_stage1(t, ref, s1);
  ev.stage1_lp = detail::solve_stage_model(ev.stage1.model, eo.lp,
                                           "stage 1, scenario '" + sc.name + "'");
  const double lambda_ref = ev.stage1.meta.lambda_value(ev.stage1_lp.x);
  if (lambda_ref <= 0)
    throw SolverFailure("stage 1 found a zero rate for non-fatal scenario '" + sc.name +
                        "': model and fatality check disagree");
  const double t_ref = completion_time_from_lambda(lambda_ref);
  mm.completion_s = t_ref * (volume_mb / eo.reference_volume_mb);
  mm.lambda = 1.0 / mm.completion_s;

  if (!eo.stage2_enabled) return ev;

  // --- Stage 2: energy-minimal activation at the pinned rate ---------------
  const double pin = lambda_ref / (1.0 + eo.epsilon);
  const double probe_target = pin * (1.0 - 1e-9);
  const std::vector<Demand> network = network_demands(ref.demands);

  std::set<NodeId> touched;
  for (const auto& a : ev.stage1.meta.arcs) {
    touched.insert(a.tail);
    touched.insert(a.head);
  }
  std::vector<NodeId> candidates;
  for (const auto& n : t.nodes)
    if (is_powered_element(n.kind) && touched.count(n.id)) candidates.push_back(n.id);

  // A node is forced on when the pinned rate is unreachable without it:
  // first by pure connectivity, then by an LP probe with the node shut off.
  std::set<NodeId> forced;
  for (NodeId nid : candidates)
    if (detail::removal_disconnects(t, network, {nid})) forced.insert(nid);

  std::vector<double> base_lb, base_ub;
  base_lb.reserve(ev.stage1.model.vars.size());
  base_ub.reserve(ev.stage1.model.vars.size());
  for (const auto& v : ev.stage1.model.vars) {
    base_lb.push_back(v.lower);
    base_ub.push_back(v.upper);
  }
  LpOptions probe_opt = eo.lp;
  probe_opt.objective_target = probe_target;
  auto reaches_target = [&](const LpResult& r) {
    return r.status == LpStatus::TargetReached ||
           (r.status == LpStatus::Optimal && r.objective >= probe_target);
  };
  for (NodeId nid : candidates) {
    if (forced.count(nid)) continue;
    std::vector<double> ub = base_ub;
    detail::zero_incident_flows(ev.stage1.meta, {nid}, ub);
    if (!reaches_target(solve_lp_bounded(ev.stage1.model, base_lb, ub, probe_opt)))
      forced.insert(nid);
  }

  Stage2Options s2;
  s2.mode = eo.mode;
  s2.epsilon = eo.epsilon;
  s2.forced_active.assign(forced.begin(), forced.end());
  ev.stage2 = build_stage2(t, ref, lambda_ref, s2);

  // Fast path: if the forced set alone carries the pinned rate, it is the
  // optimal activation — every forced node appears in every feasible
  // activation, so its cost is also a lower bound. Optical-circuit models
  // keep binary link choices inside the flow LP, so they go to the exact
  // solver instead of relaxing those.
  bool closed = false;
  if (!ev.stage1.model.has_binaries()) {
    std::set<NodeId> off;
    for (NodeId nid : candidates)
      if (!forced.count(nid)) off.insert(nid);
    std::vector<double> ub = base_ub;
    detail::zero_incident_flows(ev.stage1.meta, off, ub);
    LpResult fast = solve_lp_bounded(ev.stage1.model, base_lb, ub, probe_opt);
    if (reaches_target(fast)) {
      std::vector<double> x2(ev.stage2.model.vars.size(), 0.0);
      std::copy(fast.x.begin(), fast.x.end(), x2.begin());
      for (const auto& [node, uv] : ev.stage2.meta.u_var)
        x2[static_cast<size_t>(uv)] = forced.count(node) ? 1.0 : 0.0;
      if (check_solution(ev.stage2.model, x2, eo.lp.feas_tol).ok) {
        ev.stage2_x = std::move(x2);
        closed = true;
      }
    }
  }
  if (!closed) {
    MilpOptions mo;
    mo.lp = eo.lp;
    MilpResult mr = solve_milp(ev.stage2.model, mo);
    if (mr.status != LpStatus::Optimal)
      throw SolverFailure("stage 2, scenario '" + sc.name + "': expected an optimum, got " +
                          std::string(to_string(mr.status)));
    ev.stage2_x = std::move(mr.x);
    ev.stage2_nodes = mr.explored_nodes;
  }
  ev.has_stage2 = true;

  EnergyOptions eop;
  eop.include_servers = eo.include_servers;
  const EnergyBreakdown eb = energy(t, ev.stage2, ev.stage2_x, mm.completion_s, eop);
  mm.active_power_w = eb.active_power_w;
  mm.idle_power_w = eb.idle_power_w;
  mm.active_nodes = eb.active_nodes;
  mm.idle_nodes = eb.idle_nodes;
  mm.energy_j = eb.energy_j;
  mm.energy_active_j = eb.energy_active_j;
  return ev;
}

// ---------------------------------------------------------------------------
// Suite configuration
// ---------------------------------------------------------------------------

struct CaseSpec {
  std::string name;
  nlohmann::ordered_json topology;   // {"family": ...} params or {"file": path}
  nlohmann::ordered_json placement;  // {"file"} | {"mappers","reducers"} | {"maps","reducers","seed"}
  nlohmann::ordered_json scenarios;  // {"file"} | {"singles": true} | {"list": [...]} | absent
  double volume_mb = 0.0;
  EvalOptions eval;
};

struct SuiteConfig {
  std::vector<CaseSpec> cases;
  std::string base_dir;  // directory file references resolve against
};

namespace detail {

inline double json_num(const nlohmann::json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number()) throw ParseError(std::string("config: '") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline bool json_bool(const nlohmann::json& j, const char* key, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_boolean()) throw ParseError(std::string("config: '") + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

inline CommodityMode mode_from_string(const std::string& s) {
  if (s == "per-demand") return CommodityMode::PerDemand;
  if (s == "by-source") return CommodityMode::BySource;
  throw ParseError("config: commodity_mode must be 'per-demand' or 'by-source', got '" + s + "'");
}

}  // namespace detail

// Build TopologyParams from a JSON object, rejecting unknown keys so typos
// fail loudly instead of silently falling back to defaults.
inline TopologyParams topology_params_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "family",          "spines",
      "leaves",          "servers_per_leaf",
      "k",               "n",
      "level",           "racks",
      "servers_per_rack", "pods",
      "servers_per_pod", "transceiver_budget",
      "optical_capacity_mbps", "groups_per_rack",
      "servers_per_group", "link_capacity_mbps",
      "server_rate_cap_mbps", "power"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw ParseError("topology parameters: unknown key '" + it.key() + "'");
  TopologyParams p;
  auto geti = [&](const char* key, int dflt) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_number_integer())
      throw ParseError(std::string("topology parameters: '") + key + "' must be an integer");
    return j.at(key).get<int>();
  };
  p.spines = geti("spines", p.spines);
  p.leaves = geti("leaves", p.leaves);
  p.servers_per_leaf = geti("servers_per_leaf", p.servers_per_leaf);
  p.k = geti("k", p.k);
  p.n = geti("n", p.n);
  p.level = geti("level", p.level);
  p.racks = geti("racks", p.racks);
  p.servers_per_rack = geti("servers_per_rack", p.servers_per_rack);
  p.pods = geti("pods", p.pods);
  p.servers_per_pod = geti("servers_per_pod", p.servers_per_pod);
  p.transceiver_budget = geti("transceiver_budget", p.transceiver_budget);
  p.groups_per_rack = geti("groups_per_rack", p.groups_per_rack);
  p.servers_per_group = geti("servers_per_group", p.servers_per_group);
  p.optical_capacity_mbps = detail::json_num(j, "optical_capacity_mbps", p.optical_capacity_mbps);
  p.link_capacity_mbps = detail::json_num(j, "link_capacity_mbps", p.link_capacity_mbps);
  p.server_rate_cap_mbps = detail::json_num(j, "server_rate_cap_mbps", p.server_rate_cap_mbps);
  if (j.contains("power")) {
    const auto& pw = j.at("power");
    p.power.switch_active_w = detail::json_num(pw, "switch_active_w", p.power.switch_active_w);
    p.power.switch_idle_w = detail::json_num(pw, "switch_idle_w", p.power.switch_idle_w);
    p.power.server_nic_w = detail::json_num(pw, "server_nic_w", p.power.server_nic_w);
  }
  return p;
}

inline SuiteConfig config_from_json(const nlohmann::json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ParseError("config: top level must be an object");
  if (!doc.contains("cases") || !doc.at("cases").is_array() || doc.at("cases").empty())
    throw ParseError("config: needs a non-empty 'cases' array");

  EvalOptions defaults;
  defaults.epsilon = detail::json_num(doc, "epsilon", defaults.epsilon);
  defaults.include_servers = detail::json_bool(doc, "include_servers", defaults.include_servers);
  defaults.reference_volume_mb =
      detail::json_num(doc, "reference_volume_mb", defaults.reference_volume_mb);
  if (doc.contains("commodity_mode"))
    defaults.mode = detail::mode_from_string(doc.at("commodity_mode").get<std::string>());
  const double default_volume = detail::json_num(doc, "volume_mb", -1.0);

  SuiteConfig cfg;
  cfg.base_dir = base_dir;
  std::set<std::string> names;
  for (const auto& jc : doc.at("cases")) {
    CaseSpec spec;
    if (!jc.contains("name")) throw ParseError("config: every case needs a 'name'");
    spec.name = jc.at("name").get<std::string>();
    if (!names.insert(spec.name).second)
      throw ParseError("config: duplicate case name '" + spec.name + "'");
    if (!jc.contains("topology"))
      throw ParseError("config: case '" + spec.name + "' needs a 'topology'");
    if (!jc.contains("placement"))
      throw ParseError("config: case '" + spec.name + "' needs a 'placement'");
    spec.topology = jc.at("topology");
    spec.placement = jc.at("placement");
    if (jc.contains("scenarios")) spec.scenarios = jc.at("scenarios");
    spec.volume_mb = detail::json_num(jc, "volume_mb", default_volume);
    if (spec.volume_mb < 0)
      throw ParseError("config: case '" + spec.name +
                       "' needs 'volume_mb' (here or at the top level)");
    spec.eval = defaults;
    spec.eval.epsilon = detail::json_num(jc, "epsilon", defaults.epsilon);
    spec.eval.include_servers =
        detail::json_bool(jc, "include_servers", defaults.include_servers);
    if (jc.contains("commodity_mode"))
      spec.eval.mode = detail::mode_from_string(jc.at("commodity_mode").get<std::string>());
    cfg.cases.push_back(std::move(spec));
  }
  return cfg;
}

inline SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return config_from_json(doc, std::filesystem::path(path).parent_path().string());
}

// ---------------------------------------------------------------------------
// Suite execution
// ---------------------------------------------------------------------------

struct MaterializedCase {
  std::string name;
  Topology topology;
  Placement placement;
  std::vector<Scenario> scenarios;  // [0] is always the baseline
  double volume_mb = 0.0;
  EvalOptions eval;
};

namespace detail {

inline std::string resolve_path(const std::string& base_dir, const std::string& ref) {
  std::filesystem::path p(ref);
  if (p.is_absolute() || base_dir.empty()) return ref;
  return (std::filesystem::path(base_dir) / p).string();
}

inline MaterializedCase materialize_case(const CaseSpec& spec, const std::string& base_dir) {
  MaterializedCase mc;
  mc.name = spec.name;
  mc.volume_mb = spec.volume_mb;
  mc.eval = spec.eval;

  if (spec.topology.contains("file")) {
    mc.topology = load_topology(
        resolve_path(base_dir, spec.topology.at("file").get<std::string>()));
  } else if (spec.topology.contains("family")) {
    mc.topology = build_topology(spec.topology.at("family").get<std::string>(),
                                 topology_params_from_json(spec.topology));
  } else {
    throw ParseError("config: case '" + spec.name +
                     "': topology needs 'family' or 'file'");
  }

  // "reducers" is a count in the random form and a label list in the explicit
  // form, so the branch has to look at the value shape, not just the key.
  const auto is_list = [&](const char* key) {
    return spec.placement.contains(key) && spec.placement.at(key).is_array();
  };
  if (spec.placement.contains("file")) {
    mc.placement = load_placement(
        resolve_path(base_dir, spec.placement.at("file").get<std::string>()), mc.topology);
  } else if (is_list("mappers") || is_list("reducers")) {
    const auto get_list = [&](const char* key) {
      std::vector<std::string> out;
      if (!spec.placement.contains(key)) return out;
      const auto& arr = spec.placement.at(key);
      if (!arr.is_array())
        throw ParseError("config: case '" + spec.name + "': placement '" + key +
                         "' must be an array of server labels");
      for (const auto& e : arr) {
        if (!e.is_string())
          throw ParseError("config: case '" + spec.name + "': placement '" + key +
                           "' entries must be server labels");
        out.push_back(e.get<std::string>());
      }
      return out;
    };
    mc.placement = make_placement(mc.topology, get_list("mappers"), get_list("reducers"));
  } else {
    if (spec.placement.contains("mappers"))
      throw ParseError("config: case '" + spec.name +
                       "': placement 'mappers' must be an array of server labels");
    const int maps = static_cast<int>(json_num(spec.placement, "maps", 10));
    const int reducers = static_cast<int>(json_num(spec.placement, "reducers", 6));
    const auto seed = static_cast<std::uint64_t>(json_num(spec.placement, "seed", 1));
    mc.placement = random_placement(mc.topology, maps, reducers, seed);
  }

  std::vector<Scenario> listed;
  if (spec.scenarios.is_object() && spec.scenarios.contains("file")) {
    listed = load_scenarios(
        resolve_path(base_dir, spec.scenarios.at("file").get<std::string>()), mc.topology);
  } else if (spec.scenarios.is_object() && json_bool(spec.scenarios, "singles", false)) {
    listed = all_single_link_scenarios(mc.topology);
  } else if (spec.scenarios.is_object() && spec.scenarios.contains("list")) {
    nlohmann::ordered_json wrap;
    wrap["scenarios"] = spec.scenarios.at("list");
    listed = scenarios_from_json(wrap, mc.topology);
  } else if (!spec.scenarios.is_null() && !spec.scenarios.empty()) {
    throw ParseError("config: case '" + spec.name +
                     "': scenarios needs 'file', 'singles', or 'list'");
  }

  mc.scenarios.push_back(baseline_scenario());
  for (auto& s : listed) {
    if (s.name == "none") continue;  // baseline is always evaluated once, first
    mc.scenarios.push_back(std::move(s));
  }
  return mc;
}

template <typename Fn>
inline void parallel_for(size_t count, unsigned workers, Fn&& fn) {
  if (count == 0) return;
  if (workers > count) workers = static_cast<unsigned>(count);
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto body = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        next.store(count);  // drain the remaining work
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

// Worker-count resolution: explicit request, then the SHUFFLEOPT_WORKERS
// environment variable, then a conservative hardware default.
inline unsigned worker_count(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SHUFFLEOPT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 256)
      throw ParameterError("SHUFFLEOPT_WORKERS must be an integer in [1, 256]");
    return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min(hw, 8u);
}

struct CaseResult {
  std::string name;
  std::string family;  // architecture tag of the evaluated topology
  Topology topology;
  Placement placement;
  double volume_mb = 0.0;
  std::vector<ScenarioEvaluation> evals;  // index-aligned with the scenarios
};

struct SuiteResult {
  std::vector<CaseResult> cases;
};

// Run every case of the suite. Scenario evaluations are independent and run
// on `workers` threads; results land in pre-assigned slots, so the output is
// identical for any worker count.
inline SuiteResult run_suite(const SuiteConfig& cfg, unsigned workers = 0) {
  const unsigned nworkers = worker_count(workers);

  std::vector<MaterializedCase> cases;
  cases.reserve(cfg.cases.size());
  for (const auto& spec : cfg.cases)
    cases.push_back(detail::materialize_case(spec, cfg.base_dir));

  SuiteResult res;
  res.cases.resize(cases.size());
  for (size_t i = 0; i < cases.size(); ++i) {
    res.cases[i].name = cases[i].name;
    res.cases[i].family = cases[i].topology.arch_tag;
    res.cases[i].topology = cases[i].topology;
    res.cases[i].placement = cases[i].placement;
    res.cases[i].volume_mb = cases[i].volume_mb;
    res.cases[i].evals.resize(cases[i].scenarios.size());
  }

  std::vector<std::pair<size_t, size_t>> units;  // (case index, scenario index)
  for (size_t i = 0; i < cases.size(); ++i)
    for (size_t k = 0; k < cases[i].scenarios.size(); ++k) units.emplace_back(i, k);

  detail::parallel_for(units.size(), nworkers, [&](size_t ui) {
    const auto [ci, si] = units[ui];
    const MaterializedCase& mc = cases[ci];
    ScenarioEvaluation ev =
        evaluate_scenario(mc.topology, mc.placement, mc.volume_mb, mc.scenarios[si], mc.eval);
    ev.metrics.topology = mc.name;
    res.cases[ci].evals[si] = std::move(ev);
  });

  // Degradation and the base/extra split need the per-case baseline.
  for (auto& cr : res.cases) {
    RunMetrics& base = cr.evals[0].metrics;
    if (base.fatal)
      throw FatalScenarioError("case '" + cr.name +
                                   "': demands are disconnected with no failures applied",
                               {});
    for (size_t k = 0; k < cr.evals.size(); ++k) {
      RunMetrics& mm = cr.evals[k].metrics;
      mm.base_s = base.completion_s;
      if (mm.fatal) {
        mm.degradation_pct = kInf;
        mm.extra_s = kInf;
        continue;
      }
      if (k == 0 || base.completion_s <= 0) {
        mm.degradation_pct = 0.0;
        mm.extra_s = 0.0;
        continue;
      }
      double deg = degradation(mm.completion_s, base.completion_s);
      if (deg < 0 && deg > -1e-6) deg = 0.0;  // solver noise on identical optima
      mm.degradation_pct = deg;
      mm.extra_s = overall_completion(base.completion_s, mm.completion_s).extra_s;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Result tables
// ---------------------------------------------------------------------------

inline void write_results_csv(const SuiteResult& res, std::ostream& out) {
  out << "topology,scenario,fatal,volume_mb,lambda,completion_s,degradation_pct,"
         "base_s,extra_s,active_nodes,idle_nodes,active_power_w,idle_power_w,"
         "energy_j,energy_active_j\n";
  for (const auto& cr : res.cases)
    for (const auto& ev : cr.evals) {
      const RunMetrics& m = ev.metrics;
      out << m.topology << ',' << m.scenario << ',' << (m.fatal ? 1 : 0) << ','
          << format_double(m.volume_mb) << ',' << format_double(m.lambda) << ','
          << format_double(m.completion_s) << ',' << format_double(m.degradation_pct) << ','
          << format_double(m.base_s) << ',' << format_double(m.extra_s) << ','
          << m.active_nodes << ',' << m.idle_nodes << ','
          << format_double(m.active_power_w) << ',' << format_double(m.idle_power_w) << ','
          << format_double(m.energy_j) << ',' << format_double(m.energy_active_j) << '\n';
    }
}

// Degradation per failure scenario (non-fatal only; the baseline is the
// reference and is omitted).
inline void write_fig2_series_csv(const SuiteResult& res, std::ostream& out) {
  out << "topology,scenario,degradation_pct\n";
  for (const auto& cr : res.cases)
    for (size_t k = 1; k < cr.evals.size(); ++k) {
      const RunMetrics& m = cr.evals[k].metrics;
      if (m.fatal) continue;
      out << m.topology << ',' << m.scenario << ',' << format_double(m.degradation_pct)
          << '\n';
    }
}

// Stacked completion: baseline portion plus failure-induced extra time.
inline void write_fig3_stacked_csv(const SuiteResult& res, std::ostream& out) {
  out << "topology,scenario,base_s,extra_s\n";
  for (const auto& cr : res.cases)
    for (const auto& ev : cr.evals) {
      const RunMetrics& m = ev.metrics;
      if (m.fatal) continue;
      out << m.topology << ',' << m.scenario << ',' << format_double(m.base_s) << ','
          << format_double(m.extra_s) << '\n';
    }
}

inline void write_suite_outputs(const SuiteResult& res, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto emit = [&](const char* file, auto writer) {
    const std::string path = (std::filesystem::path(out_dir) / file).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    writer(res, out);
    if (!out) throw IoError("write failed: " + path);
  };
  emit("results.csv", [](const SuiteResult& r, std::ostream& o) { write_results_csv(r, o); });
  emit("fig2_series.csv",
       [](const SuiteResult& r, std::ostream& o) { write_fig2_series_csv(r, o); });
  emit("fig3_stacked.csv",
       [](const SuiteResult& r, std::ostream& o) { write_fig3_stacked_csv(r, o); });
}

}  // namespace shuffleopt
