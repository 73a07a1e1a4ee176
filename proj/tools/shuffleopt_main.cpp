// Command-line front end: suite runs, single-scenario solves, LP export,
// document validation, and topology generation.
//
// Exit codes: 0 success, 1 bad input (arguments, documents, validation),
// 2 solver or internal failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shuffleopt/shuffleopt.hpp"

namespace {

using namespace shuffleopt;

// Scenario selection shared by `solve` and `export-lp`.
struct ScenarioPick {
  std::string file;
  std::string name;
  std::vector<std::string> fail_links;
};

Scenario pick_scenario(const ScenarioPick& pick, const Topology& t) {
  if (!pick.file.empty()) {
    std::vector<Scenario> suite = load_scenarios(pick.file, t);
    if (pick.name.empty())
      throw ParameterError("--scenario NAME is required with --scenarios FILE");
    for (auto& s : suite)
      if (s.name == pick.name) return s;
    throw ParameterError("scenario '" + pick.name + "' not found in " + pick.file);
  }
  if (!pick.fail_links.empty()) {
    Scenario s;
    s.name = "cli";
    for (const auto& lbl : pick.fail_links)
      s.failed_links.push_back(detail::resolve_link_label(t, lbl));
    std::sort(s.failed_links.begin(), s.failed_links.end());
    s.failed_links.erase(std::unique(s.failed_links.begin(), s.failed_links.end()),
                         s.failed_links.end());
    return s;
  }
  return baseline_scenario();
}

void print_metrics(const RunMetrics& m) {
  std::cout << "scenario: " << m.scenario << "\n"
            << "fatal: " << (m.fatal ? "yes" : "no") << "\n";
  if (m.fatal) return;
  std::cout << "volume_mb: " << format_double(m.volume_mb) << "\n"
            << "lambda: " << format_double(m.lambda) << "\n"
            << "completion_s: " << format_double(m.completion_s) << "\n"
            << "active_nodes: " << m.active_nodes << "\n"
            << "idle_nodes: " << m.idle_nodes << "\n"
            << "active_power_w: " << format_double(m.active_power_w) << "\n"
            << "idle_power_w: " << format_double(m.idle_power_w) << "\n"
            << "energy_j: " << format_double(m.energy_j) << "\n"
            << "energy_active_j: " << format_double(m.energy_active_j) << "\n";
}

int cmd_run(const std::string& config_path, const std::string& out_dir, unsigned workers) {
  SuiteConfig cfg = load_config(config_path);
  SuiteResult res = run_suite(cfg, workers);
  write_suite_outputs(res, out_dir);
  for (const auto& cr : res.cases)
    for (const auto& ev : cr.evals) {
      const RunMetrics& m = ev.metrics;
      std::cout << m.topology << " " << m.scenario << ": "
                << (m.fatal ? "fatal"
                            : "T=" + format_double(m.completion_s) +
                                  "s deg=" + format_double(m.degradation_pct) +
                                  "% E=" + format_double(m.energy_j) + "J")
                << "\n";
    }
  std::cout << "wrote results.csv, fig2_series.csv, fig3_stacked.csv to " << out_dir
            << "\n";
  return 0;
}

int cmd_solve(const std::string& topo_path, const std::string& placement_path,
              double volume_mb, const ScenarioPick& pick, double epsilon,
              bool include_servers) {
  Topology t = load_topology(topo_path);
  Placement pl = load_placement(placement_path, t);
  Scenario sc = pick_scenario(pick, t);
  EvalOptions eo;
  eo.epsilon = epsilon;
  eo.include_servers = include_servers;
  ScenarioEvaluation ev = evaluate_scenario(t, pl, volume_mb, sc, eo);
  print_metrics(ev.metrics);
  return 0;
}

int cmd_export_lp(const std::string& topo_path, const std::string& placement_path,
                  double volume_mb, int stage, const ScenarioPick& pick,
                  double epsilon, const std::string& out_path) {
  Topology t0 = load_topology(topo_path);
  Placement pl = load_placement(placement_path, t0);
  Scenario sc = pick_scenario(pick, t0);
  DemandSet d = make_graysort_demands(volume_mb, pl);
  throw_if_fatal(apply_scenario(t0, sc), network_demands(d.demands),
                 "scenario '" + sc.name + "'");
  Topology t = apply_scenario(t0, sc);
  if (stage == 1) {
    save_lp(build_stage1(t, d).model, out_path);
  } else {
    ModelBundle s1 = build_stage1(t, d);
    LpResult r = detail::solve_stage_model(s1.model, LpOptions{}, "stage 1");
    Stage2Options s2opt;
    s2opt.epsilon = epsilon;
    save_lp(build_stage2(t, d, s1.meta.lambda_value(r.x), s2opt).model, out_path);
  }
  std::cout << "wrote stage-" << stage << " model to " << out_path << "\n";
  return 0;
}

int cmd_validate(const std::string& topo_path, const std::string& placement_path,
                 const std::string& scenarios_path) {
  Topology t = load_topology(topo_path);
  ValidationReport r = validate_topology(t);
  bool ok = r.ok();
  if (!r.ok()) std::cout << "topology: INVALID\n" << r.to_string();
  else
    std::cout << "topology: ok (" << t.nodes.size() << " nodes, " << t.links.size()
              << " links)\n";
  if (!placement_path.empty()) {
    Placement pl = load_placement(placement_path, t);
    ValidationReport pr = validate_placement(t, pl);
    ok = ok && pr.ok();
    if (!pr.ok()) std::cout << "placement: INVALID\n" << pr.to_string();
    else
      std::cout << "placement: ok (" << pl.mappers.size() << " mappers, "
                << pl.reducers.size() << " reducers)\n";
  }
  if (!scenarios_path.empty()) {
    std::vector<Scenario> suite = load_scenarios(scenarios_path, t);
    std::cout << "scenarios: ok (" << suite.size() << " scenarios)\n";
  }
  return ok ? 0 : 1;
}

int cmd_gen_topology(const std::string& family, const std::string& params_json,
                     const std::string& out_path) {
  nlohmann::json params = nlohmann::json::object();
  if (!params_json.empty()) {
    try {
      params = nlohmann::json::parse(params_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("--params: ") + e.what());
    }
  }
  Topology t = build_topology(family, topology_params_from_json(params));
  ValidationReport r = validate_topology(t);
  if (!r.ok())
    throw ParameterError("generated topology failed validation:\n" + r.to_string());
  save_topology(t, out_path);
  std::cout << "wrote " << family << " (" << t.nodes.size() << " nodes, "
            << t.links.size() << " links) to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimum shuffle completion time and network energy under link failures"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "evaluate a full suite config and emit CSV tables");
  std::string run_config, run_out = "out";
  unsigned run_workers = 0;
  run->add_option("--config", run_config, "suite configuration JSON")->required();
  run->add_option("--out", run_out, "output directory for the CSV tables");
  run->add_option("--workers", run_workers, "worker threads (default: SHUFFLEOPT_WORKERS or auto)");

  // solve
  auto* solve = app.add_subcommand("solve", "solve a single (topology, scenario) case");
  std::string so_topo, so_place;
  double so_volume = 1000.0, so_eps = 0.0;
  bool so_servers = false;
  ScenarioPick so_pick;
  solve->add_option("--topology", so_topo, "topology JSON document")->required();
  solve->add_option("--placement", so_place, "placement JSON document")->required();
  solve->add_option("--volume", so_volume, "total shuffle volume in MB");
  solve->add_option("--scenarios", so_pick.file, "scenario suite JSON document");
  solve->add_option("--scenario", so_pick.name, "scenario name inside --scenarios");
  solve->add_option("--fail-link", so_pick.fail_links,
                    "fail a link by '<a>--<b>' label (repeatable)");
  solve->add_option("--epsilon", so_eps, "stage-2 relative rate slack");
  solve->add_flag("--include-servers", so_servers, "count server NICs in energy totals");

  // export-lp
  auto* exp = app.add_subcommand("export-lp", "write a stage model in LP format");
  std::string ex_topo, ex_place, ex_out;
  double ex_volume = 1000.0, ex_eps = 0.0;
  int ex_stage = 1;
  ScenarioPick ex_pick;
  exp->add_option("--topology", ex_topo, "topology JSON document")->required();
  exp->add_option("--placement", ex_place, "placement JSON document")->required();
  exp->add_option("--volume", ex_volume, "total shuffle volume in MB");
  exp->add_option("--stage", ex_stage, "1 = completion time, 2 = energy")
      ->check(CLI::IsMember({1, 2}));
  exp->add_option("--scenarios", ex_pick.file, "scenario suite JSON document");
  exp->add_option("--scenario", ex_pick.name, "scenario name inside --scenarios");
  exp->add_option("--fail-link", ex_pick.fail_links,
                  "fail a link by '<a>--<b>' label (repeatable)");
  exp->add_option("--epsilon", ex_eps, "stage-2 relative rate slack");
  exp->add_option("--out", ex_out, "output LP file")->required();

  // validate
  auto* val = app.add_subcommand("validate", "validate topology/placement/scenario documents");
  std::string va_topo, va_place, va_scen;
  val->add_option("--topology", va_topo, "topology JSON document")->required();
  val->add_option("--placement", va_place, "placement JSON document");
  val->add_option("--scenarios", va_scen, "scenario suite JSON document");

  // gen-topology
  auto* gen = app.add_subcommand("gen-topology", "generate a topology document");
  std::string ge_family, ge_params, ge_out;
  gen->add_option("--family", ge_family,
                  "spine-leaf | fat-tree | bcube | dcell | c-through | helios | pon-servercentric")
      ->required();
  gen->add_option("--params", ge_params, "family parameters as a JSON object");
  gen->add_option("--out", ge_out, "output topology JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed()) return cmd_run(run_config, run_out, run_workers);
    if (solve->parsed())
      return cmd_solve(so_topo, so_place, so_volume, so_pick, so_eps, so_servers);
    if (exp->parsed())
      return cmd_export_lp(ex_topo, ex_place, ex_volume, ex_stage, ex_pick, ex_eps, ex_out);
    if (val->parsed()) return cmd_validate(va_topo, va_place, va_scen);
    if (gen->parsed()) return cmd_gen_topology(ge_family, ge_params, ge_out);
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
