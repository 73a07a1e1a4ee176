#include <catch2/catch_amalgamated.hpp>

#include "shuffleopt/lpsolve.hpp"
#include "shuffleopt/optmodel.hpp"
#include "test_util.hpp"

using namespace shuffleopt;

TEST_CASE("arcs double every surviving link") {
  const Topology t = testutil::parallel_topology();
  const auto arcs = make_arcs(t);
  REQUIRE(arcs.size() == 8);
  for (size_t i = 0; i < arcs.size(); i += 2) {
    CHECK(arcs[i].tail == arcs[i + 1].head);
    CHECK(arcs[i].head == arcs[i + 1].tail);
    CHECK(arcs[i].arc_id == 2 * arcs[i].link);
    CHECK(arcs[i + 1].arc_id == 2 * arcs[i].link + 1);
  }
}

TEST_CASE("commodity grouping by source merges demands") {
  const Topology t = build_spine_leaf(TopologyParams{});
  const Placement p = random_placement(t, 4, 3, 2);
  const DemandSet d = make_graysort_demands(1200.0, p);
  const auto net = network_demands(d.demands);
  const auto per_demand = make_commodities(net, CommodityMode::PerDemand);
  const auto by_source = make_commodities(net, CommodityMode::BySource);
  CHECK(per_demand.size() == net.size());
  std::set<NodeId> sources;
  for (const auto& dem : net) sources.insert(dem.src);
  CHECK(by_source.size() == sources.size());
  double v1 = 0, v2 = 0;
  for (const auto& c : per_demand) v1 += c.total_volume;
  for (const auto& c : by_source) v2 += c.total_volume;
  CHECK(v1 == Catch::Approx(v2));
}

TEST_CASE("stage-1 optimum on the single-path line is the bottleneck rate") {
  const Topology t = testutil::line_topology(1000.0);
  const DemandSet d = testutil::single_demand(t, "a", "b", 1000.0);
  const ModelBundle b = build_stage1(t, d);
  CHECK(b.model.stage_tag == "stage1");
  CHECK(validate_model(b.model).ok());
  const LpResult r = solve_lp(b.model);
  REQUIRE(r.status == LpStatus::Optimal);
  // 1000 MB through a 1000 MB/s path: lambda* = 1, T* = 1 s.
  CHECK(r.objective == Catch::Approx(1.0).epsilon(1e-9));
  CHECK(completion_time_from_lambda(b.meta.lambda_value(r.x)) ==
        Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("parallel routes double the rate") {
  const Topology t = testutil::parallel_topology(1000.0);
  DemandSet d = testutil::single_demand(t, "a", "b", 1000.0);
  // Lift the server NIC cap out of the way so the fabric is the bottleneck.
  Topology t2 = t;
  t2.server_rate_cap_mbps = 10000.0;
  const LpResult r = solve_lp(build_stage1(t2, d).model);
  CHECK(r.objective == Catch::Approx(2.0).epsilon(1e-9));
  // With the 1000 MB/s NIC cap in place the servers limit the rate instead.
  const LpResult capped = solve_lp(build_stage1(t, d).model);
  CHECK(capped.objective == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("per-demand and by-source formulations agree") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 5; ++trial) {
    const auto inst = testutil::random_instance(rng);
    if (!disconnected_demands(inst.topology, inst.demands.demands).empty()) continue;
    Stage1Options a, b;
    a.mode = CommodityMode::PerDemand;
    b.mode = CommodityMode::BySource;
    const double la = solve_lp(build_stage1(inst.topology, inst.demands, a).model).objective;
    const double lb = solve_lp(build_stage1(inst.topology, inst.demands, b).model).objective;
    CHECK(la == Catch::Approx(lb).epsilon(1e-7));
  }
}

TEST_CASE("degenerate demand sets are rejected with a dedicated error") {
  const Topology t = testutil::line_topology();
  const Placement p = make_placement(t, {"a"}, {"b"});
  CHECK_THROWS_AS(build_stage1(t, make_graysort_demands(0.0, p)), DegenerateModelError);
  // All traffic colocated: nothing crosses the network.
  const Placement same = make_placement(t, {"a"}, {"a"});
  CHECK_THROWS_AS(build_stage1(t, make_graysort_demands(100.0, same)), DegenerateModelError);
}

TEST_CASE("fatal inputs are rejected when building models") {
  const Topology t = testutil::line_topology();
  const DemandSet d = testutil::single_demand(t, "a", "b", 100.0);
  const Topology cut = apply_scenario(t, Scenario{"cut", {0}});
  CHECK_THROWS_AS(build_stage1(cut, d), FatalScenarioError);
}

TEST_CASE("optical budgets generate binary link choices") {
  TopologyParams p;
  p.racks = 3;
  p.servers_per_rack = 1;
  const Topology t = build_c_through(p);
  const Placement pl = make_placement(t, {"rack0.server0", "rack1.server0"},
                                      {"rack2.server0"});
  const ModelBundle b = build_stage1(t, make_graysort_demands(600.0, pl));
  CHECK(b.model.has_binaries());
  CHECK(b.meta.y_var.size() == 3);  // C(3,2) candidate circuits
  int budget_rows = 0;
  for (const auto& row : b.model.rows)
    if (row.tag.rfind("budget:", 0) == 0) ++budget_rows;
  CHECK(budget_rows == 3);
  // Budgets bind: each ToR may light at most one circuit.
  const MilpResult r = solve_milp(b.model);
  REQUIRE(r.status == LpStatus::Optimal);
  for (const auto& [lid, yv] : b.meta.y_var) {
    const double y = r.x[static_cast<size_t>(yv)];
    CHECK((y <= 1e-6 || y >= 1 - 1e-6));
  }
}

TEST_CASE("stage-2 carries an activation binary for every powered element") {
  const Topology t = testutil::parallel_topology();
  const DemandSet d = testutil::single_demand(t, "a", "b", 500.0);
  const double lambda_star = solve_lp(build_stage1(t, d).model).objective;
  const ModelBundle s2 = build_stage2(t, d, lambda_star);
  CHECK(s2.model.stage_tag == "stage2");
  CHECK(s2.meta.u_var.size() == 2);  // both switches, servers excluded
  CHECK(s2.meta.lambda_target == Catch::Approx(lambda_star));
  bool has_pin = false;
  for (const auto& row : s2.model.rows)
    if (row.tag == "pinlambda") has_pin = true;
  CHECK(has_pin);
  CHECK(validate_model(s2.model).ok());
  CHECK_THROWS_AS(build_stage2(t, d, 0.0), ParameterError);
  Stage2Options bad;
  bad.forced_active = {*t.node_by_label("a")};  // servers carry no activation var
  CHECK_THROWS_AS(build_stage2(t, d, lambda_star, bad), ModelMismatchError);
}

TEST_CASE("stage-2 connectivity fixes pin unavoidable switches on") {
  const Topology t = testutil::line_topology();
  const DemandSet d = testutil::single_demand(t, "a", "b", 100.0);
  const double lambda_star = solve_lp(build_stage1(t, d).model).objective;
  const ModelBundle s2 = build_stage2(t, d, lambda_star);
  const NodeId sw = *t.node_by_label("s");
  const int uv = s2.meta.u_var.at(sw);
  CHECK(s2.model.vars[static_cast<size_t>(uv)].lower == 1.0);
}

TEST_CASE("stage-2 energy optimum parks the redundant switch") {
  Topology t = testutil::parallel_topology();
  t.server_rate_cap_mbps = 10000.0;
  const DemandSet d = testutil::single_demand(t, "a", "b", 500.0);
  // Demand fits through one switch: stage 2 should keep exactly one active.
  const double lambda_demand = 2.0;  // 1000 MB/s path / 500 MB
  const double lambda_star = solve_lp(build_stage1(t, d).model).objective;
  CHECK(lambda_star == Catch::Approx(lambda_demand * 2).epsilon(1e-9));
  // Pin half the optimal rate: a single switch suffices for it.
  const ModelBundle s2 = build_stage2(t, d, lambda_star / 2);
  const MilpResult r = solve_milp(s2.model);
  REQUIRE(r.status == LpStatus::Optimal);
  // One switch on -> incremental power = active - idle of one switch.
  const Node* sw = t.find_node(*t.node_by_label("s0"));
  CHECK(r.objective == Catch::Approx(sw->power_active_w - sw->power_idle_w).epsilon(1e-9));
}

TEST_CASE("evaluate_solution reports the worst violation by row tag") {
  const Topology t = testutil::line_topology();
  const DemandSet d = testutil::single_demand(t, "a", "b", 1000.0);
  const ModelBundle b = build_stage1(t, d);
  std::vector<double> x(b.model.vars.size(), 0.0);
  x[static_cast<size_t>(b.meta.lambda_var)] = 5.0;  // rate with zero flow
  const ViolationReport rep = evaluate_solution(b.model, x);
  CHECK(rep.constraint > 0);
  CHECK_FALSE(rep.worst_tag.empty());
  // A genuinely optimal point certifies cleanly.
  const LpResult r = solve_lp(b.model);
  CHECK(evaluate_solution(b.model, r.x).max_violation() <= 1e-6);
}

TEST_CASE("validate_model catches structural defects") {
  OptModel m;
  const int v = m.add_var("x", 0.0, 1.0);
  m.add_row("dup", RowSense::LE, 1.0, {{v, 1.0}, {v, 2.0}});
  CHECK_FALSE(validate_model(m).ok());

  OptModel m2;
  const int w = m2.add_var("x", 3.0, 1.0);  // lb > ub
  (void)w;
  CHECK_FALSE(validate_model(m2).ok());

  OptModel m3;
  m3.add_row("ghost", RowSense::LE, 1.0, {{7, 1.0}});  // undeclared variable
  CHECK_FALSE(validate_model(m3).ok());
}

TEST_CASE("completion time is the reciprocal rate") {
  CHECK(completion_time_from_lambda(4.0) == Catch::Approx(0.25));
  CHECK_THROWS_AS(completion_time_from_lambda(0.0), DomainError);
  CHECK_THROWS_AS(completion_time_from_lambda(-1.0), DomainError);
}
