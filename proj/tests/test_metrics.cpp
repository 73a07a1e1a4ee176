#include <catch2/catch_amalgamated.hpp>

#include "shuffleopt/lpsolve.hpp"
#include "shuffleopt/metrics.hpp"
#include "shuffleopt/optmodel.hpp"
#include "test_util.hpp"

using namespace shuffleopt;

TEST_CASE("degradation is the raw percentage increase") {
  CHECK(degradation(15.0, 10.0) == Catch::Approx(50.0));
  CHECK(degradation(10.0, 10.0) == Catch::Approx(0.0));
  // Raw value by design: tiny numerical improvements are not hidden here.
  CHECK(degradation(9.0, 10.0) == Catch::Approx(-10.0));
  CHECK_THROWS_AS(degradation(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(degradation(1.0, -2.0), DomainError);
  CHECK_THROWS_AS(degradation(-1.0, 2.0), DomainError);
}

TEST_CASE("overall completion splits into base and extra") {
  const CompletionSplit s = overall_completion(10.0, 14.0);
  CHECK(s.base_s == Catch::Approx(10.0));
  CHECK(s.extra_s == Catch::Approx(4.0));
  // Never negative extra, even when the failed case is marginally faster.
  const CompletionSplit n = overall_completion(10.0, 9.999999);
  CHECK(n.base_s == Catch::Approx(10.0));
  CHECK(n.extra_s == 0.0);
  CHECK_THROWS_AS(overall_completion(-1.0, 2.0), DomainError);
  CHECK_THROWS_AS(overall_completion(1.0, -2.0), DomainError);
}

namespace {

// Parallel topology, one demand: stage-2 bundle plus a solution with one
// switch running and one parked. Power defaults are 200 W active, 100 W idle.
struct EnergyFixture {
  Topology t = testutil::parallel_topology();
  DemandSet d = testutil::single_demand(t, "a", "b", 1000.0);
  ModelBundle stage2;
  std::vector<double> x;

  EnergyFixture() {
    const ModelBundle s1 = build_stage1(t, d);
    const LpResult r1 = solve_lp(s1.model);
    REQUIRE(r1.status == LpStatus::Optimal);
    Stage2Options opt;
    opt.epsilon = 1.0;  // generous slack so parking one switch stays feasible
    stage2 = build_stage2(t, d, r1.objective, opt);
    const MilpResult r2 = solve_milp(stage2.model);
    REQUIRE(r2.status == LpStatus::Optimal);
    x = r2.x;
  }

  int u_of(const std::string& label) const {
    return stage2.meta.u_var.at(*t.node_by_label(label));
  }
};

}  // namespace

TEST_CASE("energy counts active and idle switches over the completion time") {
  EnergyFixture fx;
  // Force a known activation pattern: s0 running, s1 parked.
  fx.x[static_cast<size_t>(fx.u_of("s0"))] = 1.0;
  fx.x[static_cast<size_t>(fx.u_of("s1"))] = 0.0;

  const EnergyBreakdown e = energy(fx.t, fx.stage2, fx.x, 2.0);
  CHECK(e.active_nodes == 1);
  CHECK(e.idle_nodes == 1);
  CHECK(e.active_power_w == Catch::Approx(200.0));
  CHECK(e.idle_power_w == Catch::Approx(100.0));
  CHECK(e.energy_j == Catch::Approx(600.0));         // (200 + 100) * 2 s
  CHECK(e.energy_active_j == Catch::Approx(400.0));  // 200 * 2 s

  // Zero-duration shuffles burn nothing but still report power.
  const EnergyBreakdown z = energy(fx.t, fx.stage2, fx.x, 0.0);
  CHECK(z.energy_j == 0.0);
  CHECK(z.active_power_w == Catch::Approx(200.0));
}

TEST_CASE("servers are excluded unless explicitly included") {
  EnergyFixture fx;
  EnergyOptions opt;
  opt.include_servers = true;
  const EnergyBreakdown with = energy(fx.t, fx.stage2, fx.x, 1.0, opt);
  const EnergyBreakdown without = energy(fx.t, fx.stage2, fx.x, 1.0);
  // Two servers at 15 W NIC draw, always counted as active.
  CHECK(with.active_power_w == Catch::Approx(without.active_power_w + 30.0));
  CHECK(with.active_nodes == without.active_nodes + 2);
  CHECK(with.idle_nodes == without.idle_nodes);
  CHECK(with.energy_j == Catch::Approx(without.energy_j + 30.0));
}

TEST_CASE("activation threshold sits at one half") {
  EnergyFixture fx;
  fx.x[static_cast<size_t>(fx.u_of("s0"))] = 0.5;   // counts as active
  fx.x[static_cast<size_t>(fx.u_of("s1"))] = 0.49;  // counts as idle
  const EnergyBreakdown e = energy(fx.t, fx.stage2, fx.x, 1.0);
  CHECK(e.active_nodes == 1);
  CHECK(e.idle_nodes == 1);
}

TEST_CASE("energy rejects solutions from the wrong model") {
  EnergyFixture fx;

  // Stage-1 bundle: right topology, wrong stage.
  const ModelBundle s1 = build_stage1(fx.t, fx.d);
  std::vector<double> x1(s1.model.vars.size(), 0.0);
  CHECK_THROWS_AS(energy(fx.t, s1, x1, 1.0), ModelMismatchError);

  // Model built against a different topology.
  const Topology other = testutil::line_topology();
  CHECK_THROWS_AS(energy(other, fx.stage2, fx.x, 1.0), ModelMismatchError);

  // Solution vector of the wrong length.
  std::vector<double> shorty(fx.x.begin(), fx.x.end() - 1);
  CHECK_THROWS_AS(energy(fx.t, fx.stage2, shorty, 1.0), ModelMismatchError);

  // Non-finite or negative durations are caller bugs.
  CHECK_THROWS_AS(energy(fx.t, fx.stage2, fx.x, -1.0), DomainError);
  CHECK_THROWS_AS(energy(fx.t, fx.stage2, fx.x, kInf), DomainError);
}
