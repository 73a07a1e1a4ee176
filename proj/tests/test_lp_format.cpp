#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "shuffleopt/lp_format.hpp"
#include "shuffleopt/lpsolve.hpp"
#include "shuffleopt/optmodel.hpp"
#include "test_util.hpp"

using namespace shuffleopt;

TEST_CASE("stage-1 model survives a write/parse cycle semantically") {
  const Topology t = testutil::line_topology(500.0);
  const DemandSet d = testutil::single_demand(t, "a", "b", 500.0);
  const ModelBundle b = build_stage1(t, d);

  const std::string text = write_lp(b.model);
  const OptModel back = parse_lp(text);

  REQUIRE(back.vars.size() == b.model.vars.size());
  REQUIRE(back.rows.size() == b.model.rows.size());

  const LpResult orig = solve_lp(b.model);
  const LpResult redo = solve_lp(back);
  REQUIRE(orig.status == LpStatus::Optimal);
  REQUIRE(redo.status == LpStatus::Optimal);
  CHECK(redo.objective == Catch::Approx(orig.objective).epsilon(1e-9));
}

TEST_CASE("header comment names the stage and fingerprints") {
  const Topology t = testutil::line_topology();
  const DemandSet d = testutil::single_demand(t, "a", "b", 1000.0);
  const ModelBundle b = build_stage1(t, d);
  const std::string text = write_lp(b.model);
  CHECK(text.find("stage1") != std::string::npos);
  CHECK(text.find(hex64(b.model.topology_fp)) != std::string::npos);
  CHECK(text.find(hex64(b.model.demand_fp)) != std::string::npos);
  // Comments must not leak into parsing.
  CHECK_NOTHROW(parse_lp(text));
}

TEST_CASE("binaries, equalities and free variables round-trip") {
  OptModel m;
  m.sense = ObjSense::Maximize;
  const int a = m.add_var("a", 0, 1, VarKind::Binary);
  const int x = m.add_var("x", -kInf, kInf);
  const int y = m.add_var("y", 0.25, 0.25);
  m.objective = {{a, 5.0}, {x, 1.0}, {y, 2.0}};
  m.add_row("tie", RowSense::EQ, 1.0, {{x, 1.0}, {a, 1.0}});
  m.add_row("cap", RowSense::LE, 2.0, {{x, 1.0}, {y, 4.0}});

  const OptModel back = parse_lp(write_lp(m));
  REQUIRE(back.vars.size() == 3);
  CHECK(back.has_binaries());
  CHECK(back.vars[0].kind == VarKind::Binary);
  CHECK(back.vars[1].lower == -kInf);
  CHECK(back.vars[1].upper == kInf);
  CHECK(back.vars[2].lower == 0.25);
  CHECK(back.vars[2].upper == 0.25);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].sense == RowSense::EQ);
  CHECK(back.rows[1].sense == RowSense::LE);

  const MilpResult orig = solve_milp(m);
  const MilpResult redo = solve_milp(back);
  REQUIRE(orig.status == LpStatus::Optimal);
  REQUIRE(redo.status == LpStatus::Optimal);
  CHECK(redo.objective == Catch::Approx(orig.objective).epsilon(1e-12));
}

TEST_CASE("coefficients keep full precision through the text form") {
  OptModel m;
  m.sense = ObjSense::Minimize;
  const int x = m.add_var("x", 0, kInf);
  const double c = 1.0 / 3.0;
  m.objective = {{x, c}};
  m.add_row("r", RowSense::GE, 1e-7, {{x, 1.0 / 7.0}});
  const OptModel back = parse_lp(write_lp(m));
  REQUIRE(back.objective.size() == 1);
  CHECK(back.objective[0].coef == c);  // exact: %.17g round-trips doubles
  CHECK(back.rows[0].terms[0].coef == 1.0 / 7.0);
  CHECK(back.rows[0].rhs == 1e-7);
}

TEST_CASE("repeated mentions of a variable fold into one term") {
  const OptModel m = parse_lp(
      "Minimize\n obj : + 1 x + 2 x\n"
      "Subject To\n r : + 1 x - 0.5 x >= 2\nEnd\n");
  REQUIRE(m.objective.size() == 1);
  CHECK(m.objective[0].coef == Catch::Approx(3.0));
  REQUIRE(m.rows[0].terms.size() == 1);
  CHECK(m.rows[0].terms[0].coef == Catch::Approx(0.5));
}

TEST_CASE("malformed documents are rejected with parse errors") {
  CHECK_THROWS_AS(parse_lp("hello world"), ParseError);
  // Relation operator inside the objective.
  CHECK_THROWS_AS(parse_lp("Minimize\n obj : + 1 x <= 5\nEnd\n"), ParseError);
  // Constraint without a relation.
  CHECK_THROWS_AS(parse_lp("Minimize\n obj : + 1 x\nSubject To\n c1 : + 1 x\nEnd\n"),
                  ParseError);
  // Stray numeric constant in an expression.
  CHECK_THROWS_AS(parse_lp("Minimize\n obj : + 1 2 x\nEnd\n"), ParseError);
  // Bounds line that is not one of the accepted shapes.
  CHECK_THROWS_AS(
      parse_lp("Minimize\n obj : + 1 x\nBounds\n 1 >= x\nEnd\n"), ParseError);
  // Truncated input: objective label with no ':' and nothing after it.
  CHECK_THROWS_AS(parse_lp("Minimize\n obj"), ParseError);
}

TEST_CASE("constraint names keep row ids and sanitized tags") {
  const Topology t = testutil::line_topology();
  const DemandSet d = testutil::single_demand(t, "a", "b", 1000.0);
  const ModelBundle b = build_stage1(t, d);
  const std::string text = write_lp(b.model);
  // Tags like "cap:a0" are written colon-free but still recognizable.
  CHECK(text.find("cap_a0") != std::string::npos);
  CHECK(text.find(':') != std::string::npos);  // name/expression separators stay
}

TEST_CASE("save and load go through the filesystem") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "shuffleopt_lp_test";
  fs::create_directories(dir);
  const fs::path file = dir / "model.lp";

  const Topology t = testutil::parallel_topology(250.0);
  const DemandSet d = testutil::single_demand(t, "a", "b", 1000.0);
  const ModelBundle b = build_stage1(t, d);
  save_lp(b.model, file.string());

  const OptModel back = load_lp(file.string());
  const LpResult orig = solve_lp(b.model);
  const LpResult redo = solve_lp(back);
  REQUIRE(orig.status == LpStatus::Optimal);
  CHECK(redo.objective == Catch::Approx(orig.objective).epsilon(1e-9));

  CHECK_THROWS_AS(load_lp((dir / "missing.lp").string()), IoError);
  CHECK_THROWS_AS(save_lp(b.model, (dir / "no" / "such" / "dir.lp").string()), IoError);
  fs::remove_all(dir);
}
