#include <catch2/catch_amalgamated.hpp>

#include "mhres/audit.hpp"
#include "mhres/model.hpp"
#include "mhres/scengen.hpp"
#include "mhres/solve.hpp"
#include "support/builders.hpp"
#include "support/oracle.hpp"

using namespace mhres;
using mhres::testing::enumerationOracle;

namespace {

Solution solveToSolution(const Instance& inst, Variant variant, const NodeSubset* subset = nullptr,
                         const Fixings* fixings = nullptr, double* objective = nullptr) {
  BuiltModel bm = buildModel(inst, variant, subset, fixings);
  SolveOutcome out = solve(bm.milp);
  REQUIRE(out.status == SolveStatus::Optimal);
  Solution sol = makeEmptySolution(inst, variant);
  extractSolution(inst, bm, out.values, sol);
  if (objective) *objective = out.objective;
  return sol;
}

// one strategic node, one scenario, single 1-hour period, unit load; the only
// source is the grid at 0.30 per kWh
Instance gridOnlyMicro() {
  Instance inst;
  Stage st;
  st.index = 1;
  st.days = 1;
  st.periods = {{1, false}};
  st.scenarios = Stage::uniformScenarios(1, 1);
  inst.tree.stages.push_back(st);
  inst.tree.nodes.push_back({0, 1, -1, Rat(1), {}});
  inst.tree.finalize();
  inst.limits = {0, 0, 0, 0, {1000.0}};
  inst.loads.baseLoad = {{{1.0}}};
  inst.grid.importPrice = {{{0.3}}};
  inst.grid.exportPrice = {{{0.0}}};
  inst.discomfort.expectedCap = {10.0};
  inst.discomfort.profiles = {{}};
  inst.meta.name = "grid-only";
  return inst;
}

}  // namespace

TEST_CASE("empty micro instance solves to zero with no investment") {
  Instance inst = gridOnlyMicro();
  inst.loads.baseLoad = {{{0.0}}};
  double obj = 0;
  Solution sol = solveToSolution(inst, Variant::NoD, nullptr, nullptr, &obj);
  CHECK_THAT(obj, Catch::Matchers::WithinAbs(0.0, 1e-9));
  CHECK_THAT(evaluateCost(inst, sol).total(), Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("grid-only micro instance costs import price times load") {
  Instance inst = gridOnlyMicro();
  double obj = 0;
  Solution sol = solveToSolution(inst, Variant::NoD, nullptr, nullptr, &obj);
  CHECK_THAT(obj, Catch::Matchers::WithinAbs(0.3, 1e-9));
  CHECK_THAT(evaluateCost(inst, sol).total(), Catch::Matchers::WithinAbs(0.3, 1e-9));
  auto rep = checkFeasibility(inst, sol, Variant::NoD);
  INFO(rep.toString());
  CHECK(rep.pass());
}

TEST_CASE("residual value enters the objective at terminal nodes only") {
  // two stages, single branch; force one panel at the leaf and check that the
  // terminal residual is subtracted with the leaf weight
  Instance inst = syntheticInstance(microDims(21), 21);
  // pin a deterministic tree shape for the arithmetic below
  SyntheticDims d = microDims(21);
  REQUIRE(inst.tree.numStages() == 2);
  const int leaf = inst.tree.leafNodes().front();
  Solution zero = makeEmptySolution(inst, Variant::NoD);
  for (auto& f : zero.filled) f = 1;
  CostBreakdown base = evaluateCost(inst, zero);
  Solution invested = zero;
  // one panel installed at the leaf (not at the root)
  for (int n : {leaf}) {
    invested.nodes[static_cast<std::size_t>(n)].x[0] = 1;
    invested.nodes[static_cast<std::size_t>(n)].al[0] = 1;
    invested.nodes[static_cast<std::size_t>(n)].xt[0] = 1;
  }
  CostBreakdown with = evaluateCost(inst, invested);
  const double w = toDouble(inst.tree.nodes[static_cast<std::size_t>(leaf)].weight);
  const std::size_t li = static_cast<std::size_t>(leaf);
  CHECK_THAT(with.residual - base.residual,
             Catch::Matchers::WithinRel(w * inst.pv[0].residualValue[li], 1e-12));
}

TEST_CASE("monolithic optimum matches the exhaustive enumeration oracle") {
  for (std::uint64_t seed : {1ULL, 4ULL, 7ULL}) {
    Instance inst = syntheticInstance(microDims(seed), seed);
    double obj = 0;
    solveToSolution(inst, Variant::NoD, nullptr, nullptr, &obj);
    auto oracle = enumerationOracle(inst);
    INFO("seed " << seed << ": " << oracle.combos << " combos, " << oracle.lpSolves << " LPs");
    REQUIRE(oracle.feasible);
    CHECK_THAT(obj, Catch::Matchers::WithinRel(oracle.objective, 1e-6));
  }
}

TEST_CASE("variant costs are ordered by nesting of the feasible regions") {
  for (std::uint64_t seed : {2ULL, 5ULL}) {
    Instance inst = syntheticInstance(microDims(seed), seed);
    double zNoD = 0, zRN = 0, zSD = 0;
    solveToSolution(inst, Variant::NoD, nullptr, nullptr, &zNoD);
    solveToSolution(inst, Variant::RN, nullptr, nullptr, &zRN);
    solveToSolution(inst, Variant::SD, nullptr, nullptr, &zSD);
    CHECK(zNoD <= zRN + 1e-9);
    CHECK(zRN <= zSD + 1e-9);
  }
}

TEST_CASE("objective parity between the solver and the independent evaluator") {
  for (std::uint64_t seed : {3ULL, 6ULL}) {
    Instance inst = syntheticInstance(microDims(seed), seed);
    for (Variant v : {Variant::NoD, Variant::RN, Variant::SD}) {
      double obj = 0;
      Solution sol = solveToSolution(inst, v, nullptr, nullptr, &obj);
      const double evald = evaluateCost(inst, sol).total();
      CHECK_THAT(evald, Catch::Matchers::WithinRel(obj, 1e-6));
      auto rep = checkFeasibility(inst, sol, v);
      INFO(rep.toString());
      CHECK(rep.pass());
    }
  }
}

TEST_CASE("battery levels follow the flow balance in optimal solutions") {
  Instance inst = syntheticInstance(microDims(8), 8);
  Solution sol = solveToSolution(inst, Variant::NoD);
  const MultiHorizonTree& tree = inst.tree;
  for (int n = 0; n < tree.numNodes(); ++n) {
    const Stage& st = tree.stageOf(n);
    const double fl = inst.bess[0].lossFactor[static_cast<std::size_t>(st.index - 1)];
    const NodeSolution& ns = sol.nodes[static_cast<std::size_t>(n)];
    for (int s = 0; s < st.numScenarios(); ++s)
      for (int t = 2; t <= st.numPeriods(); ++t) {
        const std::size_t q = static_cast<std::size_t>(st.opNode(s, t));
        const std::size_t qa = static_cast<std::size_t>(st.opNode(s, t - 1));
        const double expect =
            (1 - fl) * ns.y[0][qa] + st.hours(t) * (ns.yp[0][q] - ns.ym[0][q]);
        CHECK_THAT(ns.y[0][q], Catch::Matchers::WithinAbs(expect, 1e-6));
      }
  }
}

TEST_CASE("tactical carry-over holds with the day-count weighting") {
  SyntheticDims d = microDims(12);
  d.days = 3;
  Instance inst = syntheticInstance(d, 12);
  Solution sol = solveToSolution(inst, Variant::NoD);
  const MultiHorizonTree& tree = inst.tree;
  for (int n = 1; n < tree.numNodes(); ++n) {
    const Stage& st = tree.stageOf(n);
    const int parent = tree.nodes[static_cast<std::size_t>(n)].parent;
    const Stage& pst = tree.stageOf(parent);
    const double fl = inst.bess[0].lossFactor[static_cast<std::size_t>(st.index - 1)];
    const double flPrev = inst.bess[0].lossFactor[static_cast<std::size_t>(pst.index - 1)];
    const NodeSolution& ns = sol.nodes[static_cast<std::size_t>(n)];
    const NodeSolution& ps = sol.nodes[static_cast<std::size_t>(parent)];
    double carry = 0;
    for (int sp = 0; sp < pst.numScenarios(); ++sp)
      carry += toDouble(pst.scenarios[static_cast<std::size_t>(sp)].prob) * (1 - flPrev) *
               ps.y[0][static_cast<std::size_t>(pst.opNode(sp, pst.lastPeriod()))];
    carry /= static_cast<double>(st.days);
    const double rest = (static_cast<double>(st.days) - 1) / static_cast<double>(st.days);
    for (int sp = 0; sp < st.numScenarios(); ++sp)
      carry += rest * toDouble(st.scenarios[static_cast<std::size_t>(sp)].prob) * (1 - fl) *
               ns.y[0][static_cast<std::size_t>(st.opNode(sp, st.lastPeriod()))];
    for (int s = 0; s < st.numScenarios(); ++s) {
      const std::size_t q = static_cast<std::size_t>(st.opNode(s, 1));
      CHECK_THAT(ns.y[0][q],
                 Catch::Matchers::WithinAbs(carry + st.hours(1) * (ns.yp[0][q] - ns.ym[0][q]), 1e-6));
    }
  }
}

TEST_CASE("deferrable loads start exactly once and cover their duration") {
  Instance inst = syntheticInstance(microDims(1), 1);
  REQUIRE(inst.numDeferrable() >= 1);
  Solution sol = solveToSolution(inst, Variant::NoD);
  for (int n = 0; n < inst.tree.numNodes(); ++n) {
    const Stage& st = inst.tree.stageOf(n);
    for (int k = 0; k < inst.numDeferrable(); ++k)
      for (int s = 0; s < st.numScenarios(); ++s) {
        double total = 0;
        for (int t : inst.feasibleStarts(k, st.index))
          total += sol.nodes[static_cast<std::size_t>(n)].de[static_cast<std::size_t>(k)]
                                                            [static_cast<std::size_t>(st.opNode(s, t))];
        CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-9));
      }
  }
}

TEST_CASE("model statistics are populated") {
  Instance inst = syntheticInstance(microDims(2), 2);
  BuiltModel bm = buildModel(inst, Variant::SD);
  auto stats = bm.milp.stats();
  CHECK(stats.numVars > 0);
  CHECK(stats.numBinary > 0);
  CHECK(stats.numInteger > 0);
  CHECK(stats.numConstraints > 0);
  CHECK(stats.numNonzeros > static_cast<long>(stats.numConstraints));
  CHECK(stats.toString().find("constraints") != std::string::npos);
}

TEST_CASE("subsets must contain predecessors") {
  Instance inst = syntheticInstance(microDims(3), 3);
  REQUIRE(inst.tree.numNodes() >= 2);
  NodeSubset bad;
  bad.nodes = {inst.tree.leafNodes().front()};
  CHECK_THROWS_WITH(buildModel(inst, Variant::NoD, &bad), Catch::Matchers::ContainsSubstring("closure"));
}

TEST_CASE("fixings outside variable bounds are rejected before solving") {
  Instance inst = syntheticInstance(microDims(3), 3);
  Fixings fx{{names::xt(0, 0), inst.pv[0].maxPanels + 5.0}};
  CHECK_THROWS_WITH(buildModel(inst, Variant::NoD, nullptr, &fx), Catch::Matchers::ContainsSubstring("bounds"));
  Fixings fracture{{names::x(0, 0), 0.5}};
  CHECK_THROWS_WITH(buildModel(inst, Variant::NoD, nullptr, &fracture),
                    Catch::Matchers::ContainsSubstring("fractional"));
}

TEST_CASE("fixing the investment variables pins the plan") {
  Instance inst = syntheticInstance(microDims(4), 4);
  double freeObj = 0;
  Solution sol = solveToSolution(inst, Variant::NoD, nullptr, nullptr, &freeObj);
  std::vector<int> all(static_cast<std::size_t>(inst.tree.numNodes()));
  for (int n = 0; n < inst.tree.numNodes(); ++n) all[static_cast<std::size_t>(n)] = n;
  Fixings fx = fixingsFromSolution(inst, sol, all, true);
  double fixedObj = 0;
  Solution refixed = solveToSolution(inst, Variant::NoD, nullptr, &fx, &fixedObj);
  CHECK_THAT(fixedObj, Catch::Matchers::WithinRel(freeObj, 1e-6));
  for (int n = 0; n < inst.tree.numNodes(); ++n)
    CHECK_THAT(refixed.nodes[static_cast<std::size_t>(n)].xt[0],
               Catch::Matchers::WithinAbs(sol.nodes[static_cast<std::size_t>(n)].xt[0], 1e-9));
}
