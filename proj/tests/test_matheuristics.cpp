#include <catch2/catch_amalgamated.hpp>

#include "mhres/matheuristics.hpp"
#include "mhres/scengen.hpp"

using namespace mhres;

namespace {

double monolithic(const Instance& inst, Variant v) {
  BuiltModel bm = buildModel(inst, v);
  SolveOutcome out = solve(bm.milp);
  REQUIRE(out.status == SolveStatus::Optimal);
  return out.objective;
}

SyntheticDims deskDims(std::uint64_t seed) {
  SyntheticDims d = microDims(seed);
  d.stages = 3;
  d.branching = 2;
  return d;
}

}  // namespace

TEST_CASE("sfr3 with the full horizon reproduces the monolithic optimum") {
  Instance inst = syntheticInstance(deskDims(1), 1);
  for (Variant v : {Variant::NoD, Variant::RN, Variant::SD}) {
    const double zStar = monolithic(inst, v);
    Sfr3Params params = Sfr3Params::multistageMyopic(inst.tree.numStages());
    HeuristicRun run = sfr3(inst, v, params);
    CHECK_THAT(run.cost, Catch::Matchers::WithinRel(zStar, 1e-6));
    CHECK(run.log.size() == 1);
  }
}

TEST_CASE("weak myopic runs are feasible and bounded below by the optimum") {
  for (std::uint64_t seed : {2ULL, 3ULL}) {
    Instance inst = syntheticInstance(deskDims(seed), seed);
    const double zStar = monolithic(inst, Variant::NoD);
    HeuristicRun run = sfr3(inst, Variant::NoD, Sfr3Params::weakMyopic());
    CHECK(run.cost >= zStar - 1e-6 * std::abs(zStar));
    auto audit = checkFeasibility(inst, run.solution, Variant::NoD);
    INFO(audit.toString());
    CHECK(audit.pass());
    // one subproblem per strategic node of each visited stage
    std::size_t expected = 0;
    for (int e = 1; e <= inst.tree.numStages(); ++e) expected += inst.tree.stageNodes(e).size();
    CHECK(run.log.size() == expected);
  }
}

TEST_CASE("full probabilistic selection reproduces the full node set") {
  Instance inst = syntheticInstance(deskDims(4), 4);
  const int E = inst.tree.numStages();
  const double zStar = monolithic(inst, Variant::NoD);
  Sfr3Params params = Sfr3Params::relaxedHorizon(1, E - 1, 1.0, 5);
  HeuristicRun run = sfr3(inst, Variant::NoD, params);
  // with phi = 1 the first subproblem contains every node, so its solution is
  // already optimal and the later fixings keep it
  CHECK_THAT(run.cost, Catch::Matchers::WithinRel(zStar, 1e-6));
  CHECK(run.log.front().nodes == inst.tree.numNodes());
}

TEST_CASE("sfr3 is deterministic in the seed") {
  Instance inst = syntheticInstance(deskDims(5), 5);
  Sfr3Params params = Sfr3Params::relaxedHorizon(1, 1, 0.4, 77);
  HeuristicRun a = sfr3(inst, Variant::NoD, params);
  HeuristicRun b = sfr3(inst, Variant::NoD, params);
  CHECK(a.cost == b.cost);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].nodes == b.log[i].nodes);
    CHECK(a.log[i].root == b.log[i].root);
  }
}

TEST_CASE("relaxed strategies audit clean on the risk-averse variant") {
  Instance inst = syntheticInstance(deskDims(6), 6);
  HeuristicRun run = sfr3(inst, Variant::SD, Sfr3Params::relaxedHorizon(2, 1, 1.0 / 3.0, 9));
  auto audit = checkFeasibility(inst, run.solution, Variant::SD);
  INFO(audit.toString());
  CHECK(audit.pass());
  const double zStar = monolithic(inst, Variant::SD);
  CHECK(run.cost >= zStar - 1e-6 * std::abs(zStar));
}

TEST_CASE("parameter validation rejects broken strategies") {
  Instance inst = syntheticInstance(microDims(7), 7);
  CHECK_THROWS_AS(sfr3(inst, Variant::NoD, Sfr3Params{0, 0, {}, 0}), UsageError);
  CHECK_THROWS_AS(sfr3(inst, Variant::NoD, Sfr3Params{9, 0, {}, 0}), UsageError);
  CHECK_THROWS_AS(sfr3(inst, Variant::NoD, Sfr3Params{1, 1, {}, 0}), UsageError);
  CHECK_THROWS_AS(sfr3(inst, Variant::NoD, Sfr3Params{1, 1, {1.5}, 0}), UsageError);
}

TEST_CASE("srh on a two-stage instance equals the monolithic solve") {
  Instance inst = syntheticInstance(microDims(8), 8);
  REQUIRE(inst.tree.numStages() == 2);
  const double zStar = monolithic(inst, Variant::NoD);
  HeuristicRun run = srh(inst, Variant::NoD);
  CHECK_THAT(run.cost, Catch::Matchers::WithinRel(zStar, 1e-6));
  CHECK(run.log.size() == 1);
}

TEST_CASE("srh produces audited feasible solutions above the optimum") {
  for (std::uint64_t seed : {9ULL, 10ULL}) {
    Instance inst = syntheticInstance(deskDims(seed), seed);
    for (Variant v : {Variant::NoD, Variant::SD}) {
      const double zStar = monolithic(inst, v);
      HeuristicRun run = srh(inst, v);
      CHECK(run.cost >= zStar - 1e-6 * std::abs(zStar));
      auto audit = checkFeasibility(inst, run.solution, v);
      INFO(audit.toString());
      CHECK(audit.pass());
    }
  }
}

TEST_CASE("deterministic instance: srh, sfr3 and the monolithic solve coincide") {
  SyntheticDims d = microDims(11);
  d.stages = 3;
  d.branching = 1;
  Instance inst = syntheticInstance(d, 11);
  const double zStar = monolithic(inst, Variant::NoD);
  HeuristicRun viaSrh = srh(inst, Variant::NoD);
  HeuristicRun viaSfr3 = sfr3(inst, Variant::NoD, Sfr3Params::weakMyopic());
  CHECK_THAT(viaSrh.cost, Catch::Matchers::WithinRel(zStar, 1e-6));
  CHECK_THAT(viaSfr3.cost, Catch::Matchers::WithinRel(zStar, 1e-6));
}

TEST_CASE("comparison table reports ratios against the benchmark") {
  auto rows = compareRuns({{"sfr3", 20912766.0, 2367.0}, {"srh", 21285417.0, 20301.0}}, 20902001.0);
  REQUIRE(rows.size() == 2);
  CHECK_THAT(rows[0].goodnessRatio, Catch::Matchers::WithinAbs(0.982, 5e-4));
  CHECK_THAT(rows[0].timeRatio, Catch::Matchers::WithinAbs(0.117, 5e-4));
  CHECK_THAT(rows[1].goodnessRatio, Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(rows[0].gap > 0);
  auto equalCosts = compareRuns({{"a", 5.0, 1.0}, {"b", 5.0, 2.0}}, 5.0);
  CHECK_THAT(equalCosts[0].goodnessRatio, Catch::Matchers::WithinAbs(1.0, 1e-12));
}
