#include <catch2/catch_amalgamated.hpp>

#include "mhres/bounds.hpp"
#include "mhres/scengen.hpp"
#include "mhres/solve.hpp"

using namespace mhres;

namespace {

double monolithic(const Instance& inst, Variant v, Solution* solOut = nullptr) {
  BuiltModel bm = buildModel(inst, v);
  SolveOutcome out = solve(bm.milp);
  REQUIRE(out.status == SolveStatus::Optimal);
  if (solOut) {
    *solOut = makeEmptySolution(inst, v);
    extractSolution(inst, bm, out.values, *solOut);
  }
  return out.objective;
}

SyntheticDims deskDims(std::uint64_t seed) {
  SyntheticDims d = microDims(seed);
  d.stages = 3;
  d.branching = 2;
  return d;
}

}  // namespace

TEST_CASE("wait-and-see bounds the optimum from below") {
  for (std::uint64_t seed : {1ULL, 2ULL}) {
    Instance inst = syntheticInstance(deskDims(seed), seed);
    const double zStar = monolithic(inst, Variant::NoD);
    BoundReport sws = boundSws(inst, Variant::NoD);
    CHECK(sws.bound <= zStar + 1e-6 * std::abs(zStar));
    double weightSum = 0;
    for (const auto& row : sws.rows) weightSum += row.weight;
    CHECK_THAT(weightSum, Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("wait-and-see equals the optimum on a deterministic instance") {
  SyntheticDims d = microDims(3);
  d.stages = 3;
  d.branching = 1;
  Instance inst = syntheticInstance(d, 3);
  const double zStar = monolithic(inst, Variant::NoD);
  BoundReport sws = boundSws(inst, Variant::NoD);
  CHECK_THAT(sws.bound, Catch::Matchers::WithinRel(zStar, 1e-6));
}

TEST_CASE("grouping bounds interpolate between wait-and-see and the optimum") {
  Instance inst = syntheticInstance(deskDims(4), 4);
  const double zStar = monolithic(inst, Variant::NoD);
  BoundReport sws = boundSws(inst, Variant::NoD);
  const int numScen = inst.tree.numScenarios();

  BoundReport allGroups = boundSmg(inst, Variant::NoD, numScen, 11);
  CHECK_THAT(allGroups.bound, Catch::Matchers::WithinRel(sws.bound, 1e-9));

  BoundReport oneGroup = boundSmg(inst, Variant::NoD, 1, 11);
  CHECK_THAT(oneGroup.bound, Catch::Matchers::WithinRel(zStar, 1e-6));

  for (int g = 2; g < numScen; ++g) {
    BoundReport rep = boundSmg(inst, Variant::NoD, g, 11);
    CHECK(rep.bound <= zStar + 1e-6 * std::abs(zStar));
    CHECK(rep.bound >= sws.bound - 1e-6 * std::abs(sws.bound) - 1e-9);
  }
}

TEST_CASE("clustering at the last stage equals wait-and-see and tightens as the break stage drops") {
  Instance inst = syntheticInstance(deskDims(5), 5);
  const double zStar = monolithic(inst, Variant::NoD);
  BoundReport sws = boundSws(inst, Variant::NoD);
  const int E = inst.tree.numStages();
  BoundReport last = boundSmc(inst, Variant::NoD, E - 1);
  CHECK_THAT(last.bound, Catch::Matchers::WithinRel(sws.bound, 1e-9));
  double prev = -std::numeric_limits<double>::infinity();
  for (int eStar = E - 1; eStar >= 1; --eStar) {
    BoundReport rep = boundSmc(inst, Variant::NoD, eStar);
    CHECK(rep.bound <= zStar + 1e-6 * std::abs(zStar));
    CHECK(rep.bound >= prev - 1e-6 * std::abs(prev) - 1e-9);
    prev = rep.bound;
  }
}

TEST_CASE("expected-value bounds collapse correctly") {
  SECTION("deterministic instance: EV model equals the true model") {
    SyntheticDims d = microDims(6);
    d.branching = 1;
    d.opScenarios = 1;
    Instance inst = syntheticInstance(d, 6);
    const double zStar = monolithic(inst, Variant::NoD);
    CHECK_THAT(boundMhev(inst, Variant::NoD).bound, Catch::Matchers::WithinRel(zStar, 1e-6));
  }
  SECTION("single strategic scenario: operational collapse equals full collapse") {
    SyntheticDims d = microDims(7);
    d.branching = 1;
    d.opScenarios = 2;
    Instance inst = syntheticInstance(d, 7);
    CHECK_THAT(boundMhoev(inst, Variant::NoD).bound,
               Catch::Matchers::WithinRel(boundMhev(inst, Variant::NoD).bound, 1e-6));
  }
  SECTION("risk-averse variant is rejected") {
    Instance inst = syntheticInstance(microDims(8), 8);
    CHECK_THROWS_AS(boundMhev(inst, Variant::SD), UsageError);
    CHECK_THROWS_AS(boundMhoev(inst, Variant::SD), UsageError);
  }
  SECTION("averaging branches: EV uses the mean cost trajectory") {
    SyntheticDims d = microDims(9);
    d.branching = 2;
    Instance inst = syntheticInstance(d, 9);
    const double base = inst.pv[0].unitCost[0];
    auto kids = inst.tree.nodes[0].children;
    REQUIRE(kids.size() == 2);
    inst.pv[0].unitCost[static_cast<std::size_t>(kids[0])] = 0.8 * base;
    inst.pv[0].unitCost[static_cast<std::size_t>(kids[1])] = 1.2 * base;
    Instance ev = collapseStrategic(collapseOperational(inst));
    CHECK_THAT(ev.pv[0].unitCost[1], Catch::Matchers::WithinRel(base, 1e-12));
  }
}

TEST_CASE("expected-value bounds stay below the optimum on desk instances") {
  int holds = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Instance inst = syntheticInstance(deskDims(seed), seed);
    const double zStar = monolithic(inst, Variant::NoD);
    ++total;
    const double mhev = boundMhev(inst, Variant::NoD).bound;
    const double mhoev = boundMhoev(inst, Variant::NoD).bound;
    if (mhev <= zStar + 1e-6 * std::abs(zStar) && mhoev <= zStar + 1e-6 * std::abs(zStar)) ++holds;
    // the EV collapse carries no lower-bound guarantee for MILPs; flag only
    if (mhev > zStar + 1e-6 * std::abs(zStar))
      WARN("mhev above the optimum on seed " << seed << ": " << mhev << " vs " << zStar);
  }
  CHECK(holds >= total - 1);
}

TEST_CASE("subproblem weights recombine exactly") {
  Instance inst = syntheticInstance(deskDims(10), 10);
  for (const BoundReport& rep :
       {boundSws(inst, Variant::NoD), boundSmg(inst, Variant::NoD, 2, 3), boundSmc(inst, Variant::NoD, 1)}) {
    double w = 0, comb = 0;
    for (const auto& row : rep.rows) {
      w += row.weight;
      comb += row.weight * row.bound;
    }
    CHECK_THAT(w, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(comb, Catch::Matchers::WithinRel(rep.bound, 1e-12));
  }
}

TEST_CASE("parallel bound evaluation matches the sequential result") {
  Instance inst = syntheticInstance(deskDims(11), 11);
  BoundReport seq = boundSws(inst, Variant::NoD, {}, 1);
  BoundReport par = boundSws(inst, Variant::NoD, {}, 2);
  CHECK_THAT(par.bound, Catch::Matchers::WithinRel(seq.bound, 1e-9));
  REQUIRE(par.rows.size() == seq.rows.size());
  for (std::size_t i = 0; i < seq.rows.size(); ++i) CHECK(par.rows[i].label == seq.rows[i].label);
}

TEST_CASE("value of the strategic decision") {
  SECTION("deterministic instance: no loss, unit goodness ratio") {
    SyntheticDims d = microDims(12);
    d.branching = 1;
    d.opScenarios = 1;
    Instance inst = syntheticInstance(d, 12);
    Solution sol;
    monolithic(inst, Variant::NoD, &sol);
    VsdResult res = valueOfStrategicDecision(inst, Variant::NoD, sol);
    REQUIRE_FALSE(res.evDesignInfeasible);
    CHECK_THAT(res.vsd, Catch::Matchers::WithinAbs(0.0, 1e-5));
    CHECK_THAT(res.goodnessRatio, Catch::Matchers::WithinAbs(1.0, 1e-6));
  }
  SECTION("pinning the EV plan cannot beat the true optimum") {
    for (std::uint64_t seed : {13ULL, 14ULL}) {
      Instance inst = syntheticInstance(deskDims(seed), seed);
      Solution sol;
      const double zStar = monolithic(inst, Variant::NoD, &sol);
      VsdResult res = valueOfStrategicDecision(inst, Variant::NoD, sol);
      if (res.evDesignInfeasible) {
        WARN("EV design infeasible under uncertainty on seed " << seed);
        continue;
      }
      CHECK(res.zStrategicEv >= zStar - 1e-6 * std::abs(zStar));
      CHECK(res.vsd >= -1e-6 * std::abs(zStar));
    }
  }
}
