#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "mhres/instance_io.hpp"
#include "mhres/scengen.hpp"
#include "support/builders.hpp"

using namespace mhres;

namespace {

// skeleton with just enough structure for the supply-window operations:
// one stage with the given period lengths, two operational scenarios
Instance scheduleSkeleton(const std::vector<int>& hours, std::vector<int> window, int durationHours) {
  Instance inst;
  Stage st;
  st.index = 1;
  st.days = 1;
  for (int h : hours) st.periods.push_back({h, false});
  st.scenarios = Stage::uniformScenarios(2, static_cast<int>(hours.size()));
  inst.tree.stages.push_back(st);
  inst.tree.nodes.push_back({0, 1, -1, Rat(1), {}});
  inst.tree.finalize();
  DeferrableLoad d;
  d.name = "d0";
  std::sort(window.begin(), window.end());
  d.window = {window};
  d.refStart = {window.empty() ? 1 : window.front()};
  d.hourlyKw = {1.0};
  d.durationHours = {durationHours};
  d.discomfort = {std::vector<double>(hours.size(), 0.0)};
  inst.loads.deferrable.push_back(d);
  return inst;
}

std::string tempPath(const std::string& name) {
  return std::string("/tmp/mhres_test_") + name;
}

}  // namespace

TEST_CASE("supply periods accumulate hours from the start period") {
  auto one = scheduleSkeleton({1, 1, 1, 1, 20}, {1, 2, 3}, 3);
  CHECK(one.supplyPeriods(0, 1, 1) == 3);
  auto two = scheduleSkeleton({2, 2, 2, 18}, {1, 2, 3}, 3);
  CHECK(two.supplyPeriods(0, 1, 1) == 2);
  auto tail = scheduleSkeleton({22, 1, 1}, {2, 3}, 3);
  CHECK_FALSE(tail.supplyPeriods(0, 1, 2).has_value());
}

TEST_CASE("supply periods are monotone in the requirement") {
  auto inst = scheduleSkeleton({2, 3, 4, 15}, {1, 2, 3, 4}, 1);
  int prev = 1;
  for (int need = 1; need <= 9; ++need) {
    inst.loads.deferrable[0].durationHours = {need};
    auto m2 = inst.supplyPeriods(0, 1, 1);
    REQUIRE(m2.has_value());
    CHECK(*m2 >= prev);
    prev = *m2;
  }
}

TEST_CASE("feasible starts drop windows that cannot complete") {
  auto inst = scheduleSkeleton({6, 6, 6, 6}, {2, 3, 4}, 12);
  CHECK(inst.feasibleStarts(0, 1) == std::vector<int>{2, 3});
}

TEST_CASE("supply window set collects the starts that cover a node") {
  // duration spans two 6h periods; window {1,2,3}
  auto inst = scheduleSkeleton({6, 6, 6, 6}, {1, 2, 3}, 12);
  const Stage& st = inst.tree.stage(1);
  SECTION("node at period 3 in scenario 1 sees starts 2 and 3") {
    auto got = inst.supplyWindowSet(0, 1, st.opNode(1, 3));
    CHECK(got == std::vector<int>{st.opNode(1, 2), st.opNode(1, 3)});
  }
  SECTION("all returned nodes stay in the scenario of the query node") {
    for (int s = 0; s < 2; ++s)
      for (int t = 1; t <= 4; ++t)
        for (int q : inst.supplyWindowSet(0, 1, st.opNode(s, t))) CHECK(q / st.numPeriods() == s);
  }
  SECTION("query node itself is included when it is a feasible start") {
    auto got = inst.supplyWindowSet(0, 1, st.opNode(0, 2));
    CHECK(std::find(got.begin(), got.end(), st.opNode(0, 2)) != got.end());
  }
  SECTION("node before the window sees no starts") {
    auto late = scheduleSkeleton({6, 6, 6, 6}, {2, 3}, 6);
    CHECK(late.supplyWindowSet(0, 1, st.opNode(0, 1)).empty());
  }
}

TEST_CASE("precedence set enumerates admissible follower starts") {
  auto inst = scheduleSkeleton({6, 6, 6, 6}, {1, 2, 3, 4}, 6);
  DeferrableLoad follower = inst.loads.deferrable[0];
  follower.name = "d1";
  inst.loads.deferrable.push_back(follower);
  const Stage& st = inst.tree.stage(1);
  PrecedencePair pr{0, 1, 0};
  SECTION("zero latency: follower may start right after completion") {
    auto got = inst.precedenceSet(pr, 1, st.opNode(0, 1));
    CHECK(got == std::vector<int>{st.opNode(0, 2), st.opNode(0, 3), st.opNode(0, 4)});
  }
  SECTION("late leader start leaves no follower slot") {
    CHECK(inst.precedenceSet(pr, 1, st.opNode(0, 4)).empty());
  }
  SECTION("growing latency shrinks the set") {
    std::size_t prev = 99;
    for (int gap = 0; gap <= 4; ++gap) {
      PrecedencePair g{0, 1, gap};
      auto got = inst.precedenceSet(g, 1, st.opNode(1, 1));
      CHECK(got.size() <= prev);
      prev = got.size();
      for (int q : got) CHECK(q / st.numPeriods() == 1);
    }
  }
}

TEST_CASE("synthetic instances validate and round-trip through JSON") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 11ULL}) {
    Instance inst = syntheticInstance(microDims(seed), seed);
    ValidationReport rep = inst.validate();
    INFO(rep.toString());
    REQUIRE(rep.ok());
    const std::string path = tempPath("roundtrip.json");
    saveInstance(inst, path);
    Instance back = loadInstance(path);
    CHECK(instanceToJson(back).dump() == instanceToJson(inst).dump());
    std::remove(path.c_str());
  }
}

TEST_CASE("small preset matches the published tree shape") {
  Instance inst = syntheticInstance("small", 7);
  CHECK(inst.tree.numStages() == 3);
  CHECK(inst.tree.numNodes() == 13);
  CHECK(inst.tree.numScenarios() == 9);
  CHECK(inst.tree.stage(1).numScenarios() == 10);
  CHECK(inst.tree.stage(1).numPeriods() == 24);
  CHECK(inst.numPv() == 3);
  CHECK(inst.numBess() == 2);
  CHECK(inst.numElastic() == 25);
  CHECK(inst.numDeferrable() == 25);
  CHECK(inst.loads.incompatible.size() == 10);
  CHECK(inst.loads.precedence.size() == 10);
  REQUIRE(inst.validate().ok());
}

TEST_CASE("loader reports missing coverage with the offending index") {
  Instance inst = syntheticInstance(microDims(5), 5);
  const std::string path = tempPath("coverage.json");
  Json j = instanceToJson(inst);
  j["grid"]["import_price"][0][0].erase(j["grid"]["import_price"][0][0].size() - 1);
  {
    std::ofstream out(path);
    out << j.dump();
  }
  try {
    loadInstance(path);
    FAIL("expected a coverage error");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("import_price") != std::string::npos);
    CHECK(what.find("coverage") != std::string::npos);
    CHECK(what.find("stage 1 scenario 0") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("loader rejects expected excess above max excess") {
  Instance inst = syntheticInstance(microDims(6), 6);
  const std::string path = tempPath("sdprofile.json");
  Json j = instanceToJson(inst);
  j["discomfort"]["profiles"][0][0]["expected_excess"] = 0.5;
  j["discomfort"]["profiles"][0][0]["max_excess"] = 0.25;
  {
    std::ofstream out(path);
    out << j.dump();
  }
  CHECK_THROWS_WITH(loadInstance(path), Catch::Matchers::ContainsSubstring("expected excess exceeds max excess"));
  std::remove(path.c_str());
}

TEST_CASE("loader rejects files without the schema tag") {
  const std::string path = tempPath("noschema.json");
  {
    std::ofstream out(path);
    out << "{}";
  }
  CHECK_THROWS_WITH(loadInstance(path), Catch::Matchers::ContainsSubstring("schema"));
  std::remove(path.c_str());
}

TEST_CASE("generation is deterministic per seed") {
  Instance a = syntheticInstance(microDims(9), 9);
  Instance b = syntheticInstance(microDims(9), 9);
  Instance c = syntheticInstance(microDims(10), 10);
  CHECK(instanceToJson(a).dump() == instanceToJson(b).dump());
  CHECK(instanceToJson(a).dump() != instanceToJson(c).dump());
}
