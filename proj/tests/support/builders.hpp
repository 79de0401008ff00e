#ifndef MHRES_TESTS_BUILDERS_HPP
#define MHRES_TESTS_BUILDERS_HPP

#include "mhres/tree.hpp"

namespace mhres::testing {

inline Stage makeStage(int index, long days, int numPeriods, int numScen) {
  Stage st;
  st.index = index;
  st.days = days;
  if (24 % numPeriods != 0) throw Error("makeStage: periods must divide 24");
  for (int t = 0; t < numPeriods; ++t) st.periods.push_back({24 / numPeriods, false});
  st.scenarios = Stage::uniformScenarios(numScen, numPeriods);
  return st;
}

// Balanced tree: every non-terminal node has `branching` children with equal
// conditional probability.
inline MultiHorizonTree makeBalancedTree(int numStages, int branching, long days = 1, int numPeriods = 2,
                                         int numScen = 1) {
  MultiHorizonTree tree;
  for (int e = 1; e <= numStages; ++e) tree.stages.push_back(makeStage(e, days, numPeriods, numScen));
  tree.nodes.push_back({0, 1, -1, Rat(1), {}});
  int firstOfPrev = 0;
  int countPrev = 1;
  for (int e = 2; e <= numStages; ++e) {
    int firstOfThis = static_cast<int>(tree.nodes.size());
    for (int p = 0; p < countPrev; ++p) {
      int parent = firstOfPrev + p;
      for (int c = 0; c < branching; ++c) {
        StrategicNode n;
        n.id = static_cast<int>(tree.nodes.size());
        n.stage = e;
        n.parent = parent;
        n.weight = tree.nodes[static_cast<std::size_t>(parent)].weight / branching;
        tree.nodes.push_back(std::move(n));
      }
    }
    firstOfPrev = firstOfThis;
    countPrev *= branching;
  }
  tree.finalize();
  return tree;
}

// The 4-stage example tree used for cluster partitioning: 13 nodes below the
// root, 7 scenarios, stage-3 subtrees with 2/1/1/3 leaves.
inline MultiHorizonTree makeClusterExampleTree() {
  MultiHorizonTree tree;
  for (int e = 1; e <= 4; ++e) tree.stages.push_back(makeStage(e, 1, 2, 1));
  auto add = [&tree](int id, int stage, int parent, Rat w) {
    tree.nodes.push_back({id, stage, parent, w, {}});
  };
  add(0, 1, -1, Rat(1));
  add(1, 2, 0, Rat(1, 2));
  add(2, 2, 0, Rat(1, 2));
  add(3, 3, 1, Rat(1, 4));
  add(4, 3, 1, Rat(1, 4));
  add(5, 3, 2, Rat(1, 4));
  add(6, 3, 2, Rat(1, 4));
  add(7, 4, 3, Rat(1, 8));
  add(8, 4, 3, Rat(1, 8));
  add(9, 4, 4, Rat(1, 4));
  add(10, 4, 5, Rat(1, 4));
  add(11, 4, 6, Rat(1, 12));
  add(12, 4, 6, Rat(1, 12));
  add(13, 4, 6, Rat(1, 12));
  tree.finalize();
  return tree;
}

}  // namespace mhres::testing

#endif
