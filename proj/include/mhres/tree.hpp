#ifndef MHRES_TREE_HPP
#define MHRES_TREE_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mhres/common.hpp"
#include "mhres/rational.hpp"

namespace mhres {

// One block of consecutive hours within the representative day of a stage.
// Periods are numbered 1..T within the day.
struct DailyPeriod {
  int hours = 1;
  bool pv = false;  // true if PV generation is possible in this period
};

struct OpScenario {
  Rat prob{0};
  std::vector<int> periods;  // normally 1..T; kept explicit so that coverage
                             // defects in input data are representable
};

struct Stage {
  int index = 0;  // 1-based stage number e
  long days = 1;  // d_e
  std::vector<DailyPeriod> periods;
  std::vector<OpScenario> scenarios;

  int numPeriods() const { return static_cast<int>(periods.size()); }
  int numScenarios() const { return static_cast<int>(scenarios.size()); }
  int firstPeriod() const { return 1; }
  int lastPeriod() const { return numPeriods(); }
  int hours(int t) const { return periods[static_cast<std::size_t>(t - 1)].hours; }
  bool isPv(int t) const { return periods[static_cast<std::size_t>(t - 1)].pv; }
  int hoursInDay() const {
    int h = 0;
    for (const auto& p : periods) h += p.hours;
    return h;
  }
  std::vector<int> pvPeriods() const {
    std::vector<int> out;
    for (int t = 1; t <= numPeriods(); ++t)
      if (isPv(t)) out.push_back(t);
    return out;
  }
  // flat operational-node index within the stage
  int opNode(int scen, int period) const { return scen * numPeriods() + (period - 1); }
  int numOpNodes() const { return numScenarios() * numPeriods(); }

  static std::vector<OpScenario> uniformScenarios(int count, int numPeriods) {
    std::vector<OpScenario> out(static_cast<std::size_t>(count));
    for (auto& s : out) {
      s.prob = Rat(1, count);
      for (int t = 1; t <= numPeriods; ++t) s.periods.push_back(t);
    }
    return out;
  }
};

struct StrategicNode {
  int id = 0;
  int stage = 1;
  int parent = -1;  // -1 for the root
  Rat weight{0};
  std::vector<int> children;
};

struct TreeViolation {
  std::string where;
  std::string what;
};

struct ValidationReport {
  std::vector<TreeViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string toString() const {
    std::string out;
    for (const auto& v : violations) out += v.where + ": " + v.what + "\n";
    return out;
  }
};

// Strategic tree plus per-stage operational subtrees. Node ids are dense
// integers assigned breadth-first; the parent map is the canonical encoding.
// Immutable after finalize(); all derived-set queries are pure.
class MultiHorizonTree {
public:
  std::vector<Stage> stages;          // index e-1
  std::vector<StrategicNode> nodes;   // index = node id

  int numStages() const { return static_cast<int>(stages.size()); }
  int numNodes() const { return static_cast<int>(nodes.size()); }
  int numScenarios() const { return static_cast<int>(leaves_.size()); }
  const Stage& stage(int e) const { return stages[static_cast<std::size_t>(e - 1)]; }
  const Stage& stageOf(int n) const { return stage(nodes[static_cast<std::size_t>(n)].stage); }
  const std::vector<int>& stageNodes(int e) const { return stageNodes_[static_cast<std::size_t>(e - 1)]; }
  const std::vector<int>& leafNodes() const { return leaves_; }

  void finalize() {
    const int E = numStages();
    stageNodes_.assign(static_cast<std::size_t>(E), {});
    for (auto& n : nodes) n.children.clear();
    for (const auto& n : nodes) {
      if (n.stage >= 1 && n.stage <= E) stageNodes_[static_cast<std::size_t>(n.stage - 1)].push_back(n.id);
      if (n.parent >= 0 && n.parent < numNodes()) nodes[static_cast<std::size_t>(n.parent)].children.push_back(n.id);
    }
    for (auto& sn : stageNodes_) std::sort(sn.begin(), sn.end());
    for (auto& n : nodes) std::sort(n.children.begin(), n.children.end());
    leaves_ = (E >= 1) ? stageNodes_[static_cast<std::size_t>(E - 1)] : std::vector<int>{};
    nodeScenarios_.assign(static_cast<std::size_t>(numNodes()), {});
    for (int w = 0; w < numScenarios(); ++w) {
      for (int n : scenarioPath(w)) nodeScenarios_[static_cast<std::size_t>(n)].push_back(w);
    }
  }

  bool validId(int n) const { return n >= 0 && n < numNodes(); }

  // All descendants of n, excluding n, in id (hence stage) order.
  std::vector<int> successors(int n) const {
    requireId(n);
    std::vector<int> out;
    std::vector<int> frontier{n};
    while (!frontier.empty()) {
      std::vector<int> next;
      for (int u : frontier)
        for (int c : nodes[static_cast<std::size_t>(u)].children) next.push_back(c);
      std::sort(next.begin(), next.end());
      out.insert(out.end(), next.begin(), next.end());
      frontier = std::move(next);
    }
    return out;
  }

  // Path root -> parent(n); empty for the root.
  std::vector<int> ancestors(int n) const {
    requireId(n);
    std::vector<int> out;
    int u = nodes[static_cast<std::size_t>(n)].parent;
    while (u >= 0) {
      out.push_back(u);
      u = nodes[static_cast<std::size_t>(u)].parent;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  // Scenario w is identified with the w-th leaf in id order.
  int scenarioLeaf(int w) const { return leaves_[static_cast<std::size_t>(w)]; }

  std::vector<int> scenarioPath(int w) const {
    std::vector<int> path = ancestors(scenarioLeaf(w));
    path.push_back(scenarioLeaf(w));
    return path;
  }

  Rat scenarioWeight(int w) const { return nodes[static_cast<std::size_t>(scenarioLeaf(w))].weight; }

  // Scenario ids passing through node n.
  const std::vector<int>& nodeScenarios(int n) const {
    requireId(n);
    return nodeScenarios_[static_cast<std::size_t>(n)];
  }

  // Last-period operational nodes of the parent's subtree, feeding the
  // carry-over balance of non-root node n.
  std::vector<int> tacticalLinks(int n) const {
    requireId(n);
    const StrategicNode& node = nodes[static_cast<std::size_t>(n)];
    if (node.parent < 0) return {};
    const Stage& ps = stageOf(node.parent);
    std::vector<int> out;
    for (int s = 0; s < ps.numScenarios(); ++s) out.push_back(ps.opNode(s, ps.lastPeriod()));
    return out;
  }

  ValidationReport validate() const {
    ValidationReport rep;
    auto flag = [&rep](std::string where, std::string what) {
      rep.violations.push_back({std::move(where), std::move(what)});
    };
    const int E = numStages();
    if (E == 0) {
      flag("tree", "no stages");
      return rep;
    }
    if (numNodes() == 0) {
      flag("tree", "no strategic nodes");
      return rep;
    }
    for (int i = 0; i < numNodes(); ++i) {
      if (nodes[static_cast<std::size_t>(i)].id != i) flag("node " + std::to_string(i), "ids must be dense 0..N-1 in order");
      if (i > 0 && nodes[static_cast<std::size_t>(i)].stage < nodes[static_cast<std::size_t>(i - 1)].stage)
        flag("node " + std::to_string(i), "ids must be assigned breadth-first (stage-by-stage)");
    }
    const StrategicNode& root = nodes[0];
    if (root.parent != -1) flag("node 0", "root must have no ancestor");
    if (root.stage != 1) flag("node 0", "root must be at stage 1");
    for (const auto& n : nodes) {
      if (n.id == 0) continue;
      if (!validId(n.parent)) {
        flag("node " + std::to_string(n.id), "missing ancestor");
        continue;
      }
      const auto& p = nodes[static_cast<std::size_t>(n.parent)];
      if (p.stage != n.stage - 1)
        flag("node " + std::to_string(n.id), "ancestor must be in the previous stage");
      if (n.parent >= n.id) flag("node " + std::to_string(n.id), "ids must increase from ancestor to child");
    }
    for (int e = 1; e <= E; ++e) {
      Rat sum(0);
      for (int n : stageNodes(e)) sum += nodes[static_cast<std::size_t>(n)].weight;
      if (stageNodes(e).empty()) flag("stage " + std::to_string(e), "no strategic nodes");
      if (sum != Rat(1)) flag("stage " + std::to_string(e), "node weights must sum to 1 (got " + ratToString(sum) + ")");
    }
    for (const auto& n : nodes) {
      if (n.weight < Rat(0) || n.weight > Rat(1))
        flag("node " + std::to_string(n.id), "weight outside [0,1]");
      if (n.stage < E) {
        if (n.children.empty()) {
          flag("node " + std::to_string(n.id), "non-terminal node without children");
        } else {
          Rat csum(0);
          for (int c : n.children) csum += nodes[static_cast<std::size_t>(c)].weight;
          if (csum != n.weight)
            flag("node " + std::to_string(n.id),
                 "weight conservation at node: children sum to " + ratToString(csum) + ", node has " + ratToString(n.weight));
        }
      } else if (!n.children.empty()) {
        flag("node " + std::to_string(n.id), "terminal-stage node with children");
      }
    }
    for (int e = 1; e <= E; ++e) {
      const Stage& st = stage(e);
      const std::string where = "stage " + std::to_string(e);
      if (st.index != e) flag(where, "stage index mismatch");
      if (st.days < 1) flag(where, "stage must span at least one day");
      if (st.periods.empty()) flag(where, "no daily periods");
      int h = 0;
      for (const auto& p : st.periods) {
        if (p.hours < 1) flag(where, "daily period with non-positive hours");
        h += p.hours;
      }
      if (!st.periods.empty() && h != 24) flag(where, "daily period hours must sum to 24 (got " + std::to_string(h) + ")");
      if (st.scenarios.empty()) flag(where, "no operational scenarios");
      Rat psum(0);
      for (int s = 0; s < st.numScenarios(); ++s) {
        const auto& sc = st.scenarios[static_cast<std::size_t>(s)];
        psum += sc.prob;
        if (sc.prob < Rat(0)) flag(where, "operational scenario " + std::to_string(s) + " with negative probability");
        std::vector<int> want;
        for (int t = 1; t <= st.numPeriods(); ++t) want.push_back(t);
        if (sc.periods != want)
          flag(where, "scenario/period coverage: operational scenario " + std::to_string(s) +
                          " must cover every daily period exactly once");
      }
      if (!st.scenarios.empty() && psum != Rat(1))
        flag(where, "operational scenario probabilities must sum to 1 (got " + ratToString(psum) + ")");
    }
    return rep;
  }

  // Rescales strategic weights per stage and operational probabilities per
  // stage so each family sums to one; relative proportions are preserved.
  void normalizeWeights() {
    const int E = numStages();
    for (int e = 1; e <= E; ++e) {
      Rat sum(0);
      for (int n : stageNodes(e)) sum += nodes[static_cast<std::size_t>(n)].weight;
      if (sum == Rat(0)) throw Error("stage " + std::to_string(e) + ": zero total strategic weight");
      for (int n : stageNodes(e)) nodes[static_cast<std::size_t>(n)].weight /= sum;
    }
    for (auto& st : stages) {
      Rat sum(0);
      for (const auto& sc : st.scenarios) sum += sc.prob;
      if (sum == Rat(0)) throw Error("stage " + std::to_string(st.index) + ": zero total scenario probability");
      for (auto& sc : st.scenarios) sc.prob /= sum;
    }
  }

private:
  void requireId(int n) const {
    if (!validId(n)) throw Error("unknown strategic node id " + std::to_string(n));
  }

  std::vector<std::vector<int>> stageNodes_;
  std::vector<int> leaves_;
  std::vector<std::vector<int>> nodeScenarios_;
};

// ---------------------------------------------------------------------------
// Scenario partitions used by the decomposition bounds.

struct ScenarioCluster {
  int id = 0;
  int rootNode = 0;                 // the stage-(eStar+1) node owning the cluster
  std::vector<int> scenarios;       // sorted scenario ids
  std::vector<int> nodes;           // union of the scenario paths, sorted
  Rat weight{0};                    // total probability mass of the cluster
  std::map<int, Rat> nodeWeight;    // rescaled per-node weights
};

struct ScenarioGroup {
  int id = 0;
  std::vector<int> scenarios;
  std::vector<int> nodes;
  Rat weight{0};
  std::map<int, Rat> scenarioWeight;  // rescaled scenario weights
  std::map<int, Rat> nodeWeight;
};

namespace detail {

template <typename PartT>
inline void fillNodesAndWeights(const MultiHorizonTree& tree, PartT& part,
                                const std::map<int, Rat>& scenWeight) {
  std::set<int> nodeSet;
  for (int w : part.scenarios)
    for (int n : tree.scenarioPath(w)) nodeSet.insert(n);
  part.nodes.assign(nodeSet.begin(), nodeSet.end());
  for (int n : part.nodes) {
    Rat acc(0);
    for (int w : tree.nodeScenarios(n)) {
      auto it = scenWeight.find(w);
      if (it != scenWeight.end()) acc += it->second;
    }
    part.nodeWeight[n] = acc;
  }
}

}  // namespace detail

// One cluster per strategic node of stage eStar+1; the cluster holds the
// scenarios passing through that node.
inline std::vector<ScenarioCluster> scenarioClusterPartition(const MultiHorizonTree& tree, int eStar) {
  if (eStar < 1 || eStar > tree.numStages() - 1)
    throw Error("breaking stage must be in [1, E-1], got " + std::to_string(eStar));
  std::vector<ScenarioCluster> out;
  int cid = 0;
  for (int n : tree.stageNodes(eStar + 1)) {
    ScenarioCluster c;
    c.id = cid++;
    c.rootNode = n;
    c.scenarios = tree.nodeScenarios(n);
    for (int w : c.scenarios) c.weight += tree.scenarioWeight(w);
    std::map<int, Rat> scenWeight;
    for (int w : c.scenarios) scenWeight[w] = tree.scenarioWeight(w) / c.weight;
    detail::fillNodesAndWeights(tree, c, scenWeight);
    out.push_back(std::move(c));
  }
  return out;
}

// Random disjoint groups of scenarios covering all of them; sizes differ by
// at most one. Deterministic for a given seed.
inline std::vector<ScenarioGroup> scenarioGroupPartition(const MultiHorizonTree& tree, int numGroups,
                                                         std::uint64_t seed) {
  const int W = tree.numScenarios();
  if (numGroups < 1 || numGroups > W)
    throw Error("group count must be in [1, |Omega|], got " + std::to_string(numGroups));
  std::vector<int> order(static_cast<std::size_t>(W));
  for (int i = 0; i < W; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<ScenarioGroup> out(static_cast<std::size_t>(numGroups));
  for (int i = 0; i < W; ++i)
    out[static_cast<std::size_t>(i % numGroups)].scenarios.push_back(order[static_cast<std::size_t>(i)]);
  for (int g = 0; g < numGroups; ++g) {
    ScenarioGroup& grp = out[static_cast<std::size_t>(g)];
    grp.id = g;
    std::sort(grp.scenarios.begin(), grp.scenarios.end());
    for (int w : grp.scenarios) grp.weight += tree.scenarioWeight(w);
    for (int w : grp.scenarios) grp.scenarioWeight[w] = tree.scenarioWeight(w) / grp.weight;
    detail::fillNodesAndWeights(tree, grp, grp.scenarioWeight);
  }
  return out;
}

}  // namespace mhres

#endif
