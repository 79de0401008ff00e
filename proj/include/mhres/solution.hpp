#ifndef MHRES_SOLUTION_HPP
#define MHRES_SOLUTION_HPP

#include <string>
#include <vector>

#include "mhres/instance.hpp"

namespace mhres {

enum class Variant { NoD, RN, SD };

inline const char* toString(Variant v) {
  switch (v) {
    case Variant::NoD: return "nod";
    case Variant::RN: return "rn";
    case Variant::SD: return "sd";
  }
  return "?";
}

inline Variant variantFromString(const std::string& s) {
  if (s == "nod" || s == "no-d" || s == "NoD") return Variant::NoD;
  if (s == "rn" || s == "RN") return Variant::RN;
  if (s == "sd" || s == "SD") return Variant::SD;
  throw UsageError("unknown variant '" + s + "' (expected nod, rn or sd)");
}

struct CostBreakdown {
  double strategicPv = 0;
  double strategicBess = 0;
  double operational = 0;
  double residual = 0;  // subtracted from the total
  double total() const { return strategicPv + strategicBess + operational - residual; }
};

// Values of all decision variables at one strategic node. Operational arrays
// are indexed by the flat within-stage operational node index; entries that
// have no matching variable (off-window periods, non-start periods, non-PV
// periods) are zero.
struct NodeSolution {
  std::vector<double> x, xt, al;    // per PV technology
  std::vector<double> xp, xpt, bt;  // per BESS technology
  std::vector<std::vector<double>> zR;         // [pv][opNode]
  std::vector<double> zG;                      // [opNode]
  std::vector<std::vector<double>> y, yp, ym;  // [bess][opNode]
  std::vector<std::vector<double>> dl;         // [elastic][opNode]
  std::vector<std::vector<double>> de;         // [deferrable][opNode]
  std::vector<std::vector<double>> s, eta;     // [profile][opScenario]
};

struct Solution {
  Variant variant = Variant::NoD;
  std::string instanceName;
  std::vector<NodeSolution> nodes;  // by strategic node id
  std::vector<char> filled;         // per node: has this node been assigned?
  CostBreakdown cost;

  bool complete() const {
    for (char f : filled)
      if (!f) return false;
    return true;
  }
};

inline NodeSolution makeEmptyNodeSolution(const Instance& inst, int node, Variant variant) {
  const Stage& st = inst.tree.stageOf(node);
  const int nq = st.numOpNodes();
  NodeSolution ns;
  ns.x.assign(static_cast<std::size_t>(inst.numPv()), 0);
  ns.xt = ns.al = ns.x;
  ns.xp.assign(static_cast<std::size_t>(inst.numBess()), 0);
  ns.xpt = ns.bt = ns.xp;
  ns.zR.assign(static_cast<std::size_t>(inst.numPv()), std::vector<double>(static_cast<std::size_t>(nq), 0));
  ns.zG.assign(static_cast<std::size_t>(nq), 0);
  ns.y.assign(static_cast<std::size_t>(inst.numBess()), std::vector<double>(static_cast<std::size_t>(nq), 0));
  ns.yp = ns.ym = ns.y;
  ns.dl.assign(static_cast<std::size_t>(inst.numElastic()), std::vector<double>(static_cast<std::size_t>(nq), 0));
  ns.de.assign(static_cast<std::size_t>(inst.numDeferrable()), std::vector<double>(static_cast<std::size_t>(nq), 0));
  if (variant == Variant::SD) {
    const auto& profiles = inst.discomfort.profiles[static_cast<std::size_t>(st.index - 1)];
    ns.s.assign(profiles.size(), std::vector<double>(static_cast<std::size_t>(st.numScenarios()), 0));
    ns.eta = ns.s;
  }
  return ns;
}

inline Solution makeEmptySolution(const Instance& inst, Variant variant) {
  Solution sol;
  sol.variant = variant;
  sol.instanceName = inst.meta.name;
  sol.nodes.reserve(static_cast<std::size_t>(inst.tree.numNodes()));
  for (int n = 0; n < inst.tree.numNodes(); ++n) sol.nodes.push_back(makeEmptyNodeSolution(inst, n, variant));
  sol.filled.assign(static_cast<std::size_t>(inst.tree.numNodes()), 0);
  return sol;
}

}  // namespace mhres

#endif
