#ifndef MHRES_MATHEURISTICS_HPP
#define MHRES_MATHEURISTICS_HPP

#include <set>
#include <string>
#include <vector>

#include "mhres/audit.hpp"
#include "mhres/bounds.hpp"
#include "mhres/model.hpp"
#include "mhres/solve.hpp"

namespace mhres {

struct Sfr3Params {
  int nonRelaxedStages = 1;      // stages solved in full detail per iteration
  int relaxationStages = 0;      // stages explored via probabilistic selection
  std::vector<double> phi;       // selection probability per relaxation depth
  std::uint64_t seed = 0;

  double phiAt(int depth) const {
    if (phi.empty()) return 0.0;
    return phi[std::min(static_cast<std::size_t>(depth), phi.size() - 1)];
  }

  void check(int numStages) const {
    if (nonRelaxedStages < 1 || nonRelaxedStages > numStages)
      throw UsageError("non-relaxed stage count must be in [1, E]");
    if (relaxationStages < 0) throw UsageError("relaxation stage count must be nonnegative");
    for (double p : phi)
      if (p < 0 || p > 1) throw UsageError("selection probabilities must be in [0,1]");
    if (relaxationStages > 0 && phi.empty())
      throw UsageError("relaxation stages require a selection probability");
  }

  // strategy presets
  static Sfr3Params weakMyopic() { return {1, 0, {}, 0}; }
  static Sfr3Params strongerMyopic() { return {2, 0, {}, 0}; }
  static Sfr3Params multistageMyopic(int k) { return {k, 0, {}, 0}; }
  static Sfr3Params relaxedHorizon(int k, int r, double p, std::uint64_t seed) { return {k, r, {p}, seed}; }
};

struct IterationRecord {
  int iteration = 0;   // kappa for SFR3, stage for SRH
  int root = 0;        // subproblem root node
  int nodes = 0;       // strategic nodes in the submodel
  int vars = 0;
  double seconds = 0;
  double objective = 0;
};

struct HeuristicRun {
  Solution solution;
  double cost = 0;
  double seconds = 0;
  std::vector<IterationRecord> log;
};

// ---------------------------------------------------------------------------
// SFR3: iterate over stages; per iteration solve one submodel per current-
// stage root over its non-relaxed successors plus a randomly selected subset
// of relaxation-stage successors, then fix the root's decisions.

inline HeuristicRun sfr3(const Instance& inst, Variant variant, const Sfr3Params& params,
                         const SolveControls& controls = {}) {
  const MultiHorizonTree& tree = inst.tree;
  const int E = tree.numStages();
  params.check(E);
  const auto startTime = std::chrono::steady_clock::now();
  Rng rng(params.seed);

  HeuristicRun run;
  run.solution = makeEmptySolution(inst, variant);
  std::set<int> fixedNodes;

  const int lastIteration = E - params.nonRelaxedStages + 1;
  for (int kappa = 1; kappa <= lastIteration; ++kappa) {
    for (int r : tree.stageNodes(kappa)) {
      // fully included: successors in the non-relaxed window
      std::vector<int> included{r};
      for (int n : tree.successors(r))
        if (tree.nodes[static_cast<std::size_t>(n)].stage < kappa + params.nonRelaxedStages)
          included.push_back(n);
      std::set<int> selected(included.begin(), included.end());

      // probabilistic selection in the relaxation window, parent-connected
      const int firstRelax = kappa + params.nonRelaxedStages;
      const int lastRelax = std::min(firstRelax + params.relaxationStages - 1, E);
      for (int e = firstRelax; e <= lastRelax; ++e) {
        const double p = params.phiAt(e - firstRelax);
        std::vector<int> parents;
        for (int n : selected)
          if (tree.nodes[static_cast<std::size_t>(n)].stage == e - 1) parents.push_back(n);
        std::sort(parents.begin(), parents.end());
        for (int parent : parents) {
          const auto& children = tree.nodes[static_cast<std::size_t>(parent)].children;
          if (children.empty()) continue;
          std::vector<int> picked;
          for (int c : children)
            if (rng.uniform() < p) picked.push_back(c);
          // an included node must keep at least one continuation branch,
          // otherwise the rescaled weights would be biased
          if (picked.empty()) picked.push_back(children[static_cast<std::size_t>(rng.below(children.size()))]);
          for (int c : picked) selected.insert(c);
        }
      }

      // rescaled weights: per included node, its weight relative to the
      // included siblings, times the parent's rescaled weight
      std::map<int, Rat> hatW;
      hatW[r] = Rat(1);
      std::vector<int> ordered(selected.begin(), selected.end());
      std::sort(ordered.begin(), ordered.end());
      for (int n : ordered) {
        if (n == r) continue;
        const int parent = tree.nodes[static_cast<std::size_t>(n)].parent;
        Rat siblingMass(0);
        for (int sib : tree.nodes[static_cast<std::size_t>(parent)].children)
          if (selected.count(sib)) siblingMass += tree.nodes[static_cast<std::size_t>(sib)].weight;
        hatW[n] = hatW[parent] * tree.nodes[static_cast<std::size_t>(n)].weight / siblingMass;
      }

      NodeSubset subset;
      for (int n : ordered) {
        subset.nodes.push_back(n);
        subset.weightOverride[n] = toDouble(hatW[n]);
      }
      // ancestors carry the already-fixed decisions into the submodel
      for (int n : tree.ancestors(r)) {
        subset.nodes.push_back(n);
        subset.weightOverride[n] = 1.0;
      }
      std::vector<int> fixedInModel;
      for (int n : subset.nodes)
        if (fixedNodes.count(n)) fixedInModel.push_back(n);
      Fixings fx = fixingsFromSolution(inst, run.solution, fixedInModel);

      BuiltModel bm = buildModel(inst, variant, &subset, &fx);
      SolveOutcome out = solve(bm.milp, controls);
      if (!out.hasSolution())
        throw SolverError("sfr3: submodel at iteration " + std::to_string(kappa) + ", root " + std::to_string(r) +
                          " is " + toString(out.status));
      extractSolution(inst, bm, out.values, run.solution);
      run.log.push_back({kappa, r, static_cast<int>(subset.nodes.size()), bm.milp.numVars(), out.wallSeconds,
                         out.objective});

      fixedNodes.insert(r);
      if (kappa == lastIteration)
        for (int n : included) fixedNodes.insert(n);
    }
  }

  for (int n = 0; n < tree.numNodes(); ++n)
    if (!fixedNodes.count(n)) throw Error("sfr3: node " + std::to_string(n) + " left unfixed");
  AuditReport audit = checkFeasibility(inst, run.solution, variant);
  if (!audit.pass())
    throw SolverError("sfr3: assembled solution failed the feasibility audit:\n" + audit.toString());
  run.cost = evaluateCost(inst, run.solution).total();
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - startTime).count();
  return run;
}

// ---------------------------------------------------------------------------
// Shrinking rolling horizon: at stage e solve a two-stage approximation in
// which the stage-(e+1) nodes keep full detail and every deeper subtree is
// collapsed into an expected-value path below its stage-(e+1) representative;
// stage-e decisions are then fixed and the horizon advances.

namespace detail {

inline Instance srhReducedInstance(const Instance& inst, int e) {
  const MultiHorizonTree& tree = inst.tree;
  const int E = tree.numStages();
  if (e >= E - 1) return inst;
  Instance out = inst;
  out.tree.nodes.clear();
  int keep = 0;
  for (const auto& n : tree.nodes)
    if (n.stage <= e + 1) {
      out.tree.nodes.push_back({n.id, n.stage, n.parent, n.weight, {}});
      ++keep;
    }
  // collapsed continuation: one node per (representative, later stage)
  const std::vector<int>& reps = tree.stageNodes(e + 1);
  std::map<int, int> chain;  // representative -> id of its latest chain node
  std::map<int, std::vector<std::pair<int, double>>> mixture;  // new node -> (orig node, cond. weight)
  for (int ee = e + 2; ee <= E; ++ee) {
    for (int m : reps) {
      const int id = static_cast<int>(out.tree.nodes.size());
      const int parent = ee == e + 2 ? m : chain[m];
      out.tree.nodes.push_back({id, ee, parent, tree.nodes[static_cast<std::size_t>(m)].weight, {}});
      chain[m] = id;
      std::vector<std::pair<int, double>> mix;
      const double wm = toDouble(tree.nodes[static_cast<std::size_t>(m)].weight);
      for (int n : tree.successors(m))
        if (tree.nodes[static_cast<std::size_t>(n)].stage == ee)
          mix.push_back({n, toDouble(tree.nodes[static_cast<std::size_t>(n)].weight) / wm});
      mixture[id] = std::move(mix);
    }
  }
  out.tree.finalize();
  const int newN = out.tree.numNodes();
  auto remapNodeParam = [&](const std::vector<double>& p) {
    std::vector<double> np(static_cast<std::size_t>(newN), 0.0);
    for (int n = 0; n < keep; ++n) np[static_cast<std::size_t>(n)] = p[static_cast<std::size_t>(n)];
    for (const auto& [id, mix] : mixture) {
      double v = 0;
      for (const auto& [orig, w] : mix) v += w * p[static_cast<std::size_t>(orig)];
      np[static_cast<std::size_t>(id)] = v;
    }
    return np;
  };
  for (auto& p : out.pv) {
    p.prepCost = remapNodeParam(p.prepCost);
    p.unitCost = remapNodeParam(p.unitCost);
    p.maintCost = remapNodeParam(p.maintCost);
    p.residualValue = remapNodeParam(p.residualValue);
  }
  for (auto& b : out.bess) {
    b.prepCost = remapNodeParam(b.prepCost);
    b.unitCost = remapNodeParam(b.unitCost);
    b.maintCost = remapNodeParam(b.maintCost);
    b.residualValue = remapNodeParam(b.residualValue);
  }
  out.limits.budget = remapNodeParam(inst.limits.budget);
  out.meta.name = inst.meta.name + "-srh" + std::to_string(e);
  return out;
}

}  // namespace detail

inline HeuristicRun srh(const Instance& inst, Variant variant, const SolveControls& controls = {}) {
  const MultiHorizonTree& tree = inst.tree;
  const int E = tree.numStages();
  const auto startTime = std::chrono::steady_clock::now();
  HeuristicRun run;
  run.solution = makeEmptySolution(inst, variant);
  std::set<int> fixedNodes;

  const int lastIteration = std::max(1, E - 1);
  for (int e = 1; e <= lastIteration; ++e) {
    Instance reduced = detail::srhReducedInstance(inst, e);
    std::vector<int> fixedInModel(fixedNodes.begin(), fixedNodes.end());
    Fixings fx = fixingsFromSolution(inst, run.solution, fixedInModel);
    BuiltModel bm = buildModel(reduced, variant, nullptr, &fx);
    SolveOutcome out = solve(bm.milp, controls);
    if (!out.hasSolution())
      throw SolverError("srh: stage " + std::to_string(e) + " approximation is " + toString(out.status));
    Solution reducedSol = makeEmptySolution(reduced, variant);
    extractSolution(reduced, bm, out.values, reducedSol);
    std::vector<int> toFix = tree.stageNodes(e);
    if (e == lastIteration)
      for (int ee = e + 1; ee <= E; ++ee)
        for (int n : tree.stageNodes(ee)) toFix.push_back(n);
    for (int n : toFix) {
      run.solution.nodes[static_cast<std::size_t>(n)] = reducedSol.nodes[static_cast<std::size_t>(n)];
      run.solution.filled[static_cast<std::size_t>(n)] = 1;
      fixedNodes.insert(n);
    }
    run.log.push_back({e, 0, reduced.tree.numNodes(), bm.milp.numVars(), out.wallSeconds, out.objective});
  }

  AuditReport audit = checkFeasibility(inst, run.solution, variant);
  if (!audit.pass())
    throw SolverError("srh: assembled solution failed the feasibility audit:\n" + audit.toString());
  run.cost = evaluateCost(inst, run.solution).total();
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - startTime).count();
  return run;
}

// ---------------------------------------------------------------------------

struct MethodRun {
  std::string method;
  double cost = 0;
  double seconds = 0;
};

struct ComparisonRow {
  std::string method;
  double cost = 0;
  double seconds = 0;
  double gap = 0;            // vs the reference value when given
  double goodnessRatio = 0;  // cost / cost(reference method)
  double timeRatio = 0;      // time / time(reference method)
};

// Ratios against the last run in the list (conventionally the benchmark).
inline std::vector<ComparisonRow> compareRuns(const std::vector<MethodRun>& runs, double reference) {
  if (runs.empty()) return {};
  std::vector<ComparisonRow> out;
  const MethodRun& bench = runs.back();
  for (const MethodRun& r : runs) {
    ComparisonRow row;
    row.method = r.method;
    row.cost = r.cost;
    row.seconds = r.seconds;
    row.gap = std::isfinite(reference) && reference != 0 ? (r.cost - reference) / std::abs(reference) : 0;
    row.goodnessRatio = bench.cost != 0 ? r.cost / bench.cost : 0;
    row.timeRatio = bench.seconds > 0 ? r.seconds / bench.seconds : 0;
    out.push_back(row);
  }
  return out;
}

}  // namespace mhres

#endif
