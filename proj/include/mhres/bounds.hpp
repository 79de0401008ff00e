#ifndef MHRES_BOUNDS_HPP
#define MHRES_BOUNDS_HPP

#include <atomic>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "mhres/audit.hpp"
#include "mhres/model.hpp"
#include "mhres/solve.hpp"

namespace mhres {

// ---------------------------------------------------------------------------
// Expectation collapses shared by the expected-value bounds and the shrinking
// rolling horizon.

// Replaces every stage's operational scenarios by a single expected one.
inline Instance collapseOperational(const Instance& inst) {
  Instance out = inst;
  auto collapse = [&inst](const OpParam& p) {
    OpParam np;
    for (int e = 1; e <= inst.tree.numStages(); ++e) {
      const Stage& st = inst.tree.stage(e);
      std::vector<double> row(static_cast<std::size_t>(st.numPeriods()), 0.0);
      for (int s = 0; s < st.numScenarios(); ++s) {
        const double w = toDouble(st.scenarios[static_cast<std::size_t>(s)].prob);
        for (int t = 0; t < st.numPeriods(); ++t)
          row[static_cast<std::size_t>(t)] += w * p[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                                   [static_cast<std::size_t>(t)];
      }
      np.push_back({row});
    }
    return np;
  };
  for (auto& st : out.tree.stages) {
    OpScenario sc;
    sc.prob = Rat(1);
    for (int t = 1; t <= st.numPeriods(); ++t) sc.periods.push_back(t);
    st.scenarios = {sc};
  }
  out.tree.finalize();
  for (auto& p : out.pv) {
    p.genCost = collapse(p.genCost);
    p.availability = collapse(p.availability);
  }
  out.loads.baseLoad = collapse(inst.loads.baseLoad);
  for (std::size_t j = 0; j < out.loads.elastic.size(); ++j)
    out.loads.elastic[j].setpoint = collapse(inst.loads.elastic[j].setpoint);
  out.grid.importPrice = collapse(inst.grid.importPrice);
  out.grid.exportPrice = collapse(inst.grid.exportPrice);
  out.meta.name = inst.meta.name + "-oev";
  return out;
}

// Replaces the strategic tree by a single expected path, one node per stage.
inline Instance collapseStrategic(const Instance& inst) {
  Instance out = inst;
  const MultiHorizonTree& tree = inst.tree;
  const int E = tree.numStages();
  out.tree.nodes.clear();
  for (int e = 1; e <= E; ++e) out.tree.nodes.push_back({e - 1, e, e - 2, Rat(1), {}});
  out.tree.finalize();
  auto collapseNodeParam = [&tree, E](const std::vector<double>& p) {
    std::vector<double> np(static_cast<std::size_t>(E), 0.0);
    for (int e = 1; e <= E; ++e)
      for (int n : tree.stageNodes(e))
        np[static_cast<std::size_t>(e - 1)] +=
            toDouble(tree.nodes[static_cast<std::size_t>(n)].weight) * p[static_cast<std::size_t>(n)];
    return np;
  };
  for (auto& p : out.pv) {
    p.prepCost = collapseNodeParam(p.prepCost);
    p.unitCost = collapseNodeParam(p.unitCost);
    p.maintCost = collapseNodeParam(p.maintCost);
    p.residualValue = collapseNodeParam(p.residualValue);
  }
  for (auto& b : out.bess) {
    b.prepCost = collapseNodeParam(b.prepCost);
    b.unitCost = collapseNodeParam(b.unitCost);
    b.maintCost = collapseNodeParam(b.maintCost);
    b.residualValue = collapseNodeParam(b.residualValue);
  }
  out.limits.budget = collapseNodeParam(inst.limits.budget);
  out.meta.name = inst.meta.name + "-ev";
  return out;
}

// ---------------------------------------------------------------------------

struct SubproblemRow {
  std::string label;
  double weight = 1.0;
  double bound = 0;      // best bound, the value entering the combination
  double objective = 0;  // incumbent
  double seconds = 0;
};

struct BoundReport {
  std::string scheme;
  Variant variant = Variant::NoD;
  int groups = 0;      // SMG
  int breakStage = 0;  // SMC
  std::uint64_t seed = 0;
  double bound = 0;
  double seconds = 0;
  std::vector<SubproblemRow> rows;
};

namespace detail {

inline double boundOf(const SolveOutcome& out) {
  if (std::isfinite(out.bestBound) && out.bestBound > -std::numeric_limits<double>::infinity())
    return out.bestBound;
  return out.objective;
}

// Deterministic parallel map: results land by index regardless of completion
// order.
inline void parallelFor(int count, int jobs, const std::function<void(int)>& work) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int width = std::min(jobs, count);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(width));
  for (int w = 0; w < width; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

inline BoundReport boundMhev(const Instance& inst, Variant variant, const SolveControls& controls = {}) {
  if (variant == Variant::SD)
    throw UsageError("the expected-value bound is not defined for the risk-averse variant");
  const auto start = std::chrono::steady_clock::now();
  Instance ev = collapseStrategic(collapseOperational(inst));
  BuiltModel bm = buildModel(ev, variant);
  SolveOutcome out = solve(bm.milp, controls);
  if (out.status == SolveStatus::Infeasible) throw SolverError("expected-value model infeasible");
  BoundReport rep;
  rep.scheme = "mhev";
  rep.variant = variant;
  rep.bound = detail::boundOf(out);
  rep.rows.push_back({"ev", 1.0, rep.bound, out.objective, out.wallSeconds});
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline BoundReport boundMhoev(const Instance& inst, Variant variant, const SolveControls& controls = {}) {
  if (variant == Variant::SD)
    throw UsageError("the operational expected-value bound is not defined for the risk-averse variant");
  const auto start = std::chrono::steady_clock::now();
  Instance oev = collapseOperational(inst);
  BuiltModel bm = buildModel(oev, variant);
  SolveOutcome out = solve(bm.milp, controls);
  if (out.status == SolveStatus::Infeasible) throw SolverError("operational expected-value model infeasible");
  BoundReport rep;
  rep.scheme = "mhoev";
  rep.variant = variant;
  rep.bound = detail::boundOf(out);
  rep.rows.push_back({"oev", 1.0, rep.bound, out.objective, out.wallSeconds});
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

namespace detail {

struct WeightedSubset {
  std::string label;
  NodeSubset subset;
  double weight = 0;
};

inline BoundReport solveSubsets(const Instance& inst, Variant variant, const std::vector<WeightedSubset>& parts,
                                const std::string& scheme, const SolveControls& controls, int jobs) {
  const auto start = std::chrono::steady_clock::now();
  BoundReport rep;
  rep.scheme = scheme;
  rep.variant = variant;
  rep.rows.resize(parts.size());
  detail::parallelFor(static_cast<int>(parts.size()), jobs, [&](int i) {
    const WeightedSubset& part = parts[static_cast<std::size_t>(i)];
    BuiltModel bm = buildModel(inst, variant, &part.subset);
    SolveOutcome out = solve(bm.milp, controls);
    if (!out.hasSolution() && out.status != SolveStatus::Limit)
      throw SolverError(scheme + ": subproblem " + part.label + " " + toString(out.status));
    rep.rows[static_cast<std::size_t>(i)] = {part.label, part.weight, detail::boundOf(out), out.objective,
                                             out.wallSeconds};
  });
  double total = 0;
  for (const auto& row : rep.rows) total += row.weight * row.bound;
  rep.bound = total;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace detail

// Wait-and-see over strategic scenarios: one path per scenario.
inline BoundReport boundSws(const Instance& inst, Variant variant, const SolveControls& controls = {},
                            int jobs = 1) {
  std::vector<detail::WeightedSubset> parts;
  for (int w = 0; w < inst.tree.numScenarios(); ++w) {
    detail::WeightedSubset part;
    part.label = "omega=" + std::to_string(w);
    part.subset.nodes = inst.tree.scenarioPath(w);
    for (int n : part.subset.nodes) part.subset.weightOverride[n] = 1.0;
    part.weight = toDouble(inst.tree.scenarioWeight(w));
    parts.push_back(std::move(part));
  }
  return detail::solveSubsets(inst, variant, parts, "sws", controls, jobs);
}

inline BoundReport boundSmg(const Instance& inst, Variant variant, int groups, std::uint64_t seed,
                            const SolveControls& controls = {}, int jobs = 1) {
  std::vector<detail::WeightedSubset> parts;
  for (const ScenarioGroup& g : scenarioGroupPartition(inst.tree, groups, seed)) {
    detail::WeightedSubset part;
    part.label = "group=" + std::to_string(g.id);
    part.subset.nodes = g.nodes;
    for (const auto& [n, w] : g.nodeWeight) part.subset.weightOverride[n] = toDouble(w);
    part.weight = toDouble(g.weight);
    parts.push_back(std::move(part));
  }
  BoundReport rep = detail::solveSubsets(inst, variant, parts, "smg", controls, jobs);
  rep.groups = groups;
  rep.seed = seed;
  return rep;
}

inline BoundReport boundSmc(const Instance& inst, Variant variant, int breakStage,
                            const SolveControls& controls = {}, int jobs = 1) {
  std::vector<detail::WeightedSubset> parts;
  for (const ScenarioCluster& c : scenarioClusterPartition(inst.tree, breakStage)) {
    detail::WeightedSubset part;
    part.label = "cluster=" + std::to_string(c.id);
    part.subset.nodes = c.nodes;
    for (const auto& [n, w] : c.nodeWeight) part.subset.weightOverride[n] = toDouble(w);
    part.weight = toDouble(c.weight);
    parts.push_back(std::move(part));
  }
  BoundReport rep = detail::solveSubsets(inst, variant, parts, "smc", controls, jobs);
  rep.breakStage = breakStage;
  return rep;
}

// ---------------------------------------------------------------------------
// Value of the strategic decision: cost of living with the expected-value
// investment plan under the full stochastic model.

struct VsdResult {
  double zStrategicEv = 0;  // optimum with the EV investment plan pinned
  double vsd = 0;
  double goodnessRatio = 0;
  bool evDesignInfeasible = false;
  double feasibleCost = 0;
  double seconds = 0;
};

inline VsdResult valueOfStrategicDecision(const Instance& inst, Variant variant, const Solution& feasible,
                                          const SolveControls& controls = {}) {
  const auto start = std::chrono::steady_clock::now();
  const Variant evVariant = variant == Variant::SD ? Variant::NoD : variant;
  Instance ev = collapseStrategic(collapseOperational(inst));
  BuiltModel evModel = buildModel(ev, evVariant);
  SolveOutcome evOut = solve(evModel.milp, controls);
  if (!evOut.hasSolution()) throw SolverError("expected-value model " + std::string(toString(evOut.status)));
  Solution evSol = makeEmptySolution(ev, evVariant);
  extractSolution(ev, evModel, evOut.values, evSol);

  // map the per-stage expected-value plan onto every node of that stage
  Fixings fx;
  for (int n = 0; n < inst.tree.numNodes(); ++n) {
    const int e = inst.tree.nodes[static_cast<std::size_t>(n)].stage;
    const NodeSolution& stagePlan = evSol.nodes[static_cast<std::size_t>(e - 1)];
    for (int i = 0; i < inst.numPv(); ++i) {
      fx[names::x(n, i)] = stagePlan.x[static_cast<std::size_t>(i)];
      fx[names::xt(n, i)] = stagePlan.xt[static_cast<std::size_t>(i)];
      fx[names::al(n, i)] = stagePlan.al[static_cast<std::size_t>(i)];
    }
    for (int b = 0; b < inst.numBess(); ++b) {
      fx[names::xp(n, b)] = stagePlan.xp[static_cast<std::size_t>(b)];
      fx[names::xpt(n, b)] = stagePlan.xpt[static_cast<std::size_t>(b)];
      fx[names::bt(n, b)] = stagePlan.bt[static_cast<std::size_t>(b)];
    }
  }

  VsdResult res;
  res.feasibleCost = evaluateCost(inst, feasible).total();
  BuiltModel fixed = buildModel(inst, variant, nullptr, &fx);
  SolveOutcome out = solve(fixed.milp, controls);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (out.status == SolveStatus::Infeasible) {
    res.evDesignInfeasible = true;  // a finding, not an error
    return res;
  }
  if (!out.hasSolution()) throw SolverError("strategic-fixed model " + std::string(toString(out.status)));
  res.zStrategicEv = out.objective;
  res.vsd = res.zStrategicEv - res.feasibleCost;
  res.goodnessRatio = res.feasibleCost / res.zStrategicEv;
  return res;
}

}  // namespace mhres

#endif
