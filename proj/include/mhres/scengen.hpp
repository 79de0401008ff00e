#ifndef MHRES_SCENGEN_HPP
#define MHRES_SCENGEN_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mhres/instance.hpp"

namespace mhres {

// ---------------------------------------------------------------------------
// Strategic cost trajectories: child costs follow one of three regimes
// relative to the parent node.

enum class Trajectory { Stable, Down, Up };

// u is a uniform draw in [0,1); exposed separately so the regime arithmetic
// is testable without a generator.
inline double trajectoryMultiplier(Trajectory kind, double spread, double u) {
  switch (kind) {
    case Trajectory::Stable: return 1.0;
    case Trajectory::Down: return 1.0 - spread * u;
    case Trajectory::Up: return 1.0 + spread * u;
  }
  return 1.0;
}

// Per-node cost table for one cost item. With branching 3 the children follow
// the stable / down / up regimes with seeded draws; other branching degrees
// use evenly spaced deterministic multipliers in [1-spread, 1+spread].
inline std::vector<double> trajectoryCostTable(const MultiHorizonTree& tree, double baseCost, double spread,
                                               Rng& rng) {
  std::vector<double> cost(static_cast<std::size_t>(tree.numNodes()), 0.0);
  cost[0] = baseCost;
  for (int n = 0; n < tree.numNodes(); ++n) {
    const auto& children = tree.nodes[static_cast<std::size_t>(n)].children;
    const int deg = static_cast<int>(children.size());
    for (int c = 0; c < deg; ++c) {
      double mult;
      if (deg == 3) {
        const Trajectory kind = c == 0 ? Trajectory::Stable : c == 1 ? Trajectory::Down : Trajectory::Up;
        mult = trajectoryMultiplier(kind, spread, kind == Trajectory::Stable ? 0.0 : rng.uniform());
      } else if (deg == 1) {
        mult = 1.0;
      } else {
        mult = 1.0 - spread + 2.0 * spread * static_cast<double>(c) / static_cast<double>(deg - 1);
      }
      cost[static_cast<std::size_t>(children[static_cast<std::size_t>(c)])] =
          cost[static_cast<std::size_t>(n)] * mult;
    }
  }
  return cost;
}

inline constexpr double kMaintenanceShare = 0.015;  // of the installation cost at the node

// ---------------------------------------------------------------------------
// Representative days by k-medoids (PAM build + swap) on per-feature
// min-max-normalized profiles. Medoids are actual input rows; probabilities
// equal the exact cluster shares.

struct RepDay {
  int index = 0;  // row in the input
  Rat probability{0};
  std::vector<double> profile;  // original, un-normalized values
};

namespace detail {

inline double pamObjective(const std::vector<std::vector<double>>& dist, const std::vector<int>& medoids) {
  double total = 0;
  for (std::size_t p = 0; p < dist.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (int m : medoids) best = std::min(best, dist[p][static_cast<std::size_t>(m)]);
    total += best;
  }
  return total;
}

inline void pamSwapDescent(const std::vector<std::vector<double>>& dist, std::vector<int>& medoids) {
  const int n = static_cast<int>(dist.size());
  double obj = pamObjective(dist, medoids);
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t mi = 0; mi < medoids.size(); ++mi) {
      for (int cand = 0; cand < n; ++cand) {
        if (std::find(medoids.begin(), medoids.end(), cand) != medoids.end()) continue;
        std::vector<int> trial = medoids;
        trial[mi] = cand;
        const double trialObj = pamObjective(dist, trial);
        if (trialObj < obj - 1e-12) {
          obj = trialObj;
          medoids = trial;
          improved = true;
        }
      }
    }
  }
}

}  // namespace detail

inline std::vector<RepDay> representativeDays(const std::vector<std::vector<double>>& profiles, int k,
                                              std::uint64_t seed) {
  const int n = static_cast<int>(profiles.size());
  if (n == 0) throw Error("representativeDays: no profiles");
  if (k < 1 || k > n) throw Error("representativeDays: k must be in [1, #profiles]");
  const std::size_t dim = profiles[0].size();
  for (const auto& p : profiles)
    if (p.size() != dim) throw Error("representativeDays: profiles differ in dimension");

  // per-feature min-max normalization
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (const auto& p : profiles)
    for (std::size_t f = 0; f < dim; ++f) {
      lo[f] = std::min(lo[f], p[f]);
      hi[f] = std::max(hi[f], p[f]);
    }
  std::vector<std::vector<double>> norm(static_cast<std::size_t>(n), std::vector<double>(dim, 0));
  for (int i = 0; i < n; ++i)
    for (std::size_t f = 0; f < dim; ++f)
      if (hi[f] > lo[f])
        norm[static_cast<std::size_t>(i)][f] = (profiles[static_cast<std::size_t>(i)][f] - lo[f]) / (hi[f] - lo[f]);

  std::vector<std::vector<double>> dist(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d2 = 0;
      for (std::size_t f = 0; f < dim; ++f) {
        const double d = norm[static_cast<std::size_t>(i)][f] - norm[static_cast<std::size_t>(j)][f];
        d2 += d * d;
      }
      dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = std::sqrt(d2);
    }

  // greedy build
  std::vector<int> medoids;
  {
    int best = 0;
    double bestObj = std::numeric_limits<double>::infinity();
    for (int c = 0; c < n; ++c) {
      const double obj = detail::pamObjective(dist, {c});
      if (obj < bestObj) {
        bestObj = obj;
        best = c;
      }
    }
    medoids.push_back(best);
    while (static_cast<int>(medoids.size()) < k) {
      int bestCand = -1;
      double bestObjK = std::numeric_limits<double>::infinity();
      for (int c = 0; c < n; ++c) {
        if (std::find(medoids.begin(), medoids.end(), c) != medoids.end()) continue;
        std::vector<int> trial = medoids;
        trial.push_back(c);
        const double obj = detail::pamObjective(dist, trial);
        if (obj < bestObjK) {
          bestObjK = obj;
          bestCand = c;
        }
      }
      medoids.push_back(bestCand);
    }
  }
  detail::pamSwapDescent(dist, medoids);

  // a second, seeded start guards against a poor greedy basin
  {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<int> alt(order.begin(), order.begin() + k);
    detail::pamSwapDescent(dist, alt);
    if (detail::pamObjective(dist, alt) < detail::pamObjective(dist, medoids) - 1e-12) medoids = alt;
  }

  std::sort(medoids.begin(), medoids.end());
  std::vector<long> counts(static_cast<std::size_t>(k), 0);
  for (int p = 0; p < n; ++p) {
    int bestM = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int mi = 0; mi < k; ++mi) {
      const double d = dist[static_cast<std::size_t>(p)][static_cast<std::size_t>(medoids[static_cast<std::size_t>(mi)])];
      if (d < best - 1e-15) {
        best = d;
        bestM = mi;
      }
    }
    ++counts[static_cast<std::size_t>(bestM)];
  }
  std::vector<RepDay> out;
  for (int mi = 0; mi < k; ++mi)
    out.push_back({medoids[static_cast<std::size_t>(mi)], Rat(counts[static_cast<std::size_t>(mi)], n),
                   profiles[static_cast<std::size_t>(medoids[static_cast<std::size_t>(mi)])]});
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic instances.

struct SyntheticDims {
  int stages = 2;
  int branching = 2;
  int opScenarios = 2;
  int periods = 4;  // must divide 24
  long days = 1;
  int pvTechs = 1;
  int bessTechs = 1;
  int elastic = 1;
  int deferrable = 1;
  int incompatPairs = 0;
  int precedencePairs = 0;
  double budget = 20000;
  std::optional<double> expectedCap;  // derived from the load mix when unset
  std::string name = "custom";
  int windowSlack = -1;      // extra deferrable start choices; -1 draws 1..2
  double bessMaxUnits = -1;  // per-technology unit cap; -1 draws 5..8
  double capitalScale = 1.0;   // prorates investment costs to short horizons
  double bessCostFactor = 1.0;  // extra scaling of storage capital
};

inline SyntheticDims dimsSmall() {
  return {3, 3, 10, 24, 365, 3, 2, 25, 25, 10, 10, 20000, 20.0, "small"};
}
inline SyntheticDims dimsMedium() {
  return {4, 3, 20, 24, 365, 3, 2, 40, 35, 15, 15, 20000, 20.0, "medium"};
}
inline SyntheticDims dimsLarge() {
  return {6, 3, 20, 24, 365, 3, 2, 75, 75, 50, 50, 20000, 40.0, "large"};
}

inline SyntheticDims dimsFromSize(const std::string& size) {
  if (size == "small") return dimsSmall();
  if (size == "medium") return dimsMedium();
  if (size == "large") return dimsLarge();
  if (size == "custom") return SyntheticDims{};
  throw UsageError("unknown size '" + size + "' (expected small, medium, large or custom)");
}

// Tiny instances for exhaustive-oracle testing; dimensions drawn within a
// fixed envelope (two stages, at most two branches / scenarios, short days)
// and co-varied so that the total integer-assignment count stays enumerable.
inline SyntheticDims microDims(std::uint64_t seed) {
  Rng rng(seed * 2654435761ULL + 17);
  SyntheticDims d;
  d.stages = 2;
  d.periods = rng.uniform() < 0.5 ? 3 : 4;
  const long dayChoices[] = {120, 240, 365};
  d.days = dayChoices[rng.below(3)];
  d.capitalScale = static_cast<double>(d.days) / 365.0;
  d.bessCostFactor = 0.35;
  d.pvTechs = 1;
  d.bessTechs = 1;
  d.windowSlack = 0;
  d.budget = 4000 + 2000 * rng.uniform();
  d.name = "micro";
  switch (rng.below(3)) {
    case 0:  // scheduling-heavy: one branch, two deferrable loads
      d.branching = 1;
      d.opScenarios = 2;
      d.elastic = 1 + static_cast<int>(rng.below(2));
      d.deferrable = 2;
      d.incompatPairs = static_cast<int>(rng.below(2));
      d.precedencePairs = d.incompatPairs == 0 ? static_cast<int>(rng.below(2)) : 0;
      d.bessMaxUnits = 1;
      break;
    case 1:  // branching tree, light scheduling
      d.branching = 2;
      d.opScenarios = 1;
      d.elastic = 1;
      d.deferrable = 1;
      d.bessMaxUnits = 2;
      break;
    default:  // investment-heavy, no deferrable loads
      d.branching = 2;
      d.opScenarios = 1 + static_cast<int>(rng.below(2));
      d.elastic = 1 + static_cast<int>(rng.below(2));
      d.deferrable = 0;
      d.bessMaxUnits = 2;
      break;
  }
  return d;
}

namespace detail {

inline MultiHorizonTree syntheticTree(const SyntheticDims& dims, Rng& rng) {
  if (dims.stages < 2) throw Error("synthetic tree needs at least two stages");
  if (dims.branching < 1) throw Error("branching must be at least 1");
  if (24 % dims.periods != 0) throw Error("daily periods must divide 24");
  MultiHorizonTree tree;
  for (int e = 1; e <= dims.stages; ++e) {
    Stage st;
    st.index = e;
    st.days = dims.days;
    const int hours = 24 / dims.periods;
    for (int t = 1; t <= dims.periods; ++t) {
      const bool pv = 4 * t > dims.periods && 4 * t <= 3 * dims.periods;
      st.periods.push_back({hours, pv});
    }
    if (st.pvPeriods().empty()) st.periods.back().pv = true;
    // integer scenario weights keep probabilities as small exact rationals
    std::vector<Rat> probs;
    for (int s = 0; s < dims.opScenarios; ++s) probs.push_back(Rat(1 + static_cast<long>(rng.below(4))));
    normalizeToOne(probs);
    for (int s = 0; s < dims.opScenarios; ++s) {
      OpScenario sc;
      sc.prob = probs[static_cast<std::size_t>(s)];
      for (int t = 1; t <= dims.periods; ++t) sc.periods.push_back(t);
      st.scenarios.push_back(std::move(sc));
    }
    tree.stages.push_back(std::move(st));
  }
  tree.nodes.push_back({0, 1, -1, Rat(1), {}});
  int firstOfPrev = 0, countPrev = 1;
  for (int e = 2; e <= dims.stages; ++e) {
    const int firstOfThis = static_cast<int>(tree.nodes.size());
    for (int p = 0; p < countPrev; ++p) {
      const int parent = firstOfPrev + p;
      for (int c = 0; c < dims.branching; ++c) {
        StrategicNode node;
        node.id = static_cast<int>(tree.nodes.size());
        node.stage = e;
        node.parent = parent;
        node.weight = tree.nodes[static_cast<std::size_t>(parent)].weight / dims.branching;
        tree.nodes.push_back(std::move(node));
      }
    }
    firstOfPrev = firstOfThis;
    countPrev *= dims.branching;
  }
  tree.finalize();
  return tree;
}

inline OpParam makeOpParam(const MultiHorizonTree& tree, const std::function<double(int, int, int)>& f) {
  OpParam out;
  for (int e = 1; e <= tree.numStages(); ++e) {
    const Stage& st = tree.stage(e);
    std::vector<std::vector<double>> block;
    for (int s = 0; s < st.numScenarios(); ++s) {
      std::vector<double> row;
      for (int t = 1; t <= st.numPeriods(); ++t) row.push_back(f(e, s, t));
      block.push_back(std::move(row));
    }
    out.push_back(std::move(block));
  }
  return out;
}

}  // namespace detail

inline Instance syntheticInstance(const SyntheticDims& dims, std::uint64_t seed) {
  Rng rng(seed);
  Instance inst;
  inst.meta.name = dims.name + "-" + std::to_string(seed);
  inst.meta.seed = seed;
  inst.tree = detail::syntheticTree(dims, rng);
  const MultiHorizonTree& tree = inst.tree;
  const int E = tree.numStages();
  const int T = dims.periods;

  // day-shape helpers; noise comes from the seeded generator only
  auto dayFraction = [T](int t) { return (static_cast<double>(t) - 0.5) / static_cast<double>(T); };
  auto bell = [&dayFraction](int t) {
    const double x = dayFraction(t) - 0.5;
    return std::exp(-18.0 * x * x);
  };

  const double euroPerWatt[] = {2.5, 2.1, 1.95};
  for (int i = 0; i < dims.pvTechs; ++i) {
    PvTechnology p;
    p.name = i == 0 ? "mono" : i == 1 ? "poly" : i == 2 ? "thin-film" : "pv" + std::to_string(i);
    p.panelKw = 0.25 + 0.05 * i;
    p.maxPanels = 40 + 10 * static_cast<double>(rng.below(3));
    const double baseUnit = dims.capitalScale * euroPerWatt[i % 3] * 1000.0 * p.panelKw;
    p.unitCost = trajectoryCostTable(tree, baseUnit, 0.3, rng);
    p.prepCost = trajectoryCostTable(tree, dims.capitalScale * (300.0 + 100.0 * i), 0.3, rng);
    p.maintCost.resize(p.unitCost.size());
    for (std::size_t n = 0; n < p.unitCost.size(); ++n) p.maintCost[n] = kMaintenanceShare * p.unitCost[n];
    p.residualValue.resize(p.unitCost.size());
    for (std::size_t n = 0; n < p.unitCost.size(); ++n) p.residualValue[n] = 0.3 * p.unitCost[n];
    // availability: bell-shaped daylight profile, proportional scenario shading
    std::vector<std::vector<double>> shade;  // [stage][scenario]
    for (int e = 1; e <= E; ++e) {
      std::vector<double> row;
      for (int s = 0; s < tree.stage(e).numScenarios(); ++s) row.push_back(0.35 + 0.65 * rng.uniform());
      shade.push_back(std::move(row));
    }
    p.availability = detail::makeOpParam(tree, [&](int e, int s, int t) {
      if (!tree.stage(e).isPv(t)) return 0.0;
      return std::min(1.0, shade[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)] * (0.25 + bell(t)));
    });
    const double genBase = 0.008 + 0.004 * rng.uniform();
    p.genCost = detail::makeOpParam(tree, [&](int e, int, int t) {
      return tree.stage(e).isPv(t) ? genBase : 0.0;
    });
    inst.pv.push_back(std::move(p));
  }

  const double bessEuroPerWatt[] = {1.05, 1.3};
  for (int b = 0; b < dims.bessTechs; ++b) {
    BessTechnology t;
    t.name = b == 0 ? "lead-acid" : b == 1 ? "li-ion" : "bess" + std::to_string(b);
    t.unitKwh = 3.0 + 2.0 * b;
    t.maxUnits = dims.bessMaxUnits > 0 ? dims.bessMaxUnits : 5 + static_cast<double>(rng.below(4));
    t.opCost = 0.003 + 0.005 * rng.uniform();
    const double baseUnit = dims.bessCostFactor * dims.capitalScale * bessEuroPerWatt[b % 2] * 1000.0 * t.unitKwh;
    t.unitCost = trajectoryCostTable(tree, baseUnit, 0.3, rng);
    t.prepCost = trajectoryCostTable(tree, dims.capitalScale * (200.0 + 80.0 * b), 0.3, rng);
    t.maintCost.resize(t.unitCost.size());
    for (std::size_t n = 0; n < t.unitCost.size(); ++n) t.maintCost[n] = kMaintenanceShare * t.unitCost[n];
    t.residualValue.resize(t.unitCost.size());
    for (std::size_t n = 0; n < t.unitCost.size(); ++n) t.residualValue[n] = 0.25 * t.unitCost[n];
    for (int e = 0; e < E; ++e) {
      t.lossFactor.push_back(0.01 + 0.02 * rng.uniform());
      t.chargeDepth.push_back(0.6 + 0.35 * rng.uniform());
      t.dischargeDepth.push_back(0.6 + 0.35 * rng.uniform());
    }
    inst.bess.push_back(std::move(t));
  }

  inst.limits.pvMinBatch = 1 + static_cast<double>(rng.below(2));
  inst.limits.bessMinBatch = 1;
  double pvCapSum = 0, bessCapSum = 0, pvCapMax = 0, bessCapMax = 0;
  for (const auto& p : inst.pv) {
    pvCapSum += p.maxPanels;
    pvCapMax = std::max(pvCapMax, p.maxPanels);
  }
  for (const auto& b : inst.bess) {
    bessCapSum += b.maxUnits;
    bessCapMax = std::max(bessCapMax, b.maxUnits);
  }
  inst.limits.pvTotalCap = std::max(pvCapMax, std::ceil(pvCapSum * 0.8));
  inst.limits.bessTotalCap = std::max(bessCapMax, std::ceil(bessCapSum * 0.8));
  inst.limits.budget.assign(static_cast<std::size_t>(tree.numNodes()), dims.budget);

  // base load: morning and evening peaks scaled by the number of load types
  const double households = 6.0 + 0.8 * static_cast<double>(dims.elastic + dims.deferrable);
  std::vector<std::vector<double>> loadNoise;
  for (int e = 1; e <= E; ++e) {
    std::vector<double> row;
    for (int s = 0; s < tree.stage(e).numScenarios(); ++s) row.push_back(0.8 + 0.4 * rng.uniform());
    loadNoise.push_back(std::move(row));
  }
  inst.loads.baseLoad = detail::makeOpParam(tree, [&](int e, int s, int t) {
    const double x = dayFraction(t);
    const double morning = std::exp(-40.0 * (x - 0.33) * (x - 0.33));
    const double evening = std::exp(-40.0 * (x - 0.83) * (x - 0.83));
    return households * loadNoise[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)] *
           (0.4 + 0.9 * morning + 1.2 * evening);
  });

  for (int j = 0; j < dims.elastic; ++j) {
    ElasticLoad el;
    el.name = "elastic" + std::to_string(j);
    const int winLen = std::max(2, T / 2 - static_cast<int>(rng.below(2)));
    const int winStart = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(T - winLen + 1)));
    for (int e = 1; e <= E; ++e) {
      std::vector<int> w;
      for (int t = winStart; t < winStart + winLen; ++t) w.push_back(t);
      el.window.push_back(w);
    }
    const double level = 0.4 + 1.2 * rng.uniform();
    std::vector<std::vector<double>> noise;
    for (int e = 1; e <= E; ++e) {
      std::vector<double> row;
      for (int s = 0; s < tree.stage(e).numScenarios(); ++s) row.push_back(0.85 + 0.3 * rng.uniform());
      noise.push_back(std::move(row));
    }
    el.setpoint = detail::makeOpParam(tree, [&](int e, int s, int t) {
      if (!el.inWindow(e, t)) return 0.0;
      return level * noise[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)];
    });
    const double curtailShare = 0.3 + 0.4 * rng.uniform();
    el.maxCurtail.assign(static_cast<std::size_t>(E), std::vector<double>(static_cast<std::size_t>(T), 0));
    el.rampLimit.assign(static_cast<std::size_t>(E), std::vector<double>(static_cast<std::size_t>(T), 0));
    el.discomfort.assign(static_cast<std::size_t>(E), std::vector<double>(static_cast<std::size_t>(T), 0));
    for (int e = 1; e <= E; ++e) {
      const Stage& st = tree.stage(e);
      for (int t = 1; t <= T; ++t) {
        double minSp = std::numeric_limits<double>::infinity(), maxStep = 0;
        for (int s = 0; s < st.numScenarios(); ++s) {
          minSp = std::min(minSp, el.setpoint[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                              [static_cast<std::size_t>(t - 1)]);
          if (t > 1)
            maxStep = std::max(maxStep, std::abs(el.setpoint[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                                            [static_cast<std::size_t>(t - 1)] -
                                                 el.setpoint[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                                            [static_cast<std::size_t>(t - 2)]));
        }
        if (!el.inWindow(e, t)) continue;
        el.maxCurtail[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)] = curtailShare * minSp;
        el.rampLimit[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)] =
            maxStep + curtailShare * minSp + 0.05;
        el.discomfort[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)] = 1.0 + 4.0 * rng.uniform();
      }
    }
    inst.loads.elastic.push_back(std::move(el));
  }

  // deferrable loads with staggered reference starts so that the
  // all-at-reference schedule is feasible and discomfort-free
  for (int k = 0; k < dims.deferrable; ++k) {
    DeferrableLoad d;
    d.name = "deferrable" + std::to_string(k);
    const int hoursPerPeriod = 24 / T;
    const int durPeriods = 1 + static_cast<int>(rng.below(2));
    const int slack = dims.windowSlack >= 0 ? dims.windowSlack : 1 + static_cast<int>(rng.below(2));
    const int winLen = std::min(T, durPeriods + 1 + slack);
    const int winStart = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(T - winLen + 1)));
    const int lastStart = winStart + winLen - durPeriods;
    const int ref = winStart + static_cast<int>(rng.below(static_cast<std::uint64_t>(lastStart - winStart + 1)));
    for (int e = 1; e <= E; ++e) {
      std::vector<int> w;
      for (int t = winStart; t < winStart + winLen; ++t) w.push_back(t);
      d.window.push_back(w);
      d.refStart.push_back(ref);
      d.hourlyKw.push_back(0.3 + 1.2 * rng.uniform());
      d.durationHours.push_back(durPeriods * hoursPerPeriod - static_cast<int>(rng.below(static_cast<std::uint64_t>(hoursPerPeriod))));
    }
    d.discomfort.assign(static_cast<std::size_t>(E), std::vector<double>(static_cast<std::size_t>(T), 0));
    const double slope = 1.0 + 3.0 * rng.uniform();
    for (int e = 1; e <= E; ++e)
      for (int t = 1; t <= T; ++t)
        d.discomfort[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)] =
            slope * std::abs(t - ref);
    inst.loads.deferrable.push_back(std::move(d));
  }

  // pair selection keeps the reference schedule compatible in every stage
  auto refInterval = [&inst](int k, int e) {
    const DeferrableLoad& d = inst.loads.deferrable[static_cast<std::size_t>(k)];
    const int ref = d.refStart[static_cast<std::size_t>(e - 1)];
    const int m2 = *inst.supplyPeriods(k, e, ref);
    return std::pair<int, int>(ref, ref + m2 - 1);
  };
  auto disjointEverywhere = [&](int ka, int kb) {
    for (int e = 1; e <= E; ++e) {
      auto [a0, a1] = refInterval(ka, e);
      auto [b0, b1] = refInterval(kb, e);
      if (a0 <= b1 && b0 <= a1) return false;
    }
    return true;
  };
  std::vector<std::pair<int, int>> candidates;
  for (int ka = 0; ka < dims.deferrable; ++ka)
    for (int kb = 0; kb < dims.deferrable; ++kb)
      if (ka != kb && disjointEverywhere(ka, kb)) candidates.push_back({ka, kb});
  rng.shuffle(candidates);
  for (const auto& c : candidates) {
    if (static_cast<int>(inst.loads.incompatible.size()) >= dims.incompatPairs) break;
    bool dup = false;
    for (const auto& have : inst.loads.incompatible)
      dup |= (have.first == c.first && have.second == c.second) || (have.first == c.second && have.second == c.first);
    if (!dup) inst.loads.incompatible.push_back(c);
  }
  // precedence needs the follower's reference start strictly after the leader
  // completes, in every stage
  for (const auto& c : candidates) {
    if (static_cast<int>(inst.loads.precedence.size()) >= dims.precedencePairs) break;
    bool ok = true;
    for (int e = 1; e <= E && ok; ++e) {
      auto [a0, a1] = refInterval(c.first, e);
      auto [b0, b1] = refInterval(c.second, e);
      ok = b0 > a1;
    }
    bool dup = false;
    for (const auto& have : inst.loads.precedence)
      dup |= have.first == c.first && have.second == c.second;
    for (const auto& have : inst.loads.incompatible)
      dup |= have.first == c.first && have.second == c.second;
    if (ok && !dup) inst.loads.precedence.push_back({c.first, c.second, 0});
  }

  // prices: higher at the peaks, export remuneration well below import
  std::vector<std::vector<double>> priceNoise;
  for (int e = 1; e <= E; ++e) {
    std::vector<double> row;
    for (int s = 0; s < tree.stage(e).numScenarios(); ++s) row.push_back(0.8 + 0.4 * rng.uniform());
    priceNoise.push_back(std::move(row));
  }
  inst.grid.importPrice = detail::makeOpParam(tree, [&](int e, int s, int t) {
    const double x = dayFraction(t);
    const double peak = std::exp(-30.0 * (x - 0.8) * (x - 0.8)) + 0.6 * std::exp(-30.0 * (x - 0.35) * (x - 0.35));
    return priceNoise[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)] * (0.14 + 0.45 * peak);
  });
  inst.grid.exportPrice = detail::makeOpParam(tree, [&](int e, int s, int t) {
    return 0.35 * inst.grid.importPrice[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                       [static_cast<std::size_t>(t - 1)];
  });

  // discomfort policy: cap tight enough to bind, threshold equal to the cap
  double cap;
  if (dims.expectedCap.has_value()) {
    cap = *dims.expectedCap;
  } else {
    double worst = 0;
    for (int e = 1; e <= E; ++e) {
      const Stage& st = tree.stage(e);
      double stageWorst = 0;
      for (int j = 0; j < inst.numElastic(); ++j) {
        const ElasticLoad& el = inst.loads.elastic[static_cast<std::size_t>(j)];
        for (int t : el.window[static_cast<std::size_t>(e - 1)])
          stageWorst += st.hours(t) * el.discomfort[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)] *
                        el.maxCurtail[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)];
      }
      for (int k = 0; k < inst.numDeferrable(); ++k) {
        const DeferrableLoad& d = inst.loads.deferrable[static_cast<std::size_t>(k)];
        double worstStart = 0;
        for (int t : inst.feasibleStarts(k, e))
          worstStart = std::max(worstStart,
                                d.discomfort[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)]);
        stageWorst += worstStart;
      }
      worst = std::max(worst, stageWorst);
    }
    cap = std::max(1.0, 0.3 * worst);
  }
  inst.discomfort.expectedCap.assign(static_cast<std::size_t>(E), cap);
  inst.discomfort.profiles.assign(static_cast<std::size_t>(E),
                                  {SdProfile{cap, 0.05, 0.25, 0.05}});
  return inst;
}

inline Instance syntheticInstance(const std::string& size, std::uint64_t seed) {
  return syntheticInstance(dimsFromSize(size), seed);
}

}  // namespace mhres

#endif
