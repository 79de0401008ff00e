#ifndef MHRES_MODEL_HPP
#define MHRES_MODEL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mhres/instance.hpp"
#include "mhres/milp.hpp"
#include "mhres/solution.hpp"

namespace mhres {

// Stable variable names, shared by the emitter, the solution writer and the
// fixing maps passed between subproblem solves. n is the global strategic
// node id; s/t identify the operational node; i/b/j/k index technologies and
// loads; p/q index risk profiles and operational scenarios.
namespace names {
inline std::string nn(const char* tag, int n, int a) {
  return std::string(tag) + "_n" + std::to_string(n) + "_" + std::to_string(a);
}
inline std::string nq(const char* tag, int n, int a, int s, int t) {
  return std::string(tag) + "_n" + std::to_string(n) + "_" + std::to_string(a) + "_s" + std::to_string(s) + "_t" +
         std::to_string(t);
}
inline std::string x(int n, int i) { return nn("x", n, i); }
inline std::string xt(int n, int i) { return nn("xt", n, i); }
inline std::string al(int n, int i) { return nn("al", n, i); }
inline std::string xp(int n, int b) { return nn("xp", n, b); }
inline std::string xpt(int n, int b) { return nn("xpt", n, b); }
inline std::string bt(int n, int b) { return nn("bt", n, b); }
inline std::string zR(int n, int i, int s, int t) { return nq("zR", n, i, s, t); }
inline std::string zG(int n, int s, int t) {
  return "zG_n" + std::to_string(n) + "_s" + std::to_string(s) + "_t" + std::to_string(t);
}
inline std::string y(int n, int b, int s, int t) { return nq("y", n, b, s, t); }
inline std::string yp(int n, int b, int s, int t) { return nq("yp", n, b, s, t); }
inline std::string ym(int n, int b, int s, int t) { return nq("ym", n, b, s, t); }
inline std::string dl(int n, int j, int s, int t) { return nq("dl", n, j, s, t); }
inline std::string de(int n, int k, int s, int t) { return nq("de", n, k, s, t); }
inline std::string sx(int n, int p, int pi) { return nq("sx", n, p, pi, 0); }
inline std::string et(int n, int p, int pi) { return nq("et", n, p, pi, 0); }
}  // namespace names

// Restriction of the model to a subset of strategic nodes, with the rescaled
// weights used by decomposition schemes and the rolling-horizon iterations.
struct NodeSubset {
  std::vector<int> nodes;
  std::map<int, double> weightOverride;
};

using Fixings = std::map<std::string, double>;

struct BuiltModel {
  Milp milp;
  Variant variant = Variant::NoD;
  std::vector<int> nodes;  // included strategic nodes, ascending

  // variable ids, -1 where the variable does not exist
  std::vector<std::vector<int>> vx, vxt, val;    // [local][pv]
  std::vector<std::vector<int>> vxp, vxpt, vbt;  // [local][bess]
  std::vector<std::vector<std::vector<int>>> vzR;          // [local][pv][opNode]
  std::vector<std::vector<int>> vzG;                       // [local][opNode]
  std::vector<std::vector<std::vector<int>>> vy, vyp, vym; // [local][bess][opNode]
  std::vector<std::vector<std::vector<int>>> vdl;          // [local][elastic][opNode]
  std::vector<std::vector<std::vector<int>>> vde;          // [local][deferrable][opNode]
  std::vector<std::vector<std::vector<int>>> vsx, vet;     // [local][profile][scenario]
  std::map<int, int> localOf;  // node id -> local index

  int local(int n) const {
    auto it = localOf.find(n);
    if (it == localOf.end()) throw Error("node " + std::to_string(n) + " not part of the model");
    return it->second;
  }
  bool includes(int n) const { return localOf.count(n) != 0; }
};

namespace detail {

inline double weightOf(const MultiHorizonTree& tree, const NodeSubset* subset, int n) {
  if (subset) {
    auto it = subset->weightOverride.find(n);
    if (it != subset->weightOverride.end()) return it->second;
  }
  return toDouble(tree.nodes[static_cast<std::size_t>(n)].weight);
}

}  // namespace detail

// Emits the full MILP for the requested variant over the given strategic
// nodes (all of them by default). A subset must be closed under the ancestor
// map so that installation-state and carry-over constraints can always reach
// the predecessor of an included node. Fixed values become equality bounds.
inline BuiltModel buildModel(const Instance& inst, Variant variant, const NodeSubset* subset = nullptr,
                             const Fixings* fixings = nullptr) {
  const MultiHorizonTree& tree = inst.tree;
  BuiltModel bm;
  bm.variant = variant;
  if (subset) {
    bm.nodes = subset->nodes;
    std::sort(bm.nodes.begin(), bm.nodes.end());
    bm.nodes.erase(std::unique(bm.nodes.begin(), bm.nodes.end()), bm.nodes.end());
    if (bm.nodes.empty()) throw Error("invalid subset closure: no nodes");
    for (int n : bm.nodes) {
      if (!tree.validId(n)) throw Error("invalid subset closure: unknown node " + std::to_string(n));
      int parent = tree.nodes[static_cast<std::size_t>(n)].parent;
      if (n != 0 && !std::binary_search(bm.nodes.begin(), bm.nodes.end(), parent))
        throw Error("invalid subset closure: node " + std::to_string(n) + " without its predecessor " +
                    std::to_string(parent));
    }
  } else {
    for (int n = 0; n < tree.numNodes(); ++n) bm.nodes.push_back(n);
  }
  const int L = static_cast<int>(bm.nodes.size());
  for (int l = 0; l < L; ++l) bm.localOf[bm.nodes[static_cast<std::size_t>(l)]] = l;

  const int nPv = inst.numPv();
  const int nBess = inst.numBess();
  const int nEl = inst.numElastic();
  const int nDe = inst.numDeferrable();
  Milp& m = bm.milp;

  auto sized3 = [L](int a) {
    return std::vector<std::vector<std::vector<int>>>(static_cast<std::size_t>(L),
                                                      std::vector<std::vector<int>>(static_cast<std::size_t>(a)));
  };
  bm.vx.assign(static_cast<std::size_t>(L), std::vector<int>(static_cast<std::size_t>(nPv), -1));
  bm.vxt = bm.val = bm.vx;
  bm.vxp.assign(static_cast<std::size_t>(L), std::vector<int>(static_cast<std::size_t>(nBess), -1));
  bm.vxpt = bm.vbt = bm.vxp;
  bm.vzR = sized3(nPv);
  bm.vzG.assign(static_cast<std::size_t>(L), {});
  bm.vy = sized3(nBess);
  bm.vyp = bm.vym = bm.vy;
  bm.vdl = sized3(nEl);
  bm.vde = sized3(nDe);
  bm.vsx = sized3(0);
  bm.vet = sized3(0);

  // ------------------------------------------------------------------ vars
  for (int l = 0; l < L; ++l) {
    const int n = bm.nodes[static_cast<std::size_t>(l)];
    const Stage& st = tree.stageOf(n);
    const int e = st.index;
    const int NQ = st.numOpNodes();
    for (int i = 0; i < nPv; ++i) {
      const PvTechnology& pv = inst.pv[static_cast<std::size_t>(i)];
      bm.vx[l][i] = m.addVar(names::x(n, i), VarKind::Binary, 0, 1);
      bm.vxt[l][i] = m.addVar(names::xt(n, i), VarKind::Continuous, 0, pv.maxPanels);
      bm.val[l][i] = m.addVar(names::al(n, i), VarKind::Binary, 0, 1);
      bm.vzR[l][i].assign(static_cast<std::size_t>(NQ), -1);
    }
    for (int b = 0; b < nBess; ++b) {
      const BessTechnology& bt = inst.bess[static_cast<std::size_t>(b)];
      bm.vxp[l][b] = m.addVar(names::xp(n, b), VarKind::Binary, 0, 1);
      bm.vxpt[l][b] = m.addVar(names::xpt(n, b), VarKind::Integer, 0, bt.maxUnits);
      bm.vbt[l][b] = m.addVar(names::bt(n, b), VarKind::Binary, 0, 1);
      bm.vy[l][b].assign(static_cast<std::size_t>(NQ), -1);
      bm.vyp[l][b].assign(static_cast<std::size_t>(NQ), -1);
      bm.vym[l][b].assign(static_cast<std::size_t>(NQ), -1);
    }
    bm.vzG[l].assign(static_cast<std::size_t>(NQ), -1);
    for (int j = 0; j < nEl; ++j) bm.vdl[l][j].assign(static_cast<std::size_t>(NQ), -1);
    for (int k = 0; k < nDe; ++k) bm.vde[l][k].assign(static_cast<std::size_t>(NQ), -1);

    for (int s = 0; s < st.numScenarios(); ++s) {
      for (int t = 1; t <= st.numPeriods(); ++t) {
        const int q = st.opNode(s, t);
        if (st.isPv(t))
          for (int i = 0; i < nPv; ++i)
            bm.vzR[l][i][q] = m.addVar(names::zR(n, i, s, t), VarKind::Continuous, 0,
                                       std::numeric_limits<double>::infinity());
        bm.vzG[l][q] =
            m.addVar(names::zG(n, s, t), VarKind::Continuous, 0, std::numeric_limits<double>::infinity());
        for (int b = 0; b < nBess; ++b) {
          bm.vy[l][b][q] =
              m.addVar(names::y(n, b, s, t), VarKind::Continuous, 0, std::numeric_limits<double>::infinity());
          bm.vyp[l][b][q] =
              m.addVar(names::yp(n, b, s, t), VarKind::Continuous, 0, std::numeric_limits<double>::infinity());
          // a battery that starts the horizon empty cannot discharge in the
          // very first period
          const bool frozenDischarge = n == 0 && t == st.firstPeriod();
          bm.vym[l][b][q] = m.addVar(names::ym(n, b, s, t), VarKind::Continuous, 0,
                                     frozenDischarge ? 0.0 : std::numeric_limits<double>::infinity());
        }
        for (int j = 0; j < nEl; ++j) {
          const ElasticLoad& el = inst.loads.elastic[static_cast<std::size_t>(j)];
          if (el.inWindow(e, t))
            bm.vdl[l][j][q] = m.addVar(names::dl(n, j, s, t), VarKind::Continuous, 0,
                                       el.maxCurtail[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)]);
        }
      }
      for (int k = 0; k < nDe; ++k)
        for (int t : inst.feasibleStarts(k, e))
          bm.vde[l][k][st.opNode(s, t)] = m.addVar(names::de(n, k, s, t), VarKind::Binary, 0, 1);
    }
    if (variant == Variant::SD) {
      const auto& profiles = inst.discomfort.profiles[static_cast<std::size_t>(e - 1)];
      bm.vsx[static_cast<std::size_t>(l)].assign(profiles.size(), {});
      bm.vet[static_cast<std::size_t>(l)].assign(profiles.size(), {});
      for (std::size_t p = 0; p < profiles.size(); ++p) {
        const SdProfile& prof = profiles[p];
        for (int pi = 0; pi < st.numScenarios(); ++pi) {
          bm.vsx[l][p].push_back(m.addVar(names::sx(n, static_cast<int>(p), pi), VarKind::Continuous, 0,
                                          prof.maxExcess * prof.threshold));
          bm.vet[l][p].push_back(m.addVar(names::et(n, static_cast<int>(p), pi), VarKind::Binary, 0, 1));
        }
      }
    }
  }

  // ------------------------------------------------------------- objective
  for (int l = 0; l < L; ++l) {
    const int n = bm.nodes[static_cast<std::size_t>(l)];
    const Stage& st = tree.stageOf(n);
    const int e = st.index;
    const double wn = detail::weightOf(tree, subset, n);
    const int parent = tree.nodes[static_cast<std::size_t>(n)].parent;
    const int lp = n == 0 ? -1 : bm.local(parent);
    const std::size_t ni = static_cast<std::size_t>(n);

    for (int i = 0; i < nPv; ++i) {
      const PvTechnology& pv = inst.pv[static_cast<std::size_t>(i)];
      m.addObj(bm.vx[l][i], wn * pv.prepCost[ni]);
      m.addObj(bm.vxt[l][i], wn * (pv.unitCost[ni] + pv.maintCost[ni]));
      if (lp >= 0) {
        m.addObj(bm.vx[lp][i], -wn * pv.prepCost[ni]);
        m.addObj(bm.vxt[lp][i], -wn * pv.unitCost[ni]);
      }
      if (e == tree.numStages()) m.addObj(bm.vxt[l][i], -wn * pv.residualValue[ni]);
    }
    for (int b = 0; b < nBess; ++b) {
      const BessTechnology& bs = inst.bess[static_cast<std::size_t>(b)];
      m.addObj(bm.vxp[l][b], wn * bs.prepCost[ni]);
      m.addObj(bm.vxpt[l][b], wn * (bs.unitCost[ni] + bs.maintCost[ni]));
      if (lp >= 0) {
        m.addObj(bm.vxp[lp][b], -wn * bs.prepCost[ni]);
        m.addObj(bm.vxpt[lp][b], -wn * bs.unitCost[ni]);
      }
      if (e == tree.numStages()) m.addObj(bm.vxpt[l][b], -wn * bs.residualValue[ni]);
    }

    for (int s = 0; s < st.numScenarios(); ++s) {
      const double ws = toDouble(st.scenarios[static_cast<std::size_t>(s)].prob);
      for (int t = 1; t <= st.numPeriods(); ++t) {
        const int q = st.opNode(s, t);
        const double scale = wn * static_cast<double>(st.days) * ws * st.hours(t);
        m.addObj(bm.vzG[l][q],
                 scale * inst.grid.importPrice[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                              [static_cast<std::size_t>(t - 1)]);
        for (int b = 0; b < nBess; ++b) {
          const double eps = inst.bess[static_cast<std::size_t>(b)].opCost;
          m.addObj(bm.vyp[l][b][q], scale * eps);
          m.addObj(bm.vym[l][b][q], scale * eps);
        }
        if (st.isPv(t)) {
          const double price = inst.grid.exportPrice[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                                    [static_cast<std::size_t>(t - 1)];
          for (int i = 0; i < nPv; ++i) {
            const PvTechnology& pv = inst.pv[static_cast<std::size_t>(i)];
            const double avail = pv.availability[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                                [static_cast<std::size_t>(t - 1)];
            const double genCost = pv.genCost[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                             [static_cast<std::size_t>(t - 1)];
            m.addObj(bm.vzR[l][i][q], scale * (genCost + price));
            m.addObj(bm.vxt[l][i], -scale * price * avail * pv.panelKw);
          }
        }
      }
    }
  }

  // ----------------------------------------------------------- constraints
  for (int l = 0; l < L; ++l) {
    const int n = bm.nodes[static_cast<std::size_t>(l)];
    const Stage& st = tree.stageOf(n);
    const int e = st.index;
    const std::size_t ni = static_cast<std::size_t>(n);
    const int parent = tree.nodes[ni].parent;
    const int lp = n == 0 ? -1 : bm.local(parent);
    const std::string sn = std::to_string(n);

    // --- investment state
    std::vector<std::pair<int, double>> oneNew, totPv, budget;
    for (int i = 0; i < nPv; ++i) {
      const PvTechnology& pv = inst.pv[static_cast<std::size_t>(i)];
      const std::string tag = sn + "_" + std::to_string(i);
      m.addConstr("pv_impulse_" + tag, {{bm.val[l][i], 1.0}, {bm.vx[l][i], -1.0}}, Sense::LE, 0);
      m.addConstr("pv_cap_link_" + tag, {{bm.vxt[l][i], 1.0}, {bm.vx[l][i], -pv.maxPanels}}, Sense::LE, 0);
      std::vector<std::pair<int, double>> lo{{bm.val[l][i], inst.limits.pvMinBatch}, {bm.vxt[l][i], -1.0}};
      std::vector<std::pair<int, double>> hi{{bm.vxt[l][i], 1.0}, {bm.val[l][i], -pv.maxPanels}};
      if (lp >= 0) {
        m.addConstr("pv_step_" + tag, {{bm.vx[lp][i], 1.0}, {bm.vx[l][i], -1.0}}, Sense::LE, 0);
        m.addConstr("pv_monotone_" + tag, {{bm.vxt[lp][i], 1.0}, {bm.vxt[l][i], -1.0}}, Sense::LE, 0);
        lo.push_back({bm.vxt[lp][i], 1.0});
        hi.push_back({bm.vxt[lp][i], -1.0});
        oneNew.push_back({bm.vx[lp][i], -1.0});
        budget.push_back({bm.vx[lp][i], -pv.prepCost[ni]});
        budget.push_back({bm.vxt[lp][i], -pv.unitCost[ni]});
      }
      m.addConstr("pv_batch_lo_" + tag, lo, Sense::LE, 0);
      m.addConstr("pv_batch_hi_" + tag, hi, Sense::LE, 0);
      oneNew.push_back({bm.vx[l][i], 1.0});
      totPv.push_back({bm.vxt[l][i], 1.0});
      budget.push_back({bm.vx[l][i], pv.prepCost[ni]});
      budget.push_back({bm.vxt[l][i], pv.unitCost[ni]});
    }
    m.addConstr("pv_one_new_" + sn, oneNew, Sense::LE, 1);
    m.addConstr("pv_total_" + sn, totPv, Sense::LE, inst.limits.pvTotalCap);

    std::vector<std::pair<int, double>> oneNewB, totB;
    for (int b = 0; b < nBess; ++b) {
      const BessTechnology& bs = inst.bess[static_cast<std::size_t>(b)];
      const std::string tag = sn + "_" + std::to_string(b);
      m.addConstr("bess_impulse_" + tag, {{bm.vbt[l][b], 1.0}, {bm.vxp[l][b], -1.0}}, Sense::LE, 0);
      m.addConstr("bess_cap_link_" + tag, {{bm.vxpt[l][b], 1.0}, {bm.vxp[l][b], -bs.maxUnits}}, Sense::LE, 0);
      std::vector<std::pair<int, double>> lo{{bm.vbt[l][b], inst.limits.bessMinBatch}, {bm.vxpt[l][b], -1.0}};
      std::vector<std::pair<int, double>> hi{{bm.vxpt[l][b], 1.0}, {bm.vbt[l][b], -bs.maxUnits}};
      if (lp >= 0) {
        m.addConstr("bess_step_" + tag, {{bm.vxp[lp][b], 1.0}, {bm.vxp[l][b], -1.0}}, Sense::LE, 0);
        m.addConstr("bess_monotone_" + tag, {{bm.vxpt[lp][b], 1.0}, {bm.vxpt[l][b], -1.0}}, Sense::LE, 0);
        lo.push_back({bm.vxpt[lp][b], 1.0});
        hi.push_back({bm.vxpt[lp][b], -1.0});
        oneNewB.push_back({bm.vxp[lp][b], -1.0});
        budget.push_back({bm.vxp[lp][b], -bs.prepCost[ni]});
        budget.push_back({bm.vxpt[lp][b], -bs.unitCost[ni]});
      }
      m.addConstr("bess_batch_lo_" + tag, lo, Sense::LE, 0);
      m.addConstr("bess_batch_hi_" + tag, hi, Sense::LE, 0);
      oneNewB.push_back({bm.vxp[l][b], 1.0});
      totB.push_back({bm.vxpt[l][b], 1.0});
      budget.push_back({bm.vxp[l][b], bs.prepCost[ni]});
      budget.push_back({bm.vxpt[l][b], bs.unitCost[ni]});
    }
    m.addConstr("bess_one_new_" + sn, oneNewB, Sense::LE, 1);
    m.addConstr("bess_total_" + sn, totB, Sense::LE, inst.limits.bessTotalCap);
    m.addConstr("budget_" + sn, budget, Sense::LE, inst.limits.budget[ni]);

    // --- operations
    for (int s = 0; s < st.numScenarios(); ++s) {
      for (int t = 1; t <= st.numPeriods(); ++t) {
        const int q = st.opNode(s, t);
        const std::string tq = sn + "_s" + std::to_string(s) + "_t" + std::to_string(t);
        const double mt = st.hours(t);

        if (st.isPv(t)) {
          for (int i = 0; i < nPv; ++i) {
            const PvTechnology& pv = inst.pv[static_cast<std::size_t>(i)];
            const double avail = pv.availability[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                                [static_cast<std::size_t>(t - 1)];
            m.addConstr("pv_output_" + tq + "_" + std::to_string(i),
                        {{bm.vzR[l][i][q], 1.0}, {bm.vxt[l][i], -avail * pv.panelKw}}, Sense::LE, 0);
          }
        }

        // energy balance: sources minus sinks
        std::vector<std::pair<int, double>> bal;
        double rhs = inst.loads.baseLoad[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                        [static_cast<std::size_t>(t - 1)];
        if (st.isPv(t))
          for (int i = 0; i < nPv; ++i) bal.push_back({bm.vzR[l][i][q], 1.0});
        bal.push_back({bm.vzG[l][q], 1.0});
        for (int b = 0; b < nBess; ++b) {
          bal.push_back({bm.vym[l][b][q], 1.0});
          bal.push_back({bm.vyp[l][b][q], -1.0});
        }
        for (int j = 0; j < nEl; ++j) {
          const ElasticLoad& el = inst.loads.elastic[static_cast<std::size_t>(j)];
          if (el.inWindow(e, t)) {
            rhs += el.setpoint[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                              [static_cast<std::size_t>(t - 1)];
            bal.push_back({bm.vdl[l][j][q], 1.0});
          }
        }
        for (int k = 0; k < nDe; ++k) {
          const double need = inst.loads.deferrable[static_cast<std::size_t>(k)].hourlyKw[static_cast<std::size_t>(e - 1)];
          for (int qs : inst.supplyWindowSet(k, e, q)) bal.push_back({bm.vde[l][k][qs], -need});
        }
        m.addConstr("balance_" + tq, bal, Sense::EQ, rhs);

        for (int b = 0; b < nBess; ++b) {
          const BessTechnology& bs = inst.bess[static_cast<std::size_t>(b)];
          const double fl = bs.lossFactor[static_cast<std::size_t>(e - 1)];
          const std::string tb = tq + "_" + std::to_string(b);
          m.addConstr("charge_cap_" + tb,
                      {{bm.vyp[l][b][q], mt}, {bm.vxpt[l][b], -bs.chargeDepth[static_cast<std::size_t>(e - 1)] * bs.unitKwh}},
                      Sense::LE, 0);
          m.addConstr("storage_cap_" + tb, {{bm.vy[l][b][q], 1.0}, {bm.vxpt[l][b], -bs.unitKwh}}, Sense::LE, 0);

          if (t > st.firstPeriod()) {
            const int qa = st.opNode(s, t - 1);
            m.addConstr("discharge_cap_" + tb,
                        {{bm.vym[l][b][q], mt},
                         {bm.vy[l][b][qa], -bs.dischargeDepth[static_cast<std::size_t>(e - 1)] * (1 - fl)}},
                        Sense::LE, 0);
            m.addConstr("storage_flow_" + tb,
                        {{bm.vy[l][b][q], 1.0},
                         {bm.vy[l][b][qa], -(1 - fl)},
                         {bm.vyp[l][b][q], -mt},
                         {bm.vym[l][b][q], mt}},
                        Sense::EQ, 0);
          } else if (n == 0) {
            // empty at the start of the horizon
            m.addConstr("storage_init_" + tb, {{bm.vy[l][b][q], 1.0}, {bm.vyp[l][b][q], -mt}}, Sense::EQ, 0);
          } else {
            // expected carry-over from the predecessor stage plus the other
            // days of this stage
            const Stage& pst = tree.stageOf(parent);
            const double flPrev = bs.lossFactor[static_cast<std::size_t>(pst.index - 1)];
            const double dInv = 1.0 / static_cast<double>(st.days);
            std::vector<std::pair<int, double>> carry;
            for (int sp = 0; sp < pst.numScenarios(); ++sp) {
              const double wq = toDouble(pst.scenarios[static_cast<std::size_t>(sp)].prob);
              carry.push_back({bm.vy[lp][b][pst.opNode(sp, pst.lastPeriod())], dInv * wq * (1 - flPrev)});
            }
            const double dRest = (static_cast<double>(st.days) - 1.0) / static_cast<double>(st.days);
            if (dRest > 0) {
              for (int sp = 0; sp < st.numScenarios(); ++sp) {
                const double wq = toDouble(st.scenarios[static_cast<std::size_t>(sp)].prob);
                carry.push_back({bm.vy[l][b][st.opNode(sp, st.lastPeriod())], dRest * wq * (1 - fl)});
              }
            }
            std::vector<std::pair<int, double>> flow{{bm.vy[l][b][q], 1.0}, {bm.vyp[l][b][q], -mt}, {bm.vym[l][b][q], mt}};
            for (const auto& [var, coef] : carry) flow.push_back({var, -coef});
            m.addConstr("storage_carry_" + tb, flow, Sense::EQ, 0);
            std::vector<std::pair<int, double>> dis{{bm.vym[l][b][q], mt}};
            const double depth = bs.dischargeDepth[static_cast<std::size_t>(e - 1)];
            for (const auto& [var, coef] : carry) dis.push_back({var, -depth * coef});
            m.addConstr("discharge_cap_" + tb, dis, Sense::LE, 0);
          }
        }

        // elastic ramping on the adjusted setpoint, where two consecutive
        // periods are both inside the load's window
        for (int j = 0; j < nEl; ++j) {
          const ElasticLoad& el = inst.loads.elastic[static_cast<std::size_t>(j)];
          if (t <= st.firstPeriod() || !el.inWindow(e, t) || !el.inWindow(e, t - 1)) continue;
          const int qa = st.opNode(s, t - 1);
          const double limit = el.rampLimit[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)];
          const double sp = el.setpoint[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                       [static_cast<std::size_t>(t - 1)];
          const double spPrev = el.setpoint[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                           [static_cast<std::size_t>(t - 2)];
          const std::string tj = tq + "_" + std::to_string(j);
          m.addConstr("ramp_up_" + tj, {{bm.vdl[l][j][qa], 1.0}, {bm.vdl[l][j][q], -1.0}}, Sense::LE,
                      limit - (sp - spPrev));
          m.addConstr("ramp_dn_" + tj, {{bm.vdl[l][j][q], 1.0}, {bm.vdl[l][j][qa], -1.0}}, Sense::LE,
                      limit + (sp - spPrev));
        }
      }

      // one start per deferrable load and operational scenario
      for (int k = 0; k < nDe; ++k) {
        std::vector<std::pair<int, double>> once;
        for (int t : inst.feasibleStarts(k, e)) once.push_back({bm.vde[l][k][st.opNode(s, t)], 1.0});
        m.addConstr("start_once_" + sn + "_k" + std::to_string(k) + "_s" + std::to_string(s), once, Sense::EQ, 1);
      }

      // pairwise incompatibilities: supply intervals may not overlap
      for (std::size_t h = 0; h < inst.loads.incompatible.size(); ++h) {
        const auto& [ja, jb] = inst.loads.incompatible[h];
        for (int ta : inst.feasibleStarts(ja, e)) {
          const int ma = *inst.supplyPeriods(ja, e, ta);
          for (int tb : inst.feasibleStarts(jb, e)) {
            const int mb = *inst.supplyPeriods(jb, e, tb);
            const bool overlap = ta <= tb + mb - 1 && tb <= ta + ma - 1;
            if (!overlap) continue;
            m.addConstr("incompatible_" + sn + "_h" + std::to_string(h) + "_s" + std::to_string(s) + "_t" +
                            std::to_string(ta) + "_t" + std::to_string(tb),
                        {{bm.vde[l][ja][st.opNode(s, ta)], 1.0}, {bm.vde[l][jb][st.opNode(s, tb)], 1.0}}, Sense::LE,
                        1);
          }
        }
      }

      // precedence with latency: the follower may only start after the leader
      // completed and the minimum gap elapsed
      for (std::size_t h = 0; h < inst.loads.precedence.size(); ++h) {
        const PrecedencePair& pr = inst.loads.precedence[h];
        for (int ta : inst.feasibleStarts(pr.first, e)) {
          const int q = st.opNode(s, ta);
          std::vector<std::pair<int, double>> row{{bm.vde[l][pr.first][q], 1.0}};
          for (int qs : inst.precedenceSet(pr, e, q)) row.push_back({bm.vde[l][pr.second][qs], -1.0});
          m.addConstr("precedence_" + sn + "_h" + std::to_string(h) + "_s" + std::to_string(s) + "_t" +
                          std::to_string(ta),
                      row, Sense::LE, 0);
        }
      }
    }

    // --- discomfort control
    auto discomfortTerms = [&](int s) {
      std::vector<std::pair<int, double>> terms;
      for (int t = 1; t <= st.numPeriods(); ++t) {
        const int q = st.opNode(s, t);
        for (int j = 0; j < nEl; ++j) {
          if (bm.vdl[l][j][q] < 0) continue;
          const double d1 =
              inst.loads.elastic[static_cast<std::size_t>(j)].discomfort[static_cast<std::size_t>(e - 1)]
                                                                        [static_cast<std::size_t>(t - 1)];
          terms.push_back({bm.vdl[l][j][q], st.hours(t) * d1});
        }
        for (int k = 0; k < nDe; ++k) {
          if (bm.vde[l][k][q] < 0) continue;
          const double d2 =
              inst.loads.deferrable[static_cast<std::size_t>(k)].discomfort[static_cast<std::size_t>(e - 1)]
                                                                           [static_cast<std::size_t>(t - 1)];
          terms.push_back({bm.vde[l][k][q], d2});
        }
      }
      return terms;
    };

    if (variant != Variant::NoD) {
      std::vector<std::pair<int, double>> expected;
      for (int s = 0; s < st.numScenarios(); ++s) {
        const double ws = toDouble(st.scenarios[static_cast<std::size_t>(s)].prob);
        for (auto [var, coef] : discomfortTerms(s)) expected.push_back({var, ws * coef});
      }
      m.addConstr("expected_discomfort_" + sn, expected, Sense::LE,
                  inst.discomfort.expectedCap[static_cast<std::size_t>(e - 1)]);
    }

    if (variant == Variant::SD) {
      const auto& profiles = inst.discomfort.profiles[static_cast<std::size_t>(e - 1)];
      for (std::size_t p = 0; p < profiles.size(); ++p) {
        const SdProfile& prof = profiles[p];
        const std::string np = sn + "_p" + std::to_string(p);
        std::vector<std::pair<int, double>> probRow, expRow;
        for (int s = 0; s < st.numScenarios(); ++s) {
          const double ws = toDouble(st.scenarios[static_cast<std::size_t>(s)].prob);
          auto excess = discomfortTerms(s);
          excess.push_back({bm.vsx[l][p][s], -1.0});
          m.addConstr("sd_excess_" + np + "_s" + std::to_string(s), excess, Sense::LE, prof.threshold);
          m.addConstr("sd_link_" + np + "_s" + std::to_string(s),
                      {{bm.vsx[l][p][s], 1.0}, {bm.vet[l][p][s], -prof.maxExcess * prof.threshold}}, Sense::LE, 0);
          probRow.push_back({bm.vet[l][p][s], ws});
          expRow.push_back({bm.vsx[l][p][s], ws});
        }
        m.addConstr("sd_prob_" + np, probRow, Sense::LE, prof.probBound);
        m.addConstr("sd_expected_" + np, expRow, Sense::LE, prof.expectedExcess * prof.threshold);
      }
    }
  }

  if (fixings)
    for (const auto& [name, value] : *fixings) bm.milp.fix(bm.milp.find(name), value);
  return bm;
}

// ---------------------------------------------------------------------------

// Copies the values of the included nodes out of a solver point.
inline void extractSolution(const Instance& inst, const BuiltModel& bm, const std::vector<double>& values,
                            Solution& sol) {
  auto val = [&values, &bm](int id) {
    double v = values[static_cast<std::size_t>(id)];
    if (bm.milp.var(id).kind != VarKind::Continuous) {
      double r = std::round(v);
      if (std::abs(v - r) <= 1e-6) v = r;
    }
    return v;
  };
  for (std::size_t l = 0; l < bm.nodes.size(); ++l) {
    const int n = bm.nodes[l];
    NodeSolution& ns = sol.nodes[static_cast<std::size_t>(n)];
    const Stage& st = inst.tree.stageOf(n);
    for (int i = 0; i < inst.numPv(); ++i) {
      ns.x[static_cast<std::size_t>(i)] = val(bm.vx[l][i]);
      ns.xt[static_cast<std::size_t>(i)] = val(bm.vxt[l][i]);
      ns.al[static_cast<std::size_t>(i)] = val(bm.val[l][i]);
      for (int q = 0; q < st.numOpNodes(); ++q)
        ns.zR[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)] =
            bm.vzR[l][i][q] >= 0 ? val(bm.vzR[l][i][q]) : 0.0;
    }
    for (int b = 0; b < inst.numBess(); ++b) {
      ns.xp[static_cast<std::size_t>(b)] = val(bm.vxp[l][b]);
      ns.xpt[static_cast<std::size_t>(b)] = val(bm.vxpt[l][b]);
      ns.bt[static_cast<std::size_t>(b)] = val(bm.vbt[l][b]);
      for (int q = 0; q < st.numOpNodes(); ++q) {
        ns.y[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)] = val(bm.vy[l][b][q]);
        ns.yp[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)] = val(bm.vyp[l][b][q]);
        ns.ym[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)] = val(bm.vym[l][b][q]);
      }
    }
    for (int q = 0; q < st.numOpNodes(); ++q) ns.zG[static_cast<std::size_t>(q)] = val(bm.vzG[l][q]);
    for (int j = 0; j < inst.numElastic(); ++j)
      for (int q = 0; q < st.numOpNodes(); ++q)
        ns.dl[static_cast<std::size_t>(j)][static_cast<std::size_t>(q)] =
            bm.vdl[l][j][q] >= 0 ? val(bm.vdl[l][j][q]) : 0.0;
    for (int k = 0; k < inst.numDeferrable(); ++k)
      for (int q = 0; q < st.numOpNodes(); ++q)
        ns.de[static_cast<std::size_t>(k)][static_cast<std::size_t>(q)] =
            bm.vde[l][k][q] >= 0 ? val(bm.vde[l][k][q]) : 0.0;
    if (bm.variant == Variant::SD) {
      for (std::size_t p = 0; p < bm.vsx[l].size(); ++p)
        for (int s = 0; s < st.numScenarios(); ++s) {
          ns.s[p][static_cast<std::size_t>(s)] = val(bm.vsx[l][p][s]);
          ns.eta[p][static_cast<std::size_t>(s)] = val(bm.vet[l][p][s]);
        }
    }
    sol.filled[static_cast<std::size_t>(n)] = 1;
  }
}

// Equality fixings for all variables of the given nodes (or only the
// investment variables), in the shared naming scheme.
inline Fixings fixingsFromSolution(const Instance& inst, const Solution& sol, const std::vector<int>& nodes,
                                   bool strategicOnly = false) {
  Fixings fx;
  for (int n : nodes) {
    if (!sol.filled[static_cast<std::size_t>(n)]) throw Error("node " + std::to_string(n) + " has no solution values");
    const NodeSolution& ns = sol.nodes[static_cast<std::size_t>(n)];
    const Stage& st = inst.tree.stageOf(n);
    for (int i = 0; i < inst.numPv(); ++i) {
      fx[names::x(n, i)] = ns.x[static_cast<std::size_t>(i)];
      fx[names::xt(n, i)] = ns.xt[static_cast<std::size_t>(i)];
      fx[names::al(n, i)] = ns.al[static_cast<std::size_t>(i)];
    }
    for (int b = 0; b < inst.numBess(); ++b) {
      fx[names::xp(n, b)] = ns.xp[static_cast<std::size_t>(b)];
      fx[names::xpt(n, b)] = ns.xpt[static_cast<std::size_t>(b)];
      fx[names::bt(n, b)] = ns.bt[static_cast<std::size_t>(b)];
    }
    if (strategicOnly) continue;
    for (int s = 0; s < st.numScenarios(); ++s) {
      for (int t = 1; t <= st.numPeriods(); ++t) {
        const int q = st.opNode(s, t);
        if (st.isPv(t))
          for (int i = 0; i < inst.numPv(); ++i)
            fx[names::zR(n, i, s, t)] = ns.zR[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)];
        fx[names::zG(n, s, t)] = ns.zG[static_cast<std::size_t>(q)];
        for (int b = 0; b < inst.numBess(); ++b) {
          fx[names::y(n, b, s, t)] = ns.y[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)];
          fx[names::yp(n, b, s, t)] = ns.yp[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)];
          fx[names::ym(n, b, s, t)] = ns.ym[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)];
        }
        for (int j = 0; j < inst.numElastic(); ++j)
          if (inst.loads.elastic[static_cast<std::size_t>(j)].inWindow(st.index, t))
            fx[names::dl(n, j, s, t)] = ns.dl[static_cast<std::size_t>(j)][static_cast<std::size_t>(q)];
      }
      for (int k = 0; k < inst.numDeferrable(); ++k)
        for (int t : inst.feasibleStarts(k, st.index))
          fx[names::de(n, k, s, t)] =
              ns.de[static_cast<std::size_t>(k)][static_cast<std::size_t>(st.opNode(s, t))];
    }
    if (sol.variant == Variant::SD && !ns.s.empty()) {
      for (std::size_t p = 0; p < ns.s.size(); ++p)
        for (int s = 0; s < st.numScenarios(); ++s) {
          fx[names::sx(n, static_cast<int>(p), s)] = ns.s[p][static_cast<std::size_t>(s)];
          fx[names::et(n, static_cast<int>(p), s)] = ns.eta[p][static_cast<std::size_t>(s)];
        }
    }
  }
  return fx;
}

}  // namespace mhres

#endif
