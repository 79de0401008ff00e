#ifndef MHRES_TESTS_ORACLE_HPP
#define MHRES_TESTS_ORACLE_HPP

#include <functional>
#include <limits>
#include <vector>

#include <Highs.h>

#include "mhres/model.hpp"
#include "mhres/solve.hpp"

namespace mhres::testing {

struct OracleResult {
  double objective = std::numeric_limits<double>::infinity();
  long combos = 0;
  long lpSolves = 0;
  bool feasible = false;
};

// Exhaustive reference optimum: enumerates every admissible assignment of the
// integer and binary variables directly from the instance data (installation
// state machines per technology, one start choice per deferrable load and
// scenario) and solves the residual LP for each assignment with the regular
// backend. Independent of the branch-and-bound path of the solver.
inline OracleResult enumerationOracle(const Instance& inst, long comboLimit = 2000000) {
  BuiltModel bm = buildModel(inst, Variant::NoD);

  Highs highs;
  highs.setOptionValue("output_flag", false);
  highs.setOptionValue("threads", 1);
  {
    HighsLp lp = backend::toHighsLp(bm.milp);
    lp.integrality_.clear();  // integers are pinned per combo via bounds
    if (highs.passModel(lp) == HighsStatus::kError) throw Error("oracle: backend rejected the model");
  }

  const MultiHorizonTree& tree = inst.tree;
  const int nPv = inst.numPv();
  const int nBess = inst.numBess();
  const int nDe = inst.numDeferrable();

  struct NodeAssign {
    std::vector<int> pvX, pvAl;
    std::vector<int> bsX, bsBt, bsXpt;
    // start period per (deferrable, scenario)
    std::vector<std::vector<int>> start;
  };

  std::vector<NodeAssign> chosen(static_cast<std::size_t>(tree.numNodes()));
  OracleResult result;

  std::vector<HighsInt> cols;
  std::vector<double> lo, hi;
  auto evaluate = [&]() {
    ++result.combos;
    if (result.combos > comboLimit) throw Error("oracle: combination limit exceeded");
    cols.clear();
    lo.clear();
    hi.clear();
    auto pin = [&](int id, double v) {
      cols.push_back(id);
      lo.push_back(v);
      hi.push_back(v);
    };
    for (std::size_t l = 0; l < bm.nodes.size(); ++l) {
      const int n = bm.nodes[l];
      const NodeAssign& asg = chosen[static_cast<std::size_t>(n)];
      const Stage& st = tree.stageOf(n);
      for (int i = 0; i < nPv; ++i) {
        pin(bm.vx[l][i], asg.pvX[static_cast<std::size_t>(i)]);
        pin(bm.val[l][i], asg.pvAl[static_cast<std::size_t>(i)]);
      }
      for (int b = 0; b < nBess; ++b) {
        pin(bm.vxp[l][b], asg.bsX[static_cast<std::size_t>(b)]);
        pin(bm.vbt[l][b], asg.bsBt[static_cast<std::size_t>(b)]);
        pin(bm.vxpt[l][b], asg.bsXpt[static_cast<std::size_t>(b)]);
      }
      for (int k = 0; k < nDe; ++k)
        for (int s = 0; s < st.numScenarios(); ++s)
          for (int t : inst.feasibleStarts(k, st.index))
            pin(bm.vde[l][k][st.opNode(s, t)], asg.start[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] == t ? 1.0 : 0.0);
    }
    highs.changeColsBounds(static_cast<HighsInt>(cols.size()), cols.data(), lo.data(), hi.data());
    if (highs.run() == HighsStatus::kError) throw Error("oracle: LP solve failed");
    ++result.lpSolves;
    if (highs.getModelStatus() == HighsModelStatus::kOptimal) {
      result.feasible = true;
      result.objective = std::min(result.objective, highs.getInfo().objective_function_value);
    }
  };

  // admissible per-node start vectors under incompatibility and precedence
  auto startChoices = [&](int e) {
    const Stage& st = tree.stage(e);
    std::vector<std::vector<std::vector<int>>> perScenario;  // [s] -> list of per-load start tuples
    for (int s = 0; s < st.numScenarios(); ++s) {
      std::vector<std::vector<int>> tuples;
      std::vector<int> cur(static_cast<std::size_t>(nDe), 0);
      std::function<void(int)> rec = [&](int k) {
        if (k == nDe) {
          tuples.push_back(cur);
          return;
        }
        for (int t : inst.feasibleStarts(k, e)) {
          cur[static_cast<std::size_t>(k)] = t;
          bool ok = true;
          for (const auto& [ja, jb] : inst.loads.incompatible) {
            if (ja > k || jb > k) continue;
            const int ta = cur[static_cast<std::size_t>(ja)];
            const int tb = cur[static_cast<std::size_t>(jb)];
            if (ta <= tb + *inst.supplyPeriods(jb, e, tb) - 1 && tb <= ta + *inst.supplyPeriods(ja, e, ta) - 1)
              ok = false;
          }
          for (const auto& pr : inst.loads.precedence) {
            if (pr.first > k || pr.second > k) continue;
            const int ta = cur[static_cast<std::size_t>(pr.first)];
            const int tb = cur[static_cast<std::size_t>(pr.second)];
            if (tb < ta + *inst.supplyPeriods(pr.first, e, ta) + pr.minGap) ok = false;
          }
          if (ok) rec(k + 1);
        }
      };
      rec(0);
      perScenario.push_back(std::move(tuples));
    }
    return perScenario;
  };
  std::vector<std::vector<std::vector<std::vector<int>>>> startsByStage;
  for (int e = 1; e <= tree.numStages(); ++e) startsByStage.push_back(startChoices(e));

  // depth-first over nodes in id order; parents precede children
  std::function<void(int)> visit = [&](int n) {
    if (n == tree.numNodes()) {
      evaluate();
      return;
    }
    const Stage& st = tree.stageOf(n);
    const int parent = tree.nodes[static_cast<std::size_t>(n)].parent;
    const NodeAssign* pa = parent >= 0 ? &chosen[static_cast<std::size_t>(parent)] : nullptr;
    NodeAssign& asg = chosen[static_cast<std::size_t>(n)];
    asg.pvX.assign(static_cast<std::size_t>(nPv), 0);
    asg.pvAl.assign(static_cast<std::size_t>(nPv), 0);
    asg.bsX.assign(static_cast<std::size_t>(nBess), 0);
    asg.bsBt.assign(static_cast<std::size_t>(nBess), 0);
    asg.bsXpt.assign(static_cast<std::size_t>(nBess), 0);
    asg.start.assign(static_cast<std::size_t>(nDe), std::vector<int>(static_cast<std::size_t>(st.numScenarios()), 0));

    std::function<void(int)> pvRec = [&](int i) {
      if (i == nPv) {
        int newTech = 0;
        for (int ii = 0; ii < nPv; ++ii)
          newTech += asg.pvX[static_cast<std::size_t>(ii)] - (pa ? pa->pvX[static_cast<std::size_t>(ii)] : 0);
        if (newTech > 1) return;
        std::function<void(int)> bsRec = [&](int b) {
          if (b == nBess) {
            int newBess = 0;
            for (int bb = 0; bb < nBess; ++bb)
              newBess += asg.bsX[static_cast<std::size_t>(bb)] - (pa ? pa->bsX[static_cast<std::size_t>(bb)] : 0);
            if (newBess > 1) return;
            std::function<void(int)> deRec = [&](int s) {
              if (s == st.numScenarios()) {
                visit(n + 1);
                return;
              }
              for (const auto& tuple : startsByStage[static_cast<std::size_t>(st.index - 1)][static_cast<std::size_t>(s)]) {
                for (int k = 0; k < nDe; ++k) asg.start[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] = tuple[static_cast<std::size_t>(k)];
                deRec(s + 1);
              }
            };
            if (nDe == 0) {
              visit(n + 1);
            } else {
              deRec(0);
            }
            return;
          }
          const BessTechnology& bs = inst.bess[static_cast<std::size_t>(b)];
          const int prevX = pa ? pa->bsX[static_cast<std::size_t>(b)] : 0;
          const int prevXpt = pa ? pa->bsXpt[static_cast<std::size_t>(b)] : 0;
          for (int xv = prevX; xv <= 1; ++xv) {
            asg.bsX[static_cast<std::size_t>(b)] = xv;
            const int capUnits = static_cast<int>(bs.maxUnits);
            for (int units = prevXpt; units <= (xv ? capUnits : 0); ++units) {
              asg.bsXpt[static_cast<std::size_t>(b)] = units;
              for (int bt = 0; bt <= xv; ++bt) {
                const int delta = units - prevXpt;
                if (bt == 0 && delta != 0) continue;
                if (bt == 1 && (delta < inst.limits.bessMinBatch || delta > bs.maxUnits)) continue;
                asg.bsBt[static_cast<std::size_t>(b)] = bt;
                bsRec(b + 1);
              }
            }
          }
        };
        bsRec(0);
        return;
      }
      const int prevX = pa ? pa->pvX[static_cast<std::size_t>(i)] : 0;
      const int prevAlLow = 0;
      for (int xv = prevX; xv <= 1; ++xv) {
        asg.pvX[static_cast<std::size_t>(i)] = xv;
        for (int av = prevAlLow; av <= xv; ++av) {
          asg.pvAl[static_cast<std::size_t>(i)] = av;
          pvRec(i + 1);
        }
      }
    };
    pvRec(0);
  };
  visit(0);
  return result;
}

}  // namespace mhres::testing

#endif
