#ifndef MHRES_AUDIT_HPP
#define MHRES_AUDIT_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mhres/instance.hpp"
#include "mhres/solution.hpp"

namespace mhres {

// Everything in this header re-evaluates the model arithmetically from the
// instance data and a candidate solution. It shares no code with the MILP
// emitter or the solver, so it can certify their output.

// Discomfort accumulated along one operational scenario of a strategic node.
inline double scenarioDiscomfort(const Instance& inst, const Solution& sol, int n, int pi) {
  const Stage& st = inst.tree.stageOf(n);
  const int e = st.index;
  const NodeSolution& ns = sol.nodes[static_cast<std::size_t>(n)];
  double total = 0;
  for (int t = 1; t <= st.numPeriods(); ++t) {
    const int q = st.opNode(pi, t);
    for (int j = 0; j < inst.numElastic(); ++j) {
      const ElasticLoad& el = inst.loads.elastic[static_cast<std::size_t>(j)];
      if (!el.inWindow(e, t)) continue;
      total += st.hours(t) * el.discomfort[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)] *
               ns.dl[static_cast<std::size_t>(j)][static_cast<std::size_t>(q)];
    }
    for (int k = 0; k < inst.numDeferrable(); ++k) {
      const DeferrableLoad& d = inst.loads.deferrable[static_cast<std::size_t>(k)];
      if (!d.inWindow(e, t)) continue;
      total += d.discomfort[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)] *
               ns.de[static_cast<std::size_t>(k)][static_cast<std::size_t>(q)];
    }
  }
  return total;
}

inline double expectedDiscomfort(const Instance& inst, const Solution& sol, int n) {
  const Stage& st = inst.tree.stageOf(n);
  double total = 0;
  for (int pi = 0; pi < st.numScenarios(); ++pi)
    total += toDouble(st.scenarios[static_cast<std::size_t>(pi)].prob) * scenarioDiscomfort(inst, sol, n, pi);
  return total;
}

// Recomputes the objective directly from the data.
inline CostBreakdown evaluateCost(const Instance& inst, const Solution& sol) {
  const MultiHorizonTree& tree = inst.tree;
  CostBreakdown out;
  for (int n = 0; n < tree.numNodes(); ++n) {
    const NodeSolution& ns = sol.nodes[static_cast<std::size_t>(n)];
    const Stage& st = tree.stageOf(n);
    const int e = st.index;
    const double wn = toDouble(tree.nodes[static_cast<std::size_t>(n)].weight);
    const int a = tree.nodes[static_cast<std::size_t>(n)].parent;
    const NodeSolution* pa = a >= 0 ? &sol.nodes[static_cast<std::size_t>(a)] : nullptr;
    const std::size_t ni = static_cast<std::size_t>(n);

    for (int i = 0; i < inst.numPv(); ++i) {
      const PvTechnology& pv = inst.pv[static_cast<std::size_t>(i)];
      const std::size_t ii = static_cast<std::size_t>(i);
      const double dx = ns.x[ii] - (pa ? pa->x[ii] : 0.0);
      const double dxt = ns.xt[ii] - (pa ? pa->xt[ii] : 0.0);
      out.strategicPv += wn * (pv.prepCost[ni] * dx + pv.unitCost[ni] * dxt + pv.maintCost[ni] * ns.xt[ii]);
      if (e == tree.numStages()) out.residual += wn * pv.residualValue[ni] * ns.xt[ii];
    }
    for (int b = 0; b < inst.numBess(); ++b) {
      const BessTechnology& bs = inst.bess[static_cast<std::size_t>(b)];
      const std::size_t bi = static_cast<std::size_t>(b);
      const double dx = ns.xp[bi] - (pa ? pa->xp[bi] : 0.0);
      const double dxt = ns.xpt[bi] - (pa ? pa->xpt[bi] : 0.0);
      out.strategicBess += wn * (bs.prepCost[ni] * dx + bs.unitCost[ni] * dxt + bs.maintCost[ni] * ns.xpt[bi]);
      if (e == tree.numStages()) out.residual += wn * bs.residualValue[ni] * ns.xpt[bi];
    }

    for (int s = 0; s < st.numScenarios(); ++s) {
      const double ws = toDouble(st.scenarios[static_cast<std::size_t>(s)].prob);
      for (int t = 1; t <= st.numPeriods(); ++t) {
        const int q = st.opNode(s, t);
        const std::size_t qi = static_cast<std::size_t>(q);
        const double scale = wn * static_cast<double>(st.days) * ws * st.hours(t);
        double hourly = inst.grid.importPrice[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                             [static_cast<std::size_t>(t - 1)] *
                        ns.zG[qi];
        for (int b = 0; b < inst.numBess(); ++b)
          hourly += inst.bess[static_cast<std::size_t>(b)].opCost *
                    (ns.yp[static_cast<std::size_t>(b)][qi] + ns.ym[static_cast<std::size_t>(b)][qi]);
        if (st.isPv(t)) {
          const double price = inst.grid.exportPrice[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                                    [static_cast<std::size_t>(t - 1)];
          for (int i = 0; i < inst.numPv(); ++i) {
            const PvTechnology& pv = inst.pv[static_cast<std::size_t>(i)];
            const std::size_t ii = static_cast<std::size_t>(i);
            const double avail = pv.availability[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                                [static_cast<std::size_t>(t - 1)];
            hourly += pv.genCost[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                [static_cast<std::size_t>(t - 1)] *
                      ns.zR[ii][qi];
            hourly -= price * (avail * pv.panelKw * ns.xt[ii] - ns.zR[ii][qi]);
          }
        }
        out.operational += scale * hourly;
      }
    }
  }
  return out;
}

struct AuditViolation {
  std::string family;
  std::string index;
  double residual = 0;
};

struct AuditReport {
  std::vector<AuditViolation> violations;
  double maxResidual = 0;
  long checked = 0;
  bool pass() const { return violations.empty(); }
  std::string toString() const {
    std::string out;
    for (const auto& v : violations)
      out += v.family + " [" + v.index + "] residual " + std::to_string(v.residual) + "\n";
    return out;
  }
};

namespace detail {

class AuditSink {
public:
  AuditSink(AuditReport& rep, double tol) : rep_(rep), tol_(tol) {}
  void le(const std::string& family, const std::string& index, double lhs, double rhs) {
    check(family, index, (lhs - rhs) / scale(rhs));
  }
  void eq(const std::string& family, const std::string& index, double lhs, double rhs) {
    check(family, index, std::abs(lhs - rhs) / scale(rhs));
  }
  void integral(const std::string& family, const std::string& index, double v) {
    check(family, index, std::abs(v - std::round(v)));
  }

private:
  static double scale(double rhs) { return std::max(1.0, std::abs(rhs)); }
  void check(const std::string& family, const std::string& index, double residual) {
    ++rep_.checked;
    rep_.maxResidual = std::max(rep_.maxResidual, residual);
    if (residual > tol_) rep_.violations.push_back({family, index, residual});
  }
  AuditReport& rep_;
  double tol_;
};

}  // namespace detail

// Re-evaluates every constraint family of the chosen variant. Violations are
// reported with the constraint family tag and the offending index tuple.
inline AuditReport checkFeasibility(const Instance& inst, const Solution& sol, Variant variant,
                                    double tol = 1e-6) {
  if (!sol.complete()) throw Error("missing variable values: solution does not cover every strategic node");
  const MultiHorizonTree& tree = inst.tree;
  AuditReport rep;
  detail::AuditSink a(rep, tol);

  for (int n = 0; n < tree.numNodes(); ++n) {
    const NodeSolution& ns = sol.nodes[static_cast<std::size_t>(n)];
    const Stage& st = tree.stageOf(n);
    const int e = st.index;
    const std::size_t ni = static_cast<std::size_t>(n);
    const int parent = tree.nodes[ni].parent;
    const NodeSolution* pa = parent >= 0 ? &sol.nodes[static_cast<std::size_t>(parent)] : nullptr;
    const std::string sn = "n=" + std::to_string(n);

    double oneNewPv = 0, totalPv = 0, budget = 0;
    for (int i = 0; i < inst.numPv(); ++i) {
      const PvTechnology& pv = inst.pv[static_cast<std::size_t>(i)];
      const std::size_t ii = static_cast<std::size_t>(i);
      const std::string ix = sn + ",i=" + std::to_string(i);
      a.integral("domain_binary", ix + ",x", ns.x[ii]);
      a.integral("domain_binary", ix + ",al", ns.al[ii]);
      a.le("domain_binary", ix + ",x<=1", ns.x[ii], 1);
      a.le("pv_impulse", ix, ns.al[ii], ns.x[ii]);
      const double prevX = pa ? pa->x[ii] : 0.0;
      const double prevXt = pa ? pa->xt[ii] : 0.0;
      a.le("pv_step", ix, prevX, ns.x[ii]);
      a.le("pv_monotone", ix, prevXt, ns.xt[ii]);
      a.le("pv_nonneg", ix, 0.0, ns.xt[ii] + tol);
      a.le("pv_cap_link", ix, ns.xt[ii], pv.maxPanels * ns.x[ii]);
      a.le("pv_batch_lo", ix, inst.limits.pvMinBatch * ns.al[ii], ns.xt[ii] - prevXt);
      a.le("pv_batch_hi", ix, ns.xt[ii] - prevXt, pv.maxPanels * ns.al[ii]);
      oneNewPv += ns.x[ii] - prevX;
      totalPv += ns.xt[ii];
      budget += pv.prepCost[ni] * (ns.x[ii] - prevX) + pv.unitCost[ni] * (ns.xt[ii] - prevXt);
    }
    a.le("pv_one_new", sn, oneNewPv, 1);
    a.le("pv_total", sn, totalPv, inst.limits.pvTotalCap);

    double oneNewB = 0, totalB = 0;
    for (int b = 0; b < inst.numBess(); ++b) {
      const BessTechnology& bs = inst.bess[static_cast<std::size_t>(b)];
      const std::size_t bi = static_cast<std::size_t>(b);
      const std::string ix = sn + ",b=" + std::to_string(b);
      a.integral("domain_binary", ix + ",xp", ns.xp[bi]);
      a.integral("domain_binary", ix + ",bt", ns.bt[bi]);
      a.integral("domain_integer", ix + ",xpt", ns.xpt[bi]);
      a.le("bess_impulse", ix, ns.bt[bi], ns.xp[bi]);
      const double prevX = pa ? pa->xp[bi] : 0.0;
      const double prevXt = pa ? pa->xpt[bi] : 0.0;
      a.le("bess_step", ix, prevX, ns.xp[bi]);
      a.le("bess_monotone", ix, prevXt, ns.xpt[bi]);
      a.le("bess_cap_link", ix, ns.xpt[bi], bs.maxUnits * ns.xp[bi]);
      a.le("bess_batch_lo", ix, inst.limits.bessMinBatch * ns.bt[bi], ns.xpt[bi] - prevXt);
      a.le("bess_batch_hi", ix, ns.xpt[bi] - prevXt, bs.maxUnits * ns.bt[bi]);
      oneNewB += ns.xp[bi] - prevX;
      totalB += ns.xpt[bi];
      budget += bs.prepCost[ni] * (ns.xp[bi] - prevX) + bs.unitCost[ni] * (ns.xpt[bi] - prevXt);
    }
    a.le("bess_one_new", sn, oneNewB, 1);
    a.le("bess_total", sn, totalB, inst.limits.bessTotalCap);
    a.le("budget", sn, budget, inst.limits.budget[ni]);

    for (int s = 0; s < st.numScenarios(); ++s) {
      for (int t = 1; t <= st.numPeriods(); ++t) {
        const int q = st.opNode(s, t);
        const std::size_t qi = static_cast<std::size_t>(q);
        const std::string ix = sn + ",s=" + std::to_string(s) + ",t=" + std::to_string(t);
        const double mt = st.hours(t);

        double pvSupply = 0;
        for (int i = 0; i < inst.numPv(); ++i) {
          const PvTechnology& pv = inst.pv[static_cast<std::size_t>(i)];
          const std::size_t ii = static_cast<std::size_t>(i);
          const double zr = ns.zR[ii][qi];
          if (st.isPv(t)) {
            const double avail = pv.availability[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                                [static_cast<std::size_t>(t - 1)];
            a.le("pv_output", ix + ",i=" + std::to_string(i), zr, avail * pv.panelKw * ns.xt[ii]);
            a.le("pv_output_lb", ix + ",i=" + std::to_string(i), 0.0, zr + tol);
            pvSupply += zr;
          } else {
            a.eq("pv_output_off", ix + ",i=" + std::to_string(i), zr, 0.0);
          }
        }

        double lhs = pvSupply + ns.zG[qi];
        a.le("grid_nonneg", ix, 0.0, ns.zG[qi] + tol);
        double rhs = inst.loads.baseLoad[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                        [static_cast<std::size_t>(t - 1)];
        for (int b = 0; b < inst.numBess(); ++b) {
          const std::size_t bi = static_cast<std::size_t>(b);
          lhs += ns.ym[bi][qi] - ns.yp[bi][qi];
        }
        for (int j = 0; j < inst.numElastic(); ++j) {
          const ElasticLoad& el = inst.loads.elastic[static_cast<std::size_t>(j)];
          const std::size_t ji = static_cast<std::size_t>(j);
          if (el.inWindow(e, t)) {
            rhs += el.setpoint[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                              [static_cast<std::size_t>(t - 1)] -
                   ns.dl[ji][qi];
            a.le("curtail_cap", ix + ",j=" + std::to_string(j), ns.dl[ji][qi],
                 el.maxCurtail[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)]);
            a.le("curtail_nonneg", ix + ",j=" + std::to_string(j), 0.0, ns.dl[ji][qi] + tol);
          } else {
            a.eq("curtail_off", ix + ",j=" + std::to_string(j), ns.dl[ji][qi], 0.0);
          }
        }
        for (int k = 0; k < inst.numDeferrable(); ++k) {
          const std::size_t ki = static_cast<std::size_t>(k);
          const double need = inst.loads.deferrable[ki].hourlyKw[static_cast<std::size_t>(e - 1)];
          for (int qs : inst.supplyWindowSet(k, e, q)) rhs += need * ns.de[ki][static_cast<std::size_t>(qs)];
        }
        a.eq("balance", ix, lhs, rhs);

        for (int b = 0; b < inst.numBess(); ++b) {
          const BessTechnology& bs = inst.bess[static_cast<std::size_t>(b)];
          const std::size_t bi = static_cast<std::size_t>(b);
          const double fl = bs.lossFactor[static_cast<std::size_t>(e - 1)];
          const std::string ib = ix + ",b=" + std::to_string(b);
          a.le("charge_cap", ib, mt * ns.yp[bi][qi],
               bs.chargeDepth[static_cast<std::size_t>(e - 1)] * bs.unitKwh * ns.xpt[bi]);
          a.le("storage_cap", ib, ns.y[bi][qi], bs.unitKwh * ns.xpt[bi]);
          a.le("storage_nonneg", ib, 0.0, ns.y[bi][qi] + tol);
          a.le("flow_nonneg", ib, 0.0, std::min(ns.yp[bi][qi], ns.ym[bi][qi]) + tol);
          if (t > st.firstPeriod()) {
            const std::size_t qa = static_cast<std::size_t>(st.opNode(s, t - 1));
            a.le("discharge_cap", ib, mt * ns.ym[bi][qi],
                 bs.dischargeDepth[static_cast<std::size_t>(e - 1)] * (1 - fl) * ns.y[bi][qa]);
            a.eq("storage_flow", ib, ns.y[bi][qi],
                 (1 - fl) * ns.y[bi][qa] + mt * (ns.yp[bi][qi] - ns.ym[bi][qi]));
          } else if (n == 0) {
            a.eq("storage_init", ib, ns.y[bi][qi], mt * ns.yp[bi][qi]);
            a.eq("no_initial_discharge", ib, ns.ym[bi][qi], 0.0);
          } else {
            const Stage& pst = tree.stageOf(parent);
            const double flPrev = bs.lossFactor[static_cast<std::size_t>(pst.index - 1)];
            double carry = 0;
            for (int sp = 0; sp < pst.numScenarios(); ++sp)
              carry += toDouble(pst.scenarios[static_cast<std::size_t>(sp)].prob) * (1 - flPrev) *
                       pa->y[bi][static_cast<std::size_t>(pst.opNode(sp, pst.lastPeriod()))];
            carry /= static_cast<double>(st.days);
            const double dRest = (static_cast<double>(st.days) - 1.0) / static_cast<double>(st.days);
            for (int sp = 0; sp < st.numScenarios() && dRest > 0; ++sp)
              carry += dRest * toDouble(st.scenarios[static_cast<std::size_t>(sp)].prob) * (1 - fl) *
                       ns.y[bi][static_cast<std::size_t>(st.opNode(sp, st.lastPeriod()))];
            a.eq("storage_carry", ib, ns.y[bi][qi], carry + mt * (ns.yp[bi][qi] - ns.ym[bi][qi]));
            a.le("discharge_cap", ib, mt * ns.ym[bi][qi],
                 bs.dischargeDepth[static_cast<std::size_t>(e - 1)] * carry);
          }
        }

        for (int j = 0; j < inst.numElastic(); ++j) {
          const ElasticLoad& el = inst.loads.elastic[static_cast<std::size_t>(j)];
          const std::size_t ji = static_cast<std::size_t>(j);
          if (t <= st.firstPeriod() || !el.inWindow(e, t) || !el.inWindow(e, t - 1)) continue;
          const std::size_t qa = static_cast<std::size_t>(st.opNode(s, t - 1));
          const double sp = el.setpoint[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                       [static_cast<std::size_t>(t - 1)];
          const double spPrev = el.setpoint[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(s)]
                                           [static_cast<std::size_t>(t - 2)];
          const double delta = (sp - ns.dl[ji][qi]) - (spPrev - ns.dl[ji][qa]);
          a.le("ramp", ix + ",j=" + std::to_string(j), std::abs(delta),
               el.rampLimit[static_cast<std::size_t>(e - 1)][static_cast<std::size_t>(t - 1)]);
        }
      }

      for (int k = 0; k < inst.numDeferrable(); ++k) {
        const std::size_t ki = static_cast<std::size_t>(k);
        const std::string ix = sn + ",k=" + std::to_string(k) + ",s=" + std::to_string(s);
        double started = 0;
        std::vector<int> starts = inst.feasibleStarts(k, e);
        for (int t = 1; t <= st.numPeriods(); ++t) {
          const double v = ns.de[ki][static_cast<std::size_t>(st.opNode(s, t))];
          a.integral("domain_binary", ix + ",t=" + std::to_string(t), v);
          if (std::find(starts.begin(), starts.end(), t) == starts.end())
            a.eq("start_domain", ix + ",t=" + std::to_string(t), v, 0.0);
          else
            started += v;
        }
        a.eq("start_once", ix, started, 1.0);
      }

      for (std::size_t h = 0; h < inst.loads.incompatible.size(); ++h) {
        const auto& [ja, jb] = inst.loads.incompatible[h];
        for (int ta : inst.feasibleStarts(ja, e)) {
          const int ma = *inst.supplyPeriods(ja, e, ta);
          for (int tb : inst.feasibleStarts(jb, e)) {
            const int mb = *inst.supplyPeriods(jb, e, tb);
            if (!(ta <= tb + mb - 1 && tb <= ta + ma - 1)) continue;
            a.le("incompatible",
                 sn + ",h=" + std::to_string(h) + ",s=" + std::to_string(s) + ",t=" + std::to_string(ta) + "/" +
                     std::to_string(tb),
                 ns.de[static_cast<std::size_t>(ja)][static_cast<std::size_t>(st.opNode(s, ta))] +
                     ns.de[static_cast<std::size_t>(jb)][static_cast<std::size_t>(st.opNode(s, tb))],
                 1.0);
          }
        }
      }

      for (std::size_t h = 0; h < inst.loads.precedence.size(); ++h) {
        const PrecedencePair& pr = inst.loads.precedence[h];
        for (int ta : inst.feasibleStarts(pr.first, e)) {
          const int q = st.opNode(s, ta);
          double followers = 0;
          for (int qs : inst.precedenceSet(pr, e, q))
            followers += ns.de[static_cast<std::size_t>(pr.second)][static_cast<std::size_t>(qs)];
          a.le("precedence", sn + ",h=" + std::to_string(h) + ",s=" + std::to_string(s) + ",t=" + std::to_string(ta),
               ns.de[static_cast<std::size_t>(pr.first)][static_cast<std::size_t>(q)], followers);
        }
      }
    }

    if (variant != Variant::NoD)
      a.le("expected_discomfort", sn, expectedDiscomfort(inst, sol, n),
           inst.discomfort.expectedCap[static_cast<std::size_t>(e - 1)]);

    if (variant == Variant::SD) {
      const auto& profiles = inst.discomfort.profiles[static_cast<std::size_t>(e - 1)];
      for (std::size_t p = 0; p < profiles.size(); ++p) {
        const SdProfile& prof = profiles[p];
        const std::string ip = sn + ",p=" + std::to_string(p);
        double probMass = 0, expectedExcess = 0;
        for (int pi = 0; pi < st.numScenarios(); ++pi) {
          const double w = toDouble(st.scenarios[static_cast<std::size_t>(pi)].prob);
          const double disc = scenarioDiscomfort(inst, sol, n, pi);
          const double s = ns.s[p][static_cast<std::size_t>(pi)];
          const double eta = ns.eta[p][static_cast<std::size_t>(pi)];
          const std::string ipq = ip + ",pi=" + std::to_string(pi);
          a.integral("domain_binary", ipq + ",eta", eta);
          a.le("sd_excess", ipq, disc - s, prof.threshold);
          a.le("sd_link", ipq, s, prof.maxExcess * prof.threshold * eta);
          a.le("sd_nonneg", ipq, 0.0, s + tol);
          probMass += w * eta;
          expectedExcess += w * s;
        }
        a.le("sd_prob", ip, probMass, prof.probBound);
        a.le("sd_expected", ip, expectedExcess, prof.expectedExcess * prof.threshold);
      }
    }
  }
  return rep;
}

// Nodal discomfort summary over strategic nodes and operational scenarios,
// measured against the first risk profile of each stage where present.
struct DiscomfortStats {
  double meanExpected = 0;
  double p95Expected = 0;
  double meanMaxExceedance = 0;
  double meanViolationFreq = 0;
  double maxViolationFreq = 0;
  bool hasThresholds = false;
};

inline DiscomfortStats discomfortStats(const Instance& inst, const Solution& sol) {
  DiscomfortStats out;
  std::vector<double> nodal;
  std::vector<double> exceed, freq;
  for (int n = 0; n < inst.tree.numNodes(); ++n) {
    const Stage& st = inst.tree.stageOf(n);
    nodal.push_back(expectedDiscomfort(inst, sol, n));
    const auto& profiles = inst.discomfort.profiles[static_cast<std::size_t>(st.index - 1)];
    if (profiles.empty()) continue;
    out.hasThresholds = true;
    const double threshold = profiles.front().threshold;
    double worst = 0, mass = 0;
    for (int pi = 0; pi < st.numScenarios(); ++pi) {
      const double disc = scenarioDiscomfort(inst, sol, n, pi);
      worst = std::max(worst, disc - threshold);
      if (disc > threshold + 1e-9) mass += toDouble(st.scenarios[static_cast<std::size_t>(pi)].prob);
    }
    exceed.push_back(std::max(0.0, worst));
    freq.push_back(mass);
  }
  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  out.meanExpected = mean(nodal);
  if (!nodal.empty()) {
    std::vector<double> sorted = nodal;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(sorted.size()))) - 1;
    out.p95Expected = sorted[std::min(rank, sorted.size() - 1)];
  }
  out.meanMaxExceedance = mean(exceed);
  out.meanViolationFreq = mean(freq);
  for (double f : freq) out.maxViolationFreq = std::max(out.maxViolationFreq, f);
  return out;
}

}  // namespace mhres

#endif
