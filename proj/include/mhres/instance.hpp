#ifndef MHRES_INSTANCE_HPP
#define MHRES_INSTANCE_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "mhres/tree.hpp"

namespace mhres {

// Values indexed [stage][scenario][period]; covers every operational node.
using OpParam = std::vector<std::vector<std::vector<double>>>;
// Values indexed [stage][period].
using StagePeriodParam = std::vector<std::vector<double>>;

struct PvTechnology {
  std::string name;
  double panelKw = 0;    // nominal capacity of one panel
  double maxPanels = 0;  // per-technology installation cap
  std::vector<double> prepCost;       // per strategic node
  std::vector<double> unitCost;       // per strategic node, per panel
  std::vector<double> maintCost;      // per strategic node, per panel
  std::vector<double> residualValue;  // per strategic node, read at leaves
  OpParam genCost;                    // generation cost per kWh
  OpParam availability;               // fraction of nominal capacity available
};

struct BessTechnology {
  std::string name;
  double unitKwh = 0;   // storage capacity of one unit
  double maxUnits = 0;  // per-technology installation cap
  double opCost = 0;    // cost per kWh moved in or out
  std::vector<double> lossFactor;      // per stage, in [0,1)
  std::vector<double> chargeDepth;     // per stage, in (0,1]
  std::vector<double> dischargeDepth;  // per stage, in (0,1]
  std::vector<double> prepCost;
  std::vector<double> unitCost;
  std::vector<double> maintCost;
  std::vector<double> residualValue;
};

struct SystemLimits {
  double pvTotalCap = 0;    // building-wide panel cap
  double pvMinBatch = 0;    // minimum panels per installation event
  double bessTotalCap = 0;  // building-wide unit cap
  double bessMinBatch = 0;  // minimum units per installation event
  std::vector<double> budget;  // per strategic node
};

struct ElasticLoad {
  std::string name;
  std::vector<std::vector<int>> window;  // active periods per stage, sorted
  OpParam setpoint;                      // target consumption
  StagePeriodParam maxCurtail;           // cap on downward deviation
  StagePeriodParam rampLimit;            // cap on period-to-period change of adjusted setpoint
  StagePeriodParam discomfort;           // discomfort per curtailed kWh
  bool inWindow(int e, int t) const {
    const auto& w = window[static_cast<std::size_t>(e - 1)];
    return std::binary_search(w.begin(), w.end(), t);
  }
};

struct DeferrableLoad {
  std::string name;
  std::vector<std::vector<int>> window;  // admissible supply periods per stage, sorted
  std::vector<int> refStart;             // reference starting period per stage
  std::vector<double> hourlyKw;          // hourly requirement while running
  std::vector<int> durationHours;        // total hours of supply needed
  StagePeriodParam discomfort;           // discomfort of starting at a period
  bool inWindow(int e, int t) const {
    const auto& w = window[static_cast<std::size_t>(e - 1)];
    return std::binary_search(w.begin(), w.end(), t);
  }
};

struct PrecedencePair {
  int first = 0;   // must complete first
  int second = 0;  // may only start after the gap
  int minGap = 0;  // minimum separating daily periods
};

struct Loads {
  OpParam baseLoad;  // non-controlled demand
  std::vector<ElasticLoad> elastic;
  std::vector<DeferrableLoad> deferrable;
  std::vector<std::pair<int, int>> incompatible;  // deferrable pairs that may not overlap
  std::vector<PrecedencePair> precedence;
};

struct GridParams {
  OpParam importPrice;
  OpParam exportPrice;
};

struct SdProfile {
  double threshold = 0;       // discomfort level a scenario should not exceed
  double probBound = 0;       // admissible probability of exceeding it
  double maxExcess = 0;       // max excess as a fraction of the threshold
  double expectedExcess = 0;  // expected excess as a fraction of the threshold
};

struct DiscomfortPolicy {
  std::vector<double> expectedCap;             // per stage
  std::vector<std::vector<SdProfile>> profiles;  // per stage
};

struct Meta {
  std::string name;
  std::string currency = "EUR";
  std::uint64_t seed = 0;
};

struct Instance {
  MultiHorizonTree tree;
  std::vector<PvTechnology> pv;
  std::vector<BessTechnology> bess;
  SystemLimits limits;
  Loads loads;
  GridParams grid;
  DiscomfortPolicy discomfort;
  Meta meta;

  int numPv() const { return static_cast<int>(pv.size()); }
  int numBess() const { return static_cast<int>(bess.size()); }
  int numElastic() const { return static_cast<int>(loads.elastic.size()); }
  int numDeferrable() const { return static_cast<int>(loads.deferrable.size()); }

  // Number of consecutive daily periods needed to accumulate the required
  // supply hours when starting at tStart; empty if the day ends first.
  std::optional<int> supplyPeriods(int j, int e, int tStart) const {
    const DeferrableLoad& d = loads.deferrable[static_cast<std::size_t>(j)];
    const Stage& st = tree.stage(e);
    const int need = d.durationHours[static_cast<std::size_t>(e - 1)];
    int have = 0;
    for (int t = tStart; t <= st.lastPeriod(); ++t) {
      have += st.hours(t);
      if (have >= need) return t - tStart + 1;
    }
    return std::nullopt;
  }

  // Admissible starting periods: inside the window and completing within the day.
  std::vector<int> feasibleStarts(int j, int e) const {
    const DeferrableLoad& d = loads.deferrable[static_cast<std::size_t>(j)];
    std::vector<int> out;
    for (int t : d.window[static_cast<std::size_t>(e - 1)])
      if (supplyPeriods(j, e, t).has_value()) out.push_back(t);
    return out;
  }

  // Operational nodes q' of q's scenario such that starting load j at q'
  // implies supplying it at q.
  std::vector<int> supplyWindowSet(int j, int e, int q) const {
    const Stage& st = tree.stage(e);
    const int scen = q / st.numPeriods();
    const int tq = q % st.numPeriods() + 1;
    std::vector<int> out;
    for (int tp : feasibleStarts(j, e)) {
      if (tp > tq) continue;
      const int m2 = *supplyPeriods(j, e, tp);
      if (tq - m2 + 1 <= tp) out.push_back(st.opNode(scen, tp));
    }
    return out;
  }

  // Operational nodes where the follower of a precedence pair may start, given
  // that the leader starts at q.
  std::vector<int> precedenceSet(const PrecedencePair& pair, int e, int q) const {
    const Stage& st = tree.stage(e);
    const int scen = q / st.numPeriods();
    const int tq = q % st.numPeriods() + 1;
    const auto m2 = supplyPeriods(pair.first, e, tq);
    if (!m2.has_value()) throw Error("precedenceSet: leader start cannot complete within the day");
    std::vector<int> out;
    for (int tp : feasibleStarts(pair.second, e))
      if (tp >= tq + *m2 + pair.minGap) out.push_back(st.opNode(scen, tp));
    return out;
  }

  ValidationReport validate() const;
};

// ---------------------------------------------------------------------------

namespace detail {

inline void checkOpParam(const MultiHorizonTree& tree, const OpParam& p, const std::string& what,
                         ValidationReport& rep, double lo, double hi) {
  const int E = tree.numStages();
  if (static_cast<int>(p.size()) != E) {
    rep.violations.push_back({what, "expected one block per stage (" + std::to_string(E) + "), got " +
                                        std::to_string(p.size())});
    return;
  }
  for (int e = 1; e <= E; ++e) {
    const Stage& st = tree.stage(e);
    const auto& block = p[static_cast<std::size_t>(e - 1)];
    if (static_cast<int>(block.size()) != st.numScenarios()) {
      rep.violations.push_back({what + " stage " + std::to_string(e),
                                "coverage: expected " + std::to_string(st.numScenarios()) + " scenarios, got " +
                                    std::to_string(block.size())});
      continue;
    }
    for (int s = 0; s < st.numScenarios(); ++s) {
      const auto& row = block[static_cast<std::size_t>(s)];
      if (static_cast<int>(row.size()) != st.numPeriods()) {
        rep.violations.push_back({what + " stage " + std::to_string(e) + " scenario " + std::to_string(s),
                                  "coverage: expected " + std::to_string(st.numPeriods()) + " periods, got " +
                                      std::to_string(row.size())});
        continue;
      }
      for (int t = 1; t <= st.numPeriods(); ++t) {
        double v = row[static_cast<std::size_t>(t - 1)];
        if (v < lo || v > hi)
          rep.violations.push_back({what + " stage " + std::to_string(e) + " scenario " + std::to_string(s) +
                                        " period " + std::to_string(t),
                                    "value " + std::to_string(v) + " out of range"});
      }
    }
  }
}

inline void checkStagePeriodParam(const MultiHorizonTree& tree, const StagePeriodParam& p, const std::string& what,
                                  ValidationReport& rep, double lo) {
  const int E = tree.numStages();
  if (static_cast<int>(p.size()) != E) {
    rep.violations.push_back({what, "expected one row per stage, got " + std::to_string(p.size())});
    return;
  }
  for (int e = 1; e <= E; ++e) {
    const auto& row = p[static_cast<std::size_t>(e - 1)];
    if (static_cast<int>(row.size()) != tree.stage(e).numPeriods()) {
      rep.violations.push_back({what + " stage " + std::to_string(e),
                                "coverage: expected " + std::to_string(tree.stage(e).numPeriods()) +
                                    " periods, got " + std::to_string(row.size())});
      continue;
    }
    for (double v : row)
      if (v < lo) rep.violations.push_back({what + " stage " + std::to_string(e), "negative value"});
  }
}

inline void checkNodeParam(const MultiHorizonTree& tree, const std::vector<double>& p, const std::string& what,
                           ValidationReport& rep, double lo) {
  if (static_cast<int>(p.size()) != tree.numNodes()) {
    rep.violations.push_back(
        {what, "coverage: expected one value per strategic node (" + std::to_string(tree.numNodes()) + "), got " +
                   std::to_string(p.size())});
    return;
  }
  for (int n = 0; n < tree.numNodes(); ++n)
    if (p[static_cast<std::size_t>(n)] < lo)
      rep.violations.push_back({what + " node " + std::to_string(n), "negative value"});
}

inline void checkStageParam(const MultiHorizonTree& tree, const std::vector<double>& p, const std::string& what,
                            ValidationReport& rep, double lo, double hi) {
  if (static_cast<int>(p.size()) != tree.numStages()) {
    rep.violations.push_back({what, "expected one value per stage, got " + std::to_string(p.size())});
    return;
  }
  for (double v : p)
    if (v < lo || v > hi) rep.violations.push_back({what, "value " + std::to_string(v) + " out of range"});
}

}  // namespace detail

inline ValidationReport Instance::validate() const {
  ValidationReport rep = tree.validate();
  auto flag = [&rep](std::string where, std::string what) {
    rep.violations.push_back({std::move(where), std::move(what)});
  };
  const int E = tree.numStages();
  const double inf = std::numeric_limits<double>::infinity();

  for (int i = 0; i < numPv(); ++i) {
    const PvTechnology& p = pv[static_cast<std::size_t>(i)];
    const std::string who = "pv " + p.name;
    if (p.panelKw <= 0) flag(who, "panel capacity must be positive");
    if (p.maxPanels < 0) flag(who, "negative panel cap");
    detail::checkNodeParam(tree, p.prepCost, who + " prep_cost", rep, 0);
    detail::checkNodeParam(tree, p.unitCost, who + " unit_cost", rep, 0);
    detail::checkNodeParam(tree, p.maintCost, who + " maint_cost", rep, 0);
    detail::checkNodeParam(tree, p.residualValue, who + " residual_value", rep, 0);
    detail::checkOpParam(tree, p.genCost, who + " gen_cost", rep, 0, inf);
    detail::checkOpParam(tree, p.availability, who + " availability", rep, 0, 1);
    // availability only in PV periods
    if (static_cast<int>(p.availability.size()) == E) {
      for (int e = 1; e <= E; ++e) {
        const Stage& st = tree.stage(e);
        const auto& block = p.availability[static_cast<std::size_t>(e - 1)];
        if (static_cast<int>(block.size()) != st.numScenarios()) continue;
        for (int s = 0; s < st.numScenarios(); ++s) {
          if (static_cast<int>(block[static_cast<std::size_t>(s)].size()) != st.numPeriods()) continue;
          for (int t = 1; t <= st.numPeriods(); ++t)
            if (!st.isPv(t) && block[static_cast<std::size_t>(s)][static_cast<std::size_t>(t - 1)] != 0.0)
              flag(who + " availability stage " + std::to_string(e),
                   "nonzero availability outside PV periods (period " + std::to_string(t) + ")");
        }
      }
    }
    if (limits.pvMinBatch > p.maxPanels || p.maxPanels > limits.pvTotalCap)
      flag(who, "per-technology cap must lie between the minimum batch and the global cap");
  }

  for (int b = 0; b < numBess(); ++b) {
    const BessTechnology& t = bess[static_cast<std::size_t>(b)];
    const std::string who = "bess " + t.name;
    if (t.unitKwh <= 0) flag(who, "unit capacity must be positive");
    if (t.opCost < 0) flag(who, "negative operating cost");
    detail::checkStageParam(tree, t.lossFactor, who + " loss_factor", rep, 0, 1 - 1e-12);
    detail::checkStageParam(tree, t.chargeDepth, who + " charge_depth", rep, 1e-12, 1);
    detail::checkStageParam(tree, t.dischargeDepth, who + " discharge_depth", rep, 1e-12, 1);
    detail::checkNodeParam(tree, t.prepCost, who + " prep_cost", rep, 0);
    detail::checkNodeParam(tree, t.unitCost, who + " unit_cost", rep, 0);
    detail::checkNodeParam(tree, t.maintCost, who + " maint_cost", rep, 0);
    detail::checkNodeParam(tree, t.residualValue, who + " residual_value", rep, 0);
    if (limits.bessMinBatch > t.maxUnits || t.maxUnits > limits.bessTotalCap)
      flag(who, "per-technology cap must lie between the minimum batch and the global cap");
  }

  detail::checkNodeParam(tree, limits.budget, "limits budget", rep, 0);

  detail::checkOpParam(tree, loads.baseLoad, "loads base_load", rep, 0, inf);
  for (int j = 0; j < numElastic(); ++j) {
    const ElasticLoad& el = loads.elastic[static_cast<std::size_t>(j)];
    const std::string who = "elastic " + el.name;
    if (static_cast<int>(el.window.size()) != E) {
      flag(who, "window must list one period set per stage");
      continue;
    }
    detail::checkOpParam(tree, el.setpoint, who + " setpoint", rep, 0, inf);
    detail::checkStagePeriodParam(tree, el.maxCurtail, who + " max_curtail", rep, 0);
    detail::checkStagePeriodParam(tree, el.rampLimit, who + " ramp_limit", rep, 0);
    detail::checkStagePeriodParam(tree, el.discomfort, who + " discomfort", rep, 0);
    for (int e = 1; e <= E; ++e) {
      const Stage& st = tree.stage(e);
      for (int t : el.window[static_cast<std::size_t>(e - 1)])
        if (t < 1 || t > st.numPeriods())
          flag(who + " stage " + std::to_string(e), "window period " + std::to_string(t) + " outside the day");
      // curtailment bound must not exceed any setpoint it applies to
      if (static_cast<int>(el.setpoint.size()) == E && static_cast<int>(el.maxCurtail.size()) == E) {
        const auto& block = el.setpoint[static_cast<std::size_t>(e - 1)];
        const auto& cap = el.maxCurtail[static_cast<std::size_t>(e - 1)];
        if (static_cast<int>(block.size()) != st.numScenarios() ||
            static_cast<int>(cap.size()) != st.numPeriods())
          continue;
        for (int t : el.window[static_cast<std::size_t>(e - 1)]) {
          if (t < 1 || t > st.numPeriods()) continue;
          for (int s = 0; s < st.numScenarios(); ++s) {
            if (static_cast<int>(block[static_cast<std::size_t>(s)].size()) != st.numPeriods()) continue;
            if (cap[static_cast<std::size_t>(t - 1)] >
                block[static_cast<std::size_t>(s)][static_cast<std::size_t>(t - 1)] + 1e-9)
              flag(who + " stage " + std::to_string(e),
                   "max curtailment exceeds the setpoint at period " + std::to_string(t));
          }
        }
      }
    }
  }

  for (int j = 0; j < numDeferrable(); ++j) {
    const DeferrableLoad& d = loads.deferrable[static_cast<std::size_t>(j)];
    const std::string who = "deferrable " + d.name;
    if (static_cast<int>(d.window.size()) != E || static_cast<int>(d.refStart.size()) != E ||
        static_cast<int>(d.hourlyKw.size()) != E || static_cast<int>(d.durationHours.size()) != E) {
      flag(who, "window, ref_start, hourly_kw and duration_hours must list one entry per stage");
      continue;
    }
    detail::checkStagePeriodParam(tree, d.discomfort, who + " discomfort", rep, 0);
    for (int e = 1; e <= E; ++e) {
      const Stage& st = tree.stage(e);
      for (int t : d.window[static_cast<std::size_t>(e - 1)])
        if (t < 1 || t > st.numPeriods())
          flag(who + " stage " + std::to_string(e), "window period " + std::to_string(t) + " outside the day");
      if (d.durationHours[static_cast<std::size_t>(e - 1)] < 1)
        flag(who + " stage " + std::to_string(e), "duration must be at least one hour");
      if (d.hourlyKw[static_cast<std::size_t>(e - 1)] < 0)
        flag(who + " stage " + std::to_string(e), "negative hourly requirement");
      if (!d.inWindow(e, d.refStart[static_cast<std::size_t>(e - 1)]))
        flag(who + " stage " + std::to_string(e), "reference start outside the window");
      if (feasibleStarts(j, e).empty())
        flag(who + " stage " + std::to_string(e),
             "window admits no feasible start (insufficient remaining hours everywhere)");
    }
  }

  for (const auto& [a, b] : loads.incompatible)
    if (a < 0 || a >= numDeferrable() || b < 0 || b >= numDeferrable() || a == b)
      flag("loads incompatible", "invalid deferrable pair (" + std::to_string(a) + ", " + std::to_string(b) + ")");
  for (const auto& pr : loads.precedence) {
    if (pr.first < 0 || pr.first >= numDeferrable() || pr.second < 0 || pr.second >= numDeferrable() ||
        pr.first == pr.second)
      flag("loads precedence", "invalid deferrable pair (" + std::to_string(pr.first) + ", " + std::to_string(pr.second) + ")");
    if (pr.minGap < 0) flag("loads precedence", "negative latency");
  }

  detail::checkOpParam(tree, grid.importPrice, "grid import_price", rep, 0, inf);
  detail::checkOpParam(tree, grid.exportPrice, "grid export_price", rep, 0, inf);

  detail::checkStageParam(tree, discomfort.expectedCap, "discomfort expected_cap", rep, 0, inf);
  if (static_cast<int>(discomfort.profiles.size()) != E) {
    flag("discomfort profiles", "expected one profile list per stage");
  } else {
    for (int e = 1; e <= E; ++e) {
      for (const SdProfile& p : discomfort.profiles[static_cast<std::size_t>(e - 1)]) {
        const std::string who = "discomfort profile stage " + std::to_string(e);
        if (p.threshold <= 0) flag(who, "threshold must be positive");
        if (p.probBound < 0 || p.probBound > 1) flag(who, "probability bound outside [0,1]");
        if (p.maxExcess < 0) flag(who, "negative max excess fraction");
        if (p.expectedExcess < 0) flag(who, "negative expected excess fraction");
        if (p.expectedExcess > p.maxExcess + 1e-12) flag(who, "expected excess exceeds max excess");
      }
    }
  }
  return rep;
}

}  // namespace mhres

#endif
