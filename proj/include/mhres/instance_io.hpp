#ifndef MHRES_INSTANCE_IO_HPP
#define MHRES_INSTANCE_IO_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "mhres/instance.hpp"

namespace mhres {

using Json = nlohmann::ordered_json;

inline constexpr const char* kInstanceSchema = "mhres/1";

namespace io {

inline Rat ratFromJson(const Json& j, const std::string& field) {
  try {
    if (j.is_string()) return ratFromString(j.get<std::string>());
    if (j.is_number_integer()) return Rat(BigInt(j.get<long long>()));
    if (j.is_number()) return ratFromDouble(j.get<double>());
  } catch (const std::exception& e) {
    throw Error(field + ": " + e.what());
  }
  throw Error(field + ": expected a number or a \"p/q\" string");
}

inline Json ratToJson(const Rat& r) {
  if (r.denominator() == 1 && r.numerator() >= INT64_MIN && r.numerator() <= INT64_MAX)
    return Json(static_cast<std::int64_t>(r.numerator()));
  return Json(ratToString(r));
}

template <typename T>
inline T require(const Json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key)) throw Error(ctx + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const std::exception& e) {
    throw Error(ctx + "." + key + ": " + e.what());
  }
}

inline const Json& member(const Json& j, const std::string& key, const std::string& ctx) {
  if (!j.contains(key)) throw Error(ctx + ": missing field '" + key + "'");
  return j.at(key);
}

inline OpParam opParamFromJson(const Json& j, const std::string& ctx) {
  try {
    return j.get<OpParam>();
  } catch (const std::exception& e) {
    throw Error(ctx + ": " + e.what());
  }
}

}  // namespace io

// ---------------------------------------------------------------------------

inline Json treeToJson(const MultiHorizonTree& tree) {
  Json out;
  out["stages"] = Json::array();
  for (const Stage& st : tree.stages) {
    Json js;
    js["days"] = st.days;
    js["periods"] = Json::array();
    for (const auto& p : st.periods) js["periods"].push_back({{"hours", p.hours}, {"pv", p.pv}});
    js["operational_scenarios"] = Json::array();
    for (const auto& sc : st.scenarios)
      js["operational_scenarios"].push_back({{"probability", io::ratToJson(sc.prob)}});
    out["stages"].push_back(std::move(js));
  }
  out["strategic_nodes"] = Json::array();
  for (const StrategicNode& n : tree.nodes) {
    Json jn;
    jn["id"] = n.id;
    jn["stage"] = n.stage;
    if (n.parent < 0)
      jn["parent"] = nullptr;
    else
      jn["parent"] = n.parent;
    jn["weight"] = io::ratToJson(n.weight);
    out["strategic_nodes"].push_back(std::move(jn));
  }
  return out;
}

inline MultiHorizonTree treeFromJson(const Json& j) {
  MultiHorizonTree tree;
  int e = 1;
  for (const Json& js : io::member(j, "stages", "tree")) {
    Stage st;
    st.index = e;
    st.days = io::require<long>(js, "days", "tree.stages");
    for (const Json& jp : io::member(js, "periods", "tree.stages")) {
      DailyPeriod p;
      p.hours = io::require<int>(jp, "hours", "tree.stages.periods");
      p.pv = jp.value("pv", false);
      st.periods.push_back(p);
    }
    int s = 0;
    for (const Json& jsc : io::member(js, "operational_scenarios", "tree.stages")) {
      OpScenario sc;
      sc.prob = io::ratFromJson(io::member(jsc, "probability", "tree.stages.operational_scenarios"),
                                "stage " + std::to_string(e) + " scenario " + std::to_string(s));
      for (int t = 1; t <= st.numPeriods(); ++t) sc.periods.push_back(t);
      st.scenarios.push_back(std::move(sc));
      ++s;
    }
    tree.stages.push_back(std::move(st));
    ++e;
  }
  for (const Json& jn : io::member(j, "strategic_nodes", "tree")) {
    StrategicNode n;
    n.id = io::require<int>(jn, "id", "tree.strategic_nodes");
    n.stage = io::require<int>(jn, "stage", "tree.strategic_nodes");
    const Json& p = io::member(jn, "parent", "tree.strategic_nodes");
    n.parent = p.is_null() ? -1 : p.get<int>();
    n.weight = io::ratFromJson(io::member(jn, "weight", "tree.strategic_nodes"),
                               "node " + std::to_string(n.id) + " weight");
    tree.nodes.push_back(std::move(n));
  }
  tree.finalize();
  return tree;
}

inline Json instanceToJson(const Instance& inst) {
  Json out;
  out["schema"] = kInstanceSchema;
  out["meta"] = {{"name", inst.meta.name}, {"currency", inst.meta.currency}, {"seed", inst.meta.seed}};
  out["tree"] = treeToJson(inst.tree);
  out["pv_technologies"] = Json::array();
  for (const PvTechnology& p : inst.pv) {
    Json jp;
    jp["name"] = p.name;
    jp["panel_kw"] = p.panelKw;
    jp["max_panels"] = p.maxPanels;
    jp["prep_cost"] = p.prepCost;
    jp["unit_cost"] = p.unitCost;
    jp["maint_cost"] = p.maintCost;
    jp["residual_value"] = p.residualValue;
    jp["gen_cost"] = p.genCost;
    jp["availability"] = p.availability;
    out["pv_technologies"].push_back(std::move(jp));
  }
  out["bess_technologies"] = Json::array();
  for (const BessTechnology& b : inst.bess) {
    Json jb;
    jb["name"] = b.name;
    jb["unit_kwh"] = b.unitKwh;
    jb["max_units"] = b.maxUnits;
    jb["op_cost"] = b.opCost;
    jb["loss_factor"] = b.lossFactor;
    jb["charge_depth"] = b.chargeDepth;
    jb["discharge_depth"] = b.dischargeDepth;
    jb["prep_cost"] = b.prepCost;
    jb["unit_cost"] = b.unitCost;
    jb["maint_cost"] = b.maintCost;
    jb["residual_value"] = b.residualValue;
    out["bess_technologies"].push_back(std::move(jb));
  }
  out["limits"] = {{"pv_total_cap", inst.limits.pvTotalCap},
                   {"pv_min_batch", inst.limits.pvMinBatch},
                   {"bess_total_cap", inst.limits.bessTotalCap},
                   {"bess_min_batch", inst.limits.bessMinBatch},
                   {"budget", inst.limits.budget}};
  Json jl;
  jl["base_load"] = inst.loads.baseLoad;
  jl["elastic"] = Json::array();
  for (const ElasticLoad& el : inst.loads.elastic) {
    jl["elastic"].push_back({{"name", el.name},
                             {"window", el.window},
                             {"setpoint", el.setpoint},
                             {"max_curtail", el.maxCurtail},
                             {"ramp_limit", el.rampLimit},
                             {"discomfort", el.discomfort}});
  }
  jl["deferrable"] = Json::array();
  for (const DeferrableLoad& d : inst.loads.deferrable) {
    jl["deferrable"].push_back({{"name", d.name},
                                {"window", d.window},
                                {"ref_start", d.refStart},
                                {"hourly_kw", d.hourlyKw},
                                {"duration_hours", d.durationHours},
                                {"discomfort", d.discomfort}});
  }
  jl["incompatible"] = Json::array();
  for (const auto& [a, b] : inst.loads.incompatible) jl["incompatible"].push_back({a, b});
  jl["precedence"] = Json::array();
  for (const auto& pr : inst.loads.precedence)
    jl["precedence"].push_back({{"first", pr.first}, {"second", pr.second}, {"min_gap", pr.minGap}});
  out["loads"] = std::move(jl);
  out["grid"] = {{"import_price", inst.grid.importPrice}, {"export_price", inst.grid.exportPrice}};
  Json jd;
  jd["expected_cap"] = inst.discomfort.expectedCap;
  jd["profiles"] = Json::array();
  for (const auto& stageProfiles : inst.discomfort.profiles) {
    Json row = Json::array();
    for (const SdProfile& p : stageProfiles)
      row.push_back({{"threshold", p.threshold},
                     {"prob_bound", p.probBound},
                     {"max_excess", p.maxExcess},
                     {"expected_excess", p.expectedExcess}});
    jd["profiles"].push_back(std::move(row));
  }
  out["discomfort"] = std::move(jd);
  return out;
}

inline Instance instanceFromJson(const Json& j) {
  if (!j.contains("schema") || j.at("schema") != kInstanceSchema)
    throw Error("instance file: missing or unsupported schema tag (need \"" + std::string(kInstanceSchema) + "\")");
  Instance inst;
  const Json& jm = io::member(j, "meta", "instance");
  inst.meta.name = jm.value("name", "");
  inst.meta.currency = jm.value("currency", "EUR");
  inst.meta.seed = jm.value("seed", 0ULL);
  inst.tree = treeFromJson(io::member(j, "tree", "instance"));
  for (const Json& jp : io::member(j, "pv_technologies", "instance")) {
    PvTechnology p;
    p.name = io::require<std::string>(jp, "name", "pv_technologies");
    const std::string ctx = "pv " + p.name;
    p.panelKw = io::require<double>(jp, "panel_kw", ctx);
    p.maxPanels = io::require<double>(jp, "max_panels", ctx);
    p.prepCost = io::require<std::vector<double>>(jp, "prep_cost", ctx);
    p.unitCost = io::require<std::vector<double>>(jp, "unit_cost", ctx);
    p.maintCost = io::require<std::vector<double>>(jp, "maint_cost", ctx);
    p.residualValue = io::require<std::vector<double>>(jp, "residual_value", ctx);
    p.genCost = io::opParamFromJson(io::member(jp, "gen_cost", ctx), ctx + ".gen_cost");
    p.availability = io::opParamFromJson(io::member(jp, "availability", ctx), ctx + ".availability");
    inst.pv.push_back(std::move(p));
  }
  for (const Json& jb : io::member(j, "bess_technologies", "instance")) {
    BessTechnology b;
    b.name = io::require<std::string>(jb, "name", "bess_technologies");
    const std::string ctx = "bess " + b.name;
    b.unitKwh = io::require<double>(jb, "unit_kwh", ctx);
    b.maxUnits = io::require<double>(jb, "max_units", ctx);
    b.opCost = io::require<double>(jb, "op_cost", ctx);
    b.lossFactor = io::require<std::vector<double>>(jb, "loss_factor", ctx);
    b.chargeDepth = io::require<std::vector<double>>(jb, "charge_depth", ctx);
    b.dischargeDepth = io::require<std::vector<double>>(jb, "discharge_depth", ctx);
    b.prepCost = io::require<std::vector<double>>(jb, "prep_cost", ctx);
    b.unitCost = io::require<std::vector<double>>(jb, "unit_cost", ctx);
    b.maintCost = io::require<std::vector<double>>(jb, "maint_cost", ctx);
    b.residualValue = io::require<std::vector<double>>(jb, "residual_value", ctx);
    inst.bess.push_back(std::move(b));
  }
  const Json& jlim = io::member(j, "limits", "instance");
  inst.limits.pvTotalCap = io::require<double>(jlim, "pv_total_cap", "limits");
  inst.limits.pvMinBatch = io::require<double>(jlim, "pv_min_batch", "limits");
  inst.limits.bessTotalCap = io::require<double>(jlim, "bess_total_cap", "limits");
  inst.limits.bessMinBatch = io::require<double>(jlim, "bess_min_batch", "limits");
  inst.limits.budget = io::require<std::vector<double>>(jlim, "budget", "limits");
  const Json& jl = io::member(j, "loads", "instance");
  inst.loads.baseLoad = io::opParamFromJson(io::member(jl, "base_load", "loads"), "loads.base_load");
  for (const Json& je : io::member(jl, "elastic", "loads")) {
    ElasticLoad el;
    el.name = io::require<std::string>(je, "name", "loads.elastic");
    const std::string ctx = "elastic " + el.name;
    el.window = io::require<std::vector<std::vector<int>>>(je, "window", ctx);
    for (auto& w : el.window) std::sort(w.begin(), w.end());
    el.setpoint = io::opParamFromJson(io::member(je, "setpoint", ctx), ctx + ".setpoint");
    el.maxCurtail = io::require<StagePeriodParam>(je, "max_curtail", ctx);
    el.rampLimit = io::require<StagePeriodParam>(je, "ramp_limit", ctx);
    el.discomfort = io::require<StagePeriodParam>(je, "discomfort", ctx);
    inst.loads.elastic.push_back(std::move(el));
  }
  for (const Json& jd : io::member(jl, "deferrable", "loads")) {
    DeferrableLoad d;
    d.name = io::require<std::string>(jd, "name", "loads.deferrable");
    const std::string ctx = "deferrable " + d.name;
    d.window = io::require<std::vector<std::vector<int>>>(jd, "window", ctx);
    for (auto& w : d.window) std::sort(w.begin(), w.end());
    d.refStart = io::require<std::vector<int>>(jd, "ref_start", ctx);
    d.hourlyKw = io::require<std::vector<double>>(jd, "hourly_kw", ctx);
    d.durationHours = io::require<std::vector<int>>(jd, "duration_hours", ctx);
    d.discomfort = io::require<StagePeriodParam>(jd, "discomfort", ctx);
    inst.loads.deferrable.push_back(std::move(d));
  }
  for (const Json& ji : io::member(jl, "incompatible", "loads"))
    inst.loads.incompatible.emplace_back(ji.at(0).get<int>(), ji.at(1).get<int>());
  for (const Json& jp : io::member(jl, "precedence", "loads")) {
    PrecedencePair pr;
    pr.first = io::require<int>(jp, "first", "loads.precedence");
    pr.second = io::require<int>(jp, "second", "loads.precedence");
    pr.minGap = io::require<int>(jp, "min_gap", "loads.precedence");
    inst.loads.precedence.push_back(pr);
  }
  const Json& jg = io::member(j, "grid", "instance");
  inst.grid.importPrice = io::opParamFromJson(io::member(jg, "import_price", "grid"), "grid.import_price");
  inst.grid.exportPrice = io::opParamFromJson(io::member(jg, "export_price", "grid"), "grid.export_price");
  const Json& jd = io::member(j, "discomfort", "instance");
  inst.discomfort.expectedCap = io::require<std::vector<double>>(jd, "expected_cap", "discomfort");
  for (const Json& row : io::member(jd, "profiles", "discomfort")) {
    std::vector<SdProfile> stageProfiles;
    for (const Json& jp : row) {
      SdProfile p;
      p.threshold = io::require<double>(jp, "threshold", "discomfort.profiles");
      p.probBound = io::require<double>(jp, "prob_bound", "discomfort.profiles");
      p.maxExcess = io::require<double>(jp, "max_excess", "discomfort.profiles");
      p.expectedExcess = io::require<double>(jp, "expected_excess", "discomfort.profiles");
      stageProfiles.push_back(p);
    }
    inst.discomfort.profiles.push_back(std::move(stageProfiles));
  }
  return inst;
}

inline void saveInstance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << instanceToJson(inst).dump(1) << "\n";
}

// Parses, normalizes probabilities once, and validates; throws on any defect.
inline Instance loadInstance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instance file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("parse error in '" + path + "': " + e.what());
  }
  Instance inst = instanceFromJson(j);
  inst.tree.normalizeWeights();
  ValidationReport rep = inst.validate();
  if (!rep.ok()) throw Error("invalid instance '" + path + "':\n" + rep.toString());
  return inst;
}

}  // namespace mhres

#endif
