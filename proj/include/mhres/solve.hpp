#ifndef MHRES_SOLVE_HPP
#define MHRES_SOLVE_HPP

#include <chrono>
#include <cstdlib>
#include <string>

#include <Highs.h>

#include "mhres/milp.hpp"

namespace mhres {

inline std::string defaultBackend() {
  const char* env = std::getenv("MHRES_SOLVER");
  return (env && *env) ? std::string(env) : std::string("highs");
}

namespace backend {

inline HighsLp toHighsLp(const Milp& m) {
  HighsLp lp;
  lp.num_col_ = m.numVars();
  lp.num_row_ = m.numConstrs();
  lp.sense_ = ObjSense::kMinimize;
  lp.col_cost_.reserve(m.numVars());
  bool anyIntegral = false;
  for (const auto& v : m.vars()) {
    lp.col_cost_.push_back(v.obj);
    lp.col_lower_.push_back(v.lb);
    lp.col_upper_.push_back(v.ub);
    anyIntegral |= v.kind != VarKind::Continuous;
  }
  if (anyIntegral) {
    for (const auto& v : m.vars())
      lp.integrality_.push_back(v.kind == VarKind::Continuous ? HighsVarType::kContinuous
                                                              : HighsVarType::kInteger);
  }
  const double inf = kHighsInf;
  lp.a_matrix_.format_ = MatrixFormat::kRowwise;
  lp.a_matrix_.start_.clear();
  lp.a_matrix_.start_.push_back(0);
  for (const auto& c : m.constrs()) {
    for (const auto& [v, coef] : c.terms) {
      lp.a_matrix_.index_.push_back(v);
      lp.a_matrix_.value_.push_back(coef);
    }
    lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
    switch (c.sense) {
      case Sense::LE:
        lp.row_lower_.push_back(-inf);
        lp.row_upper_.push_back(c.rhs);
        break;
      case Sense::GE:
        lp.row_lower_.push_back(c.rhs);
        lp.row_upper_.push_back(inf);
        break;
      case Sense::EQ:
        lp.row_lower_.push_back(c.rhs);
        lp.row_upper_.push_back(c.rhs);
        break;
    }
  }
  return lp;
}

inline SolveOutcome solveWithHighs(const Milp& m, const SolveControls& controls) {
  const auto start = std::chrono::steady_clock::now();
  Highs highs;
  highs.setOptionValue("output_flag", !controls.quiet);
  highs.setOptionValue("threads", controls.threads);
  highs.setOptionValue("mip_rel_gap", controls.relGap);
  if (std::isfinite(controls.timeLimit)) highs.setOptionValue("time_limit", controls.timeLimit);
  if (highs.passModel(toHighsLp(m)) == HighsStatus::kError) throw SolverError("backend rejected the model");
  if (highs.run() == HighsStatus::kError) throw SolverError("backend failed: " + highs.modelStatusToString(highs.getModelStatus()));

  SolveOutcome out;
  out.wallSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const HighsModelStatus status = highs.getModelStatus();
  const bool mip = !highs.getLp().integrality_.empty();
  const HighsInfo& info = highs.getInfo();
  const bool hasPrimal = info.primal_solution_status == kSolutionStatusFeasible;
  switch (status) {
    case HighsModelStatus::kOptimal:
      out.status = SolveStatus::Optimal;
      break;
    case HighsModelStatus::kInfeasible:
      out.status = SolveStatus::Infeasible;
      break;
    case HighsModelStatus::kUnbounded:
    case HighsModelStatus::kUnboundedOrInfeasible:
      out.status = SolveStatus::Unbounded;
      break;
    default:
      out.status = hasPrimal ? SolveStatus::FeasibleGap : SolveStatus::Limit;
      break;
  }
  if (hasPrimal) {
    out.objective = info.objective_function_value;
    out.values = highs.getSolution().col_value;
  }
  if (mip && info.mip_dual_bound > -kHighsInf && info.mip_dual_bound < kHighsInf)
    out.bestBound = info.mip_dual_bound;
  else if (out.status == SolveStatus::Optimal)
    out.bestBound = out.objective;
  return out;
}

}  // namespace backend

// Pluggable entry point; the backend is chosen per call or via MHRES_SOLVER.
inline SolveOutcome solve(const Milp& m, const SolveControls& controls = {}) {
  const std::string which = controls.backend.empty() ? defaultBackend() : controls.backend;
  if (which == "highs") return backend::solveWithHighs(m, controls);
  throw SolverError("backend unavailable: '" + which + "'");
}

}  // namespace mhres

#endif
