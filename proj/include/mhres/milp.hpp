#ifndef MHRES_MILP_HPP
#define MHRES_MILP_HPP

#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mhres/common.hpp"

namespace mhres {

enum class VarKind { Continuous, Integer, Binary };

enum class Sense { LE, EQ, GE };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lb = 0;
  double ub = std::numeric_limits<double>::infinity();
  double obj = 0;
};

struct Constraint {
  std::string name;
  std::vector<std::pair<int, double>> terms;  // (variable id, coefficient)
  Sense sense = Sense::LE;
  double rhs = 0;
};

struct ModelStats {
  int numVars = 0;
  int numContinuous = 0;
  int numBinary = 0;
  int numInteger = 0;
  int numConstraints = 0;
  long numNonzeros = 0;
  std::string toString() const {
    return std::to_string(numConstraints) + " constraints, " + std::to_string(numInteger) + " integer, " +
           std::to_string(numBinary) + " binary, " + std::to_string(numContinuous) + " continuous, " +
           std::to_string(numNonzeros) + " nonzeros";
  }
};

// Solver-agnostic linear model, minimization. Variable and constraint names
// are unique and stable; they are the audit contract between the emitter, the
// LP export and the feasibility checker.
class Milp {
public:
  int addVar(const std::string& name, VarKind kind, double lb, double ub, double obj = 0) {
    if (ids_.count(name)) throw Error("duplicate variable name '" + name + "'");
    const int id = static_cast<int>(vars_.size());
    ids_.emplace(name, id);
    vars_.push_back({name, kind, lb, ub, obj});
    return id;
  }

  void addObj(int var, double coef) { vars_[static_cast<std::size_t>(var)].obj += coef; }

  void addConstr(const std::string& name, std::vector<std::pair<int, double>> terms, Sense sense, double rhs) {
    // merge duplicate columns so audit residuals and the LP file stay clean
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, double>> merged;
    for (const auto& [v, c] : terms) {
      if (v < 0 || v >= static_cast<int>(vars_.size()))
        throw Error("constraint '" + name + "' references unknown variable id");
      if (!merged.empty() && merged.back().first == v)
        merged.back().second += c;
      else
        merged.emplace_back(v, c);
    }
    cons_.push_back({name, std::move(merged), sense, rhs});
  }

  // Pins a variable via equality bounds; values outside the bounds are
  // rejected up front rather than surfacing as solver infeasibilities.
  void fix(int var, double value, double tol = 1e-6) {
    Variable& v = vars_[static_cast<std::size_t>(var)];
    double x = value;
    if (v.kind != VarKind::Continuous) {
      double r = std::round(x);
      if (std::abs(x - r) > tol)
        throw Error("fixing '" + v.name + "' to fractional value " + std::to_string(value));
      x = r;
    }
    if (x < v.lb - tol || x > v.ub + tol)
      throw Error("fixing '" + v.name + "' to " + std::to_string(value) + " outside bounds [" +
                  std::to_string(v.lb) + ", " + std::to_string(v.ub) + "]");
    x = std::min(std::max(x, v.lb), v.ub);
    v.lb = v.ub = x;
  }

  int find(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) throw Error("unknown variable '" + name + "'");
    return it->second;
  }
  bool has(const std::string& name) const { return ids_.count(name) != 0; }

  int numVars() const { return static_cast<int>(vars_.size()); }
  int numConstrs() const { return static_cast<int>(cons_.size()); }
  const Variable& var(int id) const { return vars_[static_cast<std::size_t>(id)]; }
  Variable& var(int id) { return vars_[static_cast<std::size_t>(id)]; }
  const std::vector<Variable>& vars() const { return vars_; }
  const std::vector<Constraint>& constrs() const { return cons_; }

  ModelStats stats() const {
    ModelStats s;
    s.numVars = numVars();
    for (const auto& v : vars_) {
      if (v.kind == VarKind::Binary)
        ++s.numBinary;
      else if (v.kind == VarKind::Integer)
        ++s.numInteger;
      else
        ++s.numContinuous;
    }
    s.numConstraints = numConstrs();
    for (const auto& c : cons_) s.numNonzeros += static_cast<long>(c.terms.size());
    return s;
  }

  // Text export in LP format, names preserved, for external cross-checking.
  void writeLp(std::ostream& os) const {
    os.precision(17);
    os << "\\ " << stats().toString() << "\n";
    os << "Minimize\n obj:";
    int onLine = 0;
    for (int i = 0; i < numVars(); ++i) {
      double c = vars_[static_cast<std::size_t>(i)].obj;
      if (c == 0) continue;
      os << (c >= 0 ? " + " : " - ") << std::abs(c) << " " << vars_[static_cast<std::size_t>(i)].name;
      if (++onLine % 8 == 0) os << "\n ";
    }
    os << "\nSubject To\n";
    for (const auto& c : cons_) {
      os << " " << c.name << ":";
      if (c.terms.empty()) os << " 0";
      onLine = 0;
      for (const auto& [v, coef] : c.terms) {
        os << (coef >= 0 ? " + " : " - ") << std::abs(coef) << " " << vars_[static_cast<std::size_t>(v)].name;
        if (++onLine % 8 == 0) os << "\n  ";
      }
      os << (c.sense == Sense::LE ? " <= " : c.sense == Sense::GE ? " >= " : " = ") << c.rhs << "\n";
    }
    os << "Bounds\n";
    const double inf = std::numeric_limits<double>::infinity();
    for (const auto& v : vars_) {
      if (v.lb == 0 && v.ub == inf) continue;
      if (v.lb == v.ub) {
        os << " " << v.name << " = " << v.lb << "\n";
      } else {
        if (v.lb == -inf)
          os << " -inf <= " << v.name;
        else
          os << " " << v.lb << " <= " << v.name;
        if (v.ub == inf)
          os << "\n";
        else
          os << " <= " << v.ub << "\n";
      }
    }
    bool anyBin = false, anyInt = false;
    for (const auto& v : vars_) {
      anyBin |= v.kind == VarKind::Binary;
      anyInt |= v.kind == VarKind::Integer;
    }
    if (anyBin) {
      os << "Binaries\n";
      for (const auto& v : vars_)
        if (v.kind == VarKind::Binary) os << " " << v.name << "\n";
    }
    if (anyInt) {
      os << "Generals\n";
      for (const auto& v : vars_)
        if (v.kind == VarKind::Integer) os << " " << v.name << "\n";
    }
    os << "End\n";
  }

private:
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  std::unordered_map<std::string, int> ids_;
};

enum class SolveStatus { Optimal, FeasibleGap, Infeasible, Unbounded, Limit };

inline const char* toString(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::FeasibleGap: return "feasible-gap";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Limit: return "limit";
  }
  return "?";
}

struct SolveControls {
  double relGap = 1e-6;
  double timeLimit = std::numeric_limits<double>::infinity();
  int threads = 1;  // single-thread deterministic mode is the test default
  bool quiet = true;
  std::string backend;  // empty: resolve from MHRES_SOLVER, default "highs"
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Limit;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double bestBound = -std::numeric_limits<double>::infinity();
  std::vector<double> values;
  double wallSeconds = 0;
  bool hasSolution() const {
    return status == SolveStatus::Optimal || status == SolveStatus::FeasibleGap;
  }
};

}  // namespace mhres

#endif
