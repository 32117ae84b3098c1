// Linear / mixed-integer program container shared by all optimization modules.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace distmarket::opt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class RowSense { LessEqual, Equal, GreaterEqual };
enum class ObjSense { Minimize, Maximize };
enum class SolveStatus { Optimal, Infeasible, Unbounded };

// Thrown for structurally broken models (dangling var ids, duplicate terms,
// inverted bounds). Distinct from infeasibility, which is a solve status.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnboundedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Variable {
  double lower = 0.0;
  double upper = kInf;
  VarKind kind = VarKind::Continuous;
  double obj = 0.0;
  std::string name;
};

struct RowTerm {
  int var = -1;
  double coeff = 0.0;
};

struct Constraint {
  std::vector<RowTerm> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
  std::string name;
};

class LinearProgram {
 public:
  int add_variable(double lower, double upper, double obj, VarKind kind,
                   std::string name = {}) {
    if (kind == VarKind::Binary) {
      lower = 0.0;
      upper = 1.0;
    }
    vars_.push_back(Variable{lower, upper, kind, obj, std::move(name)});
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_continuous(double lower, double upper, double obj,
                     std::string name = {}) {
    return add_variable(lower, upper, obj, VarKind::Continuous,
                        std::move(name));
  }

  int add_binary(double obj, std::string name = {}) {
    return add_variable(0.0, 1.0, obj, VarKind::Binary, std::move(name));
  }

  int add_row(std::vector<RowTerm> terms, RowSense sense, double rhs,
              std::string name = {}) {
    rows_.push_back(Constraint{std::move(terms), sense, rhs, std::move(name)});
    return static_cast<int>(rows_.size()) - 1;
  }

  void set_objective_sense(ObjSense s) { sense_ = s; }
  ObjSense objective_sense() const { return sense_; }

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  const Variable& var(int j) const { return vars_.at(static_cast<size_t>(j)); }
  Variable& var(int j) { return vars_.at(static_cast<size_t>(j)); }
  const Constraint& row(int i) const { return rows_.at(static_cast<size_t>(i)); }
  const std::vector<Variable>& vars() const { return vars_; }
  const std::vector<Constraint>& rows() const { return rows_; }

  std::vector<int> binary_vars() const {
    std::vector<int> out;
    for (int j = 0; j < num_vars(); ++j)
      if (vars_[static_cast<size_t>(j)].kind == VarKind::Binary)
        out.push_back(j);
    return out;
  }

  double objective_value(const std::vector<double>& x) const {
    double v = 0.0;
    for (size_t j = 0; j < vars_.size(); ++j) v += vars_[j].obj * x[j];
    return v;
  }

  // Throws ModelError on dangling var ids, duplicate ids within a row,
  // inverted bounds, or non-finite coefficients.
  void validate() const {
    if (vars_.empty()) throw ModelError("model has no variables");
    for (size_t j = 0; j < vars_.size(); ++j) {
      const Variable& v = vars_[j];
      if (std::isnan(v.lower) || std::isnan(v.upper) || !std::isfinite(v.obj))
        throw ModelError("variable " + std::to_string(j) +
                         ": non-finite bound or objective");
      if (v.lower > v.upper)
        throw ModelError("variable " + std::to_string(j) +
                         ": lower bound exceeds upper bound");
    }
    for (size_t i = 0; i < rows_.size(); ++i) {
      const Constraint& r = rows_[i];
      if (!std::isfinite(r.rhs))
        throw ModelError("constraint " + std::to_string(i) +
                         ": non-finite rhs");
      std::unordered_set<int> seen;
      for (const RowTerm& t : r.terms) {
        if (t.var < 0 || t.var >= num_vars())
          throw ModelError("constraint " + std::to_string(i) +
                           ": term references undeclared variable id " +
                           std::to_string(t.var));
        if (!std::isfinite(t.coeff))
          throw ModelError("constraint " + std::to_string(i) +
                           ": non-finite coefficient");
        if (!seen.insert(t.var).second)
          throw ModelError("constraint " + std::to_string(i) +
                           ": duplicate variable id " + std::to_string(t.var) +
                           " in term list");
      }
    }
  }

  // Human-readable LP-style dump for desk verification.
  void write_lp_format(std::ostream& os) const {
    auto vname = [&](int j) {
      const Variable& v = vars_[static_cast<size_t>(j)];
      return v.name.empty() ? "x" + std::to_string(j) : v.name;
    };
    os << (sense_ == ObjSense::Minimize ? "minimize" : "maximize") << "\n  ";
    bool first = true;
    for (int j = 0; j < num_vars(); ++j) {
      double c = vars_[static_cast<size_t>(j)].obj;
      if (c == 0.0) continue;
      if (!first) os << (c >= 0 ? " + " : " - ");
      else if (c < 0) os << "-";
      os << std::abs(c) << " " << vname(j);
      first = false;
    }
    if (first) os << "0";
    os << "\nsubject to\n";
    for (size_t i = 0; i < rows_.size(); ++i) {
      const Constraint& r = rows_[i];
      os << "  " << (r.name.empty() ? "c" + std::to_string(i) : r.name) << ": ";
      bool f2 = true;
      for (const RowTerm& t : r.terms) {
        if (!f2) os << (t.coeff >= 0 ? " + " : " - ");
        else if (t.coeff < 0) os << "-";
        os << std::abs(t.coeff) << " " << vname(t.var);
        f2 = false;
      }
      if (f2) os << "0";
      switch (r.sense) {
        case RowSense::LessEqual: os << " <= "; break;
        case RowSense::Equal: os << " = "; break;
        case RowSense::GreaterEqual: os << " >= "; break;
      }
      os << r.rhs << "\n";
    }
    os << "bounds\n";
    for (int j = 0; j < num_vars(); ++j) {
      const Variable& v = vars_[static_cast<size_t>(j)];
      os << "  ";
      if (v.lower == -kInf) os << "-inf";
      else os << v.lower;
      os << " <= " << vname(j) << " <= ";
      if (v.upper == kInf) os << "+inf";
      else os << v.upper;
      if (v.kind == VarKind::Binary) os << "  binary";
      os << "\n";
    }
    os << "end\n";
  }

  void dump(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open dump file: " + path);
    write_lp_format(os);
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  ObjSense sense_ = ObjSense::Minimize;
};

// Duals follow the sensitivity convention: duals[i] is the derivative of the
// reported optimal objective with respect to the rhs of constraint i. Under
// minimization a >= constraint therefore has a nonnegative dual.
struct LpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> values;
  std::vector<double> duals;
  double objective = 0.0;
  long iterations = 0;
};

struct MipSolution {
  SolveStatus status = SolveStatus::Infeasible;  // Optimal or Infeasible
  std::vector<double> values;
  double objective = 0.0;
  double gap = 0.0;
  long node_count = 0;
};

}  // namespace distmarket::opt
