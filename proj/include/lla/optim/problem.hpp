#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lla::optim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { kMinimize, kMaximize };
enum class VarKind { kContinuous, kBinary };
enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  double objective = 0.0;
  VarKind kind = VarKind::kContinuous;
};

struct Term {
  int var;
  double coef;
};

// A strict row is satisfied as `lhs >= rhs + eps_strict` (or `lhs <= rhs - eps_strict`).
struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
  bool strict = false;

  double effective_rhs(double eps_strict) const {
    if (!strict) return rhs;
    return relation == Relation::kGreaterEqual ? rhs + eps_strict : rhs - eps_strict;
  }
};

class OptProblem {
 public:
  Sense sense = Sense::kMaximize;
  double eps_strict = 1e-6;

  int add_variable(std::string name, double lower, double upper, double objective = 0.0,
                   VarKind kind = VarKind::kContinuous) {
    if (kind == VarKind::kBinary) {
      lower = std::max(lower, 0.0);
      upper = std::min(upper, 1.0);
    }
    vars_.push_back({std::move(name), lower, upper, objective, kind});
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_binary(std::string name, double objective = 0.0) {
    return add_variable(std::move(name), 0.0, 1.0, objective, VarKind::kBinary);
  }

  int add_constraint(std::string name, std::vector<Term> terms, Relation rel, double rhs,
                     bool strict = false) {
    if (strict && rel == Relation::kEqual) {
      throw std::invalid_argument("strict equality row '" + name + "'");
    }
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= num_vars()) {
        throw std::out_of_range("row '" + name + "' references unknown variable");
      }
    }
    rows_.push_back({std::move(name), merge_terms(std::move(terms)), rel, rhs, strict});
    return static_cast<int>(rows_.size()) - 1;
  }

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  Variable& variable(int j) { return vars_.at(j); }
  const Variable& variable(int j) const { return vars_.at(j); }
  Constraint& constraint(int i) { return rows_.at(i); }
  const Constraint& constraint(int i) const { return rows_.at(i); }

  bool has_binaries() const {
    for (const auto& v : vars_) {
      if (v.kind == VarKind::kBinary) return true;
    }
    return false;
  }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.terms.size();
    return n;
  }

  double objective_value(const std::vector<double>& x) const {
    double v = 0.0;
    for (int j = 0; j < num_vars(); ++j) v += vars_[j].objective * x[j];
    return v;
  }

  bool has_strict_rows() const {
    return std::any_of(rows_.begin(), rows_.end(), [](const Constraint& r) { return r.strict; });
  }

  // Feasibility tolerance that still tells a strict row from its closure.
  double strict_safe_tol(double tol) const {
    return has_strict_rows() ? std::min(tol, 0.01 * eps_strict) : tol;
  }

  // Largest violation of any bound or row (strict rows measured against rhs +/- eps_strict).
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int j = 0; j < num_vars(); ++j) {
      worst = std::max(worst, vars_[j].lower - x[j]);
      worst = std::max(worst, x[j] - vars_[j].upper);
    }
    for (const auto& r : rows_) {
      double lhs = 0.0;
      for (const auto& t : r.terms) lhs += t.coef * x[t.var];
      const double rhs = r.effective_rhs(eps_strict);
      switch (r.relation) {
        case Relation::kLessEqual: worst = std::max(worst, lhs - rhs); break;
        case Relation::kGreaterEqual: worst = std::max(worst, rhs - lhs); break;
        case Relation::kEqual: worst = std::max(worst, std::abs(lhs - rhs)); break;
      }
    }
    return worst;
  }

 private:
  static std::vector<Term> merge_terms(std::vector<Term> terms) {
    std::stable_sort(terms.begin(), terms.end(),
                     [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> out;
    out.reserve(terms.size());
    for (const auto& t : terms) {
      if (!out.empty() && out.back().var == t.var) {
        out.back().coef += t.coef;
      } else {
        out.push_back(t);
      }
    }
    std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
    return out;
  }

  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit, kNodeLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kIterLimit: return "iter_limit";
    case SolveStatus::kNodeLimit: return "node_limit";
  }
  return "unknown";
}

struct OptSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> primal;
  // Shadow prices d(objective)/d(rhs), one per row; empty for MIPs.
  std::vector<double> dual;
  double objective = 0.0;
  double dual_objective = 0.0;
  long pivots = 0;
  long nodes = 0;
  double wall_ms = 0.0;

  bool optimal() const { return status == SolveStatus::kOptimal; }
};

}  // namespace lla::optim
