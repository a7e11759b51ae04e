#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

namespace mtlplan::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class Relation { LessEq, Equal };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = kInf;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation rel = Relation::LessEq;
  double rhs = 0.0;
};

// Minimization model over continuous and binary variables with <= and =
// rows.  Construction order fixes variable and row ids, so identical
// build sequences give identical models.
struct MilpModel {
  std::string name = "model";
  std::vector<Variable> vars;
  std::vector<Constraint> constraints;
  std::vector<Term> objective;
  double objective_constant = 0.0;

  int add_var(std::string var_name, VarKind kind, double lower, double upper);
  int add_binary(std::string var_name) { return add_var(std::move(var_name), VarKind::Binary, 0, 1); }
  void add_constraint(std::string row_name, std::vector<Term> terms, Relation rel, double rhs);
  void add_objective_term(int var, double coef);

  int num_vars() const { return static_cast<int>(vars.size()); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }
  int num_binaries() const;

  double eval_objective(const Eigen::VectorXd& x) const;

  // Rejects out-of-range var ids, inverted bounds, binaries outside
  // [0,1], and duplicate variable names.
  void validate() const;
};

struct Violation {
  std::string where;
  double amount = 0.0;
};

struct ViolationReport {
  std::vector<Violation> items;
  bool ok() const { return items.empty(); }
  std::string summary() const;
};

// Evaluates every row and variable bound; entries are violations
// exceeding tol.
ViolationReport check_solution(const MilpModel& model, const Eigen::VectorXd& x,
                               double tol = 1e-6);

}  // namespace mtlplan::milp
