#include "mtlplan/milp_model.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mtlplan::milp {

int MilpModel::add_var(std::string var_name, VarKind kind, double lower, double upper) {
  vars.push_back({std::move(var_name), kind, lower, upper});
  return static_cast<int>(vars.size()) - 1;
}

void MilpModel::add_constraint(std::string row_name, std::vector<Term> terms, Relation rel,
                               double rhs) {
  constraints.push_back({std::move(row_name), std::move(terms), rel, rhs});
}

void MilpModel::add_objective_term(int var, double coef) {
  objective.push_back({var, coef});
}

int MilpModel::num_binaries() const {
  int n = 0;
  for (const auto& v : vars) n += v.kind == VarKind::Binary;
  return n;
}

double MilpModel::eval_objective(const Eigen::VectorXd& x) const {
  double obj = objective_constant;
  for (const auto& t : objective) obj += t.coef * x[t.var];
  return obj;
}

void MilpModel::validate() const {
  const int n = num_vars();
  std::set<std::string> names;
  for (const auto& v : vars) {
    if (v.name.empty()) throw std::invalid_argument("unnamed variable");
    if (!names.insert(v.name).second)
      throw std::invalid_argument("duplicate variable name " + v.name);
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
      throw std::invalid_argument("bad bounds on " + v.name);
    if (v.kind == VarKind::Binary && (v.lower < 0 || v.upper > 1))
      throw std::invalid_argument("binary " + v.name + " must stay within [0,1]");
  }
  auto check_ref = [n](const Term& t, const std::string& where) {
    if (t.var < 0 || t.var >= n)
      throw std::invalid_argument(where + " references undeclared variable");
  };
  for (const auto& c : constraints)
    for (const auto& t : c.terms) check_ref(t, "row " + c.name);
  for (const auto& t : objective) check_ref(t, "objective");
}

std::string ViolationReport::summary() const {
  std::ostringstream os;
  for (const auto& v : items) os << v.where << " violated by " << v.amount << "\n";
  return os.str();
}

ViolationReport check_solution(const MilpModel& model, const Eigen::VectorXd& x, double tol) {
  if (x.size() != model.num_vars())
    throw std::invalid_argument("assignment length does not match variable count");
  ViolationReport report;
  for (int j = 0; j < model.num_vars(); ++j) {
    const auto& v = model.vars[j];
    if (x[j] < v.lower - tol) report.items.push_back({"lower bound of " + v.name, v.lower - x[j]});
    if (x[j] > v.upper + tol) report.items.push_back({"upper bound of " + v.name, x[j] - v.upper});
  }
  for (const auto& c : model.constraints) {
    double lhs = 0;
    for (const auto& t : c.terms) lhs += t.coef * x[t.var];
    const double over = c.rel == Relation::LessEq ? lhs - c.rhs : std::abs(lhs - c.rhs);
    if (over > tol) report.items.push_back({"row " + c.name, over});
  }
  return report;
}

}  // namespace mtlplan::milp
