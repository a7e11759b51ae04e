#pragma once

#include <functional>
#include <optional>

#include "mtlplan/milp_model.hpp"

namespace mtlplan::milp {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpOptions {
  int max_iterations = 50000;
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
  int iterations = 0;
};

// Primal simplex with explicit variable bounds, two phases, dense
// tableau.  Binary variables are relaxed to their bounds.  Dantzig
// pricing with lowest-index ties; Bland's rule takes over after 1000
// consecutive degenerate steps.
LpResult solve_lp(const MilpModel& model, const LpOptions& opts = {});

enum class MilpStatus { Optimal, Infeasible, NodeLimit };

// Given the relaxation solution at a node, a hint may propose a full
// assignment (typically by rounding model-specific structure).  It is
// accepted as incumbent only if check_solution passes at 1e-6.
using IncumbentHint =
    std::function<std::optional<Eigen::VectorXd>(const MilpModel&, const Eigen::VectorXd&)>;

struct MilpOptions {
  int node_limit = 100000;
  double time_limit = 0.0;  // seconds; 0 disables the cap
  double int_tol = 1e-6;
  LpOptions lp;
  IncumbentHint hint;
};

struct MilpResult {
  MilpStatus status = MilpStatus::Infeasible;
  double objective = kInf;
  Eigen::VectorXd x;  // empty when no incumbent was found
  int nodes_explored = 0;
  double wall_time = 0.0;
  double best_bound = -kInf;
};

// Best-first branch and bound: nodes ordered by relaxation bound with
// creation-order ties, branching on the most fractional binary with
// lowest-id ties.  An unbounded relaxation raises std::runtime_error;
// hitting the node or time cap, or an LP iteration cap inside a node,
// returns NodeLimit with the incumbent found so far.
MilpResult solve_milp(const MilpModel& model, const MilpOptions& opts = {});

}  // namespace mtlplan::milp
