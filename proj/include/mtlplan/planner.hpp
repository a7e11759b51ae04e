#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mtlplan/dynamics.hpp"
#include "mtlplan/encoder.hpp"
#include "mtlplan/milp.hpp"
#include "mtlplan/mtl.hpp"
#include "mtlplan/workspace.hpp"

namespace mtlplan::planner {

struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One planning segment: a mode, a bounded formula over region labels,
// and a step count.  terminal_rest pins every non-position state to
// zero (in absolute coordinates) at the final step so the next segment
// starts from an equilibrium of any mode.
struct Subtask {
  std::string name;
  std::string mode;
  mtl::Formula formula;
  int steps = 0;
  bool terminal_rest = true;
  bool sets_payload = false;
};

struct PlanConfig {
  double big_m = 0.0;  // 0 derives the constant from the workspace
  double eps = 1e-4;
  milp::MilpOptions milp;
  bool use_hint = true;
};

struct SegmentPlan {
  std::string name, mode;
  int offset = 0;  // global index of the segment's first state
  std::vector<Eigen::VectorXd> states;  // absolute, steps + 1 entries
  std::vector<Eigen::VectorXd> inputs;  // absolute, steps entries
  double objective = 0.0;
  int nodes = 0;
  double solve_time = 0.0;
};

// Encodes one segment (dynamics, effort objective, formula, terminal
// rest rows) without solving it.
encoder::BuildResult build_subtask(const dynamics::LinearMode& mode,
                                   const workspace::Workspace& ws,
                                   const Eigen::VectorXd& x0_abs, const Subtask& task,
                                   const PlanConfig& cfg);

// Encodes and solves one segment from an absolute initial state.
// Throws PlanError (naming the sub-task) when the model is infeasible
// or the solver gives up.
SegmentPlan plan_subtask(const dynamics::LinearMode& mode, const workspace::Workspace& ws,
                         const Eigen::VectorXd& x0_abs, const Subtask& task,
                         const PlanConfig& cfg);

struct AgentPlan {
  std::string agent;
  std::vector<SegmentPlan> segments;
  // Flattened trajectory; junction states are shared, so states has
  // (total steps + 1) entries.
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> inputs;
  std::vector<int> segment_of_step;  // one entry per input
  std::vector<bool> payload;         // one entry per state
  std::vector<int> position_dims;
};

// Plans the chain, checking each mode switch against the automaton's
// edges and guards at the junction state.
AgentPlan plan_agent(const dynamics::HybridAutomaton& aut, const workspace::Workspace& ws,
                     const std::string& agent, const Eigen::VectorXd& x0_abs,
                     const std::vector<Subtask>& tasks, const PlanConfig& cfg);

std::vector<Eigen::VectorXd> positions_of(const AgentPlan& plan);

// First step index at or after which the trajectory never again meets
// any of the labels; 0 when it never does.
int release_step(const workspace::Workspace& ws,
                 const std::vector<Eigen::VectorXd>& positions,
                 const std::vector<std::string>& labels);

struct VerifyItem {
  std::string name;
  int offset = 0;
  bool ok = false;
};

// Monitors every sub-task formula on the flattened trace at its
// offset.  Unbounded intervals are clipped to the segment length, the
// same reading the encoder used.
std::vector<VerifyItem> verify_plan(const workspace::Workspace& ws, const AgentPlan& plan,
                                    const std::vector<Subtask>& tasks);
bool all_ok(const std::vector<VerifyItem>& items);

// True when the two agents are never simultaneously inside the label.
// The shorter trajectory is padded with its terminal state; on failure
// *step names the first offending time.
bool check_exclusion(const workspace::Workspace& ws,
                     const std::vector<Eigen::VectorXd>& a,
                     const std::vector<Eigen::VectorXd>& b, const std::string& label,
                     int* step = nullptr);

// Smallest pairwise distance over time, padding the shorter
// trajectory with its terminal state.
double min_separation(const std::vector<Eigen::VectorXd>& a,
                      const std::vector<Eigen::VectorXd>& b);

// The grasp maneuver as a hover/land/takeoff sub-task triple over the
// staging area, its touchdown band, and the ascent band.  Touchdown
// flips the payload flag.
std::vector<Subtask> grasp_subtasks(const std::string& base_name, const std::string& area,
                                    const std::string& touch, const std::string& ascent,
                                    int hover_steps, int land_steps, int takeoff_steps);

struct AgentSpec {
  std::string name;
  Eigen::VectorXd x0;  // absolute
  std::vector<Subtask> tasks;
};

struct Coordination {
  std::vector<std::string> corridor;  // labels the first agent must release
  std::string wait_label;             // the second agent holds here
  std::string wait_mode;
  int wait_after = -1;  // insert the hold after this task index
  std::string exclusive;
  double min_separation = 0.5;
};

struct MissionPlan {
  AgentPlan first, second;
  std::vector<Subtask> first_tasks, second_tasks;  // as planned, hold included
  int release = 0;
  int wait_steps = 0;
};

// Prioritized two-agent planning: the first agent plans freely; the
// second holds at its staging region until the first has released the
// corridor, then follows.  Throws PlanError when the mutual-exclusion
// label is violated or the agents come closer than min_separation.
MissionPlan coordinate(const dynamics::HybridAutomaton& aut, const workspace::Workspace& ws,
                       const AgentSpec& first, const AgentSpec& second,
                       const Coordination& co, const PlanConfig& cfg);

// Replays each segment's inputs through the nonlinear model and
// returns the worst terminal position drift over segments.
double replay_drift(const dynamics::QuadrotorParams& p, const dynamics::HybridAutomaton& aut,
                    const AgentPlan& plan);

}  // namespace mtlplan::planner
