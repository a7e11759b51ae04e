#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mtlplan/dynamics.hpp"
#include "mtlplan/planner.hpp"
#include "mtlplan/workspace.hpp"

namespace mtlplan::mission_io {

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A mission file: labeled box workspace, quadrotor parameters, solver
// knobs, two agent chains, and the coordination rule.  Grasp macros
// are expanded into their hover/land/takeoff triple at parse time, so
// AgentSpec::tasks is always the flat list the planner sees.
struct MissionSpec {
  std::string name = "mission";
  workspace::Workspace ws;
  dynamics::QuadrotorParams params;
  double dt = 0.2;
  dynamics::ModeLimits limits;
  planner::PlanConfig plan;
  planner::AgentSpec first, second;
  planner::Coordination co;
};

MissionSpec parse_mission(const std::string& text);
MissionSpec load_mission(const std::string& path);

// Built-in two-quadrotor scenario: parallel pick-and-place through a
// window in a dividing wall, one agent at a time in the opening.
std::string demo_mission_json();

// One row of the trajectory table.  Angles and rates are not exported;
// every sub-task ends at rest, so segment replays restart from rest.
struct TrajRow {
  double t = 0.0;
  std::string agent;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  std::string mode;
  int payload = 0;
  std::string segment;
  double thrust = 0.0;
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();
};

// Columns: t,agent,x,y,z,vx,vy,vz,mode,payload,segment,thrust,tau_x,
// tau_y,tau_z.  States on a segment boundary belong to the later
// segment; the final row repeats the last segment and carries zero
// inputs.  Requires the reduced quadrotor state layout.
void write_trajectory_csv(std::ostream& os, const planner::AgentPlan& plan, double dt);
std::vector<TrajRow> read_trajectory_csv(std::istream& is);

// Rebuilds an agent plan skeleton from exported rows; angles and rates
// come back as zeros.
planner::AgentPlan plan_from_rows(const std::vector<TrajRow>& rows);

nlohmann::ordered_json summary_json(const MissionSpec& spec, const planner::MissionPlan& mp,
                                    double drift_first, double drift_second);

// Wall-clock report, one line per segment plus the mission total.
// Kept out of summary.json so exports stay byte-comparable.
void write_timings(std::ostream& os, const planner::MissionPlan& mp, double total_seconds);

}  // namespace mtlplan::mission_io
