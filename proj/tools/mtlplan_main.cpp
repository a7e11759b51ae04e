#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtlplan/lp_format.hpp"
#include "mtlplan/mission_io.hpp"

namespace fs = std::filesystem;
using namespace mtlplan;

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitVerification = 4;
constexpr int kExitDivergence = 5;

bool logging_on() {
  const char* v = std::getenv("MTLPLAN_LOG");
  return v && *v && std::string(v) != "0";
}

void logline(const std::string& s) {
  if (logging_on()) std::cerr << "[mtlplan] " << s << "\n";
}

struct SolveFlags {
  int node_limit = 0;      // 0 keeps the mission file value
  double time_limit = -1;  // negative keeps the mission file value
  bool export_lp = false;
};

void apply_flags(mission_io::MissionSpec& spec, const SolveFlags& flags) {
  if (flags.node_limit > 0) spec.plan.milp.node_limit = flags.node_limit;
  if (flags.time_limit >= 0) spec.plan.milp.time_limit = flags.time_limit;
}

void export_models(const mission_io::MissionSpec& spec, const dynamics::HybridAutomaton& aut,
                   const planner::AgentPlan& plan, const std::vector<planner::Subtask>& tasks,
                   const fs::path& out) {
  for (std::size_t k = 0; k < plan.segments.size(); ++k) {
    const auto& seg = plan.segments[k];
    const auto* mode = aut.find_mode(seg.mode);
    auto built = planner::build_subtask(*mode, spec.ws, seg.states.front(), tasks[k],
                                        spec.plan);
    char idx[8];
    std::snprintf(idx, sizeof(idx), "%02d", static_cast<int>(k));
    std::ofstream os(out / (plan.agent + "_" + idx + "_" + seg.name + ".lp"));
    milp::write_lp(built.model, os);
  }
}

void print_agent_line(const planner::AgentPlan& plan, bool verified, double drift) {
  double objective = 0.0;
  for (const auto& seg : plan.segments) objective += seg.objective;
  std::printf("%s: %zu steps, objective %.6g, verified %s, replay drift %.3g\n",
              plan.agent.c_str(), plan.inputs.size(), objective, verified ? "yes" : "no",
              drift);
}

int run_plan(mission_io::MissionSpec spec, const SolveFlags& flags, const fs::path& out) {
  apply_flags(spec, flags);
  auto aut = dynamics::default_automaton(spec.params, spec.dt, spec.limits);

  auto t0 = std::chrono::steady_clock::now();
  planner::MissionPlan mp;
  try {
    logline("planning '" + spec.name + "'");
    mp = planner::coordinate(aut, spec.ws, spec.first, spec.second, spec.co, spec.plan);
  } catch (const planner::PlanError& e) {
    std::cerr << "planning failed: " << e.what() << "\n";
    std::string what = e.what();
    bool coordination = what.find("share '") != std::string::npos ||
                        what.find("separation") != std::string::npos;
    return coordination ? kExitVerification : kExitInfeasible;
  }
  double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  logline("planned in " + std::to_string(total) + " s");

  bool ok1 = planner::all_ok(planner::verify_plan(spec.ws, mp.first, mp.first_tasks));
  bool ok2 = planner::all_ok(planner::verify_plan(spec.ws, mp.second, mp.second_tasks));

  double drift1 = 0.0, drift2 = 0.0;
  try {
    drift1 = planner::replay_drift(spec.params, aut, mp.first);
    drift2 = planner::replay_drift(spec.params, aut, mp.second);
  } catch (const dynamics::DivergenceError& e) {
    std::cerr << "replay diverged: " << e.what() << "\n";
    return kExitDivergence;
  }

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    std::cerr << "cannot create '" << out.string() << "': " << ec.message() << "\n";
    return kExitSchema;
  }
  for (const auto* plan : {&mp.first, &mp.second}) {
    std::ofstream os(out / (plan->agent + ".csv"));
    if (!os) {
      std::cerr << "cannot write trajectory for " << plan->agent << "\n";
      return kExitSchema;
    }
    mission_io::write_trajectory_csv(os, *plan, spec.dt);
  }
  {
    std::ofstream os(out / "summary.json");
    os << mission_io::summary_json(spec, mp, drift1, drift2).dump(2) << "\n";
  }
  {
    std::ofstream os(out / "timings.txt");
    mission_io::write_timings(os, mp, total);
  }
  if (flags.export_lp) {
    export_models(spec, aut, mp.first, mp.first_tasks, out);
    export_models(spec, aut, mp.second, mp.second_tasks, out);
  }

  std::printf("mission '%s'\n", spec.name.c_str());
  std::printf("release step %d, wait steps %d\n", mp.release, mp.wait_steps);
  print_agent_line(mp.first, ok1, drift1);
  print_agent_line(mp.second, ok2, drift2);
  std::printf("min separation %.3f\n",
              planner::min_separation(planner::positions_of(mp.first),
                                      planner::positions_of(mp.second)));
  std::printf("wrote %s\n", out.string().c_str());
  if (!ok1 || !ok2) {
    std::cerr << "verification failed\n";
    return kExitVerification;
  }
  return 0;
}

// Matches exported segments against the mission's expanded task list,
// re-synthesizing the inserted hold from its length.
std::vector<planner::Subtask> tasks_for(const planner::AgentPlan& plan,
                                        const std::vector<planner::Subtask>& spec_tasks,
                                        const planner::Coordination& co, bool* ok) {
  std::vector<planner::Subtask> out;
  std::size_t cursor = 0;
  *ok = true;
  for (const auto& seg : plan.segments) {
    if (seg.name == "wait") {
      planner::Subtask hold;
      hold.name = "wait";
      hold.mode = seg.mode;
      int steps = static_cast<int>(seg.inputs.size());
      hold.formula = mtl::make_always(mtl::Interval(0, steps), mtl::make_atom(co.wait_label));
      hold.steps = steps;
      out.push_back(std::move(hold));
      continue;
    }
    if (cursor >= spec_tasks.size() || spec_tasks[cursor].name != seg.name ||
        spec_tasks[cursor].steps != static_cast<int>(seg.inputs.size())) {
      *ok = false;
      return out;
    }
    out.push_back(spec_tasks[cursor]);
    ++cursor;
  }
  if (cursor != spec_tasks.size()) *ok = false;
  return out;
}

planner::AgentPlan load_plan(const fs::path& traj, const std::string& agent) {
  std::ifstream is(traj / (agent + ".csv"));
  if (!is) throw mission_io::SchemaError("cannot open trajectory for '" + agent + "'");
  return mission_io::plan_from_rows(mission_io::read_trajectory_csv(is));
}

int run_verify(const mission_io::MissionSpec& spec, const fs::path& traj) {
  auto first = load_plan(traj, spec.first.name);
  auto second = load_plan(traj, spec.second.name);

  bool shape1 = false, shape2 = false;
  auto tasks1 = tasks_for(first, spec.first.tasks, spec.co, &shape1);
  auto tasks2 = tasks_for(second, spec.second.tasks, spec.co, &shape2);
  if (!shape1 || !shape2) {
    std::cerr << "trajectory segments do not match the mission's sub-tasks\n";
    return kExitVerification;
  }

  bool ok = true;
  for (const auto& [plan, tasks] : {std::pair{&first, &tasks1}, {&second, &tasks2}}) {
    for (const auto& item : planner::verify_plan(spec.ws, *plan, *tasks)) {
      std::printf("%s/%s at step %d: %s\n", plan->agent.c_str(), item.name.c_str(),
                  item.offset, item.ok ? "ok" : "violated");
      ok = ok && item.ok;
    }
  }

  auto pa = planner::positions_of(first);
  auto pb = planner::positions_of(second);
  if (!spec.co.exclusive.empty()) {
    int step = -1;
    bool apart = planner::check_exclusion(spec.ws, pa, pb, spec.co.exclusive, &step);
    std::printf("mutual exclusion on '%s': %s\n", spec.co.exclusive.c_str(),
                apart ? "ok" : "violated");
    if (!apart) {
      std::printf("both agents inside at step %d\n", step);
      ok = false;
    }
  }
  double sep = planner::min_separation(pa, pb);
  std::printf("min separation %.3f (floor %.3f)\n", sep, spec.co.min_separation);
  if (sep < spec.co.min_separation) ok = false;

  if (!ok) {
    std::cerr << "verification failed\n";
    return kExitVerification;
  }
  std::printf("all checks passed\n");
  return 0;
}

int run_simulate(const mission_io::MissionSpec& spec, const fs::path& traj,
                 double max_drift) {
  auto aut = dynamics::default_automaton(spec.params, spec.dt, spec.limits);
  bool ok = true;
  for (const auto& agent : {spec.first.name, spec.second.name}) {
    auto plan = load_plan(traj, agent);
    double drift = 0.0;
    try {
      drift = planner::replay_drift(spec.params, aut, plan);
    } catch (const dynamics::DivergenceError& e) {
      std::cerr << agent << ": replay diverged: " << e.what() << "\n";
      return kExitDivergence;
    } catch (const planner::PlanError& e) {
      std::cerr << agent << ": " << e.what() << "\n";
      return kExitSchema;
    }
    std::printf("%s: worst terminal drift %.4f m (limit %.3f)\n", agent.c_str(), drift,
                max_drift);
    ok = ok && drift <= max_drift;
  }
  if (!ok) {
    std::cerr << "drift limit exceeded\n";
    return kExitDivergence;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MTL mission planning for a two-quadrotor team"};
  app.require_subcommand(1);

  std::string mission_path, out_dir, traj_dir;
  SolveFlags flags;
  int seed = 0;
  double max_drift = 0.3;
  bool show = false;

  auto add_solve_flags = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "output directory")->required();
    cmd->add_option("--node-limit", flags.node_limit, "override the solver node limit");
    cmd->add_option("--time-limit", flags.time_limit,
                    "override the per-segment time limit in seconds");
    cmd->add_flag("--export-lp", flags.export_lp, "also write each segment's model");
    cmd->add_option("--seed", seed, "unused; planning is deterministic");
  };

  auto* plan_cmd = app.add_subcommand("plan", "plan a mission file");
  plan_cmd->add_option("mission", mission_path, "mission json")->required();
  add_solve_flags(plan_cmd);

  auto* demo_cmd = app.add_subcommand("demo", "plan the built-in window scenario");
  demo_cmd->add_flag("--show", show, "print the mission json and exit");
  demo_cmd->add_option("--out", out_dir, "output directory");
  demo_cmd->add_option("--node-limit", flags.node_limit, "override the solver node limit");
  demo_cmd->add_option("--time-limit", flags.time_limit,
                       "override the per-segment time limit in seconds");
  demo_cmd->add_flag("--export-lp", flags.export_lp, "also write each segment's model");
  demo_cmd->add_option("--seed", seed, "unused; planning is deterministic");

  auto* verify_cmd = app.add_subcommand("verify", "monitor exported trajectories");
  verify_cmd->add_option("mission", mission_path, "mission json")->required();
  verify_cmd->add_option("--traj", traj_dir, "directory with exported csv files")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "replay trajectories on the nonlinear model");
  sim_cmd->add_option("mission", mission_path, "mission json")->required();
  sim_cmd->add_option("--traj", traj_dir, "directory with exported csv files")->required();
  sim_cmd->add_option("--max-drift", max_drift, "terminal drift limit per segment in meters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (demo_cmd->parsed()) {
      if (show) {
        std::cout << mission_io::demo_mission_json() << "\n";
        return 0;
      }
      if (out_dir.empty()) {
        std::cerr << "demo: --out is required unless --show is given\n";
        return kExitSchema;
      }
      return run_plan(mission_io::parse_mission(mission_io::demo_mission_json()), flags,
                      out_dir);
    }
    auto spec = mission_io::load_mission(mission_path);
    if (plan_cmd->parsed()) return run_plan(std::move(spec), flags, out_dir);
    if (verify_cmd->parsed()) return run_verify(spec, traj_dir);
    return run_simulate(spec, traj_dir, max_drift);
  } catch (const mission_io::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
