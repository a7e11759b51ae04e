#include "mtlplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace mtlplan::planner {

namespace {

// Scatter a mode-coordinate state into the full 12-state; modes built
// by hand without a selection pass through unchanged.
Eigen::VectorXd lift_full(const dynamics::LinearMode& mode, const Eigen::VectorXd& x) {
  if (mode.state_sel.empty()) return x;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(dynamics::kFullDim);
  for (int i = 0; i < static_cast<int>(mode.state_sel.size()); ++i)
    full[mode.state_sel[i]] = x[i];
  return full;
}

}  // namespace

encoder::BuildResult build_subtask(const dynamics::LinearMode& mode,
                                   const workspace::Workspace& ws,
                                   const Eigen::VectorXd& x0_abs, const Subtask& task,
                                   const PlanConfig& cfg) {
  if (task.steps < 1)
    throw PlanError("sub-task '" + task.name + "': needs at least one step");
  if (!task.formula.valid()) throw PlanError("sub-task '" + task.name + "': empty formula");
  if (x0_abs.size() != mode.state_dim())
    throw PlanError("sub-task '" + task.name + "': initial state has the wrong dimension");

  encoder::EncodingConfig ecfg;
  ecfg.M = cfg.big_m;
  ecfg.eps = cfg.eps;
  ecfg.N = task.steps;

  encoder::BuildResult built;
  try {
    encoder::Encoder enc(mode, ws, ecfg);
    enc.encode_dynamics(x0_abs - mode.x_star);
    enc.encode_objective();
    enc.encode_formula(mtl::to_nnf(task.formula));
    built = enc.finish();
  } catch (const encoder::EncodeError& err) {
    throw PlanError("sub-task '" + task.name + "': " + err.what());
  }

  if (task.terminal_rest) {
    std::vector<char> is_pos(mode.state_dim(), 0);
    for (int k : mode.position_dims) is_pos[k] = 1;
    for (int i = 0; i < mode.state_dim(); ++i) {
      if (is_pos[i]) continue;
      built.model.add_constraint(
          "rest_" + std::to_string(i),
          {{built.map.at(encoder::VarRole::State, task.steps, i), 1.0}},
          milp::Relation::Equal, -mode.x_star[i]);
    }
  }
  return built;
}

SegmentPlan plan_subtask(const dynamics::LinearMode& mode, const workspace::Workspace& ws,
                         const Eigen::VectorXd& x0_abs, const Subtask& task,
                         const PlanConfig& cfg) {
  auto built = build_subtask(mode, ws, x0_abs, task, cfg);

  milp::MilpOptions opts = cfg.milp;
  if (cfg.use_hint) opts.hint = encoder::rounding_hint(built);
  auto res = milp::solve_milp(built.model, opts);
  if (res.status == milp::MilpStatus::Infeasible)
    throw PlanError("sub-task '" + task.name + "': infeasible");
  if (res.status != milp::MilpStatus::Optimal)
    throw PlanError("sub-task '" + task.name + "': solver hit its node or time limit");

  SegmentPlan seg;
  seg.name = task.name;
  seg.mode = mode.name;
  for (const auto& x : encoder::decode_states(built, res.x))
    seg.states.push_back(x + mode.x_star);
  for (const auto& u : encoder::decode_inputs(built, res.x))
    seg.inputs.push_back(u + mode.u_star);
  seg.objective = res.objective;
  seg.nodes = res.nodes_explored;
  seg.solve_time = res.wall_time;
  return seg;
}

AgentPlan plan_agent(const dynamics::HybridAutomaton& aut, const workspace::Workspace& ws,
                     const std::string& agent, const Eigen::VectorXd& x0_abs,
                     const std::vector<Subtask>& tasks, const PlanConfig& cfg) {
  if (tasks.empty()) throw PlanError("agent '" + agent + "': no sub-tasks");

  AgentPlan plan;
  plan.agent = agent;
  Eigen::VectorXd cur = x0_abs;
  const dynamics::LinearMode* prev = nullptr;
  int offset = 0;

  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const auto& task = tasks[k];
    const auto* mode = aut.find_mode(task.mode);
    if (!mode) throw PlanError("agent '" + agent + "': unknown mode '" + task.mode + "'");
    if (prev && prev->name != mode->name) {
      const auto* edge = aut.find_edge(prev->name, mode->name);
      if (!edge)
        throw PlanError("agent '" + agent + "': no edge " + prev->name + " -> " + mode->name);
      if (!dynamics::guard_satisfied(edge->guard, lift_full(*prev, cur)))
        throw PlanError("agent '" + agent + "': guard into '" + mode->name +
                        "' fails at step " + std::to_string(offset));
    }
    if (k == 0)
      plan.position_dims = mode->position_dims;
    else if (mode->position_dims != plan.position_dims)
      throw PlanError("agent '" + agent + "': modes disagree on position dims");

    auto seg = plan_subtask(*mode, ws, cur, task, cfg);
    seg.offset = offset;
    cur = seg.states.back();

    if (k == 0) plan.states.push_back(seg.states.front());
    for (int t = 1; t <= task.steps; ++t) plan.states.push_back(seg.states[t]);
    for (int t = 0; t < task.steps; ++t) {
      plan.inputs.push_back(seg.inputs[t]);
      plan.segment_of_step.push_back(static_cast<int>(k));
    }
    offset += task.steps;
    plan.segments.push_back(std::move(seg));
    prev = mode;
  }

  std::vector<int> toggles;
  for (std::size_t k = 0; k < tasks.size(); ++k)
    if (tasks[k].sets_payload)
      toggles.push_back(plan.segments[k].offset + tasks[k].steps);
  plan.payload.assign(plan.states.size(), false);
  bool carrying = false;
  std::size_t ti = 0;
  for (std::size_t i = 0; i < plan.states.size(); ++i) {
    while (ti < toggles.size() && static_cast<int>(i) == toggles[ti]) {
      carrying = !carrying;
      ++ti;
    }
    plan.payload[i] = carrying;
  }
  return plan;
}

std::vector<Eigen::VectorXd> positions_of(const AgentPlan& plan) {
  std::vector<Eigen::VectorXd> out;
  const int d = static_cast<int>(plan.position_dims.size());
  for (const auto& x : plan.states) {
    Eigen::VectorXd p(d);
    for (int i = 0; i < d; ++i) p[i] = x[plan.position_dims[i]];
    out.push_back(std::move(p));
  }
  return out;
}

int release_step(const workspace::Workspace& ws,
                 const std::vector<Eigen::VectorXd>& positions,
                 const std::vector<std::string>& labels) {
  std::vector<const workspace::Region*> regions;
  for (const auto& l : labels) {
    const auto* r = ws.find(l);
    if (!r) throw PlanError("unknown corridor label '" + l + "'");
    regions.push_back(r);
  }
  int last = -1;
  for (int t = 0; t < static_cast<int>(positions.size()); ++t)
    for (const auto* r : regions)
      if (workspace::contains(*r, positions[t])) {
        last = t;
        break;
      }
  return last + 1;
}

std::vector<VerifyItem> verify_plan(const workspace::Workspace& ws, const AgentPlan& plan,
                                    const std::vector<Subtask>& tasks) {
  auto trace = workspace::trace_of(ws, positions_of(plan));
  std::vector<VerifyItem> out;
  int offset = 0;
  for (const auto& task : tasks) {
    VerifyItem item;
    item.name = task.name;
    item.offset = offset;
    try {
      item.ok = mtl::evaluate(mtl::clip_unbounded(task.formula, task.steps), trace, offset);
    } catch (const mtl::HorizonError&) {
      item.ok = false;
    }
    out.push_back(item);
    offset += task.steps;
  }
  return out;
}

bool all_ok(const std::vector<VerifyItem>& items) {
  for (const auto& i : items)
    if (!i.ok) return false;
  return true;
}

bool check_exclusion(const workspace::Workspace& ws,
                     const std::vector<Eigen::VectorXd>& a,
                     const std::vector<Eigen::VectorXd>& b, const std::string& label,
                     int* step) {
  const auto* r = ws.find(label);
  if (!r) throw PlanError("unknown exclusive label '" + label + "'");
  if (a.empty() || b.empty()) return true;
  std::size_t T = std::max(a.size(), b.size());
  for (std::size_t t = 0; t < T; ++t) {
    const auto& pa = a[std::min(t, a.size() - 1)];
    const auto& pb = b[std::min(t, b.size() - 1)];
    if (workspace::contains(*r, pa) && workspace::contains(*r, pb)) {
      if (step) *step = static_cast<int>(t);
      return false;
    }
  }
  return true;
}

double min_separation(const std::vector<Eigen::VectorXd>& a,
                      const std::vector<Eigen::VectorXd>& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  std::size_t T = std::max(a.size(), b.size());
  for (std::size_t t = 0; t < T; ++t) {
    const auto& pa = a[std::min(t, a.size() - 1)];
    const auto& pb = b[std::min(t, b.size() - 1)];
    best = std::min(best, (pa - pb).norm());
  }
  return best;
}

std::vector<Subtask> grasp_subtasks(const std::string& base_name, const std::string& area,
                                    const std::string& touch, const std::string& ascent,
                                    int hover_steps, int land_steps, int takeoff_steps) {
  if (hover_steps < 1 || land_steps < 1 || takeoff_steps < 1)
    throw PlanError("grasp phases need at least one step each");
  auto seq = dynamics::grasp_sequence();

  std::vector<Subtask> out(3);
  out[0].name = base_name + "_hover";
  out[0].mode = seq[0].mode;
  out[0].formula =
      mtl::make_always(mtl::Interval(0, hover_steps), mtl::make_atom(area));
  out[0].steps = hover_steps;

  out[1].name = base_name + "_land";
  out[1].mode = seq[1].mode;
  out[1].formula = mtl::make_and(
      {mtl::make_always(mtl::Interval(0, land_steps), mtl::make_atom(area)),
       mtl::make_eventually(mtl::Interval(land_steps, land_steps), mtl::make_atom(touch))});
  out[1].steps = land_steps;
  out[1].sets_payload = seq[1].sets_payload_on_exit;

  out[2].name = base_name + "_ascend";
  out[2].mode = seq[2].mode;
  out[2].formula = mtl::make_and(
      {mtl::make_always(mtl::Interval(0, takeoff_steps), mtl::make_atom(area)),
       mtl::make_eventually(mtl::Interval(takeoff_steps, takeoff_steps),
                            mtl::make_atom(ascent))});
  out[2].steps = takeoff_steps;
  return out;
}

MissionPlan coordinate(const dynamics::HybridAutomaton& aut, const workspace::Workspace& ws,
                       const AgentSpec& first, const AgentSpec& second,
                       const Coordination& co, const PlanConfig& cfg) {
  if (co.wait_after < 0 || co.wait_after >= static_cast<int>(second.tasks.size()))
    throw PlanError("coordination wait point out of range");

  MissionPlan mp;
  mp.first_tasks = first.tasks;
  mp.first = plan_agent(aut, ws, first.name, first.x0, first.tasks, cfg);
  mp.release = release_step(ws, positions_of(mp.first), co.corridor);

  int arrival = 0;
  for (int k = 0; k <= co.wait_after; ++k) arrival += second.tasks[k].steps;
  mp.wait_steps = std::max(0, mp.release - arrival);

  mp.second_tasks = second.tasks;
  if (mp.wait_steps > 0) {
    Subtask hold;
    hold.name = "wait";
    hold.mode = co.wait_mode;
    hold.formula =
        mtl::make_always(mtl::Interval(0, mp.wait_steps), mtl::make_atom(co.wait_label));
    hold.steps = mp.wait_steps;
    mp.second_tasks.insert(mp.second_tasks.begin() + co.wait_after + 1, hold);
  }
  mp.second = plan_agent(aut, ws, second.name, second.x0, mp.second_tasks, cfg);

  auto pa = positions_of(mp.first);
  auto pb = positions_of(mp.second);
  if (!co.exclusive.empty()) {
    int bad = -1;
    if (!check_exclusion(ws, pa, pb, co.exclusive, &bad))
      throw PlanError("agents share '" + co.exclusive + "' at step " + std::to_string(bad));
  }
  double sep = min_separation(pa, pb);
  if (sep < co.min_separation)
    throw PlanError("separation " + std::to_string(sep) + " is below " +
                    std::to_string(co.min_separation));
  return mp;
}

double replay_drift(const dynamics::QuadrotorParams& p, const dynamics::HybridAutomaton& aut,
                    const AgentPlan& plan) {
  double worst = 0.0;
  for (const auto& seg : plan.segments) {
    const auto* mode = aut.find_mode(seg.mode);
    if (!mode) throw PlanError("unknown mode '" + seg.mode + "' in plan");
    if (mode->state_sel.empty())
      throw PlanError("mode '" + seg.mode + "' has no full-state embedding");
    Eigen::VectorXd x0 = lift_full(*mode, seg.states.front());
    std::vector<dynamics::ControlInput> inputs;
    for (const auto& u : seg.inputs) {
      Eigen::Vector4d u4 = Eigen::Vector4d::Zero();
      for (int j = 0; j < static_cast<int>(mode->input_sel.size()); ++j)
        u4[mode->input_sel[j]] = u[j];
      inputs.push_back(dynamics::ControlInput::from_vector(u4));
    }
    auto traj = dynamics::simulate_nonlinear(p, x0, inputs, mode->dt);
    Eigen::VectorXd want = lift_full(*mode, seg.states.back());
    worst = std::max(worst, (traj.back().head(3) - want.head(3)).norm());
  }
  return worst;
}

}  // namespace mtlplan::planner
