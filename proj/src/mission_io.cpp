#include "mtlplan/mission_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

namespace mtlplan::mission_io {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

const json& need(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(ctx + ": missing '" + key + "'");
  return *it;
}

double need_num(const json& j, const char* key, const std::string& ctx) {
  const json& v = need(j, key, ctx);
  if (!v.is_number()) throw SchemaError(ctx + ": '" + key + "' must be a number");
  return v.get<double>();
}

int need_int(const json& j, const char* key, const std::string& ctx) {
  const json& v = need(j, key, ctx);
  if (!v.is_number_integer()) throw SchemaError(ctx + ": '" + key + "' must be an integer");
  return v.get<int>();
}

std::string need_str(const json& j, const char* key, const std::string& ctx) {
  const json& v = need(j, key, ctx);
  if (!v.is_string() || v.get<std::string>().empty())
    throw SchemaError(ctx + ": '" + key + "' must be a non-empty string");
  return v.get<std::string>();
}

Eigen::VectorXd as_vec(const json& v, const std::string& ctx) {
  if (!v.is_array() || v.empty()) throw SchemaError(ctx + ": expected a number array");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw SchemaError(ctx + ": expected a number array");
    out[static_cast<int>(i)] = v[i].get<double>();
  }
  return out;
}

void set_if(const json& j, const char* key, double& target, const std::string& ctx) {
  if (auto it = j.find(key); it != j.end()) {
    if (!it->is_number()) throw SchemaError(ctx + ": '" + key + "' must be a number");
    target = it->get<double>();
  }
}

workspace::Workspace parse_workspace(const json& j) {
  workspace::Workspace ws;
  const json& b = need(j, "bounds", "workspace");
  ws.bounds.lo = as_vec(need(b, "lo", "workspace.bounds"), "workspace.bounds.lo");
  ws.bounds.hi = as_vec(need(b, "hi", "workspace.bounds"), "workspace.bounds.hi");
  if (ws.bounds.lo.size() != 3 || ws.bounds.hi.size() != 3)
    throw SchemaError("workspace.bounds: missions are three-dimensional");
  for (int i = 0; i < 3; ++i)
    if (ws.bounds.lo[i] > ws.bounds.hi[i])
      throw SchemaError("workspace.bounds: lo exceeds hi");

  const json& regions = need(j, "regions", "workspace");
  if (!regions.is_array() || regions.empty())
    throw SchemaError("workspace.regions: expected a non-empty array");
  std::set<std::string> seen;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const std::string ctx = "workspace.regions[" + std::to_string(r) + "]";
    workspace::Region region;
    region.label = need_str(regions[r], "label", ctx);
    if (!seen.insert(region.label).second)
      throw SchemaError(ctx + ": duplicate label '" + region.label + "'");
    const json& boxes = need(regions[r], "boxes", ctx);
    if (!boxes.is_array() || boxes.empty())
      throw SchemaError(ctx + ": 'boxes' must be a non-empty array");
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      const std::string bctx = ctx + ".boxes[" + std::to_string(k) + "]";
      Eigen::VectorXd lo = as_vec(need(boxes[k], "lo", bctx), bctx + ".lo");
      Eigen::VectorXd hi = as_vec(need(boxes[k], "hi", bctx), bctx + ".hi");
      if (lo.size() != 3 || hi.size() != 3)
        throw SchemaError(bctx + ": boxes must match the workspace dimension");
      for (int i = 0; i < 3; ++i)
        if (lo[i] > hi[i]) throw SchemaError(bctx + ": empty box");
      region.parts.push_back(workspace::ConvexPolytope::box(lo, hi));
    }
    if (auto it = regions[r].find("window"); it != regions[r].end()) {
      if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number_integer() ||
          !(*it)[1].is_number_integer())
        throw SchemaError(ctx + ": 'window' must be two integers");
      int a = (*it)[0].get<int>(), b2 = (*it)[1].get<int>();
      if (a < 0 || b2 < a) throw SchemaError(ctx + ": bad window");
      region.active_window = {{a, b2}};
    }
    ws.regions.push_back(std::move(region));
  }
  return ws;
}

void collect_atoms(const mtl::Formula& f, std::set<std::string>& out) {
  if (!f.valid()) return;
  if (f.op() == mtl::Op::Atom) {
    out.insert(f.label());
    return;
  }
  for (const auto& k : f.children()) collect_atoms(k, out);
}

void check_labels(const mtl::Formula& f, const workspace::Workspace& ws,
                  const std::string& ctx) {
  std::set<std::string> atoms;
  collect_atoms(f, atoms);
  for (const auto& a : atoms)
    if (!ws.find(a)) throw SchemaError(ctx + ": unknown region label '" + a + "'");
}

planner::AgentSpec parse_agent(const json& j, const workspace::Workspace& ws,
                               const std::string& ctx) {
  planner::AgentSpec spec;
  spec.name = need_str(j, "name", ctx);
  Eigen::VectorXd start = as_vec(need(j, "start", ctx), ctx + ".start");
  if (start.size() != 3) throw SchemaError(ctx + ".start: expected [x, y, z]");
  if (!ws.bounds.contains(start))
    throw SchemaError(ctx + ".start: outside the workspace");
  spec.x0 = Eigen::VectorXd::Zero(dynamics::kReducedDim);
  spec.x0.head(3) = start;

  const json& tasks = need(j, "tasks", ctx);
  if (!tasks.is_array() || tasks.empty())
    throw SchemaError(ctx + ".tasks: expected a non-empty array");
  std::set<std::string> names;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const std::string tctx = ctx + ".tasks[" + std::to_string(k) + "]";
    const std::string name = need_str(tasks[k], "name", tctx);
    if (name == "wait") throw SchemaError(tctx + ": 'wait' is reserved for the hold");
    if (!names.insert(name).second)
      throw SchemaError(tctx + ": duplicate task name '" + name + "'");

    if (auto g = tasks[k].find("grasp"); g != tasks[k].end()) {
      const std::string gctx = tctx + ".grasp";
      std::string area = need_str(*g, "area", gctx);
      std::string touch = need_str(*g, "touch", gctx);
      std::string ascent = need_str(*g, "ascent", gctx);
      int hover = need_int(*g, "hover", gctx);
      int land = need_int(*g, "land", gctx);
      int takeoff = need_int(*g, "takeoff", gctx);
      for (const auto& label : {area, touch, ascent})
        if (!ws.find(label)) throw SchemaError(gctx + ": unknown region label '" + label + "'");
      if (hover < 1 || land < 1 || takeoff < 1)
        throw SchemaError(gctx + ": phase steps must be positive");
      auto triple = planner::grasp_subtasks(name, area, touch, ascent, hover, land, takeoff);
      spec.tasks.insert(spec.tasks.end(), triple.begin(), triple.end());
      continue;
    }

    planner::Subtask t;
    t.name = name;
    t.mode = need_str(tasks[k], "mode", tctx);
    std::string text = need_str(tasks[k], "formula", tctx);
    try {
      t.formula = mtl::parse(text);
    } catch (const mtl::ParseError& e) {
      throw SchemaError(tctx + ".formula: " + e.what());
    }
    check_labels(t.formula, ws, tctx + ".formula");
    t.steps = need_int(tasks[k], "steps", tctx);
    if (t.steps < 1) throw SchemaError(tctx + ": 'steps' must be positive");
    t.terminal_rest = tasks[k].value("terminal_rest", true);
    t.sets_payload = tasks[k].value("sets_payload", false);
    spec.tasks.push_back(std::move(t));
  }
  return spec;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_num(const std::string& s, int line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SchemaError("trajectory line " + std::to_string(line_no) + ": bad number '" + s +
                      "'");
  }
}

constexpr const char* kCsvHeader =
    "t,agent,x,y,z,vx,vy,vz,mode,payload,segment,thrust,tau_x,tau_y,tau_z";

}  // namespace

MissionSpec parse_mission(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("mission json: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("mission json: expected an object");

  try {
    MissionSpec spec;
    if (auto it = j.find("name"); it != j.end() && it->is_string())
      spec.name = it->get<std::string>();
    spec.ws = parse_workspace(need(j, "workspace", "mission"));

    if (auto d = j.find("dynamics"); d != j.end()) {
      set_if(*d, "dt", spec.dt, "dynamics");
      set_if(*d, "mass", spec.params.m, "dynamics");
      set_if(*d, "gravity", spec.params.g, "dynamics");
      if (auto it = d->find("inertia"); it != d->end()) {
        Eigen::VectorXd inertia = as_vec(*it, "dynamics.inertia");
        if (inertia.size() != 3) throw SchemaError("dynamics.inertia: expected 3 entries");
        spec.params.J = Eigen::Vector3d(inertia).asDiagonal();
      }
      if (auto it = d->find("limits"); it != d->end()) {
        set_if(*it, "velocity", spec.limits.velocity, "dynamics.limits");
        set_if(*it, "angle", spec.limits.angle, "dynamics.limits");
        set_if(*it, "rate", spec.limits.rate, "dynamics.limits");
        set_if(*it, "thrust_delta", spec.limits.thrust_delta, "dynamics.limits");
        set_if(*it, "torque", spec.limits.torque, "dynamics.limits");
        set_if(*it, "takeoff_climb", spec.limits.takeoff_climb, "dynamics.limits");
        set_if(*it, "land_descent", spec.limits.land_descent, "dynamics.limits");
        set_if(*it, "grasp_descent", spec.limits.grasp_descent, "dynamics.limits");
        set_if(*it, "steer_speed", spec.limits.steer_speed, "dynamics.limits");
        set_if(*it, "cruise_altitude", spec.limits.cruise_altitude, "dynamics.limits");
        set_if(*it, "slow_speed", spec.limits.slow_speed, "dynamics.limits");
        set_if(*it, "touch_altitude", spec.limits.touch_altitude, "dynamics.limits");
      }
    }
    if (spec.dt <= 0) throw SchemaError("dynamics.dt: must be positive");
    spec.params.validate();

    if (auto e = j.find("encoding"); e != j.end()) {
      set_if(*e, "big_m", spec.plan.big_m, "encoding");
      set_if(*e, "eps", spec.plan.eps, "encoding");
      if (e->contains("node_limit"))
        spec.plan.milp.node_limit = need_int(*e, "node_limit", "encoding");
      if (e->contains("time_limit"))
        spec.plan.milp.time_limit = need_num(*e, "time_limit", "encoding");
      if (auto it = e->find("use_hint"); it != e->end()) {
        if (!it->is_boolean()) throw SchemaError("encoding.use_hint: must be a boolean");
        spec.plan.use_hint = it->get<bool>();
      }
      if (spec.plan.big_m < 0) throw SchemaError("encoding.big_m: must be non-negative");
      if (spec.plan.eps <= 0) throw SchemaError("encoding.eps: must be positive");
      if (spec.plan.milp.node_limit < 1)
        throw SchemaError("encoding.node_limit: must be positive");
      if (spec.plan.milp.time_limit < 0)
        throw SchemaError("encoding.time_limit: must be non-negative");
    }

    const json& agents = need(j, "agents", "mission");
    if (!agents.is_array() || agents.size() != 2)
      throw SchemaError("agents: expected exactly two agents");
    spec.first = parse_agent(agents[0], spec.ws, "agents[0]");
    spec.second = parse_agent(agents[1], spec.ws, "agents[1]");
    if (spec.first.name == spec.second.name)
      throw SchemaError("agents: names must differ");

    const json& co = need(j, "coordination", "mission");
    const json& corridor = need(co, "corridor", "coordination");
    if (!corridor.is_array()) throw SchemaError("coordination.corridor: expected an array");
    for (const auto& l : corridor) {
      if (!l.is_string()) throw SchemaError("coordination.corridor: expected labels");
      std::string label = l.get<std::string>();
      if (!spec.ws.find(label))
        throw SchemaError("coordination.corridor: unknown region label '" + label + "'");
      spec.co.corridor.push_back(std::move(label));
    }
    spec.co.wait_label = need_str(co, "wait_label", "coordination");
    if (!spec.ws.find(spec.co.wait_label))
      throw SchemaError("coordination.wait_label: unknown region label");
    spec.co.wait_mode = need_str(co, "wait_mode", "coordination");
    spec.co.wait_after = need_int(co, "wait_after", "coordination");
    if (spec.co.wait_after < 0 ||
        spec.co.wait_after >= static_cast<int>(spec.second.tasks.size()))
      throw SchemaError("coordination.wait_after: out of range");
    if (auto it = co.find("exclusive"); it != co.end()) {
      if (!it->is_string()) throw SchemaError("coordination.exclusive: expected a label");
      spec.co.exclusive = it->get<std::string>();
      if (!spec.co.exclusive.empty() && !spec.ws.find(spec.co.exclusive))
        throw SchemaError("coordination.exclusive: unknown region label");
    }
    set_if(co, "min_separation", spec.co.min_separation, "coordination");
    if (spec.co.min_separation < 0)
      throw SchemaError("coordination.min_separation: must be non-negative");
    return spec;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("mission json: ") + e.what());
  }
}

MissionSpec load_mission(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open mission file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mission(ss.str());
}

void write_trajectory_csv(std::ostream& os, const planner::AgentPlan& plan, double dt) {
  if (plan.position_dims != std::vector<int>{0, 1, 2})
    throw std::invalid_argument("trajectory export needs the reduced quadrotor layout");
  for (const auto& x : plan.states)
    if (x.size() < 6) throw std::invalid_argument("state too short for trajectory export");
  for (const auto& u : plan.inputs)
    if (u.size() < 3) throw std::invalid_argument("input too short for trajectory export");
  if (plan.inputs.empty() || plan.states.size() != plan.inputs.size() + 1 ||
      plan.payload.size() != plan.states.size())
    throw std::invalid_argument("inconsistent plan sizes");

  os << kCsvHeader << "\n";
  const int T = static_cast<int>(plan.inputs.size());
  for (int i = 0; i <= T; ++i) {
    const auto& x = plan.states[i];
    const auto& seg = plan.segments[i < T ? plan.segment_of_step[i]
                                          : plan.segment_of_step[T - 1]];
    double thrust = 0.0, tx = 0.0, ty = 0.0;
    if (i < T) {
      thrust = plan.inputs[i][0];
      tx = plan.inputs[i][1];
      ty = plan.inputs[i][2];
    }
    os << num(i * dt) << ',' << plan.agent << ',' << num(x[0]) << ',' << num(x[1]) << ','
       << num(x[2]) << ',' << num(x[3]) << ',' << num(x[4]) << ',' << num(x[5]) << ','
       << seg.mode << ',' << (plan.payload[i] ? 1 : 0) << ',' << seg.name << ','
       << num(thrust) << ',' << num(tx) << ',' << num(ty) << ',' << num(0.0) << "\n";
  }
}

std::vector<TrajRow> read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw SchemaError("trajectory: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw SchemaError("trajectory: unexpected header");

  std::vector<TrajRow> rows;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 15)
      throw SchemaError("trajectory line " + std::to_string(line_no) + ": expected 15 fields");
    TrajRow r;
    r.t = to_num(f[0], line_no);
    r.agent = f[1];
    for (int i = 0; i < 3; ++i) r.position[i] = to_num(f[2 + i], line_no);
    for (int i = 0; i < 3; ++i) r.velocity[i] = to_num(f[5 + i], line_no);
    r.mode = f[8];
    r.payload = static_cast<int>(to_num(f[9], line_no));
    r.segment = f[10];
    r.thrust = to_num(f[11], line_no);
    r.torque[0] = to_num(f[12], line_no);
    r.torque[1] = to_num(f[13], line_no);
    r.torque[2] = to_num(f[14], line_no);
    rows.push_back(std::move(r));
  }
  if (rows.size() < 2) throw SchemaError("trajectory: needs at least two rows");
  return rows;
}

planner::AgentPlan plan_from_rows(const std::vector<TrajRow>& rows) {
  planner::AgentPlan plan;
  plan.agent = rows.front().agent;
  plan.position_dims = {0, 1, 2};
  const int T = static_cast<int>(rows.size()) - 1;
  for (const auto& r : rows) {
    if (r.agent != plan.agent) throw SchemaError("trajectory: mixed agent names");
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dynamics::kReducedDim);
    x.head(3) = r.position;
    x.segment<3>(3) = r.velocity;
    plan.states.push_back(std::move(x));
    plan.payload.push_back(r.payload != 0);
  }
  for (int i = 0; i < T; ++i) {
    Eigen::VectorXd u(3);
    u << rows[i].thrust, rows[i].torque[0], rows[i].torque[1];
    plan.inputs.push_back(std::move(u));
  }

  for (int i = 0; i < T; ++i) {
    if (plan.segments.empty() || plan.segments.back().name != rows[i].segment) {
      planner::SegmentPlan seg;
      seg.name = rows[i].segment;
      seg.mode = rows[i].mode;
      seg.offset = i;
      plan.segments.push_back(std::move(seg));
    }
    plan.segment_of_step.push_back(static_cast<int>(plan.segments.size()) - 1);
  }
  if (rows.back().segment != plan.segments.back().name)
    throw SchemaError("trajectory: final row names an unknown segment");
  for (std::size_t k = 0; k < plan.segments.size(); ++k) {
    auto& seg = plan.segments[k];
    int end = k + 1 < plan.segments.size() ? plan.segments[k + 1].offset : T;
    for (int i = seg.offset; i <= end; ++i) seg.states.push_back(plan.states[i]);
    for (int i = seg.offset; i < end; ++i) seg.inputs.push_back(plan.inputs[i]);
  }
  return plan;
}

nlohmann::ordered_json summary_json(const MissionSpec& spec, const planner::MissionPlan& mp,
                                    double drift_first, double drift_second) {
  auto pa = planner::positions_of(mp.first);
  auto pb = planner::positions_of(mp.second);

  nlohmann::ordered_json j;
  j["mission"] = spec.name;
  j["dt"] = spec.dt;
  j["release"] = mp.release;
  j["wait_steps"] = mp.wait_steps;
  j["exclusive_ok"] = spec.co.exclusive.empty() ||
                      planner::check_exclusion(spec.ws, pa, pb, spec.co.exclusive);
  j["min_separation"] = planner::min_separation(pa, pb);

  auto agent_json = [&](const planner::AgentPlan& plan,
                        const std::vector<planner::Subtask>& tasks, double drift) {
    nlohmann::ordered_json a;
    a["name"] = plan.agent;
    a["steps"] = plan.inputs.size();
    double total = 0.0;
    nlohmann::ordered_json segs = nlohmann::ordered_json::array();
    for (const auto& seg : plan.segments) {
      total += seg.objective;
      nlohmann::ordered_json s;
      s["name"] = seg.name;
      s["mode"] = seg.mode;
      s["offset"] = seg.offset;
      s["steps"] = seg.inputs.size();
      s["objective"] = seg.objective;
      s["nodes"] = seg.nodes;
      segs.push_back(std::move(s));
    }
    a["objective"] = total;
    a["verified"] = planner::all_ok(planner::verify_plan(spec.ws, plan, tasks));
    a["replay_drift"] = drift;
    a["segments"] = std::move(segs);
    return a;
  };
  j["agents"] = nlohmann::ordered_json::array();
  j["agents"].push_back(agent_json(mp.first, mp.first_tasks, drift_first));
  j["agents"].push_back(agent_json(mp.second, mp.second_tasks, drift_second));
  return j;
}

void write_timings(std::ostream& os, const planner::MissionPlan& mp, double total_seconds) {
  char buf[64];
  auto line = [&](const std::string& name, double s) {
    std::snprintf(buf, sizeof(buf), "%.3f", s);
    os << name << ' ' << buf << "\n";
  };
  for (const auto& seg : mp.first.segments) line(mp.first.agent + "/" + seg.name, seg.solve_time);
  for (const auto& seg : mp.second.segments)
    line(mp.second.agent + "/" + seg.name, seg.solve_time);
  line("total", total_seconds);
}

std::string demo_mission_json() {
  return R"json({
  "name": "window_handoff",
  "workspace": {
    "bounds": {"lo": [0, 0, 0], "hi": [10, 10, 3]},
    "regions": [
      {"label": "A",   "boxes": [{"lo": [3.90, 4.45, 0.00], "hi": [4.44, 5.05, 3.00]}]},
      {"label": "A'",  "boxes": [{"lo": [3.90, 4.45, 1.50], "hi": [4.44, 5.05, 1.80]}]},
      {"label": "B",   "boxes": [{"lo": [3.90, 5.40, 0.00], "hi": [4.44, 6.00, 3.00]}]},
      {"label": "B'",  "boxes": [{"lo": [3.90, 5.40, 1.50], "hi": [4.44, 6.00, 1.80]}]},
      {"label": "C",   "boxes": [{"lo": [4.60, 4.45, 0.00], "hi": [4.82, 5.05, 3.00]}]},
      {"label": "D",   "boxes": [{"lo": [4.60, 5.30, 0.00], "hi": [4.82, 5.55, 3.00]}]},
      {"label": "E",   "boxes": [{"lo": [4.84, 4.35, 1.00], "hi": [5.16, 5.65, 2.00]}]},
      {"label": "F",   "boxes": [{"lo": [5.18, 4.45, 0.00], "hi": [5.70, 5.05, 3.00]}]},
      {"label": "F'",  "boxes": [{"lo": [5.18, 4.45, 1.05], "hi": [5.70, 5.05, 1.25]}]},
      {"label": "Fc",  "boxes": [{"lo": [5.18, 4.45, 1.50], "hi": [5.70, 5.05, 1.80]}]},
      {"label": "G",   "boxes": [{"lo": [5.18, 5.15, 0.00], "hi": [5.70, 5.65, 3.00]}]},
      {"label": "G'",  "boxes": [{"lo": [5.18, 5.15, 1.05], "hi": [5.70, 5.65, 1.25]}]},
      {"label": "Gc",  "boxes": [{"lo": [5.18, 5.15, 1.50], "hi": [5.70, 5.65, 1.80]}]},
      {"label": "H1",  "boxes": [{"lo": [5.85, 4.45, 0.00], "hi": [6.40, 5.05, 3.00]}]},
      {"label": "H1'", "boxes": [{"lo": [5.85, 4.45, 1.05], "hi": [6.40, 5.05, 1.25]}]},
      {"label": "H2",  "boxes": [{"lo": [5.85, 5.15, 0.00], "hi": [6.40, 5.65, 3.00]}]},
      {"label": "H2'", "boxes": [{"lo": [5.85, 5.15, 1.05], "hi": [6.40, 5.65, 1.25]}]},
      {"label": "O", "boxes": [
        {"lo": [4.925, 0.00, 0.00], "hi": [5.075, 4.40, 3.00]},
        {"lo": [4.925, 5.60, 0.00], "hi": [5.075, 10.00, 3.00]},
        {"lo": [4.925, 4.40, 0.00], "hi": [5.075, 5.60, 1.05]},
        {"lo": [4.925, 4.40, 1.95], "hi": [5.075, 5.60, 3.00]}
      ]}
    ]
  },
  "dynamics": {"dt": 0.2, "limits": {"torque": 0.6, "rate": 6.0}},
  "encoding": {"node_limit": 200000},
  "agents": [
    {
      "name": "q1",
      "start": [4.40, 4.75, 1.20],
      "tasks": [
        {"name": "lift",     "mode": "takeoff", "formula": "G[0,5] A & F[5,5] A'",      "steps": 5},
        {"name": "approach", "mode": "steer",   "formula": "F[5,5] C",                  "steps": 5},
        {"name": "thread",   "mode": "steer",   "formula": "G[0,10] !O & F[10,10] Fc",  "steps": 10},
        {"name": "pick", "grasp": {"area": "F", "touch": "F'", "ascent": "Fc",
                                   "hover": 1, "land": 5, "takeoff": 4}},
        {"name": "ferry",    "mode": "hover",   "formula": "F[10,10] H1",               "steps": 10},
        {"name": "drop",     "mode": "land",    "formula": "G[0,5] H1 & F[5,5] H1'",    "steps": 5,
         "sets_payload": true}
      ]
    },
    {
      "name": "q2",
      "start": [4.40, 5.70, 1.20],
      "tasks": [
        {"name": "lift",     "mode": "takeoff", "formula": "G[0,5] B & F[5,5] B'",      "steps": 5},
        {"name": "stage",    "mode": "steer",   "formula": "F[5,5] D",                  "steps": 5},
        {"name": "thread",   "mode": "steer",   "formula": "G[0,10] !O & F[10,10] Gc",  "steps": 10},
        {"name": "pick", "grasp": {"area": "G", "touch": "G'", "ascent": "Gc",
                                   "hover": 1, "land": 5, "takeoff": 4}},
        {"name": "ferry",    "mode": "hover",   "formula": "F[10,10] H2",               "steps": 10},
        {"name": "drop",     "mode": "land",    "formula": "G[0,5] H2 & F[5,5] H2'",    "steps": 5,
         "sets_payload": true}
      ]
    }
  ],
  "coordination": {
    "corridor": ["C", "E"],
    "wait_label": "D",
    "wait_mode": "hover",
    "wait_after": 1,
    "exclusive": "E",
    "min_separation": 0.5
  }
})json";
}

}  // namespace mtlplan::mission_io
