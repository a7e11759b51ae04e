#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "mtlplan/planner.hpp"

using namespace mtlplan;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

Eigen::VectorXd vec3(double x, double y, double z) {
  Eigen::VectorXd v(3);
  v << x, y, z;
  return v;
}

// Single integrator x(t+1) = x(t) + u(t), every state a position.
dynamics::LinearMode mode2(const std::string& name, double ulim) {
  dynamics::LinearMode m;
  m.name = name;
  m.A = Eigen::MatrixXd::Zero(2, 2);
  m.B = Eigen::MatrixXd::Identity(2, 2);
  m.drift = Eigen::VectorXd::Zero(2);
  m.x_star = Eigen::VectorXd::Zero(2);
  m.u_star = Eigen::VectorXd::Zero(2);
  m.Ad = Eigen::MatrixXd::Identity(2, 2);
  m.Bd = Eigen::MatrixXd::Identity(2, 2);
  m.cd = Eigen::VectorXd::Zero(2);
  m.dt = 1.0;
  for (int i = 0; i < 2; ++i) {
    m.input_bounds.push_back({-ulim, ulim});
    m.state_bounds.push_back({-1e9, 1e9});
    m.position_dims.push_back(i);
  }
  return m;
}

dynamics::Guard xmin_guard(double bound) {
  Eigen::VectorXd n = Eigen::VectorXd::Zero(2);
  n[0] = -1.0;
  dynamics::Guard g;
  g.conditions.push_back({n, -bound});
  return g;
}

// "go" moves fast, "hold" barely; the go -> hold switch needs x >= 5.
dynamics::HybridAutomaton go_hold(bool back_edge = true) {
  dynamics::HybridAutomaton a;
  a.modes.push_back(mode2("go", 2.5));
  a.modes.push_back(mode2("hold", 0.5));
  a.edges.push_back({"go", "hold", xmin_guard(5.0)});
  if (back_edge) a.edges.push_back({"hold", "go", {}});
  return a;
}

workspace::Region box_region(const std::string& label, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
  workspace::Region r;
  r.label = label;
  r.parts.push_back(workspace::ConvexPolytope::box(lo, hi));
  return r;
}

workspace::Workspace ws2d() {
  workspace::Workspace w;
  w.bounds = {vec2(0, 0), vec2(10, 10)};
  w.regions.push_back(box_region("p", vec2(6, 6), vec2(8, 8)));
  w.regions.push_back(box_region("q", vec2(1, 6), vec2(3, 8)));
  w.regions.push_back(box_region("o", vec2(4, 0), vec2(5, 6)));
  w.regions.push_back(box_region("E", vec2(4, 4), vec2(6, 6)));
  w.regions.push_back(box_region("D", vec2(4, 0), vec2(6, 2)));
  w.regions.push_back(box_region("goalA", vec2(9, 4), vec2(10, 6)));
  w.regions.push_back(box_region("goalB", vec2(4, 8), vec2(6, 10)));
  return w;
}

planner::Subtask task_of(const std::string& name, const std::string& mode,
                         const std::string& formula, int steps) {
  planner::Subtask t;
  t.name = name;
  t.mode = mode;
  t.formula = mtl::parse(formula);
  t.steps = steps;
  return t;
}

planner::PlanConfig fast_cfg(int node_limit = 5000) {
  planner::PlanConfig cfg;
  cfg.milp.node_limit = node_limit;
  return cfg;
}

bool mentions(const planner::PlanError& e, const std::string& needle) {
  return std::string(e.what()).find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("plan_subtask solves a reach segment in absolute coordinates") {
  auto ws = ws2d();
  auto mode = mode2("go", 2.5);
  auto task = task_of("reach_p", "go", "F[0,2] p", 2);

  auto seg = planner::plan_subtask(mode, ws, vec2(2, 2), task, fast_cfg());

  CHECK(seg.name == "reach_p");
  CHECK(seg.mode == "go");
  CHECK(seg.offset == 0);
  REQUIRE(seg.states.size() == 3);
  REQUIRE(seg.inputs.size() == 2);
  CHECK(seg.objective == doctest::Approx(8.0));
  CHECK(seg.nodes >= 1);
  CHECK(seg.solve_time >= 0.0);
  CHECK(seg.states.front().isApprox(vec2(2, 2), 1e-9));

  const auto* p = ws.find("p");
  REQUIRE(p != nullptr);
  CHECK(workspace::contains(*p, seg.states.back()));
  for (int t = 0; t < 2; ++t) {
    Eigen::VectorXd next = seg.states[t] + seg.inputs[t];
    CHECK(next.isApprox(seg.states[t + 1], 1e-9));
  }
}

TEST_CASE("plan_subtask failures carry the sub-task name") {
  auto ws = ws2d();
  auto mode = mode2("go", 2.5);

  SUBCASE("infeasible model") {
    auto task = task_of("sit", "go", "G[0,3] p", 3);
    try {
      planner::plan_subtask(mode, ws, vec2(2, 2), task, fast_cfg());
      FAIL("expected PlanError");
    } catch (const planner::PlanError& e) {
      CHECK(mentions(e, "sit"));
      CHECK(mentions(e, "infeasible"));
    }
  }
  SUBCASE("zero steps") {
    auto task = task_of("none", "go", "F[0,1] p", 0);
    CHECK_THROWS_AS(planner::plan_subtask(mode, ws, vec2(2, 2), task, fast_cfg()),
                    planner::PlanError);
  }
  SUBCASE("empty formula") {
    planner::Subtask t;
    t.name = "blank";
    t.mode = "go";
    t.steps = 2;
    CHECK_THROWS_AS(planner::plan_subtask(mode, ws, vec2(2, 2), t, fast_cfg()),
                    planner::PlanError);
  }
  SUBCASE("wrong initial dimension") {
    auto task = task_of("dim", "go", "F[0,1] p", 1);
    CHECK_THROWS_AS(planner::plan_subtask(mode, ws, vec1(2), task, fast_cfg()),
                    planner::PlanError);
  }
  SUBCASE("encoder errors are wrapped") {
    auto task = task_of("bad", "go", "F[0,1] zzz", 1);
    try {
      planner::plan_subtask(mode, ws, vec2(2, 2), task, fast_cfg());
      FAIL("expected PlanError");
    } catch (const planner::PlanError& e) {
      CHECK(mentions(e, "bad"));
      CHECK(mentions(e, "zzz"));
    }
  }
  SUBCASE("formula horizon beyond the segment") {
    auto task = task_of("long", "go", "F[0,5] p", 3);
    try {
      planner::plan_subtask(mode, ws, vec2(2, 2), task, fast_cfg());
      FAIL("expected PlanError");
    } catch (const planner::PlanError& e) {
      CHECK(mentions(e, "long"));
    }
  }
}

TEST_CASE("terminal rest pins non-position states to absolute zero") {
  // Double integrator cruising at v* = 0.5; position is absolute,
  // velocity is an equilibrium offset.
  dynamics::LinearMode m;
  m.name = "cruise";
  m.A = Eigen::MatrixXd::Zero(2, 2);
  m.A(0, 1) = 1.0;
  m.B = Eigen::MatrixXd::Zero(2, 1);
  m.B(1, 0) = 1.0;
  m.drift = vec2(0.5, 0);
  m.x_star = vec2(0, 0.5);
  m.u_star = Eigen::VectorXd::Zero(1);
  auto z = dynamics::discretize(m.A, m.B, m.drift, 1.0);
  m.Ad = z.Ad;
  m.Bd = z.Bd;
  m.cd = z.cd;
  m.dt = 1.0;
  m.input_bounds = {{-2, 2}};
  m.state_bounds = {{-1e9, 1e9}, {-2, 2}};
  m.position_dims = {0};

  workspace::Workspace w;
  w.bounds = {vec1(0), vec1(10)};
  w.regions.push_back(box_region("rr", vec1(0), vec1(6)));
  w.regions.push_back(box_region("tgt", vec1(4), vec1(6)));

  Eigen::VectorXd x0(2);
  x0 << 1.0, 0.0;
  auto task = task_of("cross", "cruise", "G[0,3] rr & F[3,3] tgt", 3);

  SUBCASE("resting") {
    auto seg = planner::plan_subtask(m, w, x0, task, fast_cfg());
    REQUIRE(seg.states.size() == 4);
    CHECK(seg.states.back()[0] >= 4.0 - 1e-6);
    CHECK(std::abs(seg.states.back()[1]) < 1e-6);
  }
  SUBCASE("free terminal velocity") {
    task.terminal_rest = false;
    auto seg = planner::plan_subtask(m, w, x0, task, fast_cfg());
    CHECK(seg.states.back()[0] >= 4.0 - 1e-6);
    CHECK(seg.states.back()[1] > 0.5);
  }
}

TEST_CASE("plan_agent chains segments through edges and guards") {
  auto ws = ws2d();
  auto aut = go_hold();
  std::vector<planner::Subtask> tasks = {task_of("reach", "go", "F[2,2] p", 2),
                                         task_of("stay", "hold", "G[0,2] p", 2)};

  auto plan = planner::plan_agent(aut, ws, "q1", vec2(2, 2), tasks, fast_cfg());

  CHECK(plan.agent == "q1");
  REQUIRE(plan.segments.size() == 2);
  CHECK(plan.segments[0].offset == 0);
  CHECK(plan.segments[1].offset == 2);
  REQUIRE(plan.states.size() == 5);
  REQUIRE(plan.inputs.size() == 4);
  CHECK(plan.segment_of_step == std::vector<int>{0, 0, 1, 1});
  CHECK(plan.position_dims == std::vector<int>{0, 1});
  CHECK(plan.states[2].isApprox(plan.segments[1].states.front(), 1e-12));
  for (bool carrying : plan.payload) CHECK_FALSE(carrying);

  auto items = planner::verify_plan(ws, plan, tasks);
  REQUIRE(items.size() == 2);
  CHECK(items[0].offset == 0);
  CHECK(items[1].offset == 2);
  CHECK(planner::all_ok(items));

  auto again = planner::plan_agent(aut, ws, "q1", vec2(2, 2), tasks, fast_cfg());
  REQUIRE(again.states.size() == plan.states.size());
  for (std::size_t i = 0; i < plan.states.size(); ++i)
    CHECK(again.states[i] == plan.states[i]);
}

TEST_CASE("plan_agent rejects broken chains") {
  auto ws = ws2d();

  SUBCASE("no sub-tasks") {
    CHECK_THROWS_AS(planner::plan_agent(go_hold(), ws, "q1", vec2(2, 2), {}, fast_cfg()),
                    planner::PlanError);
  }
  SUBCASE("unknown mode") {
    std::vector<planner::Subtask> tasks = {task_of("t", "fly", "F[0,1] p", 1)};
    try {
      planner::plan_agent(go_hold(), ws, "q1", vec2(2, 2), tasks, fast_cfg());
      FAIL("expected PlanError");
    } catch (const planner::PlanError& e) {
      CHECK(mentions(e, "fly"));
    }
  }
  SUBCASE("missing edge") {
    std::vector<planner::Subtask> tasks = {task_of("a", "hold", "G[0,1] D", 1),
                                           task_of("b", "go", "F[2,2] E", 2)};
    try {
      planner::plan_agent(go_hold(false), ws, "q2", vec2(5, 1), tasks, fast_cfg());
      FAIL("expected PlanError");
    } catch (const planner::PlanError& e) {
      CHECK(mentions(e, "no edge"));
    }
  }
  SUBCASE("guard fails at the junction") {
    std::vector<planner::Subtask> tasks = {task_of("a", "go", "F[2,2] q", 2),
                                           task_of("b", "hold", "G[0,1] q", 1)};
    try {
      planner::plan_agent(go_hold(), ws, "q1", vec2(2, 7), tasks, fast_cfg());
      FAIL("expected PlanError");
    } catch (const planner::PlanError& e) {
      CHECK(mentions(e, "guard into 'hold'"));
    }
  }
  SUBCASE("position dims must agree") {
    auto aut = go_hold();
    auto odd = mode2("odd", 2.5);
    odd.position_dims = {0};
    aut.modes.push_back(odd);
    aut.edges.push_back({"go", "odd", {}});
    std::vector<planner::Subtask> tasks = {task_of("a", "go", "F[2,2] p", 2),
                                           task_of("b", "odd", "F[0,1] p", 1)};
    CHECK_THROWS_AS(planner::plan_agent(aut, ws, "q1", vec2(2, 2), tasks, fast_cfg()),
                    planner::PlanError);
  }
}

TEST_CASE("payload toggles at the end of a grasping segment") {
  auto ws = ws2d();
  auto aut = go_hold();
  std::vector<planner::Subtask> tasks = {task_of("pick", "go", "F[2,2] p", 2),
                                         task_of("carry", "hold", "G[0,2] p", 2)};
  tasks[0].sets_payload = true;

  auto plan = planner::plan_agent(aut, ws, "q1", vec2(2, 2), tasks, fast_cfg());
  REQUIRE(plan.payload.size() == 5);
  CHECK(plan.payload == std::vector<bool>{false, false, true, true, true});
}

TEST_CASE("release_step finds the last corridor visit") {
  auto ws = ws2d();
  std::vector<Eigen::VectorXd> pos = {vec2(4.5, 1), vec2(9, 9), vec2(4.5, 2), vec2(9, 9)};
  CHECK(planner::release_step(ws, pos, {"o"}) == 3);

  std::vector<Eigen::VectorXd> out = {vec2(9, 9), vec2(7, 7)};
  CHECK(planner::release_step(ws, out, {"o"}) == 0);

  std::vector<Eigen::VectorXd> both = {vec2(4.5, 1), vec2(5, 1)};
  CHECK(planner::release_step(ws, both, {"o", "D"}) == 2);

  CHECK_THROWS_AS(planner::release_step(ws, pos, {"nope"}), planner::PlanError);
}

TEST_CASE("verify_plan monitors each sub-task at its offset") {
  auto ws = ws2d();
  planner::AgentPlan plan;
  plan.position_dims = {0, 1};

  SUBCASE("violation is reported") {
    plan.states = {vec2(7, 7), vec2(7, 7), vec2(2, 2)};
    std::vector<planner::Subtask> tasks = {task_of("stay", "go", "G[0,2] p", 2)};
    auto items = planner::verify_plan(ws, plan, tasks);
    REQUIRE(items.size() == 1);
    CHECK_FALSE(items[0].ok);
    CHECK_FALSE(planner::all_ok(items));
  }
  SUBCASE("offsets accumulate") {
    plan.states = {vec2(7, 7), vec2(2, 7), vec2(2, 7)};
    std::vector<planner::Subtask> tasks = {task_of("a", "go", "F[0,1] p", 1),
                                           task_of("b", "go", "F[0,1] q", 1)};
    auto items = planner::verify_plan(ws, plan, tasks);
    REQUIRE(items.size() == 2);
    CHECK(items[0].ok);
    CHECK(items[1].ok);
    CHECK(items[1].offset == 1);
  }
  SUBCASE("short trace fails instead of throwing") {
    plan.states = {vec2(7, 7), vec2(7, 7), vec2(7, 7)};
    std::vector<planner::Subtask> tasks = {task_of("deep", "go", "F[0,5] p", 2)};
    auto items = planner::verify_plan(ws, plan, tasks);
    REQUIRE(items.size() == 1);
    CHECK_FALSE(items[0].ok);
  }
}

TEST_CASE("check_exclusion and min_separation pad with the terminal state") {
  auto ws = ws2d();
  std::vector<Eigen::VectorXd> a = {vec2(4.5, 1), vec2(4.5, 2)};
  std::vector<Eigen::VectorXd> b = {vec2(9, 9), vec2(4.5, 3)};
  int step = -1;
  CHECK_FALSE(planner::check_exclusion(ws, a, b, "o", &step));
  CHECK(step == 1);

  std::vector<Eigen::VectorXd> a_short = {vec2(4.5, 1)};
  CHECK_FALSE(planner::check_exclusion(ws, a_short, b, "o", &step));
  CHECK(step == 1);

  std::vector<Eigen::VectorXd> c = {vec2(9, 9), vec2(9, 9)};
  CHECK(planner::check_exclusion(ws, a, c, "o"));
  CHECK_THROWS_AS(planner::check_exclusion(ws, a, b, "nope"), planner::PlanError);

  std::vector<Eigen::VectorXd> d = {vec2(0, 0), vec2(1, 0)};
  std::vector<Eigen::VectorXd> e = {vec2(0, 3), vec2(1, 1)};
  CHECK(planner::min_separation(d, e) == doctest::Approx(1.0));

  std::vector<Eigen::VectorXd> d_short = {vec2(0, 0)};
  std::vector<Eigen::VectorXd> f = {vec2(0, 3), vec2(0, 0.5)};
  CHECK(planner::min_separation(d_short, f) == doctest::Approx(0.5));
  CHECK(std::isinf(planner::min_separation({}, f)));
}

TEST_CASE("grasp_subtasks builds the hover, land, takeoff triple") {
  auto ts = planner::grasp_subtasks("pick", "area", "touch", "up", 2, 4, 3);
  REQUIRE(ts.size() == 3);

  CHECK(ts[0].name == "pick_hover");
  CHECK(ts[0].mode == "hover");
  CHECK(ts[0].steps == 2);
  CHECK_FALSE(ts[0].sets_payload);
  CHECK(ts[0].formula.op() == mtl::Op::Always);
  CHECK(ts[0].formula.interval() == mtl::Interval(0, 2));
  CHECK(ts[0].formula.child(0).label() == "area");

  CHECK(ts[1].name == "pick_land");
  CHECK(ts[1].mode == "land");
  CHECK(ts[1].steps == 4);
  CHECK(ts[1].sets_payload);
  REQUIRE(ts[1].formula.op() == mtl::Op::And);
  CHECK(ts[1].formula.child(0).op() == mtl::Op::Always);
  CHECK(ts[1].formula.child(0).interval() == mtl::Interval(0, 4));
  CHECK(ts[1].formula.child(1).op() == mtl::Op::Eventually);
  CHECK(ts[1].formula.child(1).interval() == mtl::Interval(4, 4));
  CHECK(ts[1].formula.child(1).child(0).label() == "touch");

  CHECK(ts[2].name == "pick_ascend");
  CHECK(ts[2].mode == "takeoff");
  CHECK(ts[2].steps == 3);
  CHECK_FALSE(ts[2].sets_payload);
  CHECK(ts[2].formula.child(1).child(0).label() == "up");
  for (const auto& t : ts) CHECK(t.terminal_rest);

  CHECK_THROWS_AS(planner::grasp_subtasks("x", "a", "t", "u", 0, 4, 3), planner::PlanError);
}

TEST_CASE("coordinate holds the second agent until the corridor is free") {
  auto ws = ws2d();
  auto aut = go_hold();

  planner::AgentSpec first;
  first.name = "q1";
  first.x0 = vec2(1, 5);
  first.tasks = {task_of("cross", "go", "F[2,2] E & F[4,4] goalA", 4)};

  planner::AgentSpec second;
  second.name = "q2";
  second.x0 = vec2(5, 1);
  second.tasks = {task_of("stage", "go", "G[0,2] D", 2),
                  task_of("deliver", "go", "F[4,4] goalB", 4)};

  planner::Coordination co;
  co.corridor = {"E"};
  co.wait_label = "D";
  co.wait_mode = "hold";
  co.wait_after = 0;
  co.exclusive = "E";

  auto mp = planner::coordinate(aut, ws, first, second, co, fast_cfg());

  CHECK(mp.release == 3);
  CHECK(mp.wait_steps == 1);
  REQUIRE(mp.second_tasks.size() == 3);
  CHECK(mp.second_tasks[1].name == "wait");
  CHECK(mp.second_tasks[1].mode == "hold");
  CHECK(mp.second_tasks[1].steps == 1);
  CHECK(mp.second_tasks[1].formula.op() == mtl::Op::Always);
  CHECK(mp.second_tasks[1].formula.child(0).label() == "D");
  REQUIRE(mp.first.states.size() == 5);
  REQUIRE(mp.second.states.size() == 8);

  CHECK(planner::all_ok(planner::verify_plan(ws, mp.first, mp.first_tasks)));
  CHECK(planner::all_ok(planner::verify_plan(ws, mp.second, mp.second_tasks)));
  auto pa = planner::positions_of(mp.first);
  auto pb = planner::positions_of(mp.second);
  CHECK(planner::check_exclusion(ws, pa, pb, "E"));
  CHECK(planner::min_separation(pa, pb) >= co.min_separation);
}

TEST_CASE("coordinate skips the hold when the corridor frees up in time") {
  auto ws = ws2d();
  auto aut = go_hold();

  planner::AgentSpec first;
  first.name = "q1";
  first.x0 = vec2(1, 5);
  first.tasks = {task_of("cross", "go", "F[2,2] E & F[4,4] goalA", 4)};

  planner::AgentSpec second;
  second.name = "q2";
  second.x0 = vec2(5, 1);
  second.tasks = {task_of("stage", "go", "G[0,4] D", 4),
                  task_of("deliver", "go", "F[4,4] goalB", 4)};

  planner::Coordination co;
  co.corridor = {"E"};
  co.wait_label = "D";
  co.wait_mode = "hold";
  co.wait_after = 0;
  co.exclusive = "E";

  auto mp = planner::coordinate(aut, ws, first, second, co, fast_cfg());
  CHECK(mp.wait_steps == 0);
  CHECK(mp.second_tasks.size() == 2);
  CHECK(mp.second.states.size() == 9);
}

TEST_CASE("coordinate rejects conflicting missions") {
  auto ws = ws2d();
  auto aut = go_hold();

  planner::AgentSpec first;
  first.name = "q1";
  first.x0 = vec2(1, 5);

  planner::AgentSpec second;
  second.name = "q2";
  second.x0 = vec2(5, 1);
  second.tasks = {task_of("stage", "go", "G[0,2] D", 2),
                  task_of("deliver", "go", "F[4,4] E", 4)};

  planner::Coordination co;
  co.corridor = {"E"};
  co.wait_label = "D";
  co.wait_mode = "hold";
  co.wait_after = 0;
  co.exclusive = "E";

  SUBCASE("mutual exclusion violation") {
    // The first agent parks inside the corridor, so its padded tail
    // keeps the label occupied forever.
    first.tasks = {task_of("sit", "go", "G[2,4] E", 4)};
    try {
      planner::coordinate(aut, ws, first, second, co, fast_cfg());
      FAIL("expected PlanError");
    } catch (const planner::PlanError& e) {
      CHECK(mentions(e, "share 'E'"));
    }
  }
  SUBCASE("separation floor") {
    first.tasks = {task_of("cross", "go", "F[2,2] E & F[4,4] goalA", 4)};
    second.tasks[1] = task_of("deliver", "go", "F[4,4] goalB", 4);
    co.min_separation = 20.0;
    try {
      planner::coordinate(aut, ws, first, second, co, fast_cfg());
      FAIL("expected PlanError");
    } catch (const planner::PlanError& e) {
      CHECK(mentions(e, "separation"));
    }
  }
  SUBCASE("wait point out of range") {
    first.tasks = {task_of("cross", "go", "F[2,2] E & F[4,4] goalA", 4)};
    co.wait_after = 5;
    CHECK_THROWS_AS(planner::coordinate(aut, ws, first, second, co, fast_cfg()),
                    planner::PlanError);
  }
}

TEST_CASE("replay_drift stays tiny for quadrotor plans") {
  dynamics::QuadrotorParams p;
  auto aut = dynamics::default_automaton(p, 0.2);

  workspace::Workspace w3;
  w3.bounds = {vec3(0, 0, 0), vec3(10, 10, 3)};
  w3.regions.push_back(box_region("colA", vec3(4, 4, 1), vec3(6, 6, 2)));
  w3.regions.push_back(box_region("colB", vec3(4, 4, 0), vec3(6, 6, 3)));
  w3.regions.push_back(box_region("up", vec3(4, 4, 1.6), vec3(6, 6, 2.9)));

  SUBCASE("hover hold") {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dynamics::kReducedDim);
    x0[0] = 5;
    x0[1] = 5;
    x0[2] = 1.5;
    std::vector<planner::Subtask> tasks = {task_of("hold", "hover", "G[0,5] colA", 5)};
    auto plan = planner::plan_agent(aut, w3, "q1", x0, tasks, fast_cfg());
    CHECK(plan.segments[0].objective == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(planner::replay_drift(p, aut, plan) < 1e-6);
  }
  SUBCASE("climb into hover") {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dynamics::kReducedDim);
    x0[0] = 5;
    x0[1] = 5;
    x0[2] = 0.9;
    std::vector<planner::Subtask> tasks = {
        task_of("climb", "takeoff", "G[0,9] colB & F[9,9] up", 9),
        task_of("settle", "hover", "G[0,4] colB", 4)};
    auto plan = planner::plan_agent(aut, w3, "q1", x0, tasks, fast_cfg());
    REQUIRE(plan.states.size() == 14);
    CHECK(plan.states[9][2] >= 1.6 - 1e-6);
    CHECK(planner::all_ok(planner::verify_plan(w3, plan, tasks)));
    CHECK(planner::replay_drift(p, aut, plan) <= 0.3);
  }
}

TEST_CASE("replay_drift rejects plans it cannot embed") {
  dynamics::QuadrotorParams p;
  auto aut = dynamics::default_automaton(p, 0.2);

  planner::AgentPlan plan;
  planner::SegmentPlan seg;
  seg.mode = "nope";
  plan.segments.push_back(seg);
  CHECK_THROWS_AS(planner::replay_drift(p, aut, plan), planner::PlanError);

  auto flat = go_hold();
  planner::AgentPlan plan2;
  planner::SegmentPlan seg2;
  seg2.mode = "go";
  seg2.states = {vec2(0, 0)};
  plan2.segments.push_back(seg2);
  CHECK_THROWS_AS(planner::replay_drift(p, flat, plan2), planner::PlanError);
}
