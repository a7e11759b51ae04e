#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mtlplan/dynamics.hpp"

using namespace mtlplan;
using namespace mtlplan::dynamics;

namespace {

// Central-difference Jacobians of the nonlinear right-hand side.
Eigen::MatrixXd fd_state_jacobian(const QuadrotorParams& p, const Eigen::VectorXd& x,
                                  const ControlInput& u, double h = 1e-6) {
  Eigen::MatrixXd J(kFullDim, kFullDim);
  for (int j = 0; j < kFullDim; ++j) {
    Eigen::VectorXd hi = x, lo = x;
    hi[j] += h;
    lo[j] -= h;
    J.col(j) = (nonlinear_derivative(p, hi, u) - nonlinear_derivative(p, lo, u)) / (2 * h);
  }
  return J;
}

Eigen::MatrixXd fd_input_jacobian(const QuadrotorParams& p, const Eigen::VectorXd& x,
                                  const ControlInput& u, double h = 1e-6) {
  Eigen::MatrixXd J(kFullDim, 4);
  for (int j = 0; j < 4; ++j) {
    Eigen::Vector4d hi = u.to_vector(), lo = u.to_vector();
    hi[j] += h;
    lo[j] -= h;
    J.col(j) = (nonlinear_derivative(p, x, ControlInput::from_vector(hi)) -
                nonlinear_derivative(p, x, ControlInput::from_vector(lo))) /
               (2 * h);
  }
  return J;
}

// Hand-written hover linearization in the reduced coordinates, kept
// deliberately separate from the library construction.
struct HoverClosedForm {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kReducedDim, kReducedDim);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(kReducedDim, 3);

  explicit HoverClosedForm(const QuadrotorParams& p) {
    A(0, 3) = A(1, 4) = A(2, 5) = 1;
    A(3, 7) = p.g;
    A(4, 6) = -p.g;
    A(6, 8) = A(7, 9) = 1;
    B(5, 0) = 1.0 / p.m;
    B.block<2, 2>(8, 1) = p.J.topLeftCorner<2, 2>().inverse();
  }
};

Eigen::VectorXd full12(double x, double y, double z) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(kFullDim);
  v[0] = x;
  v[1] = y;
  v[2] = z;
  return v;
}

}  // namespace

TEST_CASE("hover equilibrium has zero derivative") {
  QuadrotorParams p;
  FullState xs;
  xs.position = {2, 3, 1.5};
  ControlInput us{p.m * p.g, Eigen::Vector3d::Zero()};
  const Eigen::VectorXd dx = nonlinear_derivative(p, xs.to_vector(), us);
  CHECK(dx.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("zero thrust gives free fall") {
  QuadrotorParams p;
  const Eigen::VectorXd dx = nonlinear_derivative(p, full12(0, 0, 2), ControlInput{});
  CHECK(dx[5] == doctest::Approx(-p.g));
  for (int i : {0, 1, 2, 3, 4, 6, 7, 8, 9, 10, 11}) CHECK(dx[i] == doctest::Approx(0.0));
}

TEST_CASE("analytic Jacobians match central differences at random operating points") {
  QuadrotorParams p;
  p.J = Eigen::Vector3d(0.013, 0.011, 0.021).asDiagonal();
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ang(-0.3, 0.3), rate(-1.0, 1.0), vel(-1.0, 1.0),
      thr(0.5 * p.m * p.g, 1.5 * p.m * p.g), trq(-0.1, 0.1);
  for (int trial = 0; trial < 10; ++trial) {
    FullState xs;
    xs.position = {vel(rng), vel(rng), vel(rng) + 2};
    xs.velocity = {vel(rng), vel(rng), vel(rng)};
    xs.angles = {ang(rng), ang(rng), ang(rng)};
    xs.rates = {rate(rng), rate(rng), rate(rng)};
    ControlInput us{thr(rng), {trq(rng), trq(rng), trq(rng)}};

    const Linearization lin = linearize(p, xs, us, false);
    const Eigen::MatrixXd a_fd = fd_state_jacobian(p, xs.to_vector(), us);
    const Eigen::MatrixXd b_fd = fd_input_jacobian(p, xs.to_vector(), us);
    CHECK((lin.A - a_fd).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK((lin.B - b_fd).lpNorm<Eigen::Infinity>() < 1e-6);
    CHECK((lin.drift - nonlinear_derivative(p, xs.to_vector(), us)).norm() == 0.0);
  }
}

TEST_CASE("reduced linearization selects the yaw-free submatrix") {
  QuadrotorParams p;
  FullState xs;
  xs.velocity = {0.2, 0, -0.1};
  xs.angles = {0.05, -0.04, 0};
  ControlInput us{p.m * p.g, {0.01, -0.02, 0}};
  const Linearization full = linearize(p, xs, us, false);
  const Linearization red = linearize(p, xs, us, true);
  REQUIRE(red.A.rows() == kReducedDim);
  REQUIRE(red.B.cols() == 3);
  for (int i = 0; i < kReducedDim; ++i) {
    CHECK(red.drift[i] == full.drift[red.state_sel[i]]);
    for (int j = 0; j < kReducedDim; ++j)
      CHECK(red.A(i, j) == full.A(red.state_sel[i], red.state_sel[j]));
    for (int j = 0; j < 3; ++j) CHECK(red.B(i, j) == full.B(red.state_sel[i], red.input_sel[j]));
  }

  FullState bad = xs;
  bad.angles[2] = 0.1;
  CHECK_THROWS_AS(linearize(p, bad, us, true), std::invalid_argument);
  bad = xs;
  bad.rates[2] = 0.2;
  CHECK_THROWS_AS(linearize(p, bad, us, true), std::invalid_argument);
  ControlInput bad_u = us;
  bad_u.torque[2] = 0.05;
  CHECK_THROWS_AS(linearize(p, xs, bad_u, true), std::invalid_argument);
}

TEST_CASE("hover linearization matches the closed form") {
  QuadrotorParams p;
  SUBCASE("diagonal inertia") {}
  SUBCASE("coupled roll-pitch inertia") {
    p.J << 0.010, 0.002, 0, 0.002, 0.012, 0, 0, 0, 0.02;
  }
  const HoverClosedForm ref(p);
  FullState hover;
  const ControlInput us{p.m * p.g, Eigen::Vector3d::Zero()};
  const Linearization lin = linearize(p, hover, us, true);
  CHECK((lin.A - ref.A).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK((lin.B - ref.B).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK(lin.drift.norm() < 1e-9);

  // A is nilpotent (rates feed angles feed velocity feeds position), so
  // the exponential series ends after the cubic term.
  const Eigen::MatrixXd a2 = ref.A * ref.A, a3 = a2 * ref.A;
  CHECK((a3 * ref.A).norm() == 0.0);
  const double dt = 0.2;
  const Eigen::MatrixXd n = Eigen::MatrixXd::Identity(kReducedDim, kReducedDim);
  const Eigen::MatrixXd ad_ref =
      n + dt * ref.A + (dt * dt / 2) * a2 + (dt * dt * dt / 6) * a3;
  const Eigen::MatrixXd s_ref =
      dt * n + (dt * dt / 2) * ref.A + (dt * dt * dt / 6) * a2 + (dt * dt * dt * dt / 24) * a3;
  const ZohResult zoh = discretize(lin.A, lin.B, lin.drift, dt);
  CHECK((zoh.Ad - ad_ref).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((zoh.Bd - s_ref * lin.B).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(zoh.cd.norm() < 1e-12);
}

TEST_CASE("discretize handles the trivial and double-integrator cases") {
  const double dt = 0.3;
  SUBCASE("A = 0") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd b(2, 1);
    b << 1, 2;
    Eigen::VectorXd c(2);
    c << -1, 4;
    const ZohResult z = discretize(a, b, c, dt);
    CHECK((z.Ad - Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);
    CHECK((z.Bd - dt * b).norm() < 1e-15);
    CHECK((z.cd - dt * c).norm() < 1e-15);
  }
  SUBCASE("double integrator") {
    Eigen::MatrixXd a(2, 2);
    a << 0, 1, 0, 0;
    Eigen::MatrixXd b(2, 1);
    b << 0, 1;
    const ZohResult z = discretize(a, b, Eigen::VectorXd::Zero(2), dt);
    CHECK(z.Ad(0, 0) == doctest::Approx(1.0));
    CHECK(z.Ad(0, 1) == doctest::Approx(dt));
    CHECK(z.Ad(1, 1) == doctest::Approx(1.0));
    CHECK(z.Bd(0, 0) == doctest::Approx(dt * dt / 2));
    CHECK(z.Bd(1, 0) == doctest::Approx(dt));
  }
}

TEST_CASE("discretize agrees with a dense matrix-ODE integration") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Eigen::MatrixXd a(3, 3), b(3, 2);
  Eigen::VectorXd c(3);
  for (int i = 0; i < 3; ++i) {
    c[i] = coef(rng);
    for (int j = 0; j < 3; ++j) a(i, j) = coef(rng);
    for (int j = 0; j < 2; ++j) b(i, j) = coef(rng);
  }
  const double dt = 0.2;
  // d/dt [M S] = [A M, A S + I], M(0) = I, S(0) = 0.
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3, 3);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  const int substeps = 1000;
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i) {
    const Eigen::MatrixXd k1m = a * m, k1s = a * s + eye;
    const Eigen::MatrixXd k2m = a * (m + 0.5 * h * k1m), k2s = a * (s + 0.5 * h * k1s) + eye;
    const Eigen::MatrixXd k3m = a * (m + 0.5 * h * k2m), k3s = a * (s + 0.5 * h * k2s) + eye;
    const Eigen::MatrixXd k4m = a * (m + h * k3m), k4s = a * (s + h * k3s) + eye;
    m += (h / 6) * (k1m + 2 * k2m + 2 * k3m + k4m);
    s += (h / 6) * (k1s + 2 * k2s + 2 * k3s + k4s);
  }
  const ZohResult z = discretize(a, b, c, dt);
  CHECK((z.Ad - m).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK((z.Bd - s * b).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK((z.cd - s * c).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("default modes share Jacobians and differ only in drift") {
  QuadrotorParams p;
  ModeLimits lim;
  const HybridAutomaton auto_ = default_automaton(p, 0.2, lim);
  REQUIRE(auto_.modes.size() == 5);
  const LinearMode* hover = auto_.find_mode("hover");
  REQUIRE(hover != nullptr);
  for (const auto& m : auto_.modes) {
    CHECK((m.A - hover->A).norm() == 0.0);
    CHECK((m.B - hover->B).norm() == 0.0);
    CHECK((m.Ad - hover->Ad).norm() == 0.0);
    CHECK((m.Bd - hover->Bd).norm() == 0.0);
    CHECK(m.drift.segment(3, 7).norm() == 0.0);
    CHECK((m.drift.head<3>() - m.x_star.segment<3>(3)).norm() == 0.0);
    CHECK(m.x_star.head<3>().norm() == 0.0);
    CHECK(m.u_star[0] == doctest::Approx(p.m * p.g));
  }
  CHECK(auto_.find_mode("takeoff")->x_star[5] == doctest::Approx(lim.takeoff_climb));
  CHECK(auto_.find_mode("land")->x_star[5] == doctest::Approx(-lim.land_descent));
  CHECK(auto_.find_mode("grasp")->x_star[5] == doctest::Approx(-lim.grasp_descent));
  CHECK(auto_.find_mode("steer")->x_star[3] == doctest::Approx(lim.steer_speed));
  CHECK(hover->cd.norm() == 0.0);
  // Constant-velocity references integrate exactly over one interval.
  CHECK(auto_.find_mode("takeoff")->cd[2] == doctest::Approx(lim.takeoff_climb * 0.2));
}

TEST_CASE("step applies the discrete update") {
  QuadrotorParams p;
  const HybridAutomaton auto_ = default_automaton(p, 0.2);
  const LinearMode& land = *auto_.find_mode("land");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(kReducedDim);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(3);
  u[0] = 0.5;
  const Eigen::VectorXd next = step(land, x, u);
  CHECK((next - (land.Ad * x + land.Bd * u + land.cd)).norm() == 0.0);
  CHECK(step(land.Ad, land.Bd, x, u) == land.Ad * x + land.Bd * u);
  // Holding the operating point input tracks the descent reference.
  CHECK(step(land, Eigen::VectorXd::Zero(kReducedDim), Eigen::VectorXd::Zero(3))[2] ==
        doctest::Approx(-0.5 * 0.2));
}

TEST_CASE("switching guards gate on altitude and speed") {
  QuadrotorParams p;
  const HybridAutomaton auto_ = default_automaton(p, 0.2);
  const Edge* up = auto_.find_edge("takeoff", "hover");
  REQUIRE(up != nullptr);
  CHECK(guard_satisfied(up->guard, full12(1, 1, 1.6)));
  CHECK_FALSE(guard_satisfied(up->guard, full12(1, 1, 1.2)));

  const Edge* settle = auto_.find_edge("steer", "hover");
  REQUIRE(settle != nullptr);
  Eigen::VectorXd fast = full12(0, 0, 1.5);
  fast[3] = 0.2;
  CHECK_FALSE(guard_satisfied(settle->guard, fast));
  Eigen::VectorXd slow = full12(0, 0, 1.5);
  slow[4] = -0.04;
  CHECK(guard_satisfied(settle->guard, slow));

  const Edge* touch = auto_.find_edge("land", "takeoff");
  REQUIRE(touch != nullptr);
  CHECK(guard_satisfied(touch->guard, full12(0, 0, 1.25)));
  CHECK_FALSE(guard_satisfied(touch->guard, full12(0, 0, 1.35)));

  CHECK(guard_satisfied(auto_.find_edge("hover", "steer")->guard, full12(9, 9, 0)));
}

TEST_CASE("automaton validation enforces the land handover rule") {
  QuadrotorParams p;
  HybridAutomaton auto_ = default_automaton(p, 0.2);
  CHECK(auto_.find_edge("land", "hover") == nullptr);
  int land_out = 0;
  for (const auto& e : auto_.edges)
    if (e.from == "land") {
      ++land_out;
      CHECK(e.to == "takeoff");
    }
  CHECK(land_out == 1);

  HybridAutomaton bad = auto_;
  bad.edges.push_back({"land", "hover", {}});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  HybridAutomaton orphan = auto_;
  orphan.edges.clear();
  CHECK_THROWS_AS(orphan.validate(), std::invalid_argument);

  HybridAutomaton dangling = auto_;
  dangling.edges.push_back({"hover", "perch", {}});
  CHECK_THROWS_AS(dangling.validate(), std::invalid_argument);
}

TEST_CASE("grasp expands to hover, land, takeoff") {
  const auto phases = grasp_sequence(1.3);
  REQUIRE(phases.size() == 3);
  CHECK(phases[0].mode == "hover");
  CHECK(phases[1].mode == "land");
  CHECK(phases[2].mode == "takeoff");
  CHECK_FALSE(phases[0].sets_payload_on_exit);
  CHECK(phases[1].sets_payload_on_exit);
  CHECK_FALSE(phases[2].sets_payload_on_exit);
  CHECK(guard_satisfied(phases[2].entry, full12(0, 0, 1.25)));
  CHECK_FALSE(guard_satisfied(phases[2].entry, full12(0, 0, 1.4)));
}

TEST_CASE("nonlinear rollout holds hover and reproduces free fall") {
  QuadrotorParams p;
  Eigen::VectorXd x0 = full12(1, 2, 1.5);
  std::vector<ControlInput> hold(30, ControlInput{p.m * p.g, Eigen::Vector3d::Zero()});
  const auto traj = simulate_nonlinear(p, x0, hold, 0.2);
  REQUIRE(traj.size() == 31);
  CHECK((traj.back() - x0).lpNorm<Eigen::Infinity>() < 1e-9);

  std::vector<ControlInput> off(5);
  const auto drop = simulate_nonlinear(p, full12(0, 0, 3), off, 0.2);
  const double t = 5 * 0.2;
  CHECK(drop.back()[2] == doctest::Approx(3 - 0.5 * p.g * t * t).epsilon(1e-9));
  CHECK(drop.back()[5] == doctest::Approx(-p.g * t).epsilon(1e-9));
}

TEST_CASE("rollout divergence raises an error") {
  QuadrotorParams p;
  std::vector<ControlInput> wild(200, ControlInput{0.0, {50.0, 0, 0}});
  CHECK_THROWS_AS(simulate_nonlinear(p, full12(0, 0, 1), wild, 0.2), DivergenceError);
}

TEST_CASE("linearized and nonlinear models agree near the operating point") {
  QuadrotorParams p;
  const HybridAutomaton auto_ = default_automaton(p, 0.2);
  const LinearMode& steer = *auto_.find_mode("steer");
  // Small deviations: offset initial velocity and nudge the inputs.
  Eigen::VectorXd x_hat = Eigen::VectorXd::Zero(kReducedDim);
  x_hat[3] = 0.02;
  x_hat[6] = 0.01;
  Eigen::VectorXd u_hat(3);
  u_hat << 0.05, 0.0005, -0.0005;

  Eigen::VectorXd lin_state = x_hat;
  for (int k = 0; k < 5; ++k) lin_state = step(steer, lin_state, u_hat);

  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(kFullDim);
  for (int i = 0; i < kReducedDim; ++i) x0[steer.state_sel[i]] = steer.x_star[i] + x_hat[i];
  ControlInput u{steer.u_star[0] + u_hat[0], {u_hat[1], u_hat[2], 0}};
  const auto traj = simulate_nonlinear(p, x0, std::vector<ControlInput>(5, u), 0.2);
  for (int i = 0; i < kReducedDim; ++i) {
    const double nl = traj.back()[steer.state_sel[i]];
    const double li = steer.x_star[i] + lin_state[i];
    CHECK(std::abs(nl - li) < 5e-3);
  }
}
