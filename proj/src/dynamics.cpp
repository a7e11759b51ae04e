#include "mtlplan/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace mtlplan::dynamics {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d s;
  s << 0, -w[2], w[1], w[2], 0, -w[0], -w[1], w[0], 0;
  return s;
}

}  // namespace

Eigen::VectorXd FullState::to_vector() const {
  Eigen::VectorXd v(kFullDim);
  v << position, velocity, angles, rates;
  return v;
}

FullState FullState::from_vector(const Eigen::VectorXd& v) {
  if (v.size() != kFullDim) throw std::invalid_argument("state vector must have 12 entries");
  FullState s;
  s.position = v.segment<3>(0);
  s.velocity = v.segment<3>(3);
  s.angles = v.segment<3>(6);
  s.rates = v.segment<3>(9);
  return s;
}

Eigen::Matrix3d rotation(const Eigen::Vector3d& angles) {
  const double cr = std::cos(angles[0]), sr = std::sin(angles[0]);
  const double cp = std::cos(angles[1]), sp = std::sin(angles[1]);
  const double cy = std::cos(angles[2]), sy = std::sin(angles[2]);
  Eigen::Matrix3d rx, ry, rz;
  rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  return rz * ry * rx;
}

Eigen::VectorXd nonlinear_derivative(const QuadrotorParams& p, const Eigen::VectorXd& x,
                                     const ControlInput& u) {
  if (x.size() != kFullDim) throw std::invalid_argument("state vector must have 12 entries");
  const Eigen::Vector3d v = x.segment<3>(3);
  const Eigen::Vector3d ang = x.segment<3>(6);
  const Eigen::Vector3d omega = x.segment<3>(9);

  Eigen::VectorXd dx(kFullDim);
  dx.segment<3>(0) = v;
  dx.segment<3>(3) =
      -p.g * Eigen::Vector3d::UnitZ() + (u.thrust / p.m) * (rotation(ang) * Eigen::Vector3d::UnitZ());
  dx.segment<3>(6) = omega;
  dx.segment<3>(9) = p.J.inverse() * (-omega.cross(p.J * omega) + u.torque);
  return dx;
}

Linearization linearize(const QuadrotorParams& p, const FullState& x_star,
                        const ControlInput& u_star, bool reduced) {
  p.validate();
  const double cr = std::cos(x_star.angles[0]), sr = std::sin(x_star.angles[0]);
  const double cp = std::cos(x_star.angles[1]), sp = std::sin(x_star.angles[1]);
  const double cy = std::cos(x_star.angles[2]), sy = std::sin(x_star.angles[2]);

  const Eigen::Vector3d re3 = rotation(x_star.angles) * Eigen::Vector3d::UnitZ();
  Eigen::Matrix3d dre3;  // columns: d(R e3)/d(roll, pitch, yaw)
  dre3.col(0) << -cy * sp * sr + sy * cr, -sy * sp * sr - cy * cr, -cp * sr;
  dre3.col(1) << cy * cp * cr, sy * cp * cr, -sp * cr;
  dre3.col(2) << -sy * sp * cr + cy * sr, cy * sp * cr + sy * sr, 0;

  const Eigen::Matrix3d jinv = p.J.inverse();
  const Eigen::Vector3d omega = x_star.rates;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kFullDim, kFullDim);
  A.block<3, 3>(0, 3).setIdentity();
  A.block<3, 3>(3, 6) = (u_star.thrust / p.m) * dre3;
  A.block<3, 3>(6, 9).setIdentity();
  A.block<3, 3>(9, 9) = jinv * (skew(p.J * omega) - skew(omega) * p.J);

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(kFullDim, 4);
  B.block<3, 1>(3, 0) = re3 / p.m;
  B.block<3, 3>(9, 1) = jinv;

  const Eigen::VectorXd f0 = nonlinear_derivative(p, x_star.to_vector(), u_star);

  Linearization lin;
  if (!reduced) {
    lin.A = A;
    lin.B = B;
    lin.drift = f0;
    lin.state_sel.resize(kFullDim);
    for (int i = 0; i < kFullDim; ++i) lin.state_sel[i] = i;
    lin.input_sel = {0, 1, 2, 3};
    return lin;
  }

  if (std::abs(x_star.angles[2]) > 1e-12 || std::abs(x_star.rates[2]) > 1e-12 ||
      std::abs(u_star.torque[2]) > 1e-12) {
    throw std::invalid_argument("reduced model needs zero yaw, yaw rate, and yaw torque");
  }
  lin.state_sel = {0, 1, 2, 3, 4, 5, 6, 7, 9, 10};
  lin.input_sel = {0, 1, 2};
  lin.A.resize(kReducedDim, kReducedDim);
  lin.B.resize(kReducedDim, 3);
  lin.drift.resize(kReducedDim);
  for (int i = 0; i < kReducedDim; ++i) {
    lin.drift[i] = f0[lin.state_sel[i]];
    for (int j = 0; j < kReducedDim; ++j) lin.A(i, j) = A(lin.state_sel[i], lin.state_sel[j]);
    for (int j = 0; j < 3; ++j) lin.B(i, j) = B(lin.state_sel[i], lin.input_sel[j]);
  }
  return lin;
}

ZohResult discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::VectorXd& drift, double dt) {
  if (A.rows() != A.cols()) throw std::invalid_argument("A must be square");
  if (B.rows() != A.rows() || drift.size() != A.rows())
    throw std::invalid_argument("inconsistent dimensions in discretize");
  if (dt <= 0) throw std::invalid_argument("dt must be positive");

  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);  // (A dt)^k / k!
  Eigen::MatrixXd ad = term;
  Eigen::MatrixXd s = term * dt;  // integral of exp(A tau) over [0, dt]
  for (int k = 1; k <= 50; ++k) {
    term = term * A * (dt / k);
    ad += term;
    s += term * (dt / (k + 1));
    if (term.norm() < 1e-12) break;
  }
  return {ad, s * B, s * drift};
}

Eigen::VectorXd step(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                     const Eigen::VectorXd& x_hat, const Eigen::VectorXd& u_hat) {
  return Ad * x_hat + Bd * u_hat;
}

Eigen::VectorXd step(const LinearMode& mode, const Eigen::VectorXd& x_hat,
                     const Eigen::VectorXd& u_hat) {
  return mode.Ad * x_hat + mode.Bd * u_hat + mode.cd;
}

bool guard_satisfied(const Guard& g, const Eigen::VectorXd& x12, double tol) {
  for (const auto& h : g.conditions) {
    if (h.normal.size() != x12.size()) throw std::invalid_argument("guard dimension mismatch");
    if (h.normal.dot(x12) > h.offset + tol) return false;
  }
  return true;
}

const LinearMode* HybridAutomaton::find_mode(const std::string& name) const {
  for (const auto& m : modes)
    if (m.name == name) return &m;
  return nullptr;
}

const Edge* HybridAutomaton::find_edge(const std::string& from, const std::string& to) const {
  for (const auto& e : edges)
    if (e.from == from && e.to == to) return &e;
  return nullptr;
}

void HybridAutomaton::validate() const {
  for (const auto& e : edges) {
    if (!find_mode(e.from) || !find_mode(e.to))
      throw std::invalid_argument("edge references unknown mode " + e.from + " -> " + e.to);
    if (e.from == "land" && e.to != "takeoff")
      throw std::invalid_argument("land may only hand over to takeoff");
  }
  if (!find_mode("takeoff")) throw std::invalid_argument("automaton needs a takeoff mode");
  std::set<std::string> seen{"takeoff"};
  std::deque<std::string> queue{"takeoff"};
  while (!queue.empty()) {
    const std::string cur = queue.front();
    queue.pop_front();
    for (const auto& e : edges)
      if (e.from == cur && seen.insert(e.to).second) queue.push_back(e.to);
  }
  for (const auto& m : modes)
    if (!seen.count(m.name))
      throw std::invalid_argument("mode " + m.name + " unreachable from takeoff");
}

namespace {

constexpr double kWideBound = 1e9;

LinearMode make_mode(const std::string& name, const QuadrotorParams& p,
                     const Eigen::Vector3d& v_star, double dt, const ModeLimits& lim) {
  FullState xs;
  xs.velocity = v_star;
  ControlInput us{p.m * p.g, Eigen::Vector3d::Zero()};

  const Linearization lin = linearize(p, xs, us, true);
  const ZohResult zoh = discretize(lin.A, lin.B, lin.drift, dt);

  LinearMode mode;
  mode.name = name;
  mode.A = lin.A;
  mode.B = lin.B;
  mode.drift = lin.drift;
  mode.Ad = zoh.Ad;
  mode.Bd = zoh.Bd;
  mode.cd = zoh.cd;
  mode.dt = dt;
  mode.state_sel = lin.state_sel;
  mode.input_sel = lin.input_sel;
  mode.position_dims = {0, 1, 2};

  mode.x_star.setZero(kReducedDim);
  mode.x_star.segment<3>(3) = v_star;
  mode.u_star.resize(3);
  mode.u_star << us.thrust, 0, 0;

  mode.input_bounds = {{-lim.thrust_delta, lim.thrust_delta},
                       {-lim.torque, lim.torque},
                       {-lim.torque, lim.torque}};
  mode.state_bounds.assign(kReducedDim, {-kWideBound, kWideBound});
  for (int i = 3; i < 6; ++i) mode.state_bounds[i] = {-lim.velocity, lim.velocity};
  for (int i = 6; i < 8; ++i) mode.state_bounds[i] = {-lim.angle, lim.angle};
  for (int i = 8; i < 10; ++i) mode.state_bounds[i] = {-lim.rate, lim.rate};
  return mode;
}

workspace::Halfspace axis_ub(int dim, double bound) {
  Eigen::VectorXd n = Eigen::VectorXd::Zero(kFullDim);
  n[dim] = 1.0;
  return {n, bound};
}

workspace::Halfspace axis_lb(int dim, double bound) {
  Eigen::VectorXd n = Eigen::VectorXd::Zero(kFullDim);
  n[dim] = -1.0;
  return {n, -bound};
}

}  // namespace

HybridAutomaton default_automaton(const QuadrotorParams& p, double dt, const ModeLimits& lim) {
  HybridAutomaton auto_;
  auto_.modes.push_back(make_mode("takeoff", p, {0, 0, lim.takeoff_climb}, dt, lim));
  auto_.modes.push_back(make_mode("land", p, {0, 0, -lim.land_descent}, dt, lim));
  auto_.modes.push_back(make_mode("hover", p, {0, 0, 0}, dt, lim));
  auto_.modes.push_back(make_mode("steer", p, {lim.steer_speed, 0, 0}, dt, lim));
  auto_.modes.push_back(make_mode("grasp", p, {0, 0, -lim.grasp_descent}, dt, lim));

  const Guard at_cruise{{axis_lb(2, lim.cruise_altitude)}};
  const Guard airborne{{axis_lb(2, 0.5)}};
  const Guard touched{{axis_ub(2, lim.touch_altitude)}};
  Guard settled;
  for (int i = 3; i < 6; ++i) {
    settled.conditions.push_back(axis_ub(i, lim.slow_speed));
    settled.conditions.push_back(axis_lb(i, -lim.slow_speed));
  }

  auto_.edges = {
      {"takeoff", "hover", at_cruise}, {"takeoff", "steer", at_cruise},
      {"hover", "steer", {}},          {"steer", "hover", settled},
      {"hover", "land", airborne},     {"land", "takeoff", touched},
      {"hover", "grasp", {}},          {"steer", "grasp", settled},
      {"grasp", "hover", at_cruise},   {"grasp", "steer", at_cruise},
  };
  auto_.validate();
  return auto_;
}

std::vector<GraspPhase> grasp_sequence(double touch_altitude) {
  std::vector<GraspPhase> phases(3);
  phases[0].mode = "hover";
  phases[1].mode = "land";
  phases[1].entry.conditions.push_back(axis_lb(2, 0.5));
  phases[1].sets_payload_on_exit = true;
  phases[2].mode = "takeoff";
  phases[2].entry.conditions.push_back(axis_ub(2, touch_altitude));
  return phases;
}

std::vector<Eigen::VectorXd> simulate_nonlinear(const QuadrotorParams& p,
                                                const Eigen::VectorXd& x0,
                                                const std::vector<ControlInput>& inputs,
                                                double dt) {
  if (x0.size() != kFullDim) throw std::invalid_argument("state vector must have 12 entries");
  std::vector<Eigen::VectorXd> out;
  out.reserve(inputs.size() + 1);
  out.push_back(x0);
  Eigen::VectorXd x = x0;
  for (const auto& u : inputs) {
    const Eigen::VectorXd k1 = nonlinear_derivative(p, x, u);
    const Eigen::VectorXd k2 = nonlinear_derivative(p, x + 0.5 * dt * k1, u);
    const Eigen::VectorXd k3 = nonlinear_derivative(p, x + 0.5 * dt * k2, u);
    const Eigen::VectorXd k4 = nonlinear_derivative(p, x + dt * k3, u);
    x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!x.allFinite() || x.lpNorm<Eigen::Infinity>() > 1e6)
      throw DivergenceError("nonlinear rollout diverged after step " +
                            std::to_string(out.size()));
    out.push_back(x);
  }
  return out;
}

}  // namespace mtlplan::dynamics
