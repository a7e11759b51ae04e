#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtlplan/workspace.hpp"

namespace mtlplan::dynamics {

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadrotorParams {
  double m = 1.0;
  double g = 9.81;
  Eigen::Matrix3d J = Eigen::Vector3d(0.01, 0.01, 0.02).asDiagonal();

  void validate() const {
    if (m <= 0 || g <= 0) throw std::invalid_argument("nonpositive mass or gravity");
    if (J.determinant() <= 0) throw std::invalid_argument("singular inertia matrix");
  }
};

// Full 12-state: position, velocity (world frame), roll/pitch/yaw, body
// rates.  Angle rates are identified with body rates (small-angle
// kinematics); the rotation matrix itself is exact.
struct FullState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d angles = Eigen::Vector3d::Zero();   // roll, pitch, yaw
  Eigen::Vector3d rates = Eigen::Vector3d::Zero();

  Eigen::VectorXd to_vector() const;
  static FullState from_vector(const Eigen::VectorXd& v);
};

struct ControlInput {
  double thrust = 0.0;            // total rotor force along body z
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();

  Eigen::Vector4d to_vector() const {
    return Eigen::Vector4d(thrust, torque[0], torque[1], torque[2]);
  }
  static ControlInput from_vector(const Eigen::Vector4d& v) {
    return {v[0], Eigen::Vector3d(v[1], v[2], v[3])};
  }
};

// World-frame rotation for roll/pitch/yaw (Z-Y-X composition).
Eigen::Matrix3d rotation(const Eigen::Vector3d& angles);

// Newton-Euler right-hand side on the 12-state vector.
Eigen::VectorXd nonlinear_derivative(const QuadrotorParams& p, const Eigen::VectorXd& x,
                                     const ControlInput& u);

inline constexpr int kFullDim = 12;
inline constexpr int kReducedDim = 10;

// Analytic Jacobians of the 12-state model at (x_star, u_star).  With
// reduced=true drops yaw, yaw rate, and yaw torque; requires zero yaw,
// yaw rate, and yaw torque at the operating point.
struct Linearization {
  Eigen::MatrixXd A, B;
  Eigen::VectorXd drift;  // f(x_star, u_star) in the selected coordinates
  std::vector<int> state_sel, input_sel;
};

Linearization linearize(const QuadrotorParams& p, const FullState& x_star,
                        const ControlInput& u_star, bool reduced);

// Zero-order-hold discretization by truncated series: terms are added
// until the next one falls below 1e-12 in norm, capped at 50.
struct ZohResult {
  Eigen::MatrixXd Ad, Bd;
  Eigen::VectorXd cd;
};

ZohResult discretize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                     const Eigen::VectorXd& drift, double dt);

struct Bounds1 {
  double lo = 0.0, hi = 0.0;
};

// One linearized operating mode; states and inputs live in mode
// coordinates (a subset of the 12-state / 4-input vectors given by
// state_sel / input_sel).  Deviation variables are x_hat = x - x_star,
// u_hat = u - u_star; position entries of x_star are zero so position
// deviations coincide with absolute positions.
struct LinearMode {
  std::string name;
  Eigen::MatrixXd A, B;
  Eigen::VectorXd drift;
  Eigen::VectorXd x_star, u_star;
  Eigen::MatrixXd Ad, Bd;
  Eigen::VectorXd cd;
  double dt = 0.0;
  std::vector<Bounds1> input_bounds;  // on u_hat
  std::vector<Bounds1> state_bounds;  // absolute; position entries are
                                      // wide and left to workspace bounds
  std::vector<int> position_dims;
  std::vector<int> state_sel, input_sel;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
};

// x_hat(t+1) = Ad x_hat + Bd u_hat (+ cd when the mode carries drift).
Eigen::VectorXd step(const Eigen::MatrixXd& Ad, const Eigen::MatrixXd& Bd,
                     const Eigen::VectorXd& x_hat, const Eigen::VectorXd& u_hat);
Eigen::VectorXd step(const LinearMode& mode, const Eigen::VectorXd& x_hat,
                     const Eigen::VectorXd& u_hat);

// Soft limits shared by the default modes; velocities are bounded per
// axis, so mode references never exceed the mission speed cap.
struct ModeLimits {
  double velocity = 0.5;        // m/s, per axis, absolute
  double angle = 0.25;          // rad, roll/pitch
  double rate = 2.0;            // rad/s
  double thrust_delta = 5.0;    // N around hover thrust
  double torque = 0.2;          // N m
  double takeoff_climb = 0.5;   // m/s reference climb
  double land_descent = 0.5;    // m/s reference descent
  double grasp_descent = 0.3;   // m/s reference descent while grasping
  double steer_speed = 0.5;     // m/s reference horizontal speed
  double cruise_altitude = 1.5; // m
  double slow_speed = 0.05;     // m/s per-axis settle threshold
  double touch_altitude = 1.3;  // m, grasp touchdown gate
};

// Conjunction of halfspace conditions over the full 12-state.
struct Guard {
  std::vector<workspace::Halfspace> conditions;
};

bool guard_satisfied(const Guard& g, const Eigen::VectorXd& x12, double tol = 1e-6);

struct Edge {
  std::string from, to;
  Guard guard;
};

struct HybridAutomaton {
  std::vector<LinearMode> modes;
  std::vector<Edge> edges;

  const LinearMode* find_mode(const std::string& name) const;
  const Edge* find_edge(const std::string& from, const std::string& to) const;
  // Rejects a Land -> Hover edge and modes unreachable from TakeOff.
  void validate() const;
};

// Modes takeoff/land/hover/steer/grasp around straight-and-level
// operating points, plus the switching table.  Land's only outgoing
// edge returns to TakeOff.
HybridAutomaton default_automaton(const QuadrotorParams& p, double dt,
                                  const ModeLimits& limits = {});

// Grasping is the mode sequence hover -> land -> takeoff; touchdown at
// the end of the land phase flips the payload flag and makes the
// takeoff phase immediately eligible.
struct GraspPhase {
  std::string mode;
  Guard entry;
  bool sets_payload_on_exit = false;
};

std::vector<GraspPhase> grasp_sequence(double touch_altitude = 1.3);

// RK4 rollout of the nonlinear model, one step per input.  Throws
// DivergenceError when the state norm blows up.
std::vector<Eigen::VectorXd> simulate_nonlinear(const QuadrotorParams& p,
                                                const Eigen::VectorXd& x0,
                                                const std::vector<ControlInput>& inputs,
                                                double dt);

}  // namespace mtlplan::dynamics
