#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "mtlplan/dynamics.hpp"
#include "mtlplan/milp.hpp"
#include "mtlplan/mtl.hpp"
#include "mtlplan/workspace.hpp"

namespace mtlplan::encoder {

struct EncodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// M = 0 asks the builder to derive a big-M from the workspace geometry.
struct EncodingConfig {
  double M = 0.0;
  double eps = 1e-4;
  int N = 0;

  void validate() const;
};

// Twice the largest face defect over the bounding box corners, plus
// one, so both big-M rows stay slack for any in-box state.
double default_big_m(const workspace::Workspace& ws);

enum class VarRole { State, Input, InputAbs, HalfspaceBit, K };

class VarMap {
 public:
  void add(VarRole role, int time, int index, int var);
  int at(VarRole role, int time, int index) const;
  bool has(VarRole role, int time, int index) const;
  int size() const { return static_cast<int>(ids_.size()); }

 private:
  std::map<std::tuple<int, int, int>, int> ids_;
};

// One formula node in encoded form; kept for decoding solutions and
// for the rounding hint.
struct EncNode {
  mtl::Op op = mtl::Op::True;
  mtl::Interval ivl{0, 0};
  std::vector<int> kids;
  int region = -1;                           // atoms: index into regions
  std::vector<std::vector<int>> part_faces;  // atoms: face ids per part
  std::vector<int> times;                    // operator evaluation times
};

struct BuildResult {
  milp::MilpModel model;
  VarMap map;
  std::vector<workspace::Halfspace> faces;
  std::vector<EncNode> nodes;
  std::vector<workspace::Region> regions;
  std::vector<int> position_dims;
  int state_dim = 0;
  int input_dim = 0;
  int N = 0;
  int root = -1;
  double eps = 0.0;
  mtl::Formula clipped;
};

// Assembles one sub-task model: variables in the fixed order states,
// inputs, input slacks, then per-atom bit and satisfaction columns,
// then operator satisfaction vars; rows follow in the same order and
// end with the root pin.  x0_hat is the initial state in mode
// coordinates relative to the operating point.
class Encoder {
 public:
  Encoder(const dynamics::LinearMode& mode, const workspace::Workspace& ws, EncodingConfig cfg);

  void encode_dynamics(const Eigen::VectorXd& x0_hat);
  void encode_objective();
  // Registers each face of the polytope and creates its bit column for
  // t = 0..N with both big-M rows.  Returns the face ids.
  std::vector<int> encode_halfspace_bits(const workspace::ConvexPolytope& poly);
  // Satisfaction variables for one labeled region at every step,
  // conjunction within a part and disjunction across parts.  Returns
  // the node index.
  int encode_atom(const workspace::Region& region);
  // Full formula in negation normal form; unbounded always-intervals
  // are clipped to the horizon first.  Ends with the root pin row.
  // Returns the root node index.
  int encode_formula(const mtl::Formula& f);

  BuildResult finish();

 private:
  int ensure_atom(const mtl::Formula& f);
  int collect(const mtl::Formula& f);
  void mark_times(int node, int t);
  void emit_node_rows(int node);
  int kvar(int node, int t) const;
  int cvar(int node, int t, int j) const;
  int k_index(int node) const;
  int part_index(int node, int part) const;
  int c_index(int node, int j) const;

  const dynamics::LinearMode& mode_;
  const workspace::Workspace& ws_;
  EncodingConfig cfg_;
  BuildResult out_;
  std::map<const void*, int> node_ids_;
  std::map<std::string, int> atom_nodes_;
  bool dynamics_done_ = false, objective_done_ = false, formula_done_ = false;
};

// One-call assembly used by the planner.
BuildResult build(const dynamics::LinearMode& mode, const Eigen::VectorXd& x0_hat,
                  const mtl::Formula& formula, const workspace::Workspace& ws,
                  EncodingConfig cfg);

std::vector<Eigen::VectorXd> decode_states(const BuildResult& enc,
                                           const Eigen::VectorXd& assignment);
std::vector<Eigen::VectorXd> decode_inputs(const BuildResult& enc,
                                           const Eigen::VectorXd& assignment);

// Primal heuristic for the branch-and-bound: derive every bit from the
// relaxation's states, propagate exact satisfaction values, and keep
// the continuous trajectory.  Returns nullopt when the formula does
// not hold on that trajectory.
milp::IncumbentHint rounding_hint(const BuildResult& enc);

}  // namespace mtlplan::encoder
