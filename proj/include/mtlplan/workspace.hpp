#pragma once

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mtlplan/mtl.hpp"

namespace mtlplan::workspace {

// Default slack for point-membership tests; solver outputs carry LP
// round-off, so faces are treated as closed with this margin.
inline constexpr double kMembershipTol = 1e-9;

// The closed halfspace { x : normal^T x <= offset }.
struct Halfspace {
  Eigen::VectorXd normal;
  double offset = 0.0;

  Halfspace() = default;
  Halfspace(Eigen::VectorXd n, double a) : normal(std::move(n)), offset(a) {}
  int dim() const { return static_cast<int>(normal.size()); }
};

// Intersection of finitely many halfspaces.  Emptiness is not checked
// here; the planner runs an LP feasibility pass on load.
struct ConvexPolytope {
  std::vector<Halfspace> halfspaces;

  int dim() const { return halfspaces.empty() ? 0 : halfspaces.front().dim(); }

  // Axis-aligned box as 2*d halfspaces, low faces first.
  static ConvexPolytope box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
};

bool contains(const ConvexPolytope& poly, const Eigen::VectorXd& x,
              double tol = kMembershipTol);

// Labeled union of convex parts, optionally active only on a window of
// time steps (inclusive).
struct Region {
  std::string label;
  std::vector<ConvexPolytope> parts;
  std::optional<std::pair<int, int>> active_window;

  bool active_at(int t) const {
    return !active_window || (t >= active_window->first && t <= active_window->second);
  }
};

bool contains(const Region& region, const Eigen::VectorXd& x,
              double tol = kMembershipTol);

struct Box {
  Eigen::VectorXd lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Eigen::VectorXd& x, double tol = kMembershipTol) const;
};

struct Workspace {
  Box bounds;
  std::vector<Region> regions;

  const Region* find(const std::string& label) const;
};

// Labels of all active regions containing x at step t.  Throws
// std::invalid_argument on dimension mismatch.
std::set<std::string> label(const Workspace& w, const Eigen::VectorXd& x, int t);

// Atom trace of a position sequence; entry t = label(w, positions[t], t).
mtl::Trace trace_of(const Workspace& w, const std::vector<Eigen::VectorXd>& positions);

}  // namespace mtlplan::workspace
