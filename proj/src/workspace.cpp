#include "mtlplan/workspace.hpp"

#include <stdexcept>

namespace mtlplan::workspace {

ConvexPolytope ConvexPolytope::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("box bound size mismatch");
  ConvexPolytope poly;
  int d = static_cast<int>(lo.size());
  for (int i = 0; i < d; ++i) {
    if (lo[i] > hi[i]) throw std::invalid_argument("box with inverted bounds");
    Eigen::VectorXd n = Eigen::VectorXd::Zero(d);
    n[i] = -1.0;
    poly.halfspaces.emplace_back(n, -lo[i]);  // x_i >= lo
  }
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd n = Eigen::VectorXd::Zero(d);
    n[i] = 1.0;
    poly.halfspaces.emplace_back(n, hi[i]);   // x_i <= hi
  }
  return poly;
}

bool contains(const ConvexPolytope& poly, const Eigen::VectorXd& x, double tol) {
  for (const auto& h : poly.halfspaces) {
    if (h.normal.size() != x.size())
      throw std::invalid_argument("halfspace/point dimension mismatch");
    if (h.normal.dot(x) > h.offset + tol) return false;
  }
  return true;
}

bool contains(const Region& region, const Eigen::VectorXd& x, double tol) {
  for (const auto& part : region.parts)
    if (contains(part, x, tol)) return true;
  return false;
}

bool Box::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lo.size()) throw std::invalid_argument("box/point dimension mismatch");
  for (int i = 0; i < lo.size(); ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  return true;
}

const Region* Workspace::find(const std::string& label_) const {
  for (const auto& r : regions)
    if (r.label == label_) return &r;
  return nullptr;
}

std::set<std::string> label(const Workspace& w, const Eigen::VectorXd& x, int t) {
  std::set<std::string> out;
  for (const auto& r : w.regions)
    if (r.active_at(t) && contains(r, x)) out.insert(r.label);
  return out;
}

mtl::Trace trace_of(const Workspace& w, const std::vector<Eigen::VectorXd>& positions) {
  mtl::Trace trace;
  trace.reserve(positions.size());
  for (std::size_t t = 0; t < positions.size(); ++t)
    trace.push_back(label(w, positions[t], static_cast<int>(t)));
  return trace;
}

}  // namespace mtlplan::workspace
