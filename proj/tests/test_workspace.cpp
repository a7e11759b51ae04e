#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mtlplan/workspace.hpp"

using namespace mtlplan::workspace;

namespace {

Eigen::VectorXd vec3(double x, double y, double z) {
  Eigen::VectorXd v(3);
  v << x, y, z;
  return v;
}

Region box_region(const std::string& label, double x0, double x1, double y0, double y1,
                  double z0, double z1) {
  Region r;
  r.label = label;
  r.parts.push_back(ConvexPolytope::box(vec3(x0, y0, z0), vec3(x1, y1, z1)));
  return r;
}

}  // namespace

TEST_CASE("box membership matches interval checks") {
  auto poly = ConvexPolytope::box(vec3(0, 0, 0), vec3(2, 3, 1));
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd p = vec3(u(rng), u(rng), u(rng));
    bool expect = p[0] >= 0 && p[0] <= 2 && p[1] >= 0 && p[1] <= 3 && p[2] >= 0 && p[2] <= 1;
    CHECK(contains(poly, p) == expect);
  }
}

TEST_CASE("membership tolerance is closed on faces") {
  auto poly = ConvexPolytope::box(vec3(0, 0, 0), vec3(1, 1, 1));
  CHECK(contains(poly, vec3(1.0, 0.5, 0.5)));
  CHECK(contains(poly, vec3(1.0 + 0.5e-9, 0.5, 0.5)));
  CHECK_FALSE(contains(poly, vec3(1.0 + 1e-6, 0.5, 0.5)));
  CHECK_FALSE(contains(poly, vec3(-1e-6, 0.5, 0.5)));
}

TEST_CASE("tolerance monotonicity") {
  auto poly = ConvexPolytope::box(vec3(0, 0, 0), vec3(1, 1, 1));
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd p = vec3(u(rng), u(rng), u(rng));
    if (contains(poly, p, 1e-9)) CHECK(contains(poly, p, 1e-6));
  }
}

TEST_CASE("union region and overlapping labels") {
  Workspace w;
  w.bounds = {vec3(0, 0, 0), vec3(10, 10, 3)};
  w.regions.push_back(box_region("A", 1, 3, 1, 3, 0, 3));
  // A' is the altitude band inside A's footprint.
  w.regions.push_back(box_region("A'", 1, 3, 1, 3, 1.4, 1.6));
  Region two;
  two.label = "O";
  two.parts.push_back(ConvexPolytope::box(vec3(5, 0, 0), vec3(6, 4, 3)));
  two.parts.push_back(ConvexPolytope::box(vec3(5, 6, 0), vec3(6, 10, 3)));
  w.regions.push_back(two);

  CHECK(label(w, vec3(2, 2, 1.5), 0) == std::set<std::string>{"A", "A'"});
  CHECK(label(w, vec3(2, 2, 0.5), 0) == std::set<std::string>{"A"});
  CHECK(label(w, vec3(5.5, 1, 1), 0) == std::set<std::string>{"O"});
  CHECK(label(w, vec3(5.5, 5, 1), 0).empty());  // the gap between the parts
  CHECK(label(w, vec3(9, 9, 1), 0).empty());
}

TEST_CASE("active window gates labeling") {
  Workspace w;
  w.bounds = {vec3(0, 0, 0), vec3(10, 10, 3)};
  Region r = box_region("E", 4, 6, 4, 6, 0, 3);
  r.active_window = {{2, 5}};
  w.regions.push_back(r);
  Eigen::VectorXd p = vec3(5, 5, 1);
  CHECK(label(w, p, 1).empty());
  CHECK(label(w, p, 2) == std::set<std::string>{"E"});
  CHECK(label(w, p, 5) == std::set<std::string>{"E"});
  CHECK(label(w, p, 6).empty());
}

TEST_CASE("trace_of maps a path through regions") {
  Workspace w;
  w.bounds = {vec3(0, 0, 0), vec3(10, 10, 3)};
  w.regions.push_back(box_region("A", 0, 2, 0, 2, 0, 3));
  w.regions.push_back(box_region("C", 3, 5, 0, 2, 0, 3));
  std::vector<Eigen::VectorXd> path = {vec3(1, 1, 1), vec3(2.5, 1, 1), vec3(4, 1, 1)};
  auto trace = trace_of(w, path);
  REQUIRE(trace.size() == 3);
  CHECK(trace[0] == std::set<std::string>{"A"});
  CHECK(trace[1].empty());
  CHECK(trace[2] == std::set<std::string>{"C"});
}

TEST_CASE("dimension mismatch throws") {
  auto poly = ConvexPolytope::box(vec3(0, 0, 0), vec3(1, 1, 1));
  Eigen::VectorXd p2(2);
  p2 << 0.5, 0.5;
  CHECK_THROWS_AS(contains(poly, p2), std::invalid_argument);
  Eigen::VectorXd lo(2), hi(3);
  lo << 0, 0;
  hi << 1, 1, 1;
  CHECK_THROWS_AS(ConvexPolytope::box(lo, hi), std::invalid_argument);
}

TEST_CASE("general halfspace polytope") {
  // Triangle x >= 0, y >= 0, x + y <= 1 in 2-D.
  ConvexPolytope tri;
  Eigen::VectorXd n1(2), n2(2), n3(2);
  n1 << -1, 0;
  n2 << 0, -1;
  n3 << 1, 1;
  tri.halfspaces = {{n1, 0.0}, {n2, 0.0}, {n3, 1.0}};
  Eigen::VectorXd in(2), out(2);
  in << 0.25, 0.25;
  out << 0.75, 0.75;
  CHECK(contains(tri, in));
  CHECK_FALSE(contains(tri, out));
}
