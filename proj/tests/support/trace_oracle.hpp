#pragma once

// Reference semantics for the temporal monitor, written independently of
// the library implementation: Until is the native clause with explicit
// quantifier loops, Eventually derives from (true U phi), Always from
// !(true U !phi), And from !( !a | !b ).  Used to cross-check
// mtl::evaluate and the NNF transform.

#include <vector>

#include "mtlplan/mtl.hpp"

namespace trace_oracle {

using mtlplan::mtl::Formula;
using mtlplan::mtl::Interval;
using mtlplan::mtl::Op;
using mtlplan::mtl::Trace;

inline bool holds(const Formula& f, const Trace& tr, int t);

inline bool until_holds(const Interval& I, const Formula& p, const Formula& q,
                        const Trace& tr, int t) {
  for (int tp = I.lo; tp <= *I.hi; ++tp) {
    if (!holds(q, tr, t + tp)) continue;
    bool prefix = true;
    for (int tpp = 0; tpp < tp; ++tpp)
      if (!holds(p, tr, t + tpp)) {
        prefix = false;
        break;
      }
    if (prefix) return true;
  }
  return false;
}

inline bool holds(const Formula& f, const Trace& tr, int t) {
  switch (f.op()) {
    case Op::True:
      return true;
    case Op::Atom:
      return tr[t].count(f.label()) > 0;
    case Op::Not:
      return !holds(f.child(0), tr, t);
    case Op::Or: {
      bool any = false;
      for (const auto& k : f.children()) any = any || holds(k, tr, t);
      return any;
    }
    case Op::And: {
      // !( !a | !b | ... )
      bool any_false = false;
      for (const auto& k : f.children()) any_false = any_false || !holds(k, tr, t);
      return !any_false;
    }
    case Op::Next:
      return holds(f.child(0), tr, t + 1);
    case Op::Until:
      return until_holds(f.interval(), f.child(0), f.child(1), tr, t);
    case Op::Eventually:
      return until_holds(f.interval(), mtlplan::mtl::make_true(), f.child(0), tr, t);
    case Op::Always:
      return !until_holds(f.interval(), mtlplan::mtl::make_true(),
                          mtlplan::mtl::make_not(f.child(0)), tr, t);
  }
  return false;
}

// All traces of exactly `len` steps over the atom alphabet.
inline std::vector<Trace> all_traces(const std::vector<std::string>& atoms, int len) {
  std::size_t combos = std::size_t{1} << atoms.size();
  std::vector<Trace> out;
  std::vector<std::size_t> digits(len, 0);
  while (true) {
    Trace tr(len);
    for (int i = 0; i < len; ++i)
      for (std::size_t a = 0; a < atoms.size(); ++a)
        if (digits[i] >> a & 1) tr[i].insert(atoms[a]);
    out.push_back(std::move(tr));
    int pos = 0;
    while (pos < len) {
      if (++digits[pos] < combos) break;
      digits[pos] = 0;
      ++pos;
    }
    if (pos == len) break;
  }
  return out;
}

// Fixed formula family over atoms {p, q}: every shape of depth <= 2 plus a
// systematic layer of depth-3 combinations, intervals drawn from a small set.
inline std::vector<Formula> formula_family() {
  using namespace mtlplan::mtl;
  std::vector<Interval> ivls = {Interval(0, 1), Interval(0, 2), Interval(1, 2)};
  std::vector<Formula> depth1 = {make_atom("p"), make_atom("q"), make_true()};
  std::vector<Formula> depth2;
  for (const auto& a : depth1) {
    depth2.push_back(make_not(a));
    depth2.push_back(make_next(a));
    for (const auto& I : ivls) {
      depth2.push_back(make_eventually(I, a));
      depth2.push_back(make_always(I, a));
    }
    for (const auto& b : depth1) {
      depth2.push_back(make_and({a, b}));
      depth2.push_back(make_or({a, b}));
      for (const auto& I : ivls) depth2.push_back(make_until(I, a, b));
    }
  }
  // Representative depth-2 picks for the third layer.
  std::vector<Formula> picks = {
      make_not(make_atom("p")),
      make_next(make_atom("q")),
      make_eventually(Interval(0, 1), make_atom("p")),
      make_always(Interval(0, 2), make_atom("q")),
      make_and({make_atom("p"), make_atom("q")}),
      make_or({make_atom("p"), make_not(make_atom("q"))}),
      make_until(Interval(0, 2), make_atom("p"), make_atom("q")),
      make_until(Interval(1, 2), make_not(make_atom("p")), make_atom("q")),
  };
  std::vector<Formula> out = depth1;
  out.insert(out.end(), depth2.begin(), depth2.end());
  for (const auto& a : picks) {
    out.push_back(make_not(a));
    out.push_back(make_eventually(Interval(0, 1), a));
    out.push_back(make_always(Interval(0, 2), a));
    for (const auto& b : picks) {
      out.push_back(make_and({a, b}));
      out.push_back(make_until(Interval(0, 2), a, b));
    }
  }
  return out;
}

}  // namespace trace_oracle
