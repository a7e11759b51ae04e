#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtlplan::mtl {

// Thrown on malformed formula text; line/column are 1-based.
struct ParseError : std::runtime_error {
  int line, column;
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line(line),
        column(column) {}
};

// Thrown when a trace is too short to decide a formula, or when an
// unbounded interval makes the required lookahead undefined.
struct HorizonError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Discrete-step interval [lo, hi]; hi absent means unbounded.
struct Interval {
  int lo = 0;
  std::optional<int> hi;

  Interval() = default;
  Interval(int lo_, int hi_) : lo(lo_), hi(hi_) {
    if (lo_ < 0 || hi_ < lo_) throw std::invalid_argument("bad interval bounds");
  }
  static Interval unbounded(int lo_ = 0) {
    if (lo_ < 0) throw std::invalid_argument("bad interval bounds");
    Interval i;
    i.lo = lo_;
    return i;
  }
  bool bounded() const { return hi.has_value(); }
  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

enum class Op { True, Atom, Not, And, Or, Next, Until, Eventually, Always };

// Immutable formula handle with structural sharing.
class Formula {
 public:
  struct Node {
    Op op;
    std::string label;            // Atom only
    Interval ivl;                 // Until/Eventually/Always only
    std::vector<Formula> kids;
  };

  Formula() = default;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  bool valid() const { return node_ != nullptr; }
  Op op() const { return node_->op; }
  const std::string& label() const { return node_->label; }
  const Interval& interval() const { return node_->ivl; }
  const std::vector<Formula>& children() const { return node_->kids; }
  const Formula& child(std::size_t i) const { return node_->kids[i]; }
  const Node* id() const { return node_.get(); }

  bool operator==(const Formula& o) const;  // structural

 private:
  std::shared_ptr<const Node> node_;
};

Formula make_true();
Formula make_atom(std::string name);
Formula make_not(Formula f);
Formula make_and(std::vector<Formula> kids);   // requires >= 2 children
Formula make_or(std::vector<Formula> kids);    // requires >= 2 children
Formula make_next(Formula f);
Formula make_until(Interval i, Formula lhs, Formula rhs);
Formula make_eventually(Interval i, Formula f);
Formula make_always(Interval i, Formula f);

// Grammar:  true | atom | !f | f & f | f | f | f -> f | X f
//           F[a,b] f | G[a,b] f | G f | f U[a,b] f | ( f )
// Atoms match [A-Za-z][A-Za-z0-9_']*.  Precedence, tightest first:
// unary (!, X, F, G), U, &, |, ->.  U and -> associate to the right;
// & and | chains flatten into one n-ary node.  `a -> b` desugars to
// `!a | b`.  Bare G means G[0,inf); the extended forms F[a,], G[a,],
// U[a,] write an unbounded upper bound.  A bare G or X is read as an
// operator when a formula can start after it, and as an atom otherwise
// (so `G G` is always-G while `A & G` refers to the atom G).
Formula parse(const std::string& text);

// Serializer; parse(to_string(f)) reproduces f structurally.
std::string to_string(const Formula& f);

// Negation normal form: Not appears only on Atom/True leaves.  Negated
// Until rewrites into Always/Eventually/Until over negated operands.
Formula to_nnf(const Formula& f);
bool is_nnf(const Formula& f);

// Minimal trace length H such that evaluation at offset 0 is decidable
// for every trace of length H+1.  Throws HorizonError on unbounded
// intervals; substitute them first via clip_unbounded.
int horizon(const Formula& f);

// Replaces every unbounded interval upper bound so that the formula's
// total lookahead fits within `budget` steps.  Bounded intervals are
// left untouched.
Formula clip_unbounded(const Formula& f, int budget);

std::set<std::string> atoms_of(const Formula& f);

// Trace entry t holds the atoms true at step t.
using Trace = std::vector<std::set<std::string>>;

// Pointwise satisfaction at offset t.  Until: exists t' in the interval
// with the right operand true at t+t' and the left operand true at every
// step from t up to (not including) t+t'.  Throws HorizonError when the
// trace is too short to decide the formula at t.
bool evaluate(const Formula& f, const Trace& trace, int t);

}  // namespace mtlplan::mtl
