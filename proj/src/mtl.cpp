#include "mtlplan/mtl.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace mtlplan::mtl {

namespace {

Formula node(Op op, std::string label, Interval ivl, std::vector<Formula> kids) {
  auto n = std::make_shared<Formula::Node>();
  n->op = op;
  n->label = std::move(label);
  n->ivl = ivl;
  n->kids = std::move(kids);
  return Formula(std::move(n));
}

}  // namespace

bool Formula::operator==(const Formula& o) const {
  if (node_ == o.node_) return true;
  if (!node_ || !o.node_) return false;
  if (node_->op != o.node_->op || node_->label != o.node_->label ||
      !(node_->ivl == o.node_->ivl) || node_->kids.size() != o.node_->kids.size())
    return false;
  for (std::size_t i = 0; i < node_->kids.size(); ++i)
    if (!(node_->kids[i] == o.node_->kids[i])) return false;
  return true;
}

Formula make_true() { return node(Op::True, "", {}, {}); }

Formula make_atom(std::string name) {
  if (name.empty()) throw std::invalid_argument("empty atom name");
  return node(Op::Atom, std::move(name), {}, {});
}

Formula make_not(Formula f) { return node(Op::Not, "", {}, {std::move(f)}); }

Formula make_and(std::vector<Formula> kids) {
  if (kids.size() < 2) throw std::invalid_argument("And requires >= 2 children");
  return node(Op::And, "", {}, std::move(kids));
}

Formula make_or(std::vector<Formula> kids) {
  if (kids.size() < 2) throw std::invalid_argument("Or requires >= 2 children");
  return node(Op::Or, "", {}, std::move(kids));
}

Formula make_next(Formula f) { return node(Op::Next, "", {}, {std::move(f)}); }

Formula make_until(Interval i, Formula lhs, Formula rhs) {
  return node(Op::Until, "", i, {std::move(lhs), std::move(rhs)});
}

Formula make_eventually(Interval i, Formula f) {
  return node(Op::Eventually, "", i, {std::move(f)});
}

Formula make_always(Interval i, Formula f) {
  return node(Op::Always, "", i, {std::move(f)});
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok {
  True, Ident, Not, And, Or, Implies, LParen, RParen,
  Eventually, AlwaysBounded, Until, End
};

struct Token {
  Tok kind;
  std::string text;     // Ident
  Interval ivl;         // Eventually/AlwaysBounded/Until
  int line, col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) { advance(); }

  const Token& peek() const { return cur_; }
  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, int line, int col) const {
    throw ParseError(msg, line, col);
  }

  void skip_ws() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  int read_number() {
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      fail("expected number in interval", line_, col_);
    long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 1000000) fail("interval bound too large", line_, col_);
      ++pos_;
      ++col_;
    }
    return static_cast<int>(v);
  }

  void expect_char(char c) {
    if (pos_ >= s_.size() || s_[pos_] != c)
      fail(std::string("expected '") + c + "' in interval", line_, col_);
    ++pos_;
    ++col_;
  }

  // "[a,b]" or "[a,]" for an unbounded upper bound; called past '['.
  Interval read_interval(int line, int col) {
    skip_ws();
    int lo = read_number();
    skip_ws();
    expect_char(',');
    skip_ws();
    Interval out;
    if (pos_ < s_.size() && s_[pos_] == ']') {
      out = Interval::unbounded(lo);
    } else {
      int hi = read_number();
      if (hi < lo) fail("interval upper bound below lower bound", line, col);
      out = Interval(lo, hi);
    }
    skip_ws();
    expect_char(']');
    return out;
  }

  void advance() {
    skip_ws();
    int line = line_, col = col_;
    if (pos_ >= s_.size()) {
      cur_ = {Tok::End, "", {}, line, col};
      return;
    }
    char c = s_[pos_];
    auto single = [&](Tok k) {
      ++pos_;
      ++col_;
      cur_ = {k, "", {}, line, col};
    };
    switch (c) {
      case '!': single(Tok::Not); return;
      case '&': single(Tok::And); return;
      case '|': single(Tok::Or); return;
      case '(': single(Tok::LParen); return;
      case ')': single(Tok::RParen); return;
      case '-':
        if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '>') {
          pos_ += 2;
          col_ += 2;
          cur_ = {Tok::Implies, "", {}, line, col};
          return;
        }
        fail("stray '-'", line, col);
      default: break;
    }
    if (!ident_start(c)) fail(std::string("unexpected character '") + c + "'", line, col);
    std::string name;
    while (pos_ < s_.size() && ident_char(s_[pos_])) {
      name.push_back(s_[pos_]);
      ++pos_;
      ++col_;
    }
    if (pos_ < s_.size() && s_[pos_] == '[') {
      ++pos_;
      ++col_;
      Interval ivl = read_interval(line, col);
      if (name == "F") {
        cur_ = {Tok::Eventually, "", ivl, line, col};
      } else if (name == "G") {
        cur_ = {Tok::AlwaysBounded, "", ivl, line, col};
      } else if (name == "U") {
        cur_ = {Tok::Until, "", ivl, line, col};
      } else {
        fail("unknown operator '" + name + "[...]'", line, col);
      }
      return;
    }
    if (name == "true") {
      cur_ = {Tok::True, "", {}, line, col};
      return;
    }
    cur_ = {Tok::Ident, name, {}, line, col};
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token cur_;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  Formula run() {
    Formula f = parse_implies();
    const Token& t = lex_.peek();
    if (t.kind != Tok::End)
      throw ParseError("unexpected trailing input", t.line, t.col);
    return f;
  }

 private:
  // Whether the lookahead token can begin a formula; decides operator vs
  // atom for bare G and X.
  bool starts_formula() const {
    switch (lex_.peek().kind) {
      case Tok::True:
      case Tok::Ident:
      case Tok::Not:
      case Tok::LParen:
      case Tok::Eventually:
      case Tok::AlwaysBounded:
        return true;
      default:
        return false;
    }
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (lex_.peek().kind == Tok::Implies) {
      lex_.take();
      Formula rhs = parse_implies();
      return make_or({make_not(std::move(lhs)), std::move(rhs)});
    }
    return lhs;
  }

  Formula parse_or() {
    std::vector<Formula> kids;
    kids.push_back(parse_and());
    while (lex_.peek().kind == Tok::Or) {
      lex_.take();
      kids.push_back(parse_and());
    }
    if (kids.size() == 1) return std::move(kids.front());
    return make_or(std::move(kids));
  }

  Formula parse_and() {
    std::vector<Formula> kids;
    kids.push_back(parse_until());
    while (lex_.peek().kind == Tok::And) {
      lex_.take();
      kids.push_back(parse_until());
    }
    if (kids.size() == 1) return std::move(kids.front());
    return make_and(std::move(kids));
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    if (lex_.peek().kind == Tok::Until) {
      Token t = lex_.take();
      Formula rhs = parse_until();
      return make_until(t.ivl, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Formula parse_unary() {
    Token t = lex_.peek();
    switch (t.kind) {
      case Tok::Not:
        lex_.take();
        return make_not(parse_unary());
      case Tok::Eventually: {
        lex_.take();
        return make_eventually(t.ivl, parse_unary());
      }
      case Tok::AlwaysBounded: {
        lex_.take();
        return make_always(t.ivl, parse_unary());
      }
      case Tok::LParen: {
        lex_.take();
        Formula f = parse_implies();
        const Token& r = lex_.peek();
        if (r.kind != Tok::RParen) throw ParseError("expected ')'", r.line, r.col);
        lex_.take();
        return f;
      }
      case Tok::True:
        lex_.take();
        return make_true();
      case Tok::Ident: {
        lex_.take();
        if (t.text == "G" && starts_formula())
          return make_always(Interval::unbounded(), parse_unary());
        if (t.text == "X" && starts_formula()) return make_next(parse_unary());
        return make_atom(t.text);
      }
      default:
        throw ParseError("expected formula", t.line, t.col);
    }
  }

  Lexer lex_;
};

}  // namespace

Formula parse(const std::string& text) { return Parser(text).run(); }

// ---------------------------------------------------------------------------
// Printer

namespace {

// Lower binds tighter.
int precedence(Op op) {
  switch (op) {
    case Op::True:
    case Op::Atom:
      return 0;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
      return 1;
    case Op::Until:
      return 2;
    case Op::And:
      return 3;
    case Op::Or:
      return 4;
  }
  return 5;
}

void print_interval(std::ostream& os, const Interval& i) {
  os << '[' << i.lo << ',';
  if (i.hi) os << *i.hi;
  os << ']';
}

void print_rec(std::ostream& os, const Formula& f, int limit) {
  int prec = precedence(f.op());
  bool parens = prec > limit;
  if (parens) os << '(';
  switch (f.op()) {
    case Op::True:
      os << "true";
      break;
    case Op::Atom:
      os << f.label();
      break;
    case Op::Not:
      os << '!';
      print_rec(os, f.child(0), 1);
      break;
    case Op::Next:
      os << "X ";
      print_rec(os, f.child(0), 1);
      break;
    case Op::Eventually:
      os << 'F';
      print_interval(os, f.interval());
      os << ' ';
      print_rec(os, f.child(0), 1);
      break;
    case Op::Always:
      os << 'G';
      if (!(f.interval().lo == 0 && !f.interval().bounded()))
        print_interval(os, f.interval());
      os << ' ';
      print_rec(os, f.child(0), 1);
      break;
    case Op::Until:
      print_rec(os, f.child(0), 1);
      os << " U";
      print_interval(os, f.interval());
      os << ' ';
      print_rec(os, f.child(1), 2);
      break;
    case Op::And:
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) os << " & ";
        print_rec(os, f.child(i), 2);
      }
      break;
    case Op::Or:
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) os << " | ";
        print_rec(os, f.child(i), 3);
      }
      break;
  }
  if (parens) os << ')';
}

}  // namespace

std::string to_string(const Formula& f) {
  std::ostringstream os;
  print_rec(os, f, 5);
  return os.str();
}

// ---------------------------------------------------------------------------
// Negation normal form

namespace {

Formula nnf_pos(const Formula& f);
Formula nnf_neg(const Formula& f);

Formula nnf_pos(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::Atom:
      return f;
    case Op::Not:
      return nnf_neg(f.child(0));
    case Op::And:
    case Op::Or: {
      std::vector<Formula> kids;
      kids.reserve(f.children().size());
      for (const auto& k : f.children()) kids.push_back(nnf_pos(k));
      return f.op() == Op::And ? make_and(std::move(kids)) : make_or(std::move(kids));
    }
    case Op::Next:
      return make_next(nnf_pos(f.child(0)));
    case Op::Eventually:
      return make_eventually(f.interval(), nnf_pos(f.child(0)));
    case Op::Always:
      return make_always(f.interval(), nnf_pos(f.child(0)));
    case Op::Until:
      return make_until(f.interval(), nnf_pos(f.child(0)), nnf_pos(f.child(1)));
  }
  throw std::logic_error("nnf_pos: bad op");
}

Formula nnf_neg(const Formula& f) {
  switch (f.op()) {
    case Op::True:
      return make_not(make_true());
    case Op::Atom:
      return make_not(f);
    case Op::Not:
      return nnf_pos(f.child(0));
    case Op::And:
    case Op::Or: {
      std::vector<Formula> kids;
      kids.reserve(f.children().size());
      for (const auto& k : f.children()) kids.push_back(nnf_neg(k));
      return f.op() == Op::And ? make_or(std::move(kids)) : make_and(std::move(kids));
    }
    case Op::Next:
      return make_next(nnf_neg(f.child(0)));
    case Op::Eventually:
      return make_always(f.interval(), nnf_neg(f.child(0)));
    case Op::Always:
      return make_eventually(f.interval(), nnf_neg(f.child(0)));
    case Op::Until: {
      // not (p U[a,b] q)  =  G[a,b] !q
      //                      | F[0,a-1] !p                       (a >= 1)
      //                      | F[a,a] (!q U[0,b-a-1] (!p & !q))  (b >= a+1)
      // The last disjunct says: some step l in [a, b-1] has !p with !q
      // holding from a through l; shifting by a turns it into an Until
      // anchored at the operator time.
      const Interval& I = f.interval();
      Formula np = nnf_neg(f.child(0));
      Formula nq = nnf_neg(f.child(1));
      std::vector<Formula> parts;
      parts.push_back(make_always(I, nq));
      if (I.lo >= 1) parts.push_back(make_eventually(Interval(0, I.lo - 1), np));
      bool tail = !I.bounded() || *I.hi >= I.lo + 1;
      if (tail) {
        Interval shifted = I.bounded() ? Interval(0, *I.hi - I.lo - 1)
                                       : Interval::unbounded(0);
        Formula u = make_until(shifted, nq, make_and({np, nq}));
        parts.push_back(I.lo == 0 ? u : make_eventually(Interval(I.lo, I.lo), u));
      }
      if (parts.size() == 1) return std::move(parts.front());
      return make_or(std::move(parts));
    }
  }
  throw std::logic_error("nnf_neg: bad op");
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf_pos(f); }

bool is_nnf(const Formula& f) {
  if (f.op() == Op::Not)
    return f.child(0).op() == Op::Atom || f.child(0).op() == Op::True;
  for (const auto& k : f.children())
    if (!is_nnf(k)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Horizon and interval clipping

int horizon(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::Atom:
      return 0;
    case Op::Not:
      return horizon(f.child(0));
    case Op::And:
    case Op::Or: {
      int h = 0;
      for (const auto& k : f.children()) h = std::max(h, horizon(k));
      return h;
    }
    case Op::Next:
      return 1 + horizon(f.child(0));
    case Op::Eventually:
    case Op::Always: {
      if (!f.interval().bounded())
        throw HorizonError("unbounded interval has no finite horizon");
      return *f.interval().hi + horizon(f.child(0));
    }
    case Op::Until: {
      if (!f.interval().bounded())
        throw HorizonError("unbounded interval has no finite horizon");
      int b = *f.interval().hi;
      int h = b + horizon(f.child(1));
      if (b >= 1) h = std::max(h, b - 1 + horizon(f.child(0)));
      return h;
    }
  }
  throw std::logic_error("horizon: bad op");
}

namespace {

// Returns the clipped formula and its horizon.
std::pair<Formula, int> clip_rec(const Formula& f, int budget) {
  budget = std::max(budget, 0);
  switch (f.op()) {
    case Op::True:
    case Op::Atom:
      return {f, 0};
    case Op::Not: {
      auto [c, h] = clip_rec(f.child(0), budget);
      return {make_not(std::move(c)), h};
    }
    case Op::And:
    case Op::Or: {
      std::vector<Formula> kids;
      int h = 0;
      for (const auto& k : f.children()) {
        auto [c, hc] = clip_rec(k, budget);
        kids.push_back(std::move(c));
        h = std::max(h, hc);
      }
      Formula out = f.op() == Op::And ? make_and(std::move(kids)) : make_or(std::move(kids));
      return {std::move(out), h};
    }
    case Op::Next: {
      auto [c, h] = clip_rec(f.child(0), budget - 1);
      return {make_next(std::move(c)), 1 + h};
    }
    case Op::Eventually:
    case Op::Always: {
      const Interval& I = f.interval();
      int child_budget = I.bounded() ? budget - *I.hi : budget - I.lo;
      auto [c, hc] = clip_rec(f.child(0), child_budget);
      Interval J = I.bounded() ? I : Interval(I.lo, std::max(I.lo, budget - hc));
      Formula out = f.op() == Op::Eventually ? make_eventually(J, std::move(c))
                                             : make_always(J, std::move(c));
      return {std::move(out), *J.hi + hc};
    }
    case Op::Until: {
      const Interval& I = f.interval();
      int child_budget = I.bounded() ? budget - *I.hi : budget - I.lo;
      auto [p, hp] = clip_rec(f.child(0), child_budget);
      auto [q, hq] = clip_rec(f.child(1), child_budget);
      Interval J = I.bounded() ? I : Interval(I.lo, std::max(I.lo, budget - std::max(hp, hq)));
      int b = *J.hi;
      int h = b + hq;
      if (b >= 1) h = std::max(h, b - 1 + hp);
      return {make_until(J, std::move(p), std::move(q)), h};
    }
  }
  throw std::logic_error("clip: bad op");
}

}  // namespace

Formula clip_unbounded(const Formula& f, int budget) {
  if (budget < 0) throw std::invalid_argument("negative clip budget");
  return clip_rec(f, budget).first;
}

std::set<std::string> atoms_of(const Formula& f) {
  std::set<std::string> out;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula cur = stack.back();
    stack.pop_back();
    if (cur.op() == Op::Atom) out.insert(cur.label());
    for (const auto& k : cur.children()) stack.push_back(k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Monitor

namespace {

bool eval_rec(const Formula& f, const Trace& trace, int t) {
  switch (f.op()) {
    case Op::True:
      return true;
    case Op::Atom:
      return trace[t].count(f.label()) > 0;
    case Op::Not:
      return !eval_rec(f.child(0), trace, t);
    case Op::And:
      for (const auto& k : f.children())
        if (!eval_rec(k, trace, t)) return false;
      return true;
    case Op::Or:
      for (const auto& k : f.children())
        if (eval_rec(k, trace, t)) return true;
      return false;
    case Op::Next:
      return eval_rec(f.child(0), trace, t + 1);
    case Op::Eventually: {
      const Interval& I = f.interval();
      for (int d = I.lo; d <= *I.hi; ++d)
        if (eval_rec(f.child(0), trace, t + d)) return true;
      return false;
    }
    case Op::Always: {
      const Interval& I = f.interval();
      for (int d = I.lo; d <= *I.hi; ++d)
        if (!eval_rec(f.child(0), trace, t + d)) return false;
      return true;
    }
    case Op::Until: {
      const Interval& I = f.interval();
      // Maintain "lhs holds on [t, t+d)" incrementally.
      bool prefix = true;
      for (int d = 0; d < I.lo; ++d) prefix = prefix && eval_rec(f.child(0), trace, t + d);
      for (int d = I.lo; d <= *I.hi; ++d) {
        if (prefix && eval_rec(f.child(1), trace, t + d)) return true;
        if (!prefix) return false;
        if (d < *I.hi) prefix = prefix && eval_rec(f.child(0), trace, t + d);
      }
      return false;
    }
  }
  throw std::logic_error("evaluate: bad op");
}

}  // namespace

bool evaluate(const Formula& f, const Trace& trace, int t) {
  if (t < 0) throw std::invalid_argument("negative trace offset");
  int h = horizon(f);  // throws on unbounded intervals
  if (t + h >= static_cast<int>(trace.size()))
    throw HorizonError("trace too short: need step " + std::to_string(t + h) +
                       " but trace ends at " + std::to_string(trace.size() - 1));
  return eval_rec(f, trace, t);
}

}  // namespace mtlplan::mtl
