#include "mtlplan/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mtlplan::milp {

namespace {

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool valid_name(const std::string& s) {
  if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.';
  });
}

void write_terms(std::ostream& os, const std::vector<Term>& terms,
                 const std::vector<Variable>& vars, double constant) {
  int written = 0;
  auto piece = [&](double coef, const std::string& name) {
    if (written > 0 && written % 8 == 0) os << "\n ";
    os << (coef < 0 ? (written ? " - " : " -") : (written ? " + " : " "));
    os << fmt(std::abs(coef));
    if (!name.empty()) os << ' ' << name;
    ++written;
  };
  for (const auto& t : terms) piece(t.coef, vars[t.var].name);
  if (constant != 0 || terms.empty()) piece(constant, "");
}

}  // namespace

void write_lp(const MilpModel& model, std::ostream& os) {
  model.validate();
  for (const auto& v : model.vars)
    if (!valid_name(v.name)) throw std::invalid_argument("unwritable variable name " + v.name);
  for (const auto& c : model.constraints) {
    if (!valid_name(c.name)) throw std::invalid_argument("unwritable row name " + c.name);
    if (c.terms.empty()) throw std::invalid_argument("row " + c.name + " has no terms");
  }

  os << "\\ " << model.name << "\n";
  os << "Minimize\n obj:";
  write_terms(os, model.objective, model.vars, model.objective_constant);
  os << "\nSubject To\n";
  for (const auto& c : model.constraints) {
    os << ' ' << c.name << ':';
    write_terms(os, c.terms, model.vars, 0);
    os << (c.rel == Relation::LessEq ? " <= " : " = ") << fmt(c.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : model.vars) {
    os << ' ';
    if (v.lower == v.upper)
      os << v.name << " = " << fmt(v.lower);
    else if (v.lower == -kInf && v.upper == kInf)
      os << v.name << " free";
    else if (v.upper == kInf)
      os << v.name << " >= " << fmt(v.lower);
    else if (v.lower == -kInf)
      os << "-infinity <= " << v.name << " <= " << fmt(v.upper);
    else
      os << fmt(v.lower) << " <= " << v.name << " <= " << fmt(v.upper);
    os << "\n";
  }
  if (model.num_binaries() > 0) {
    os << "Binaries\n";
    int on_line = 0;
    for (const auto& v : model.vars) {
      if (v.kind != VarKind::Binary) continue;
      os << (on_line == 0 ? " " : " ") << v.name;
      if (++on_line == 10) {
        os << "\n";
        on_line = 0;
      }
    }
    if (on_line) os << "\n";
  }
  os << "End\n";
}

std::string write_lp_string(const MilpModel& model) {
  std::ostringstream os;
  write_lp(model, os);
  return os.str();
}

namespace {

struct Tok {
  enum Kind { Word, Num, Punct, Eof } kind = Eof;
  std::string text;
  double value = 0;
  int line = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) { tokenize(); }

  const Tok& peek(int ahead = 0) const {
    const size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : eof_;
  }
  Tok next() {
    const Tok t = peek();
    if (pos_ < toks_.size()) ++pos_;
    return t;
  }

 private:
  void tokenize() {
    int line = 1;
    size_t i = 0;
    while (i < s_.size()) {
      const char c = s_[i];
      if (c == '\n') {
        ++line;
        ++i;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '\\') {
        while (i < s_.size() && s_[i] != '\n') ++i;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        char* end = nullptr;
        const double v = std::strtod(s_.c_str() + i, &end);
        const size_t len = end - (s_.c_str() + i);
        if (len == 0) throw std::runtime_error("bad number at line " + std::to_string(line));
        toks_.push_back({Tok::Num, s_.substr(i, len), v, line});
        i += len;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_' || s_[j] == '.'))
          ++j;
        toks_.push_back({Tok::Word, s_.substr(i, j - i), 0, line});
        i = j;
      } else if (c == '<' || c == '>' || c == '=') {
        size_t j = i + 1;
        if (j < s_.size() && (s_[j] == '=' || s_[j] == '<' || s_[j] == '>')) ++j;
        std::string op = s_.substr(i, j - i);
        if (op == "=<") op = "<=";
        if (op == "=>") op = ">=";
        if (op == "<") op = "<=";
        if (op == ">") op = ">=";
        toks_.push_back({Tok::Punct, op, 0, line});
        i = j;
      } else if (c == '+' || c == '-' || c == ':') {
        toks_.push_back({Tok::Punct, std::string(1, c), 0, line});
        ++i;
      } else {
        throw std::runtime_error("unexpected character '" + std::string(1, c) + "' at line " +
                                 std::to_string(line));
      }
    }
  }

  std::string s_;
  std::vector<Tok> toks_;
  size_t pos_ = 0;
  Tok eof_;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_section_word(const std::string& w) {
  static const char* kWords[] = {"subject", "st",     "s.t.",   "such",     "bounds",
                                 "bound",   "binary", "binaries", "bin",    "general",
                                 "generals", "gen",   "end",    "minimize", "maximize",
                                 "min",     "max"};
  const std::string l = lower(w);
  return std::any_of(std::begin(kWords), std::end(kWords),
                     [&l](const char* k) { return l == k; });
}

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  MilpModel run() {
    const std::string sense = expect_word("objective sense");
    const std::string ls = lower(sense);
    bool maximize;
    if (ls == "minimize" || ls == "min")
      maximize = false;
    else if (ls == "maximize" || ls == "max")
      maximize = true;
    else
      throw std::runtime_error("expected Minimize or Maximize, got '" + sense + "'");

    skip_label();
    auto [obj, cst] = parse_expr();
    if (maximize) {
      for (auto& t : obj) t.coef = -t.coef;
      cst = -cst;
    }
    model_.objective = std::move(obj);
    model_.objective_constant = cst;

    expect_section({"subject", "st", "s.t.", "such"});
    parse_rows();
    while (lex_.peek().kind == Tok::Word) {
      const std::string sec = lower(lex_.peek().text);
      if (sec == "bounds" || sec == "bound") {
        lex_.next();
        parse_bounds();
      } else if (sec == "binary" || sec == "binaries" || sec == "bin") {
        lex_.next();
        parse_binaries();
      } else if (sec == "general" || sec == "generals" || sec == "gen") {
        throw std::runtime_error("general integer variables are not supported");
      } else if (sec == "end") {
        lex_.next();
        break;
      } else {
        throw std::runtime_error("unexpected section '" + lex_.peek().text + "'");
      }
    }
    if (lex_.peek().kind != Tok::Eof)
      throw std::runtime_error("trailing content at line " + std::to_string(lex_.peek().line));
    for (const int id : binary_ids_) {
      auto& v = model_.vars[id];
      v.kind = VarKind::Binary;
      if (!explicit_bounds_.count(id)) {
        v.lower = 0;
        v.upper = 1;
      } else {
        v.lower = std::max(v.lower, 0.0);
        v.upper = std::min(v.upper, 1.0);
      }
    }
    model_.validate();
    return model_;
  }

 private:
  int ensure_var(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    const int id = model_.add_var(name, VarKind::Continuous, 0.0, kInf);
    ids_.emplace(name, id);
    return id;
  }

  std::string expect_word(const std::string& what) {
    if (lex_.peek().kind != Tok::Word) runtimeerror(what);
    return lex_.next().text;
  }

  [[noreturn]] void runtimeerror(const std::string& what) const {
    throw std::runtime_error("expected " + what + " at line " + std::to_string(lex_.peek().line));
  }

  void expect_section(const std::vector<std::string>& names) {
    const std::string w = lower(expect_word("a section header"));
    if (std::find(names.begin(), names.end(), w) == names.end())
      throw std::runtime_error("unexpected token '" + w + "'");
    if (w == "subject" || w == "such") lex_.next();  // "To" / "That"
  }

  void skip_label() {
    if (lex_.peek().kind == Tok::Word && lex_.peek(1).kind == Tok::Punct &&
        lex_.peek(1).text == ":" && !is_section_word(lex_.peek().text)) {
      lex_.next();
      lex_.next();
    }
  }

  std::string take_label(int index) {
    if (lex_.peek().kind == Tok::Word && lex_.peek(1).kind == Tok::Punct &&
        lex_.peek(1).text == ":") {
      const std::string name = lex_.next().text;
      lex_.next();
      return name;
    }
    return "c" + std::to_string(index);
  }

  std::pair<std::vector<Term>, double> parse_expr() {
    std::vector<Term> terms;
    double constant = 0;
    while (true) {
      const Tok& t = lex_.peek();
      if (t.kind == Tok::Eof) break;
      if (t.kind == Tok::Punct && t.text != "+" && t.text != "-") break;
      if (t.kind == Tok::Word && is_section_word(t.text)) break;
      double sign = 1;
      while (lex_.peek().kind == Tok::Punct &&
             (lex_.peek().text == "+" || lex_.peek().text == "-")) {
        if (lex_.next().text == "-") sign = -sign;
      }
      const Tok head = lex_.next();
      if (head.kind == Tok::Num) {
        if (lex_.peek().kind == Tok::Word && !is_section_word(lex_.peek().text))
          terms.push_back({ensure_var(lex_.next().text), sign * head.value});
        else
          constant += sign * head.value;
      } else if (head.kind == Tok::Word) {
        terms.push_back({ensure_var(head.text), sign * 1.0});
      } else {
        throw std::runtime_error("unexpected token '" + head.text + "' at line " +
                                 std::to_string(head.line));
      }
    }
    return {std::move(terms), constant};
  }

  void parse_rows() {
    int index = 0;
    while (true) {
      const Tok& t = lex_.peek();
      if (t.kind == Tok::Eof) break;
      if (t.kind == Tok::Word && is_section_word(t.text) &&
          !(lex_.peek(1).kind == Tok::Punct && lex_.peek(1).text == ":"))
        break;
      const std::string name = take_label(index);
      auto [terms, cst] = parse_expr();
      if (lex_.peek().kind != Tok::Punct) runtimeerror("a relation after row " + name);
      const std::string rel = lex_.next().text;
      if (rel != "<=" && rel != ">=" && rel != "=")
        runtimeerror("a relation after row " + name);
      double sign = 1;
      while (lex_.peek().kind == Tok::Punct &&
             (lex_.peek().text == "+" || lex_.peek().text == "-")) {
        if (lex_.next().text == "-") sign = -sign;
      }
      if (lex_.peek().kind != Tok::Num) runtimeerror("a right-hand side for row " + name);
      double rhs = sign * lex_.next().value - cst;
      if (rel == ">=") {
        for (auto& tm : terms) tm.coef = -tm.coef;
        rhs = -rhs;
      }
      model_.add_constraint(name, std::move(terms),
                            rel == "=" ? Relation::Equal : Relation::LessEq, rhs);
      ++index;
    }
  }

  double parse_bound_value() {
    double sign = 1;
    while (lex_.peek().kind == Tok::Punct &&
           (lex_.peek().text == "+" || lex_.peek().text == "-")) {
      if (lex_.next().text == "-") sign = -sign;
    }
    const Tok t = lex_.next();
    if (t.kind == Tok::Num) return sign * t.value;
    if (t.kind == Tok::Word) {
      const std::string l = lower(t.text);
      if (l == "infinity" || l == "inf") return sign * kInf;
    }
    throw std::runtime_error("expected a bound value at line " + std::to_string(t.line));
  }

  void parse_bounds() {
    while (true) {
      const Tok& t = lex_.peek();
      if (t.kind == Tok::Eof) break;
      if (t.kind == Tok::Word && is_section_word(t.text)) break;
      if (t.kind == Tok::Word && lower(t.text) != "infinity" && lower(t.text) != "inf") {
        const int id = ensure_var(lex_.next().text);
        explicit_bounds_.insert(id);
        if (lex_.peek().kind == Tok::Word && lower(lex_.peek().text) == "free") {
          lex_.next();
          model_.vars[id].lower = -kInf;
          model_.vars[id].upper = kInf;
          continue;
        }
        if (lex_.peek().kind != Tok::Punct) runtimeerror("a relation in bounds");
        const std::string rel = lex_.next().text;
        const double v = parse_bound_value();
        if (rel == "<=")
          model_.vars[id].upper = v;
        else if (rel == ">=")
          model_.vars[id].lower = v;
        else if (rel == "=")
          model_.vars[id].lower = model_.vars[id].upper = v;
        else
          runtimeerror("a bound relation");
      } else {
        const double lo = parse_bound_value();
        if (lex_.peek().kind != Tok::Punct || lex_.next().text != "<=")
          runtimeerror("'<=' in a bounds line");
        if (lex_.peek().kind != Tok::Word) runtimeerror("a variable name in bounds");
        const int id = ensure_var(lex_.next().text);
        explicit_bounds_.insert(id);
        model_.vars[id].lower = lo;
        if (lex_.peek().kind == Tok::Punct && lex_.peek().text == "<=") {
          lex_.next();
          model_.vars[id].upper = parse_bound_value();
        }
      }
    }
  }

  void parse_binaries() {
    while (lex_.peek().kind == Tok::Word && !is_section_word(lex_.peek().text))
      binary_ids_.push_back(ensure_var(lex_.next().text));
  }

  Lexer lex_;
  MilpModel model_;
  std::map<std::string, int> ids_;
  std::set<int> explicit_bounds_;
  std::vector<int> binary_ids_;
};

}  // namespace

MilpModel read_lp(std::istream& is) {
  std::ostringstream buf;
  buf << is.rdbuf();
  return Parser(buf.str()).run();
}

MilpModel read_lp_string(const std::string& text) { return Parser(text).run(); }

}  // namespace mtlplan::milp
