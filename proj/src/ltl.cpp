#include "rabinrl/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "rabinrl/errors.hpp"

namespace rabinrl {

namespace {

LtlFormula make(LtlKind k, LtlFormula l = nullptr, LtlFormula r = nullptr,
                std::string atom = {}) {
  auto n = std::make_shared<LtlNode>();
  n->kind = k;
  n->atom = std::move(atom);
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

} // namespace

LtlFormula ltl_true() { return make(LtlKind::True); }
LtlFormula ltl_atom(const std::string &name) {
  return make(LtlKind::Atom, nullptr, nullptr, name);
}
LtlFormula ltl_not(LtlFormula f) { return make(LtlKind::Not, std::move(f)); }
LtlFormula ltl_and(LtlFormula a, LtlFormula b) {
  return make(LtlKind::And, std::move(a), std::move(b));
}
LtlFormula ltl_or(LtlFormula a, LtlFormula b) {
  return make(LtlKind::Or, std::move(a), std::move(b));
}
LtlFormula ltl_implies(LtlFormula a, LtlFormula b) {
  return make(LtlKind::Implies, std::move(a), std::move(b));
}
LtlFormula ltl_next(LtlFormula f) { return make(LtlKind::Next, std::move(f)); }
LtlFormula ltl_until(LtlFormula a, LtlFormula b) {
  return make(LtlKind::Until, std::move(a), std::move(b));
}
LtlFormula ltl_eventually(LtlFormula f) {
  return make(LtlKind::Eventually, std::move(f));
}
LtlFormula ltl_always(LtlFormula f) {
  return make(LtlKind::Always, std::move(f));
}

bool ltl_equal(const LtlFormula &a, const LtlFormula &b) {
  if (a == b)
    return true;
  if (!a || !b || a->kind != b->kind)
    return false;
  if (a->kind == LtlKind::Atom)
    return a->atom == b->atom;
  return ltl_equal(a->lhs, b->lhs) && ltl_equal(a->rhs, b->rhs);
}

std::set<std::string> ltl_atoms(const LtlFormula &f) {
  std::set<std::string> out;
  if (!f)
    return out;
  if (f->kind == LtlKind::Atom) {
    out.insert(f->atom);
    return out;
  }
  for (const auto &c : {f->lhs, f->rhs})
    if (c)
      for (auto &a : ltl_atoms(c))
        out.insert(a);
  return out;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength, tightest first: unary(5) & (4) | (3) U (2) -> (1).
int prec_of(LtlKind k) {
  switch (k) {
  case LtlKind::True:
  case LtlKind::Atom:
    return 6;
  case LtlKind::Not:
  case LtlKind::Next:
  case LtlKind::Eventually:
  case LtlKind::Always:
    return 5;
  case LtlKind::And:
    return 4;
  case LtlKind::Or:
    return 3;
  case LtlKind::Until:
    return 2;
  case LtlKind::Implies:
    return 1;
  }
  return 0;
}

void print_rec(std::ostream &os, const LtlFormula &f, int parent_prec,
               bool right_operand) {
  const int p = prec_of(f->kind);
  // Right-assoc binary ops need parens when appearing as a *left* child of
  // the same level; left-assoc chains only when appearing as a right child.
  bool parens = p < parent_prec;
  if (p == parent_prec) {
    // U and -> associate to the right; & and | print left-assoc chains.
    if (f->kind == LtlKind::Until || f->kind == LtlKind::Implies)
      parens = !right_operand;
    else if (f->kind == LtlKind::And || f->kind == LtlKind::Or)
      parens = right_operand;
  }
  if (parens)
    os << '(';
  switch (f->kind) {
  case LtlKind::True:
    os << "true";
    break;
  case LtlKind::Atom:
    os << f->atom;
    break;
  case LtlKind::Not:
    os << '!';
    print_rec(os, f->lhs, prec_of(LtlKind::Not), true);
    break;
  case LtlKind::Next:
    os << "X ";
    print_rec(os, f->lhs, prec_of(LtlKind::Next), true);
    break;
  case LtlKind::Eventually:
    os << "F ";
    print_rec(os, f->lhs, prec_of(LtlKind::Eventually), true);
    break;
  case LtlKind::Always:
    os << "G ";
    print_rec(os, f->lhs, prec_of(LtlKind::Always), true);
    break;
  case LtlKind::And:
    print_rec(os, f->lhs, p, false);
    os << " & ";
    print_rec(os, f->rhs, p, true);
    break;
  case LtlKind::Or:
    print_rec(os, f->lhs, p, false);
    os << " | ";
    print_rec(os, f->rhs, p, true);
    break;
  case LtlKind::Until:
    print_rec(os, f->lhs, p, false);
    os << " U ";
    print_rec(os, f->rhs, p, true);
    break;
  case LtlKind::Implies:
    print_rec(os, f->lhs, p, false);
    os << " -> ";
    print_rec(os, f->rhs, p, true);
    break;
  }
  if (parens)
    os << ')';
}

} // namespace

std::string to_string(const LtlFormula &f) {
  std::ostringstream os;
  print_rec(os, f, 0, true);
  return os.str();
}

LtlFormula desugar(const LtlFormula &f) {
  switch (f->kind) {
  case LtlKind::True:
  case LtlKind::Atom:
    return f;
  case LtlKind::Not:
    return ltl_not(desugar(f->lhs));
  case LtlKind::Next:
    return ltl_next(desugar(f->lhs));
  case LtlKind::And:
    return ltl_and(desugar(f->lhs), desugar(f->rhs));
  case LtlKind::Until:
    return ltl_until(desugar(f->lhs), desugar(f->rhs));
  case LtlKind::Or:
    return ltl_not(ltl_and(ltl_not(desugar(f->lhs)), ltl_not(desugar(f->rhs))));
  case LtlKind::Implies:
    return ltl_not(ltl_and(desugar(f->lhs), ltl_not(desugar(f->rhs))));
  case LtlKind::Eventually:
    return ltl_until(ltl_true(), desugar(f->lhs));
  case LtlKind::Always:
    return ltl_not(ltl_until(ltl_true(), ltl_not(desugar(f->lhs))));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum Kind { Ident, KwTrue, KwFalse, Bang, Amp, Pipe, Arrow, LParen, RParen,
              OpX, OpF, OpG, OpU, End } kind;
  std::string text;
  size_t pos;
};

class Lexer {
public:
  explicit Lexer(const std::string &s) : s_(s) { advance(); }

  const Token &peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
      ++i_;
    tok_.pos = i_;
    if (i_ >= s_.size()) {
      tok_.kind = Token::End;
      tok_.text = "<end>";
      return;
    }
    const char ch = s_[i_];
    if (ch == '!') { tok_ = {Token::Bang, "!", i_++}; return; }
    if (ch == '&') { tok_ = {Token::Amp, "&", i_++}; return; }
    if (ch == '|') { tok_ = {Token::Pipe, "|", i_++}; return; }
    if (ch == '(') { tok_ = {Token::LParen, "(", i_++}; return; }
    if (ch == ')') { tok_ = {Token::RParen, ")", i_++}; return; }
    if (ch == '-') {
      if (i_ + 1 < s_.size() && s_[i_ + 1] == '>') {
        tok_ = {Token::Arrow, "->", i_};
        i_ += 2;
        return;
      }
      throw input_error("LTL syntax error at position " + std::to_string(i_) +
                        ": expected '->' after '-'");
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      size_t start = i_;
      while (i_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
        ++i_;
      std::string word = s_.substr(start, i_ - start);
      if (word == "true") { tok_ = {Token::KwTrue, word, start}; return; }
      if (word == "false") { tok_ = {Token::KwFalse, word, start}; return; }
      if (word == "X") { tok_ = {Token::OpX, word, start}; return; }
      if (word == "F") { tok_ = {Token::OpF, word, start}; return; }
      if (word == "G") { tok_ = {Token::OpG, word, start}; return; }
      if (word == "U") { tok_ = {Token::OpU, word, start}; return; }
      tok_ = {Token::Ident, word, start};
      return;
    }
    throw input_error("LTL syntax error at position " + std::to_string(i_) +
                      ": unexpected character '" + std::string(1, ch) + "'");
  }

  const std::string &s_;
  size_t i_ = 0;
  Token tok_;
};

class Parser {
public:
  Parser(const std::string &text, const std::set<std::string> &ap)
      : lex_(text), ap_(ap) {}

  LtlFormula parse() {
    LtlFormula f = parse_implies();
    if (lex_.peek().kind != Token::End)
      fail("trailing input");
    return f;
  }

private:
  [[noreturn]] void fail(const std::string &what) {
    throw input_error("LTL syntax error at position " +
                      std::to_string(lex_.peek().pos) + ": " + what +
                      " (found '" + lex_.peek().text + "')");
  }

  // Loosest level; right-associative.
  LtlFormula parse_implies() {
    LtlFormula l = parse_until();
    if (lex_.peek().kind == Token::Arrow) {
      lex_.take();
      return ltl_implies(l, parse_implies());
    }
    return l;
  }

  // Right-associative, binds looser than & and |.
  LtlFormula parse_until() {
    LtlFormula l = parse_or();
    if (lex_.peek().kind == Token::OpU) {
      lex_.take();
      return ltl_until(l, parse_until());
    }
    return l;
  }

  LtlFormula parse_or() {
    LtlFormula l = parse_and();
    while (lex_.peek().kind == Token::Pipe) {
      lex_.take();
      l = ltl_or(l, parse_and());
    }
    return l;
  }

  LtlFormula parse_and() {
    LtlFormula l = parse_unary();
    while (lex_.peek().kind == Token::Amp) {
      lex_.take();
      l = ltl_and(l, parse_unary());
    }
    return l;
  }

  LtlFormula parse_unary() {
    switch (lex_.peek().kind) {
    case Token::Bang:
      lex_.take();
      return ltl_not(parse_unary());
    case Token::OpX:
      lex_.take();
      return ltl_next(parse_unary());
    case Token::OpF:
      lex_.take();
      return ltl_eventually(parse_unary());
    case Token::OpG:
      lex_.take();
      return ltl_always(parse_unary());
    default:
      return parse_primary();
    }
  }

  LtlFormula parse_primary() {
    Token t = lex_.peek();
    switch (t.kind) {
    case Token::KwTrue:
      lex_.take();
      return ltl_true();
    case Token::KwFalse:
      lex_.take();
      return ltl_not(ltl_true());
    case Token::Ident:
      lex_.take();
      if (!ap_.count(t.text))
        throw input_error("unknown atom '" + t.text + "' at position " +
                          std::to_string(t.pos));
      return ltl_atom(t.text);
    case Token::LParen: {
      lex_.take();
      LtlFormula f = parse_implies();
      if (lex_.peek().kind != Token::RParen)
        fail("expected ')'");
      lex_.take();
      return f;
    }
    default:
      fail("expected a formula");
    }
  }

  Lexer lex_;
  const std::set<std::string> &ap_;
};

} // namespace

LtlFormula parse_ltl(const std::string &text, const std::set<std::string> &ap) {
  if (text.empty())
    throw input_error("empty LTL formula");
  return Parser(text, ap).parse();
}

// ---------------------------------------------------------------------------
// Lasso evaluation

void LassoWord::validate() const {
  if (cycle.empty())
    throw input_error("lasso word has an empty cycle");
  std::set<std::string> aps(ap.begin(), ap.end());
  auto check = [&](const std::vector<std::set<std::string>> &part,
                   const char *name) {
    for (const auto &letter : part)
      for (const auto &a : letter)
        if (!aps.count(a))
          throw input_error(std::string("lasso ") + name + " uses atom '" + a +
                            "' outside the declared AP");
  };
  check(prefix, "prefix");
  check(cycle, "cycle");
}

namespace {

class LassoEval {
public:
  explicit LassoEval(const LassoWord &w) : w_(w) {
    p_ = w.prefix.size();
    n_ = p_ + w.cycle.size();
  }

  bool value(const LtlFormula &f) { return table(f)[0]; }

private:
  size_t next(size_t i) const { return i + 1 < n_ ? i + 1 : p_; }

  const std::set<std::string> &letter(size_t i) const {
    return i < p_ ? w_.prefix[i] : w_.cycle[i - p_];
  }

  const std::vector<char> &table(const LtlFormula &f) {
    auto it = memo_.find(f.get());
    if (it != memo_.end())
      return it->second;
    std::vector<char> v(n_, 0);
    switch (f->kind) {
    case LtlKind::True:
      std::fill(v.begin(), v.end(), 1);
      break;
    case LtlKind::Atom:
      for (size_t i = 0; i < n_; ++i)
        v[i] = letter(i).count(f->atom) ? 1 : 0;
      break;
    case LtlKind::Not: {
      const auto &c = table(f->lhs);
      for (size_t i = 0; i < n_; ++i)
        v[i] = !c[i];
      break;
    }
    case LtlKind::And: {
      const auto &a = table(f->lhs);
      const auto &b = table(f->rhs);
      for (size_t i = 0; i < n_; ++i)
        v[i] = a[i] && b[i];
      break;
    }
    case LtlKind::Or: {
      const auto &a = table(f->lhs);
      const auto &b = table(f->rhs);
      for (size_t i = 0; i < n_; ++i)
        v[i] = a[i] || b[i];
      break;
    }
    case LtlKind::Implies: {
      const auto &a = table(f->lhs);
      const auto &b = table(f->rhs);
      for (size_t i = 0; i < n_; ++i)
        v[i] = !a[i] || b[i];
      break;
    }
    case LtlKind::Next: {
      const auto &c = table(f->lhs);
      for (size_t i = 0; i < n_; ++i)
        v[i] = c[next(i)];
      break;
    }
    case LtlKind::Until:
      fixpoint(v, table(f->lhs), table(f->rhs));
      break;
    case LtlKind::Eventually: {
      std::vector<char> tru(n_, 1);
      fixpoint(v, tru, table(f->lhs));
      break;
    }
    case LtlKind::Always: {
      // nu Z. c & X Z: the dual fixpoint, seeded with true.
      const auto &c = table(f->lhs);
      std::fill(v.begin(), v.end(), 1);
      for (size_t round = 0; round <= n_ - p_; ++round) {
        bool changed = false;
        for (size_t k = n_; k-- > p_;) {
          char nv = c[k] && v[next(k)];
          if (nv != v[k]) {
            v[k] = nv;
            changed = true;
          }
        }
        if (!changed)
          break;
      }
      for (size_t k = p_; k-- > 0;)
        v[k] = c[k] && v[k + 1];
      break;
    }
    }
    return memo_.emplace(f.get(), std::move(v)).first->second;
  }

  // v = mu Z. rhs | (lhs & X Z): iterate over the cycle to stability
  // (at most |cycle| rounds from all-false), then one backward prefix pass.
  void fixpoint(std::vector<char> &v, const std::vector<char> &lhs,
                const std::vector<char> &rhs) {
    for (size_t round = 0; round <= n_ - p_; ++round) {
      bool changed = false;
      for (size_t k = n_; k-- > p_;) {
        char nv = rhs[k] || (lhs[k] && v[next(k)]);
        if (nv != v[k]) {
          v[k] = nv;
          changed = true;
        }
      }
      if (!changed)
        break;
    }
    for (size_t k = p_; k-- > 0;)
      v[k] = rhs[k] || (lhs[k] && v[k + 1]);
  }

  const LassoWord &w_;
  size_t p_ = 0, n_ = 0;
  std::map<const LtlNode *, std::vector<char>> memo_;
};

} // namespace

bool eval_lasso(const LtlFormula &f, const LassoWord &w) {
  w.validate();
  std::set<std::string> aps(w.ap.begin(), w.ap.end());
  for (const auto &a : ltl_atoms(f))
    if (!aps.count(a))
      throw input_error("formula atom '" + a +
                        "' is not in the lasso word's AP");
  return LassoEval(w).value(f);
}

} // namespace rabinrl
