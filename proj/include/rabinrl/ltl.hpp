#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace rabinrl {

// LTL over the core grammar true | a | f1 & f2 | !f | X f | f1 U f2,
// plus the usual derived operators (|, ->, F, G) kept as first-class
// node kinds so they can be evaluated directly and desugared on demand.
enum class LtlKind {
  True,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,
  Until,
  Eventually,
  Always,
};

struct LtlNode;
using LtlFormula = std::shared_ptr<const LtlNode>;

struct LtlNode {
  LtlKind kind;
  std::string atom;       // Atom only
  LtlFormula lhs, rhs;    // unary ops use lhs; binary use both
};

LtlFormula ltl_true();
LtlFormula ltl_atom(const std::string &name);
LtlFormula ltl_not(LtlFormula f);
LtlFormula ltl_and(LtlFormula a, LtlFormula b);
LtlFormula ltl_or(LtlFormula a, LtlFormula b);
LtlFormula ltl_implies(LtlFormula a, LtlFormula b);
LtlFormula ltl_next(LtlFormula f);
LtlFormula ltl_until(LtlFormula a, LtlFormula b);
LtlFormula ltl_eventually(LtlFormula f);
LtlFormula ltl_always(LtlFormula f);

bool ltl_equal(const LtlFormula &a, const LtlFormula &b);

// Atoms appearing in the formula.
std::set<std::string> ltl_atoms(const LtlFormula &f);

// Precedence-aware printer; parse(to_string(f)) == f up to parenthesization.
std::string to_string(const LtlFormula &f);

// Rewrites Or/Implies/Eventually/Always into the core operators:
//   a | b   -> !(!a & !b)
//   a -> b  -> !( a & !b)
//   F a     -> true U a
//   G a     -> !(true U !a)
LtlFormula desugar(const LtlFormula &f);

// ASCII surface syntax: `!  X  F  G  U  &  |  ->  true  false`, atoms are
// identifiers. Binding, tightest first: unary, &, |, U (right-assoc),
// -> (right-assoc). Throws input_error on syntax errors (with position)
// and on atoms not in `ap`.
LtlFormula parse_ltl(const std::string &text, const std::set<std::string> &ap);

// Finite representation of an ultimately periodic word prefix . cycle^w.
// Each letter is a set of atom names drawn from `ap`.
struct LassoWord {
  std::vector<std::string> ap;
  std::vector<std::set<std::string>> prefix;
  std::vector<std::set<std::string>> cycle; // nonempty

  void validate() const; // throws input_error on violations
};

// Whether prefix . cycle^w satisfies f. Valuations are computed at the
// |prefix|+|cycle| distinguishable positions; U/F are solved by least
// fixed point over the cycle, G by greatest fixed point.
bool eval_lasso(const LtlFormula &f, const LassoWord &w);

} // namespace rabinrl
