#include <doctest.h>

#include <functional>

#include "rabinrl/errors.hpp"
#include "rabinrl/ltl.hpp"
#include "test_util.hpp"

using namespace rabinrl;
using testutil::lasso;

namespace {

const std::set<std::string> kAp{"a", "b", "c", "d", "e"};

// Suffix of the infinite word at position i, as a lasso again.
LassoWord suffix(const LassoWord &w, size_t i) {
  LassoWord out;
  out.ap = w.ap;
  const size_t p = w.prefix.size(), c = w.cycle.size();
  if (i < p) {
    out.prefix.assign(w.prefix.begin() + static_cast<long>(i), w.prefix.end());
    out.cycle = w.cycle;
  } else {
    size_t r = (i - p) % c;
    for (size_t j = 0; j < c; ++j)
      out.cycle.push_back(w.cycle[(r + j) % c]);
  }
  return out;
}

// All formulas with at most `size` nodes over two atoms.
std::vector<LtlFormula> formulas_up_to_size(int size) {
  std::vector<std::vector<LtlFormula>> by_size(size + 1);
  by_size[1] = {ltl_true(), ltl_atom("a"), ltl_atom("b")};
  for (int n = 2; n <= size; ++n) {
    for (const LtlFormula &f : by_size[n - 1]) {
      by_size[n].push_back(ltl_not(f));
      by_size[n].push_back(ltl_next(f));
      by_size[n].push_back(ltl_eventually(f));
      by_size[n].push_back(ltl_always(f));
    }
    for (int l = 1; l + 1 < n; ++l)
      for (const LtlFormula &a : by_size[l])
        for (const LtlFormula &b : by_size[n - 1 - l]) {
          by_size[n].push_back(ltl_and(a, b));
          by_size[n].push_back(ltl_or(a, b));
          by_size[n].push_back(ltl_implies(a, b));
          by_size[n].push_back(ltl_until(a, b));
        }
  }
  std::vector<LtlFormula> out;
  for (auto &bucket : by_size)
    out.insert(out.end(), bucket.begin(), bucket.end());
  return out;
}

std::vector<std::set<std::string>> all_letters_ab() {
  return {{}, {"a"}, {"b"}, {"a", "b"}};
}

} // namespace

TEST_CASE("parse: figure formula") {
  LtlFormula f = parse_ltl("(G F b) | (F G d)", kAp);
  LtlFormula want = ltl_or(ltl_always(ltl_eventually(ltl_atom("b"))),
                           ltl_eventually(ltl_always(ltl_atom("d"))));
  CHECK(ltl_equal(f, want));
}

TEST_CASE("parse: literals") {
  CHECK(ltl_equal(parse_ltl("true", kAp), ltl_true()));
  CHECK(ltl_equal(parse_ltl("false", kAp), ltl_not(ltl_true())));
}

TEST_CASE("parse: conjunction binds tighter than until") {
  LtlFormula f = parse_ltl("a U b & c", kAp);
  LtlFormula want =
      ltl_until(ltl_atom("a"), ltl_and(ltl_atom("b"), ltl_atom("c")));
  CHECK(ltl_equal(f, want));
}

TEST_CASE("parse: right associativity and unary binding") {
  CHECK(ltl_equal(parse_ltl("a U b U c", kAp),
                  ltl_until(ltl_atom("a"),
                            ltl_until(ltl_atom("b"), ltl_atom("c")))));
  CHECK(ltl_equal(parse_ltl("!a & b", kAp),
                  ltl_and(ltl_not(ltl_atom("a")), ltl_atom("b"))));
  CHECK(ltl_equal(parse_ltl("a -> b -> c", kAp),
                  ltl_implies(ltl_atom("a"),
                              ltl_implies(ltl_atom("b"), ltl_atom("c")))));
  CHECK(ltl_equal(parse_ltl("a | b U c", kAp),
                  ltl_until(ltl_or(ltl_atom("a"), ltl_atom("b")),
                            ltl_atom("c"))));
}

TEST_CASE("parse: errors carry position and token") {
  CHECK_THROWS_WITH_AS(parse_ltl("a &", kAp),
                       doctest::Contains("position"), input_error);
  CHECK_THROWS_WITH_AS(parse_ltl("a & zz", kAp),
                       doctest::Contains("unknown atom 'zz'"), input_error);
  CHECK_THROWS_AS(parse_ltl("", kAp), input_error);
  CHECK_THROWS_AS(parse_ltl("(a", kAp), input_error);
}

TEST_CASE("print/parse round trip") {
  Rng rng(42);
  std::vector<std::string> ap{"a", "b", "c"};
  for (int i = 0; i < 500; ++i) {
    LtlFormula f = testutil::random_formula(rng, ap, 4);
    LtlFormula g = parse_ltl(to_string(f), kAp);
    CAPTURE(to_string(f));
    CHECK(ltl_equal(f, g));
  }
}

TEST_CASE("eval: persistent and transient b") {
  LtlFormula gfb = parse_ltl("G F b", kAp);
  CHECK(eval_lasso(gfb, lasso({"b"}, {}, {{"b"}})));
  CHECK_FALSE(eval_lasso(gfb, lasso({"b"}, {{"b"}}, {{}})));
}

TEST_CASE("eval: robust-control formula on a two-letter cycle") {
  LtlFormula phi1 = parse_ltl("G F b & G F c & (F G d | F G e)", kAp);
  LassoWord w = lasso({"b", "c", "d", "e"}, {}, {{"b", "d"}, {"c", "d"}});
  // Independent route first: the scan evaluator agrees.
  CHECK(testutil::scan_eval(phi1, w));
  CHECK(eval_lasso(phi1, w));
}

TEST_CASE("eval: matches the scan oracle on random instances") {
  Rng rng(7);
  std::vector<std::string> ap{"a", "b"};
  for (int i = 0; i < 2000; ++i) {
    LtlFormula f = testutil::random_formula(rng, ap, 4);
    LassoWord w = testutil::random_lasso(rng, ap, 4, 4);
    CAPTURE(to_string(f));
    CHECK(eval_lasso(f, w) == testutil::scan_eval(f, w));
  }
}

TEST_CASE("desugar: removes derived operators and preserves semantics") {
  // Desugared formulas use core operators only.
  Rng rng(11);
  std::vector<std::string> ap{"a", "b"};
  std::function<bool(const LtlFormula &)> core = [&](const LtlFormula &f) {
    switch (f->kind) {
    case LtlKind::Or:
    case LtlKind::Implies:
    case LtlKind::Eventually:
    case LtlKind::Always:
      return false;
    default:
      break;
    }
    for (const auto &c : {f->lhs, f->rhs})
      if (c && !core(c))
        return false;
    return true;
  };

  // Exhaustive over all formulas of size <= 3 and a lasso grid with
  // |prefix| <= 2, |cycle| <= 4; deeper formulas and the full
  // |prefix| <= 4 grid are covered by seeded random sampling below.
  auto formulas = formulas_up_to_size(3);
  auto letters = all_letters_ab();
  std::vector<std::vector<std::vector<std::set<std::string>>>> words(5);
  words[0] = {{}};
  for (int len = 1; len <= 4; ++len)
    for (const auto &word : words[len - 1])
      for (const auto &l : letters) {
        auto w2 = word;
        w2.push_back(l);
        words[len].push_back(w2);
      }
  std::vector<LassoWord> grid;
  for (int cl = 1; cl <= 4; ++cl)
    for (const auto &cycle : words[cl])
      for (int pl = 0; pl <= 2; ++pl)
        for (const auto &prefix : words[pl])
          grid.push_back(lasso({"a", "b"}, prefix, cycle));
  for (const LtlFormula &f : formulas) {
    LtlFormula d = desugar(f);
    CHECK(core(d));
    for (const LassoWord &w : grid) {
      if (eval_lasso(f, w) != eval_lasso(d, w)) {
        CAPTURE(to_string(f));
        REQUIRE(eval_lasso(f, w) == eval_lasso(d, w));
      }
    }
  }

  for (int i = 0; i < 1000; ++i) {
    LtlFormula f = testutil::random_formula(rng, ap, 3);
    LtlFormula d = desugar(f);
    for (int j = 0; j < 20; ++j) {
      LassoWord w = testutil::random_lasso(rng, ap, 4, 4);
      CAPTURE(to_string(f));
      CHECK(eval_lasso(f, w) == eval_lasso(d, w));
    }
  }
}

TEST_CASE("until expansion holds at every position") {
  Rng rng(13);
  std::vector<std::string> ap{"a", "b"};
  for (int i = 0; i < 300; ++i) {
    LtlFormula f1 = testutil::random_formula(rng, ap, 2);
    LtlFormula f2 = testutil::random_formula(rng, ap, 2);
    LtlFormula u = ltl_until(f1, f2);
    LassoWord w = testutil::random_lasso(rng, ap, 3, 3);
    const size_t n = w.prefix.size() + w.cycle.size();
    for (size_t pos = 0; pos < n; ++pos) {
      bool lhs = eval_lasso(u, suffix(w, pos));
      bool rhs = eval_lasso(f2, suffix(w, pos)) ||
                 (eval_lasso(f1, suffix(w, pos)) &&
                  eval_lasso(u, suffix(w, pos + 1)));
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("rotating the cycle only shifts labels into the prefix") {
  Rng rng(17);
  std::vector<std::string> ap{"a", "b"};
  for (int i = 0; i < 500; ++i) {
    LtlFormula f = testutil::random_formula(rng, ap, 3);
    LassoWord w = testutil::random_lasso(rng, ap, 3, 4);
    size_t r = rng.below(w.cycle.size());
    LassoWord rotated;
    rotated.ap = w.ap;
    rotated.prefix = w.prefix;
    for (size_t j = 0; j < r; ++j)
      rotated.prefix.push_back(w.cycle[j]);
    for (size_t j = 0; j < w.cycle.size(); ++j)
      rotated.cycle.push_back(w.cycle[(r + j) % w.cycle.size()]);
    CAPTURE(to_string(f));
    CHECK(eval_lasso(f, w) == eval_lasso(f, rotated));
  }
}

TEST_CASE("lasso validation") {
  LassoWord empty_cycle = lasso({"a"}, {{"a"}}, {});
  CHECK_THROWS_AS(empty_cycle.validate(), input_error);
  LassoWord bad_atom = lasso({"a"}, {}, {{"z"}});
  CHECK_THROWS_AS(bad_atom.validate(), input_error);
  LtlFormula f = parse_ltl("c", kAp);
  CHECK_THROWS_AS(eval_lasso(f, lasso({"a"}, {}, {{}})), input_error);
}
