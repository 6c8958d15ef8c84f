#include <doctest.h>

#include "rabinrl/errors.hpp"
#include "rabinrl/hoa.hpp"
#include "test_util.hpp"

using namespace rabinrl;
using testutil::fixture;
using testutil::lasso;

namespace {

const char *kMinimal = R"(HOA: v1
States: 1
Start: 0
AP: 0
Acceptance: 2 Fin(0) & Inf(1)
--BODY--
State: 0 {1}
[t] 0
--END--
)";

} // namespace

TEST_CASE("parse_hoa: minimal all-accepting automaton") {
  Dra d = parse_hoa(kMinimal);
  CHECK(d.num_states == 1);
  CHECK(d.initial == 0);
  REQUIRE(d.pairs.size() == 1);
  CHECK(d.pairs[0].fin.empty());
  CHECK(d.pairs[0].inf == std::vector<int>{0});
  DraRun run = dra_run_lasso(d, lasso({}, {}, {{}}));
  CHECK(run.accepted);
  CHECK(run.accepting_pair == 1);
}

TEST_CASE("parse_hoa: figure automaton structure") {
  Dra d = parse_hoa_file(fixture("fig1.hoa"));
  CHECK(d.num_states == 3);
  CHECK(d.ap == std::vector<std::string>{"b", "d"});
  REQUIRE(d.pairs.size() == 2);
  CHECK(d.pairs[0].fin.empty());
  CHECK(d.pairs[0].inf == std::vector<int>{1});
  CHECK(d.pairs[1].fin == std::vector<int>{0});
  CHECK(d.pairs[1].inf == std::vector<int>{2});
  // Any letter containing b moves to q1, from every state.
  for (int q = 0; q < 3; ++q) {
    CHECK(d.step(q, d.letter_of({"b"})) == 1);
    CHECK(d.step(q, d.letter_of({"b", "d"})) == 1);
  }
}

TEST_CASE("parse_hoa: overlapping guards violate determinism") {
  std::string text = R"(HOA: v1
States: 1
Start: 0
AP: 1 "b"
Acceptance: 2 Fin(0) & Inf(1)
--BODY--
State: 0 {1}
[t] 0
[0] 0
--END--
)";
  CHECK_THROWS_WITH_AS(parse_hoa(text), doctest::Contains("determinism"),
                       input_error);
}

TEST_CASE("parse_hoa: incompleteness names the missing letter") {
  std::string text = R"(HOA: v1
States: 1
Start: 0
AP: 2 "b" "d"
Acceptance: 2 Fin(0) & Inf(1)
--BODY--
State: 0 {1}
[0] 0
[!0 & 1] 0
--END--
)";
  CHECK_THROWS_WITH_AS(parse_hoa(text), doctest::Contains("incomplete"),
                       input_error);
}

TEST_CASE("parse_hoa: unsupported features are named") {
  std::string tba = R"(HOA: v1
States: 1
Start: 0
AP: 0
Acceptance: 2 Fin(0) & Inf(1)
--BODY--
State: 0
[t] 0 {1}
--END--
)";
  CHECK_THROWS_WITH_AS(parse_hoa(tba),
                       doctest::Contains("transition-based acceptance"),
                       input_error);

  std::string nondet = R"(HOA: v1
States: 2
Start: 0
Start: 1
AP: 0
Acceptance: 2 Fin(0) & Inf(1)
--BODY--
State: 0
[t] 0
State: 1
[t] 1
--END--
)";
  CHECK_THROWS_WITH_AS(parse_hoa(nondet), doctest::Contains("initial states"),
                       input_error);

  std::string streett = R"(HOA: v1
States: 1
Start: 0
AP: 0
Acceptance: 2 Fin(0) | Inf(1)
--BODY--
State: 0
[t] 0
--END--
)";
  CHECK_THROWS_WITH_AS(parse_hoa(streett), doctest::Contains("Rabin"),
                       input_error);
}

TEST_CASE("parse_hoa: aliases expand inside guards") {
  std::string text = R"(HOA: v1
States: 2
Start: 0
AP: 2 "b" "d"
Alias: @good 0 & !1
Acceptance: 2 Fin(0) & Inf(1)
--BODY--
State: 0 {1}
[@good] 1
[!@good] 0
State: 1
[t] 1
--END--
)";
  Dra d = parse_hoa(text);
  CHECK(d.step(0, d.letter_of({"b"})) == 1);
  CHECK(d.step(0, d.letter_of({"b", "d"})) == 0);
  CHECK(d.step(0, d.letter_of({})) == 0);
}

TEST_CASE("dra_run_lasso: figure automaton examples") {
  Dra d = parse_hoa_file(fixture("fig1.hoa"));

  DraRun bpath = dra_run_lasso(d, lasso({"b", "d"}, {{}, {"d"}}, {{"b"}, {"b", "d"}}));
  CHECK(bpath.accepted);
  CHECK(bpath.accepting_pair == 1);

  DraRun dpath = dra_run_lasso(d, lasso({"b", "d"}, {{"b"}, {}}, {{"d"}}));
  CHECK(dpath.accepted);
  CHECK(dpath.accepting_pair == 2);
  CHECK(dpath.inf_set == std::vector<int>{2});

  DraRun neither = dra_run_lasso(d, lasso({"b", "d"}, {{"b"}}, {{}}));
  CHECK_FALSE(neither.accepted);
  // Cross-check with the formula the automaton was built for.
  LtlFormula f = parse_ltl("G F b | F G d", {"b", "d"});
  CHECK_FALSE(eval_lasso(f, lasso({"b", "d"}, {{"b"}}, {{}})));
}

TEST_CASE("dra_run_lasso: orbit stays within |Q| x |cycle| pairs") {
  Dra d = parse_hoa_file(fixture("fig1.hoa"));
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    LassoWord w = testutil::random_lasso(rng, d.ap, 6, 6);
    DraRun run = dra_run_lasso(d, w);
    CHECK(!run.inf_set.empty());
    CHECK(run.inf_set.size() <= static_cast<size_t>(d.num_states));
    for (int q : run.inf_set)
      CHECK((q >= 0 && q < d.num_states));
  }
}

TEST_CASE("fixture automata agree with their formulas on random lassos") {
  struct Case {
    const char *hoa;
    const char *formula;
  };
  const Case cases[] = {
      {"fig1.hoa", "G F b | F G d"},
      {"phi1.hoa", "G F b & G F c & (F G d | F G e)"},
      {"phi2.hoa", "G F b & G F c & (F G d | F G e) & G !a"},
  };
  for (const Case &c : cases) {
    Dra d = parse_hoa_file(fixture(c.hoa));
    std::set<std::string> ap(d.ap.begin(), d.ap.end());
    LtlFormula f = parse_ltl(c.formula, ap);
    Rng rng(31);
    for (int i = 0; i < 300; ++i) {
      LassoWord w = testutil::random_lasso(rng, d.ap, 6, 6);
      bool by_dra = dra_run_lasso(d, w).accepted;
      bool by_formula = eval_lasso(f, w);
      CAPTURE(c.hoa);
      CAPTURE(i);
      REQUIRE(by_dra == by_formula);
    }
  }
}
