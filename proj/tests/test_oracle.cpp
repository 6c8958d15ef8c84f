#include <doctest.h>

#include <cmath>
#include <set>

#include "rabinrl/errors.hpp"
#include "rabinrl/oracle.hpp"
#include "test_util.hpp"

using namespace rabinrl;
using testutil::fixture;

namespace {

StochasticGame b_selfloop() {
  StochasticGame g = load_game(R"({
    "ap": [],
    "states": [{"owner": "ctrl", "label": [], "actions": {"x": [[0, 1.0]]}}],
    "initial": 0,
    "rabin_pairs": [{"C": [], "B": [0]}]
  })");
  return g;
}

StochasticGame c_selfloop() {
  return load_game(R"({
    "ap": [],
    "states": [{"owner": "ctrl", "label": [], "actions": {"x": [[0, 1.0]]}}],
    "initial": 0,
    "rabin_pairs": [{"C": [0], "B": []}]
  })");
}

} // namespace

TEST_CASE("enumerate_maximin: trivial games") {
  OracleResult res = enumerate_maximin(b_selfloop());
  CHECK(res.values == std::vector<double>{1.0});
  CHECK(res.method == "enumeration");
  CHECK(enumerate_maximin(c_selfloop()).values == std::vector<double>{0.0});
}

TEST_CASE("enumerate_maximin: figure-3 game restricted to pair 1 is lost") {
  StochasticGame fig3 = load_game_file(fixture("fig3.game.json"));
  StochasticGame g1 = fig3;
  g1.pairs = {fig3.pairs[0]};
  OracleResult res = enumerate_maximin(g1);
  for (double v : res.values)
    CHECK(v == 0.0);
}

TEST_CASE("enumerate_maximin: hand-computed fixtures") {
  StochasticGame gamble = load_game_file(fixture("rabin1_gamble.game.json"));
  OracleResult res = enumerate_maximin(gamble);
  CHECK(res.values[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(res.values[1] == 0.0);
  CHECK(res.values[2] == 1.0);
  CHECK(res.values[3] == 0.0);
  // The reported strategy pair reproduces the reported values.
  InducedMc mc = induce_mc(gamble, res.mu, res.nu);
  StateClasses cls = classify_states(mc, gamble.pairs[0]);
  std::vector<double> check =
      cls.u_inf.empty() ? std::vector<double>(gamble.num_states(), 0.0)
                        : reach_prob(mc, cls.u_inf);
  for (int s = 0; s < gamble.num_states(); ++s)
    CHECK(std::abs(check[s] - res.values[s]) <= 1e-12);

  StochasticGame trap = load_game_file(fixture("rabin1_trap.game.json"));
  auto tv = enumerate_maximin(trap).values;
  CHECK(tv[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(tv[1] == 0.0);
  CHECK(tv[2] == 0.0);
  CHECK(tv[3] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(tv[4] == 1.0);
  CHECK(tv[5] == 0.0);

  StochasticGame detour = load_game_file(fixture("rabin1_detour.game.json"));
  auto dv = enumerate_maximin(detour).values;
  CHECK(dv[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dv[1] == 1.0);
  CHECK(dv[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dv[3] == 1.0);
  CHECK(dv[4] == 0.0);
}

TEST_CASE("enumerate_maximin: figure-3 k-copy game has value 0 everywhere") {
  StochasticGame star = build_kcopy(load_game_file(fixture("fig3.game.json")));
  OracleResult res = enumerate_maximin(star);
  for (double v : res.values)
    CHECK(v == 0.0);
}

TEST_CASE("enumerate_maximin: serial and parallel kernels agree bitwise") {
  for (const char *name :
       {"rabin1_gamble.game.json", "rabin1_trap.game.json"}) {
    StochasticGame g = load_game_file(fixture(name));
    OracleOptions serial;
    serial.parallel = false;
    OracleOptions parallel;
    parallel.parallel = true;
    CHECK(enumerate_maximin(g, serial).values ==
          enumerate_maximin(g, parallel).values);
  }
  StochasticGame star = build_kcopy(load_game_file(fixture("fig3.game.json")));
  OracleOptions serial;
  serial.parallel = false;
  CHECK(enumerate_maximin(star, serial).values ==
        enumerate_maximin(star).values);
}

TEST_CASE("enumerate_maximin: cap errors advise value iteration") {
  StochasticGame gamble = load_game_file(fixture("rabin1_gamble.game.json"));
  OracleOptions opt;
  opt.cap = 1;
  CHECK_THROWS_WITH_AS(enumerate_maximin(gamble, opt),
                       doctest::Contains("value-iteration"), input_error);
}

TEST_CASE("enumerate_maximin: requires a single pair") {
  StochasticGame fig3 = load_game_file(fixture("fig3.game.json"));
  CHECK_THROWS_AS(enumerate_maximin(fig3), input_error);
}

TEST_CASE("discounted_minimax_vi: exact endpoints") {
  StochasticGame b = b_selfloop();
  RewardScheme sb(0.1, b);
  CHECK(discounted_minimax_vi(b, sb).values[0] == 1.0);
  StochasticGame c = c_selfloop();
  RewardScheme sc(0.1, c);
  CHECK(discounted_minimax_vi(c, sc).values[0] == 0.0);
}

TEST_CASE("discounted_minimax_vi: approaches the maximin as c shrinks") {
  for (const char *name :
       {"rabin1_gamble.game.json", "rabin1_trap.game.json",
        "rabin1_detour.game.json"}) {
    StochasticGame g = load_game_file(fixture(name));
    std::vector<double> exact = enumerate_maximin(g).values;
    double prev_gap = 2.0;
    for (double c : {0.1, 0.01, 0.001}) {
      RewardScheme scheme(c, g);
      std::vector<double> v = discounted_minimax_vi(g, scheme).values;
      double gap = 0.0;
      for (int s = 0; s < g.num_states(); ++s)
        gap = std::max(gap, std::abs(v[s] - exact[s]));
      CAPTURE(name);
      CAPTURE(c);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    CHECK(prev_gap <= 0.02);
  }
}

TEST_CASE("winning_set: full and empty cases") {
  StochasticGame allb = load_game(R"({
    "ap": [],
    "states": [
      {"owner": "ctrl", "label": [], "actions": {"x": [[1, 1.0]]}},
      {"owner": "env", "label": [], "actions": {"y": [[0, 1.0]]}}
    ],
    "initial": 0,
    "rabin_pairs": [{"C": [], "B": [0, 1]}]
  })");
  CHECK(winning_set(allb, 0) == std::vector<int>{0, 1});

  StochasticGame fig3 = load_game_file(fixture("fig3.game.json"));
  CHECK(winning_set(fig3, 0).empty());
  CHECK(winning_set(fig3, 1).empty());
}

TEST_CASE("evaluate_strategy: optimal strategy attains the maximin") {
  StochasticGame trap = load_game_file(fixture("rabin1_trap.game.json"));
  OracleResult res = enumerate_maximin(trap);
  std::vector<double> worst = evaluate_strategy(trap, res.mu);
  for (int s = 0; s < trap.num_states(); ++s)
    CHECK(std::abs(worst[s] - res.values[s]) <= 1e-12);

  // Minimax inequality: every controller strategy is bounded by the maximin.
  for (std::uint64_t id = 0; id < strategy_count(trap, Owner::Controller);
       ++id) {
    Strategy mu = nth_strategy(trap, Owner::Controller, id);
    std::vector<double> w = evaluate_strategy(trap, mu);
    for (int s = 0; s < trap.num_states(); ++s)
      CHECK(w[s] <= res.values[s] + 1e-12);
  }
}

TEST_CASE("maximin_reach and the theorem-2 equality on the fork game") {
  StochasticGame fork = load_game_file(fixture("fork2.game.json"));
  CHECK(winning_set(fork, 0) == std::vector<int>{1});
  CHECK(winning_set(fork, 1) == std::vector<int>{2});

  StochasticGame star = build_kcopy(fork);
  // V: k-copy states whose base state is winning for some pair.
  std::set<int> w_union{1, 2};
  std::vector<int> v_states;
  for (int s = 0; s < star.num_states(); ++s)
    if (w_union.count(star.state_meta[s]["base"].get<int>()))
      v_states.push_back(s);

  std::vector<double> sat = enumerate_maximin(star).values;
  std::vector<double> reach = maximin_reach(star, v_states).values;
  for (int s = 0; s < star.num_states(); ++s)
    CHECK(std::abs(sat[s] - reach[s]) <= 1e-9);
  CHECK(sat[star.initial] == doctest::Approx(0.8).epsilon(1e-9));
}

TEST_CASE("discounted_pair_value matches the fixed-pair limits") {
  StochasticGame trap = load_game_file(fixture("rabin1_trap.game.json"));
  RewardScheme scheme(0.001, trap);
  // Under (p at s0, u at s3): BSCC {s1,s2} has a C state; value near 0.
  Strategy mu, nu;
  mu.choice[0] = 0;
  mu.choice[1] = 0;
  mu.choice[2] = 0;
  mu.choice[4] = 0;
  mu.choice[5] = 0;
  nu.choice[3] = 0;
  std::vector<double> v = discounted_pair_value(trap, scheme, mu, nu);
  CHECK(v[1] <= 0.01);
  CHECK(v[2] <= 0.01);
  CHECK(v[4] >= 0.99);
  CHECK(v[5] == 0.0);
}

TEST_CASE("evaluate_finite_memory: figure-3 strategies") {
  StochasticGame fig3 = load_game_file(fixture("fig3.game.json"));
  // theta everywhere, single mode: every environment behavior satisfies one
  // of the two pairs.
  FiniteMemoryStrategy fm;
  fm.k = 1;
  fm.num_base_states = 3;
  fm.choices.resize(3);
  fm.state_meta.resize(3);
  fm.choices[1] = {FiniteMemoryStrategy::Play{"theta"}};
  fm.choices[2] = {FiniteMemoryStrategy::Play{"theta"}};
  ComposedEvaluation ev = evaluate_finite_memory(fig3, fm);
  for (double v : ev.worst)
    CHECK(v == 1.0);
}
