#include <doctest.h>

#include <cmath>

#include "rabinrl/errors.hpp"
#include "rabinrl/game.hpp"
#include "test_util.hpp"

using namespace rabinrl;
using testutil::fixture;
using testutil::mc_from_rows;

TEST_CASE("load_game: two-state game") {
  StochasticGame g = load_game(R"({
    "ap": ["b"],
    "states": [
      {"owner": "ctrl", "label": ["b"], "actions": {"go": [[1, 1.0]]}},
      {"owner": "env", "label": [], "actions": {"back": [[0, 1.0]]}}
    ],
    "initial": 0,
    "rabin_pairs": []
  })");
  CHECK(g.num_states() == 2);
  CHECK(g.is_controller(0));
  CHECK_FALSE(g.is_controller(1));
}

TEST_CASE("load_game: probability sums are checked per (state, action)") {
  CHECK_THROWS_WITH_AS(load_game(R"({
    "ap": [],
    "states": [
      {"owner": "ctrl", "label": [], "actions": {"x": [[0, 0.9]]}}
    ],
    "initial": 0
  })"),
                       doctest::Contains("action 'x'"), input_error);
}

TEST_CASE("load_game: dangling successors and deadlocks") {
  CHECK_THROWS_WITH_AS(load_game(R"({
    "ap": [],
    "states": [{"owner": "ctrl", "label": [], "actions": {"x": [[3, 1.0]]}}],
    "initial": 0
  })"),
                       doctest::Contains("dangling successor"), input_error);
  CHECK_THROWS_WITH_AS(load_game(R"({
    "ap": [],
    "states": [{"owner": "ctrl", "label": [], "actions": {}}],
    "initial": 0
  })"),
                       doctest::Contains("actions"), input_error);
}

TEST_CASE("load_game: reserved action names are rejected in input files") {
  CHECK_THROWS_WITH_AS(load_game(R"({
    "ap": [],
    "states": [{"owner": "ctrl", "label": [], "actions": {"__eps_1": [[0, 1.0]]}}],
    "initial": 0
  })"),
                       doctest::Contains("reserved"), input_error);
}

TEST_CASE("load_game: figure-3 fixture") {
  StochasticGame g = load_game_file(fixture("fig3.game.json"));
  CHECK(g.num_states() == 3);
  CHECK(g.states[0].owner == Owner::Environment);
  CHECK(g.states[1].owner == Owner::Controller);
  CHECK(g.states[2].owner == Owner::Controller);
  REQUIRE(g.pairs.size() == 2);
  CHECK(g.pairs[0].fin.empty());
  CHECK(g.pairs[0].inf == std::vector<int>{1});
  CHECK(g.pairs[1].fin == std::vector<int>{1});
  CHECK(g.pairs[1].inf == std::vector<int>{2});
}

TEST_CASE("save_game/load_game: round trip preserves structure") {
  StochasticGame g = load_game_file(fixture("rabin1_trap.game.json"));
  StochasticGame h = load_game(save_game(g));
  CHECK(h.num_states() == g.num_states());
  for (int s = 0; s < g.num_states(); ++s) {
    CHECK(h.states[s].owner == g.states[s].owner);
    REQUIRE(h.states[s].actions.size() == g.states[s].actions.size());
    for (size_t a = 0; a < g.states[s].actions.size(); ++a) {
      CHECK(h.states[s].actions[a].name == g.states[s].actions[a].name);
      CHECK(h.states[s].actions[a].outcomes == g.states[s].actions[a].outcomes);
    }
  }
  CHECK(h.pairs.size() == g.pairs.size());
}

TEST_CASE("induce_mc: singleton action sets give the unique structure") {
  StochasticGame g = load_game(R"({
    "ap": [],
    "states": [
      {"owner": "ctrl", "label": [], "actions": {"x": [[1, 0.5], [0, 0.5]]}},
      {"owner": "env", "label": [], "actions": {"y": [[0, 1.0]]}}
    ],
    "initial": 0
  })");
  Strategy mu, nu;
  mu.choice[0] = 0;
  nu.choice[1] = 0;
  InducedMc mc = induce_mc(g, mu, nu);
  CHECK(mc.rows[0] == g.states[0].actions[0].outcomes);
  CHECK(mc.rows[1] == g.states[1].actions[0].outcomes);
}

TEST_CASE("induce_mc: figure-3 game under alpha-always cycles s0 s1") {
  StochasticGame g = load_game_file(fixture("fig3.game.json"));
  Strategy mu, nu;
  mu.choice[1] = 0;
  mu.choice[2] = 0;
  nu.choice[0] = 0; // alpha
  InducedMc mc = induce_mc(g, mu, nu);
  REQUIRE(mc.rows[0].size() == 1);
  CHECK(mc.rows[0][0] == std::pair<int, double>{1, 1.0});
  CHECK(mc.rows[1][0] == std::pair<int, double>{0, 1.0});
}

TEST_CASE("induce_mc: strategies must cover exactly their owner's states") {
  StochasticGame g = load_game_file(fixture("fig3.game.json"));
  Strategy mu, nu;
  mu.choice[1] = 0;
  mu.choice[2] = 0;
  nu.choice[0] = 0;

  Strategy bad_mu = mu;
  bad_mu.choice[0] = 0; // environment-owned
  CHECK_THROWS_WITH_AS(induce_mc(g, bad_mu, nu),
                       doctest::Contains("does not own"), input_error);

  Strategy missing = nu;
  missing.choice.clear();
  CHECK_THROWS_WITH_AS(induce_mc(g, mu, missing),
                       doctest::Contains("does not cover"), input_error);
}

TEST_CASE("bsccs: absorbing states and transients") {
  // Single absorbing self-loop.
  auto mc1 = mc_from_rows({{{0, 1.0}}});
  CHECK(bsccs(mc1) == std::vector<std::vector<int>>{{0}});

  // Two states looping plus a transient feeding them.
  auto mc2 = mc_from_rows({{{1, 1.0}}, {{0, 1.0}}, {{0, 1.0}}});
  CHECK(bsccs(mc2) == std::vector<std::vector<int>>{{0, 1}});

  // Chain of three transients into two separate absorbing states.
  auto mc3 = mc_from_rows({
      {{1, 0.5}, {2, 0.5}},
      {{3, 1.0}},
      {{4, 1.0}},
      {{3, 1.0}},
      {{4, 1.0}},
  });
  auto bs = bsccs(mc3);
  CHECK(bs == std::vector<std::vector<int>>{{3}, {4}});
  // Exhaustive check: every state reaches at least one BSCC.
  std::vector<int> all_bottom;
  for (const auto &t : bs)
    all_bottom.insert(all_bottom.end(), t.begin(), t.end());
  auto v = reach_prob(mc3, all_bottom);
  for (double x : v)
    CHECK(x == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("classify_states: lemma classification") {
  RabinPair pair;
  pair.inf = {0};
  pair.fin = {};
  auto mc1 = mc_from_rows({{{0, 1.0}}});
  StateClasses c1 = classify_states(mc1, pair);
  CHECK(c1.u_inf == std::vector<int>{0});
  CHECK(c1.u_fin.empty());
  CHECK(c1.u_none.empty());

  // Absorbing BSCC containing one C-state and one B-state: the C-state is
  // in U_C and the B-state is unclassified.
  auto mc2 = mc_from_rows({{{1, 1.0}}, {{0, 1.0}}});
  RabinPair pair2;
  pair2.inf = {0};
  pair2.fin = {1};
  StateClasses c2 = classify_states(mc2, pair2);
  CHECK(c2.u_inf.empty());
  CHECK(c2.u_fin == std::vector<int>{1});
  CHECK(c2.u_none.empty());

  // One BSCC meeting neither set, one meeting only B: nonempty U_none and
  // U_B (hand-enumerated on the 5-state chain).
  auto mc3 = mc_from_rows({
      {{1, 0.5}, {2, 0.5}},
      {{3, 1.0}},
      {{4, 1.0}},
      {{1, 1.0}},
      {{4, 1.0}},
  });
  RabinPair pair3;
  pair3.inf = {4};
  pair3.fin = {};
  StateClasses c3 = classify_states(mc3, pair3);
  CHECK(c3.u_inf == std::vector<int>{4});
  CHECK(c3.u_none == std::vector<int>{1, 3});
  CHECK(c3.u_fin.empty());
}

TEST_CASE("classify_states: sets are pairwise disjoint on random chains") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + rng.below_int(7);
    std::vector<std::vector<std::pair<int, double>>> rows(n);
    for (int s = 0; s < n; ++s) {
      int deg = 1 + rng.below_int(2);
      if (deg == 1) {
        rows[s] = {{rng.below_int(n), 1.0}};
      } else {
        int a = rng.below_int(n), b = rng.below_int(n);
        if (a == b)
          rows[s] = {{a, 1.0}};
        else
          rows[s] = {{a, 0.5}, {b, 0.5}};
      }
    }
    InducedMc mc = mc_from_rows(rows);
    RabinPair pair;
    for (int s = 0; s < n; ++s) {
      if (rng.coin(0.3))
        pair.inf.push_back(s);
      if (rng.coin(0.2))
        pair.fin.push_back(s);
    }
    StateClasses c = classify_states(mc, pair);
    std::set<int> seen;
    size_t total = 0;
    for (const auto *v : {&c.u_inf, &c.u_fin, &c.u_none}) {
      seen.insert(v->begin(), v->end());
      total += v->size();
    }
    CHECK(seen.size() == total);

    // Reaching the union of BSCCs is almost sure.
    std::vector<int> bottom;
    for (const auto &t : bsccs(mc))
      bottom.insert(bottom.end(), t.begin(), t.end());
    for (double x : reach_prob(mc, bottom))
      CHECK(std::abs(x - 1.0) <= 1e-8);
  }
}

TEST_CASE("classify_states: membership matches simulated visitation") {
  // Paths started in U_B keep visiting B and never C; paths from U_C keep
  // hitting C. Seeded walks of length 64 on a small chain.
  auto mc = mc_from_rows({
      {{1, 0.5}, {3, 0.5}},
      {{2, 1.0}},
      {{1, 0.7}, {2, 0.3}},
      {{4, 1.0}},
      {{3, 0.5}, {4, 0.5}},
  });
  RabinPair pair;
  pair.inf = {1};
  pair.fin = {4};
  StateClasses c = classify_states(mc, pair);
  CHECK(c.u_inf == std::vector<int>{1});
  CHECK(c.u_fin == std::vector<int>{4});

  Rng rng(77);
  auto walk = [&](int start) {
    std::vector<int> path{start};
    int s = start;
    for (int t = 0; t < 64; ++t) {
      double u = rng.uniform01();
      for (auto [succ, p] : mc.rows[s]) {
        if (u < p) {
          s = succ;
          break;
        }
        u -= p;
      }
      path.push_back(s);
    }
    return path;
  };
  for (int rep = 0; rep < 200; ++rep) {
    auto path = walk(1);
    bool b_late = false;
    for (size_t i = path.size() / 2; i < path.size(); ++i)
      b_late = b_late || path[i] == 1;
    CHECK(b_late);
    for (int s : path)
      CHECK(s != 4);
  }
  for (int rep = 0; rep < 200; ++rep) {
    auto path = walk(4);
    bool c_late = false;
    for (size_t i = path.size() / 2; i < path.size(); ++i)
      c_late = c_late || path[i] == 4;
    CHECK(c_late);
    CHECK(path.back() != 1);
  }
}

TEST_CASE("reach_prob: split, target, gambler's ruin") {
  auto split = mc_from_rows({{{1, 0.5}, {2, 0.5}}, {{1, 1.0}}, {{2, 1.0}}});
  auto v = reach_prob(split, {1});
  CHECK(v[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(v[1] == 1.0);
  CHECK(v[2] == 0.0);

  // Symmetric walk with absorbing ends; the closed form gives 1/2 from the
  // middle.
  auto walk = mc_from_rows({{{0, 1.0}}, {{0, 0.5}, {2, 0.5}}, {{2, 1.0}}});
  auto w = reach_prob(walk, {2});
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("reach_prob: iterative and direct methods agree") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + rng.below_int(6);
    std::vector<std::vector<std::pair<int, double>>> rows(n);
    for (int s = 0; s < n; ++s) {
      int a = rng.below_int(n), b = rng.below_int(n);
      if (a == b)
        rows[s] = {{a, 1.0}};
      else
        rows[s] = {{a, 0.25}, {b, 0.75}};
    }
    InducedMc mc = mc_from_rows(rows);
    std::vector<int> target{rng.below_int(n)};
    ReachOptions direct;
    direct.method = ReachOptions::Method::Direct;
    ReachOptions iterative;
    iterative.method = ReachOptions::Method::Iterative;
    auto vd = reach_prob(mc, target, direct);
    auto vi = reach_prob(mc, target, iterative);
    for (int s = 0; s < n; ++s)
      CHECK(std::abs(vd[s] - vi[s]) <= 1e-8);

    // Fixed-point property for the direct solution.
    for (int s = 0; s < n; ++s) {
      if (s == target[0])
        continue;
      double acc = 0.0;
      for (auto [t, p] : mc.rows[s])
        acc += p * vd[t];
      if (vd[s] > 0.0)
        CHECK(std::abs(vd[s] - acc) <= 1e-8);
    }
  }
}
