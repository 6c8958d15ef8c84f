// Benchmark of the oracle's strategy-pair enumeration: serial reference vs
// the OpenMP kernel, on a synthetic ring game sized by --states/--actions.
// The two paths must agree bitwise; the bench reports both times.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "rabinrl/game.hpp"
#include "rabinrl/oracle.hpp"
#include "rabinrl/reward.hpp"

using namespace rabinrl;

namespace {

// Ring of alternating controller/environment states. Action j at state s
// moves ahead j+1 steps w.p. 0.7 and 1 step w.p. 0.3; state n-1 is in B,
// state n-2 in C.
StochasticGame ring_game(int n, int actions) {
  StochasticGame g;
  g.ap = {};
  g.states.resize(n);
  for (int s = 0; s < n; ++s) {
    GameState st;
    st.owner = s % 2 == 0 ? Owner::Controller : Owner::Environment;
    for (int j = 0; j < actions; ++j) {
      GameAction a;
      a.name = "a" + std::to_string(j);
      int hop = (s + j + 1) % n;
      int step = (s + 1) % n;
      if (hop == step) {
        a.outcomes.emplace_back(hop, 1.0);
      } else {
        a.outcomes.emplace_back(hop, 0.7);
        a.outcomes.emplace_back(step, 0.3);
      }
      st.actions.push_back(std::move(a));
    }
    g.states[s] = std::move(st);
  }
  g.initial = 0;
  RabinPair pair;
  pair.inf = {n - 1};
  pair.fin = {n - 2};
  g.pairs.push_back(pair);
  return g;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"oracle enumeration benchmark: serial vs OpenMP"};
  int states = 12, actions = 3;
  std::uint64_t cap = 100000000ull;
  app.add_option("--states", states, "ring size (even)");
  app.add_option("--actions", actions, "actions per state");
  app.add_option("--cap", cap, "enumeration cap");
  CLI11_PARSE(app, argc, argv);

  StochasticGame g = ring_game(states, actions);
  std::uint64_t pairs = strategy_count(g, Owner::Controller) *
                        strategy_count(g, Owner::Environment);
  std::cout << "ring game: " << states << " states, " << actions
            << " actions, " << pairs << " strategy pairs\n";
#ifdef _OPENMP
  std::cout << "OpenMP threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "built without OpenMP; both runs are serial\n";
#endif

  OracleOptions serial;
  serial.cap = cap;
  serial.parallel = false;
  auto t0 = std::chrono::steady_clock::now();
  OracleResult ref = enumerate_maximin(g, serial);
  double t_serial = seconds_since(t0);
  std::cout << "serial:   " << t_serial << " s\n";

  OracleOptions parallel;
  parallel.cap = cap;
  parallel.parallel = true;
  t0 = std::chrono::steady_clock::now();
  OracleResult par = enumerate_maximin(g, parallel);
  double t_parallel = seconds_since(t0);
  std::cout << "parallel: " << t_parallel << " s (speedup "
            << t_serial / t_parallel << "x)\n";

  if (ref.values != par.values) {
    std::cerr << "MISMATCH between serial and parallel results\n";
    return 1;
  }
  std::cout << "results identical; value at initial state = "
            << ref.values[g.initial] << "\n";

  RewardScheme scheme(0.01, g);
  t0 = std::chrono::steady_clock::now();
  ViResult vi = discounted_minimax_vi(g, scheme);
  std::cout << "strategy iteration: " << seconds_since(t0) << " s, value "
            << vi.values[g.initial] << " (enumeration "
            << ref.values[g.initial] << ")\n";
  return 0;
}
