#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rabinrl/game.hpp"
#include "rabinrl/reward.hpp"
#include "rabinrl/synthesis.hpp"

namespace rabinrl {

struct OracleOptions {
  std::uint64_t cap = 1000000; // max #controller x #environment strategies
  bool parallel = true;        // OpenMP over strategy chunks when available
};

struct OracleResult {
  std::vector<double> values; // per-state maximin probability
  Strategy mu;                // controller strategy attaining the values
  Strategy nu;                // worst-case environment response to mu
  std::string method;         // "enumeration" or "value-iteration"
};

// Number of pure memoryless strategies of one player.
std::uint64_t strategy_count(const StochasticGame &g, Owner o);
// The id-th strategy in lexicographic (state index major, action index
// minor) order.
Strategy nth_strategy(const StochasticGame &g, Owner o, std::uint64_t id);

// Probability that a path of the fixed chain satisfies some Rabin pair:
// classify BSCCs, then the exact reachability of the accepting ones.
std::vector<double> rabin_satisfaction(const InducedMc &mc,
                                       const std::vector<RabinPair> &pairs);

// Exact per-state maximin satisfaction probability of a Rabin(1) game by
// full enumeration of pure memoryless strategy pairs (max over controller
// strategies of the componentwise min over environment responses). Raises
// input_error when the pair count exceeds opt.cap, advising the
// value-iteration method. Deterministic and independent of thread count.
OracleResult enumerate_maximin(const StochasticGame &g,
                               const OracleOptions &opt = {});

// Worst case over environment strategies for a fixed controller strategy.
std::vector<double> evaluate_strategy(const StochasticGame &g,
                                      const Strategy &mu,
                                      const OracleOptions &opt = {});

// Maximin probability of reaching `target` (enumeration, like above).
OracleResult maximin_reach(const StochasticGame &g,
                           const std::vector<int> &target,
                           const OracleOptions &opt = {});

// W^(j): states of the per-pair game G^(j) whose maximin satisfaction
// probability equals 1 (tested at tolerance 1e-9).
std::vector<int> winning_set(const StochasticGame &g, int pair_index,
                             const OracleOptions &opt = {});

struct ViResult {
  std::vector<double> values;
  Strategy mu;
  Strategy nu;
};

// Fixed point of v(s) = R(s) + Gamma(s) * (max|min)_a sum P(s,a,s') v(s'),
// solved by strategy iteration with exact policy evaluation (dense linear
// solves), so the Bellman residual reaches tol even for discounts of
// 1 - 1e-9 where plain value iteration cannot terminate.
ViResult discounted_minimax_vi(const StochasticGame &g,
                               const RewardScheme &scheme, double tol = 1e-9);

// Exact discounted value of a fixed strategy pair.
std::vector<double> discounted_pair_value(const StochasticGame &g,
                                          const RewardScheme &scheme,
                                          const Strategy &mu,
                                          const Strategy &nu);

// Exact discounted worst case over environment strategies for a fixed
// controller strategy (best-response policy iteration).
std::vector<double> discounted_worstcase(const StochasticGame &g,
                                         const RewardScheme &scheme,
                                         const Strategy &mu);

struct ComposedEvaluation {
  StochasticGame composed;    // (state, mode) game with the controller fixed
  std::vector<double> worst;  // min over environment strategies of
                              // Pr(some Rabin pair satisfied), per state
};

// Worst-case satisfaction probability of the full (k-pair) Rabin condition
// under a finite-memory controller strategy; the environment minimizes over
// pure memoryless strategies of the composed game.
ComposedEvaluation evaluate_finite_memory(const StochasticGame &g,
                                          const FiniteMemoryStrategy &fm,
                                          const OracleOptions &opt = {});

} // namespace rabinrl
