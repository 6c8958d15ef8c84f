#pragma once

#include <cstdint>
#include <vector>

#include "rabinrl/game.hpp"
#include "rabinrl/reward.hpp"

namespace rabinrl {

struct LearnParams {
  std::int64_t episodes = 10000;
  int max_steps = 1000;
  double eps_start = 0.5, eps_end = 0.05;
  double alpha_start = 0.5, alpha_end = 0.05;
  std::uint64_t seed = 0;
  double c = 0.01;
  bool start_at_initial = false; // default: uniformly random start states

  void validate() const; // throws input_error
};

struct QTable {
  std::vector<std::vector<double>> q;        // [state][action index]
  std::vector<std::vector<std::uint64_t>> visits;

  double state_value(const StochasticGame &g, int s) const;
  std::uint64_t checksum() const; // FNV-1a over the value bytes
};

// Minimax-Q on a Rabin(1) game with the scheme's reward/discount. Each
// episode starts in a uniformly random state (or the initial state), both
// players act eps-greedily from the shared table, and each step updates
//   Q(s,a) <- (1-alpha) Q(s,a)
//             + alpha (R(s) + Gamma(s) * opt_{a'} Q(s',a'))
// with opt = max when s' is controller-owned and min otherwise. eps and
// alpha decay linearly per episode. Bit-identical for identical params.
QTable minimax_q(const StochasticGame &g, const RewardScheme &scheme,
                 const LearnParams &p);

// Greedy strategies from a table: argmax for the controller, argmin for the
// environment, ties broken toward the lowest action index.
std::pair<Strategy, Strategy> greedy_strategy(const QTable &q,
                                              const StochasticGame &g);

// Greedy state values (max over actions at controller states, min at
// environment states).
std::vector<double> greedy_values(const QTable &q, const StochasticGame &g);

} // namespace rabinrl
