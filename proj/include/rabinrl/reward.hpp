#pragma once

#include <span>
#include <vector>

#include "rabinrl/game.hpp"

namespace rabinrl {

enum class OverlapPolicy { CWins, BWins, Error };

// State-based reward and discount derived from a Rabin pair:
//   R(s)     = 1 - gamma_b on B, 0 elsewhere
//   Gamma(s) = gamma_b on B, gamma_c on C, gamma elsewhere
// with the power family gamma_c = 1-c, gamma_b = 1-c^2, gamma = 1-c^3,
// which keeps 0 < gamma_c < gamma_b < gamma < 1 and drives both
// (1-gamma)/(1-gamma_b) and (1-gamma_b)/(1-gamma_c) to 0 as c -> 0.
class RewardScheme {
public:
  // B/C from the game's single Rabin pair. Throws input_error if c is not
  // in (0,1), the game does not have exactly one pair, or B and C overlap
  // under OverlapPolicy::Error.
  RewardScheme(double c, const StochasticGame &game,
               OverlapPolicy overlap = OverlapPolicy::CWins);
  RewardScheme(double c, int num_states, const RabinPair &pair,
               OverlapPolicy overlap = OverlapPolicy::CWins);

  double c() const { return c_; }
  double gamma() const { return gamma_; }
  double gamma_b() const { return gamma_b_; }
  double gamma_c() const { return gamma_c_; }

  bool in_b(int s) const { return in_b_[s] != 0; }
  bool in_c(int s) const { return in_c_[s] != 0; }

  double reward(int s) const;
  double discount(int s) const;

  // Sum_i R(s_i) * Prod_{j<i} Gamma(s_j) over a finite truncation, computed
  // backward so that the return recursion holds exactly:
  //   return(x::rest) == R(x) + Gamma(x) * return(rest).
  double path_return(std::span<const int> states) const;

private:
  double c_, gamma_, gamma_b_, gamma_c_;
  OverlapPolicy overlap_;
  std::vector<char> in_b_, in_c_;
};

} // namespace rabinrl
