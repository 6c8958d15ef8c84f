#include "rabinrl/reward.hpp"

#include "rabinrl/errors.hpp"

namespace rabinrl {

namespace {

const RabinPair &single_pair(const StochasticGame &game) {
  if (game.pairs.size() != 1)
    throw input_error("reward scheme needs a Rabin(1) game, got " +
                      std::to_string(game.pairs.size()) + " pairs");
  return game.pairs[0];
}

} // namespace

RewardScheme::RewardScheme(double c, const StochasticGame &game,
                           OverlapPolicy overlap)
    : RewardScheme(c, game.num_states(), single_pair(game), overlap) {}

RewardScheme::RewardScheme(double c, int num_states, const RabinPair &pair,
                           OverlapPolicy overlap)
    : c_(c), overlap_(overlap), in_b_(num_states, 0), in_c_(num_states, 0) {
  if (!(c > 0.0 && c < 1.0))
    throw input_error("scheme parameter c must be in (0,1)");
  gamma_c_ = 1.0 - c;
  gamma_b_ = 1.0 - c * c;
  gamma_ = 1.0 - c * c * c;
  for (int s : pair.inf)
    in_b_.at(s) = 1;
  for (int s : pair.fin) {
    if (in_b_.at(s) && overlap_ == OverlapPolicy::Error)
      throw input_error("state " + std::to_string(s) +
                        " is in both B and C of the Rabin pair");
    in_c_.at(s) = 1;
  }
}

double RewardScheme::reward(int s) const {
  if (!in_b_[s])
    return 0.0;
  if (in_c_[s] && overlap_ == OverlapPolicy::CWins)
    return 0.0;
  return 1.0 - gamma_b_;
}

double RewardScheme::discount(int s) const {
  if (in_b_[s] && in_c_[s])
    return overlap_ == OverlapPolicy::BWins ? gamma_b_ : gamma_c_;
  if (in_b_[s])
    return gamma_b_;
  if (in_c_[s])
    return gamma_c_;
  return gamma_;
}

double RewardScheme::path_return(std::span<const int> states) const {
  double r = 0.0;
  for (size_t i = states.size(); i-- > 0;)
    r = reward(states[i]) + discount(states[i]) * r;
  return r;
}

} // namespace rabinrl
