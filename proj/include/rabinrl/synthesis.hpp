#pragma once

#include <string>
#include <variant>
#include <vector>

#include "rabinrl/game.hpp"
#include "rabinrl/hoa.hpp"

namespace rabinrl {

// Synchronous product of a labeled game and a DRA: states (s, q) with the
// owner of s, transitions P((s,q),a,(s',q')) = P(s,a,s') iff
// q' = delta(q, L(s)), and the automaton's Rabin pairs lifted to product
// states by their q component. Unreachable states are pruned unless
// prune == false. Per-state meta records {base, q}.
StochasticGame build_product(const StochasticGame &g, const Dra &a,
                             bool prune = true);

// Reserved mode-switch action names of the k-copy construction.
std::string eps_action_name(int mode);       // "__eps_<mode>", 1-based
extern const char *const kEpsPrimeAction;    // "__eps_prime"

// k-copy reduction of a Rabin(k) game to a Rabin(1) game: k copies sharing
// the base dynamics; controller states get mode-switch actions eps_j into
// environment-owned dummy states (one dummy layer per copy) that return via
// eps_prime; C* collects copy-i states of C_i plus every dummy; B* collects
// copy-i states of B_i. k = 1 still yields the uniform construction.
// Per-state meta records {base, copy} (merged over the base game's meta).
StochasticGame build_kcopy(const StochasticGame &g);

// Finite-memory strategy over a Rabin(k) game: per (controller state, mode)
// either a base-game action or a switch to another mode; initial mode 1.
struct FiniteMemoryStrategy {
  struct Switch {
    int mode; // 1-based
  };
  struct Play {
    std::string action;
  };
  using Choice = std::variant<Play, Switch>;

  int k = 1;
  int num_base_states = 0;
  // choices[state * k + (mode-1)], present only for controller states.
  std::vector<std::vector<Choice>> choices; // [state][mode-1], empty for env
  std::vector<json> state_meta;             // per base state, may be empty

  const Choice &choice(int state, int mode) const {
    return choices[state][mode - 1];
  }
  // Follows switches from (state, mode) to the acting mode; at most k-1
  // hops, a cycle raises input_error.
  int resolve_mode(int state, int mode) const;
};

// Translates a memoryless strategy on a k-copy game back to a
// finite-memory strategy on its base game. eps_j at (s,i) becomes a switch
// to mode j; a cyclic switch chain raises input_error.
FiniteMemoryStrategy induce_strategy(const StochasticGame &kcopy,
                                     const Strategy &mu_star);

std::string save_strategy(const FiniteMemoryStrategy &fm);
FiniteMemoryStrategy load_strategy(const std::string &text,
                                   const StochasticGame &base);
void save_strategy_file(const FiniteMemoryStrategy &fm,
                        const std::string &path);
FiniteMemoryStrategy load_strategy_file(const std::string &path,
                                        const StochasticGame &base);

// Fixes the controller to fm on game g (k pairs): composed states (s, mode)
// where controller states expose the single resolved action and environment
// states keep all actions; pairs are lifted across modes. Used to evaluate
// a finite-memory strategy against the full Rabin(k) condition.
StochasticGame compose_with_strategy(const StochasticGame &g,
                                     const FiniteMemoryStrategy &fm);

} // namespace rabinrl
