#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace rabinrl {

using json = nlohmann::ordered_json;

enum class Owner { Controller, Environment };

struct GameAction {
  std::string name;
  std::vector<std::pair<int, double>> outcomes; // (successor, probability)
};

struct GameState {
  Owner owner = Owner::Controller;
  std::vector<std::string> label;   // subset of the game's AP
  std::vector<GameAction> actions;  // declaration order is significant
};

struct RabinPair {
  std::vector<int> fin; // C_i: to be visited finitely often
  std::vector<int> inf; // B_i: to be visited infinitely often
};

// Labeled turn-based stochastic game. Also used for product and k-copy
// games, which carry their acceptance condition in `pairs` and provenance
// in `meta` (one entry per state when present).
struct StochasticGame {
  std::vector<std::string> ap;
  std::vector<GameState> states;
  int initial = 0;
  std::vector<RabinPair> pairs;
  std::map<std::string, std::string> info; // free-form metadata (kind, ...)
  std::vector<json> state_meta;            // empty or one entry per state

  int num_states() const { return static_cast<int>(states.size()); }
  bool is_controller(int s) const {
    return states[s].owner == Owner::Controller;
  }
  std::vector<int> owned_states(Owner o) const;

  // Throws input_error on any invariant violation (row sums, deadlocks,
  // dangling indices, labels outside AP, reserved action names, ...).
  void validate(bool allow_reserved_actions = false) const;
};

// Probability rows must sum to 1 within this tolerance.
inline constexpr double kProbTolerance = 1e-9;

StochasticGame load_game(const std::string &text);
StochasticGame load_game_file(const std::string &path);
std::string save_game(const StochasticGame &g);
void save_game_file(const StochasticGame &g, const std::string &path);

// Pure memoryless strategy: a chosen action index for each owned state.
struct Strategy {
  std::map<int, int> choice; // state -> action index

  int at(int s) const;
};

// Markov chain induced by a strategy pair: one row per state.
struct InducedMc {
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<std::vector<std::string>> labels;
  Strategy mu, nu; // provenance

  int num_states() const { return static_cast<int>(rows.size()); }
};

// Throws input_error unless mu/nu cover exactly the controller/environment
// states of g.
InducedMc induce_mc(const StochasticGame &g, const Strategy &mu,
                    const Strategy &nu);

// Bottom SCCs of the chain (SCCs with no outgoing edge), each sorted,
// ordered by smallest member state.
std::vector<std::vector<int>> bsccs(const InducedMc &mc);

struct StateClasses {
  std::vector<int> u_inf;    // U_B: B-states of BSCCs disjoint from C
  std::vector<int> u_fin;    // U_C: C-states of any BSCC
  std::vector<int> u_none;   // all states of BSCCs meeting neither B nor C
};

StateClasses classify_states(const InducedMc &mc, const RabinPair &pair);

struct ReachOptions {
  enum class Method { Auto, Iterative, Direct };
  Method method = Method::Auto;   // Auto: direct solve up to 200 states
  double tol = 1e-10;
  long max_iterations = 1000000;
};

// Probability of ever reaching `target` from each state. The iterative
// method reports non-convergence (with the residual) via input_error.
std::vector<double> reach_prob(const InducedMc &mc,
                               const std::vector<int> &target,
                               const ReachOptions &opt = {});

} // namespace rabinrl
