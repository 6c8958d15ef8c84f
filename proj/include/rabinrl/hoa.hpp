#pragma once

#include <string>
#include <vector>

#include "rabinrl/ltl.hpp"

namespace rabinrl {

// Deterministic Rabin automaton over the alphabet 2^AP. Transitions are
// fully expanded: delta[q][letter] with letter a bitmask over `ap` (bit i
// set iff ap[i] holds). Pair i demands: fin visited finitely often and
// some state of inf visited infinitely often.
struct Dra {
  std::vector<std::string> ap;
  int num_states = 0;
  int initial = 0;
  std::vector<std::vector<int>> delta; // [state][letter] -> state
  struct Pair {
    std::vector<int> fin; // C_i
    std::vector<int> inf; // B_i
  };
  std::vector<Pair> pairs;

  int num_letters() const { return 1 << static_cast<int>(ap.size()); }
  int step(int q, int letter) const { return delta[q][letter]; }
  int letter_of(const std::vector<std::string> &label) const;
};

// HOA v1 subset: state-based acceptance, explicit edge guards over AP
// indices, aliases; `properties:` is advisory. The acceptance expression
// must have the Rabin shape (Fin(0)&Inf(1)) | (Fin(2)&Inf(3)) | ...,
// mapping set 2i to C_i and set 2i+1 to B_i. Anything else (nondeterminism,
// incompleteness, transition-based acceptance, other acceptance shapes)
// raises input_error naming the offending construct.
Dra parse_hoa(const std::string &text);
Dra parse_hoa_file(const std::string &path);

struct DraRun {
  std::vector<int> inf_set;  // automaton states on the periodic orbit
  bool accepted = false;
  int accepting_pair = -1;   // first satisfied pair (1-based), 0 if none
};

// Simulates the automaton on prefix . cycle^w and decides acceptance from
// the periodic orbit of (state, cycle position) pairs.
DraRun dra_run_lasso(const Dra &a, const LassoWord &w);

} // namespace rabinrl
