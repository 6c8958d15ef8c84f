#include "rabinrl/synthesis.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rabinrl/errors.hpp"

namespace rabinrl {

// ---------------------------------------------------------------------------
// Product game

StochasticGame build_product(const StochasticGame &g, const Dra &a,
                             bool prune) {
  std::set<std::string> game_ap(g.ap.begin(), g.ap.end());
  for (const std::string &p : a.ap)
    if (!game_ap.count(p))
      throw input_error("alphabet mismatch: automaton proposition '" + p +
                        "' is not in the game's AP");

  const int nq = a.num_states;
  // Letter read in (s, q): the game label projected onto the automaton AP.
  std::vector<int> letter_of_state(g.num_states());
  for (int s = 0; s < g.num_states(); ++s) {
    int letter = 0;
    for (const std::string &l : g.states[s].label) {
      auto it = std::find(a.ap.begin(), a.ap.end(), l);
      if (it != a.ap.end())
        letter |= 1 << static_cast<int>(it - a.ap.begin());
    }
    letter_of_state[s] = letter;
  }

  auto flat = [nq](int s, int q) { return s * nq + q; };
  std::vector<int> index(static_cast<size_t>(g.num_states()) * nq, -1);
  std::vector<std::pair<int, int>> order; // (s, q) in output order

  if (prune) {
    std::deque<std::pair<int, int>> queue;
    auto visit = [&](int s, int q) {
      if (index[flat(s, q)] == -1) {
        index[flat(s, q)] = static_cast<int>(order.size());
        order.emplace_back(s, q);
        queue.emplace_back(s, q);
      }
    };
    visit(g.initial, a.initial);
    while (!queue.empty()) {
      auto [s, q] = queue.front();
      queue.pop_front();
      const int q2 = a.step(q, letter_of_state[s]);
      for (const GameAction &act : g.states[s].actions)
        for (auto [succ, p] : act.outcomes) {
          (void)p;
          visit(succ, q2);
        }
    }
  } else {
    for (int s = 0; s < g.num_states(); ++s)
      for (int q = 0; q < nq; ++q) {
        index[flat(s, q)] = static_cast<int>(order.size());
        order.emplace_back(s, q);
      }
  }

  StochasticGame out;
  out.ap = g.ap;
  out.initial = index[flat(g.initial, a.initial)];
  out.info = g.info;
  out.info["kind"] = "product";
  out.states.reserve(order.size());
  for (auto [s, q] : order) {
    GameState st;
    st.owner = g.states[s].owner;
    st.label = g.states[s].label;
    const int q2 = a.step(q, letter_of_state[s]);
    for (const GameAction &act : g.states[s].actions) {
      GameAction pa;
      pa.name = act.name;
      for (auto [succ, p] : act.outcomes)
        pa.outcomes.emplace_back(index[flat(succ, q2)], p);
      st.actions.push_back(std::move(pa));
    }
    out.states.push_back(std::move(st));

    json meta = g.state_meta.empty() ? json::object()
                                     : json(g.state_meta[s]);
    meta["base"] = s;
    meta["q"] = q;
    out.state_meta.push_back(std::move(meta));
  }

  out.pairs.resize(a.pairs.size());
  for (size_t i = 0; i < a.pairs.size(); ++i) {
    std::set<int> fin(a.pairs[i].fin.begin(), a.pairs[i].fin.end());
    std::set<int> inf(a.pairs[i].inf.begin(), a.pairs[i].inf.end());
    for (size_t idx = 0; idx < order.size(); ++idx) {
      if (fin.count(order[idx].second))
        out.pairs[i].fin.push_back(static_cast<int>(idx));
      if (inf.count(order[idx].second))
        out.pairs[i].inf.push_back(static_cast<int>(idx));
    }
  }
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// k-copy game

std::string eps_action_name(int mode) {
  return "__eps_" + std::to_string(mode);
}

const char *const kEpsPrimeAction = "__eps_prime";

StochasticGame build_kcopy(const StochasticGame &g) {
  const int k = static_cast<int>(g.pairs.size());
  if (k < 1)
    throw input_error("k-copy construction needs at least one Rabin pair");
  const int n = g.num_states();

  // Layout: live copies first (copy-major), then one dummy layer per copy
  // holding the controller states.
  //   live(s, i)  = (i-1)*n + s                        for i in [k]
  //   dummy(s, j) = k*n + (j-1)*n_ctrl + ctrl_index(s) for j in [k]
  std::vector<int> ctrl_index(n, -1);
  int n_ctrl = 0;
  for (int s = 0; s < n; ++s)
    if (g.is_controller(s))
      ctrl_index[s] = n_ctrl++;
  auto live = [&](int s, int i) { return (i - 1) * n + s; };
  auto dummy = [&](int s, int j) { return k * n + (j - 1) * n_ctrl + ctrl_index[s]; };

  StochasticGame out;
  out.ap = g.ap;
  out.initial = live(g.initial, 1);
  out.info = g.info;
  out.info["kind"] = "kcopy";
  out.info["copies"] = std::to_string(k);
  out.states.resize(static_cast<size_t>(k) * n +
                    static_cast<size_t>(k) * n_ctrl);
  out.state_meta.resize(out.states.size());

  auto base_meta = [&](int s) {
    return g.state_meta.empty() ? json::object() : json(g.state_meta[s]);
  };

  for (int i = 1; i <= k; ++i) {
    for (int s = 0; s < n; ++s) {
      GameState st;
      st.owner = g.states[s].owner;
      st.label = g.states[s].label;
      for (const GameAction &act : g.states[s].actions) {
        GameAction a;
        a.name = act.name;
        for (auto [succ, p] : act.outcomes)
          a.outcomes.emplace_back(live(succ, i), p);
        st.actions.push_back(std::move(a));
      }
      if (g.is_controller(s)) {
        for (int j = 1; j <= k; ++j) {
          GameAction eps;
          eps.name = eps_action_name(j);
          eps.outcomes.emplace_back(dummy(s, j), 1.0);
          st.actions.push_back(std::move(eps));
        }
      }
      out.states[live(s, i)] = std::move(st);
      json meta = base_meta(s);
      meta["base"] = s;
      meta["copy"] = i;
      out.state_meta[live(s, i)] = std::move(meta);
    }
  }
  for (int j = 1; j <= k; ++j) {
    for (int s = 0; s < n; ++s) {
      if (!g.is_controller(s))
        continue;
      GameState st;
      st.owner = Owner::Environment;
      st.label = g.states[s].label;
      GameAction back;
      back.name = kEpsPrimeAction;
      back.outcomes.emplace_back(live(s, j), 1.0);
      st.actions.push_back(std::move(back));
      out.states[dummy(s, j)] = std::move(st);
      json meta = base_meta(s);
      meta["base"] = s;
      meta["copy"] = k + j;
      out.state_meta[dummy(s, j)] = std::move(meta);
    }
  }

  RabinPair star;
  for (int i = 1; i <= k; ++i) {
    for (int s : g.pairs[i - 1].fin)
      star.fin.push_back(live(s, i));
    for (int s : g.pairs[i - 1].inf)
      star.inf.push_back(live(s, i));
  }
  for (int j = 1; j <= k; ++j)
    for (int s = 0; s < n; ++s)
      if (g.is_controller(s))
        star.fin.push_back(dummy(s, j));
  std::sort(star.fin.begin(), star.fin.end());
  std::sort(star.inf.begin(), star.inf.end());
  out.pairs.push_back(std::move(star));
  out.validate(/*allow_reserved_actions=*/true);
  return out;
}

// ---------------------------------------------------------------------------
// Finite-memory strategies

int FiniteMemoryStrategy::resolve_mode(int state, int mode) const {
  int cur = mode;
  for (int hops = 0; hops < k; ++hops) {
    const Choice &c = choice(state, cur);
    if (std::holds_alternative<Play>(c))
      return cur;
    int next = std::get<Switch>(c).mode;
    cur = next;
  }
  throw input_error("strategy has a cyclic mode-switch chain at state " +
                    std::to_string(state));
}

FiniteMemoryStrategy induce_strategy(const StochasticGame &kcopy,
                                     const Strategy &mu_star) {
  if (kcopy.pairs.size() != 1 || !kcopy.info.count("copies"))
    throw input_error("induce_strategy expects a k-copy game");
  const int k = std::stoi(kcopy.info.at("copies"));
  if (kcopy.state_meta.empty())
    throw input_error("k-copy game is missing per-state meta");

  // Base controller states are the live copy-1 controller states.
  std::map<int, std::pair<int, int>> live_of; // kcopy idx -> (base, copy)
  int num_base = 0;
  for (int s = 0; s < kcopy.num_states(); ++s) {
    const json &m = kcopy.state_meta[s];
    int base = m.at("base").get<int>();
    int copy = m.at("copy").get<int>();
    num_base = std::max(num_base, base + 1);
    if (copy <= k)
      live_of[s] = {base, copy};
  }

  FiniteMemoryStrategy fm;
  fm.k = k;
  fm.num_base_states = num_base;
  fm.choices.resize(num_base);
  fm.state_meta.resize(num_base);
  for (const auto &[s, bc] : live_of) {
    auto [base, copy] = bc;
    json m = kcopy.state_meta[s];
    m.erase("copy");
    fm.state_meta[base] = std::move(m);
    if (!kcopy.is_controller(s))
      continue;
    auto it = mu_star.choice.find(s);
    if (it == mu_star.choice.end())
      throw input_error("strategy does not cover k-copy controller state " +
                        std::to_string(s));
    if (fm.choices[base].empty())
      fm.choices[base].resize(k, FiniteMemoryStrategy::Play{});
    const GameAction &act = kcopy.states[s].actions.at(it->second);
    if (act.name == kEpsPrimeAction)
      throw input_error("controller strategy uses environment action at " +
                        std::to_string(s));
    bool is_eps = false;
    for (int j = 1; j <= k; ++j)
      if (act.name == eps_action_name(j)) {
        fm.choices[base][copy - 1] = FiniteMemoryStrategy::Switch{j};
        is_eps = true;
        break;
      }
    if (!is_eps)
      fm.choices[base][copy - 1] = FiniteMemoryStrategy::Play{act.name};
  }

  // No mode-switch chain may cycle; resolve_mode throws if one does.
  for (int s = 0; s < num_base; ++s)
    if (!fm.choices[s].empty())
      for (int i = 1; i <= k; ++i)
        fm.resolve_mode(s, i);
  return fm;
}

std::string save_strategy(const FiniteMemoryStrategy &fm) {
  json j;
  j["k"] = fm.k;
  j["initial_mode"] = 1;
  json modes = json::array();
  for (int s = 0; s < fm.num_base_states; ++s) {
    if (fm.choices[s].empty())
      continue;
    for (int i = 1; i <= fm.k; ++i) {
      json entry;
      json meta = fm.state_meta[s].is_null() ? json::object()
                                             : fm.state_meta[s];
      if (!meta.contains("base"))
        meta["base"] = s;
      meta["mode"] = i;
      entry["state_meta"] = std::move(meta);
      const auto &c = fm.choice(s, i);
      if (std::holds_alternative<FiniteMemoryStrategy::Play>(c))
        entry["choice"] =
            json{{"action", std::get<FiniteMemoryStrategy::Play>(c).action}};
      else
        entry["choice"] =
            json{{"switch", std::get<FiniteMemoryStrategy::Switch>(c).mode}};
      modes.push_back(std::move(entry));
    }
  }
  j["modes"] = std::move(modes);
  return j.dump(1);
}

FiniteMemoryStrategy load_strategy(const std::string &text,
                                   const StochasticGame &base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw input_error(std::string("strategy file is not valid JSON: ") +
                      e.what());
  }
  FiniteMemoryStrategy fm;
  if (!j.contains("k") || !j["k"].is_number_integer())
    throw input_error("strategy file missing integer \"k\"");
  fm.k = j["k"].get<int>();
  if (fm.k < 1)
    throw input_error("strategy k must be >= 1");
  if (j.value("initial_mode", 1) != 1)
    throw input_error("strategy initial_mode must be 1");
  fm.num_base_states = base.num_states();
  fm.choices.resize(fm.num_base_states);
  fm.state_meta.resize(fm.num_base_states);
  if (!j.contains("modes") || !j["modes"].is_array())
    throw input_error("strategy file missing \"modes\" array");
  for (const auto &entry : j["modes"]) {
    const json &meta = entry.at("state_meta");
    int s = meta.at("base").get<int>();
    int mode = meta.at("mode").get<int>();
    if (s < 0 || s >= fm.num_base_states)
      throw input_error("strategy references base state " + std::to_string(s) +
                        " out of range");
    if (mode < 1 || mode > fm.k)
      throw input_error("strategy references mode " + std::to_string(mode) +
                        " out of range");
    if (!base.is_controller(s))
      throw input_error("strategy covers environment state " +
                        std::to_string(s));
    if (fm.choices[s].empty())
      fm.choices[s].resize(fm.k, FiniteMemoryStrategy::Play{});
    json m = meta;
    m.erase("mode");
    fm.state_meta[s] = std::move(m);
    const json &c = entry.at("choice");
    if (c.contains("action")) {
      std::string name = c["action"].get<std::string>();
      bool known = false;
      for (const GameAction &a : base.states[s].actions)
        known = known || a.name == name;
      if (!known)
        throw input_error("strategy plays unknown action '" + name +
                          "' at state " + std::to_string(s));
      fm.choices[s][mode - 1] = FiniteMemoryStrategy::Play{name};
    } else if (c.contains("switch")) {
      int to = c["switch"].get<int>();
      if (to < 1 || to > fm.k)
        throw input_error("strategy switches to mode " + std::to_string(to) +
                          " out of range");
      fm.choices[s][mode - 1] = FiniteMemoryStrategy::Switch{to};
    } else {
      throw input_error("strategy choice must have \"action\" or \"switch\"");
    }
  }
  for (int s : base.owned_states(Owner::Controller)) {
    if (fm.choices[s].empty())
      throw input_error("strategy does not cover controller state " +
                        std::to_string(s));
    for (int i = 1; i <= fm.k; ++i) {
      const auto &c = fm.choice(s, i);
      if (std::holds_alternative<FiniteMemoryStrategy::Play>(c) &&
          std::get<FiniteMemoryStrategy::Play>(c).action.empty())
        throw input_error("strategy misses a choice for state " +
                          std::to_string(s) + " mode " + std::to_string(i));
    }
    for (int i = 1; i <= fm.k; ++i)
      fm.resolve_mode(s, i);
  }
  return fm;
}

void save_strategy_file(const FiniteMemoryStrategy &fm,
                        const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw input_error("cannot write strategy file '" + path + "'");
  out << save_strategy(fm) << "\n";
}

FiniteMemoryStrategy load_strategy_file(const std::string &path,
                                        const StochasticGame &base) {
  std::ifstream in(path);
  if (!in)
    throw input_error("cannot open strategy file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_strategy(ss.str(), base);
}

StochasticGame compose_with_strategy(const StochasticGame &g,
                                     const FiniteMemoryStrategy &fm) {
  if (fm.num_base_states != g.num_states())
    throw input_error("strategy was built for a game with " +
                      std::to_string(fm.num_base_states) + " states, not " +
                      std::to_string(g.num_states()));
  const int k = fm.k;
  const int n = g.num_states();
  auto idx = [&](int s, int mode) { return (mode - 1) * n + s; };

  StochasticGame out;
  out.ap = g.ap;
  out.initial = idx(g.initial, 1);
  out.info = g.info;
  out.info["kind"] = "composed";
  out.states.resize(static_cast<size_t>(k) * n);
  out.state_meta.resize(out.states.size());
  for (int mode = 1; mode <= k; ++mode) {
    for (int s = 0; s < n; ++s) {
      GameState st;
      st.owner = g.states[s].owner;
      st.label = g.states[s].label;
      if (g.is_controller(s)) {
        // Switches resolve instantly; the acting mode persists.
        int acting = fm.resolve_mode(s, mode);
        const std::string &name =
            std::get<FiniteMemoryStrategy::Play>(fm.choice(s, acting)).action;
        const GameAction *base_act = nullptr;
        for (const GameAction &a : g.states[s].actions)
          if (a.name == name)
            base_act = &a;
        if (!base_act)
          throw input_error("strategy plays unknown action '" + name +
                            "' at state " + std::to_string(s));
        GameAction act;
        act.name = name;
        for (auto [succ, p] : base_act->outcomes)
          act.outcomes.emplace_back(idx(succ, acting), p);
        st.actions.push_back(std::move(act));
      } else {
        for (const GameAction &a : g.states[s].actions) {
          GameAction act;
          act.name = a.name;
          for (auto [succ, p] : a.outcomes)
            act.outcomes.emplace_back(idx(succ, mode), p);
          st.actions.push_back(std::move(act));
        }
      }
      out.states[idx(s, mode)] = std::move(st);
      json meta = g.state_meta.empty() ? json::object() : json(g.state_meta[s]);
      meta["base"] = s;
      meta["mode"] = mode;
      out.state_meta[idx(s, mode)] = std::move(meta);
    }
  }
  for (const RabinPair &p : g.pairs) {
    RabinPair lifted;
    for (int mode = 1; mode <= k; ++mode) {
      for (int s : p.fin)
        lifted.fin.push_back(idx(s, mode));
      for (int s : p.inf)
        lifted.inf.push_back(idx(s, mode));
    }
    std::sort(lifted.fin.begin(), lifted.fin.end());
    std::sort(lifted.inf.begin(), lifted.inf.end());
    out.pairs.push_back(std::move(lifted));
  }
  out.validate(/*allow_reserved_actions=*/true);
  return out;
}

} // namespace rabinrl
