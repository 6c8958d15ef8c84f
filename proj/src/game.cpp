#include "rabinrl/game.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "rabinrl/errors.hpp"

namespace rabinrl {

namespace {

bool is_reserved_action(const std::string &name) {
  if (name == "__eps_prime")
    return true;
  if (name.rfind("__eps_", 0) == 0) {
    const std::string tail = name.substr(6);
    return !tail.empty() &&
           std::all_of(tail.begin(), tail.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
  }
  return false;
}

} // namespace

std::vector<int> StochasticGame::owned_states(Owner o) const {
  std::vector<int> out;
  for (int s = 0; s < num_states(); ++s)
    if (states[s].owner == o)
      out.push_back(s);
  return out;
}

void StochasticGame::validate(bool allow_reserved_actions) const {
  const int n = num_states();
  if (n == 0)
    throw input_error("game has no states");
  if (initial < 0 || initial >= n)
    throw input_error("initial state " + std::to_string(initial) +
                      " out of range");
  std::set<std::string> aps(ap.begin(), ap.end());
  if (aps.size() != ap.size())
    throw input_error("duplicate atomic proposition in ap");
  for (int s = 0; s < n; ++s) {
    const GameState &st = states[s];
    for (const auto &a : st.label)
      if (!aps.count(a))
        throw input_error("state " + std::to_string(s) + " labeled with '" +
                          a + "' which is not in ap");
    if (st.actions.empty())
      throw input_error("state " + std::to_string(s) +
                        " has no actions (deadlock)");
    std::set<std::string> names;
    for (const GameAction &act : st.actions) {
      if (!names.insert(act.name).second)
        throw input_error("state " + std::to_string(s) +
                          " declares action '" + act.name + "' twice");
      if (!allow_reserved_actions && is_reserved_action(act.name))
        throw input_error("state " + std::to_string(s) +
                          " uses reserved action name '" + act.name + "'");
      double sum = 0.0;
      for (auto [succ, p] : act.outcomes) {
        if (succ < 0 || succ >= n)
          throw input_error("state " + std::to_string(s) + " action '" +
                            act.name + "' has dangling successor " +
                            std::to_string(succ));
        if (p < 0.0 || p > 1.0)
          throw input_error("state " + std::to_string(s) + " action '" +
                            act.name + "' has probability " +
                            std::to_string(p) + " outside [0,1]");
        sum += p;
      }
      if (std::abs(sum - 1.0) > kProbTolerance) {
        std::ostringstream os;
        os << "probabilities for state " << s << " action '" << act.name
           << "' sum to " << sum << " (expected 1 within " << kProbTolerance
           << ")";
        throw input_error(os.str());
      }
    }
  }
  for (size_t i = 0; i < pairs.size(); ++i) {
    for (const auto *set : {&pairs[i].fin, &pairs[i].inf})
      for (int s : *set)
        if (s < 0 || s >= n)
          throw input_error("rabin pair " + std::to_string(i + 1) +
                            " references state " + std::to_string(s) +
                            " out of range");
  }
  if (!state_meta.empty() && state_meta.size() != static_cast<size_t>(n))
    throw input_error("meta.states length does not match the state count");
}

// ---------------------------------------------------------------------------
// JSON (de)serialization

namespace {

Owner parse_owner(const std::string &s) {
  if (s == "ctrl")
    return Owner::Controller;
  if (s == "env")
    return Owner::Environment;
  throw input_error("owner must be \"ctrl\" or \"env\", got \"" + s + "\"");
}

std::vector<int> int_list(const json &j, const char *what) {
  if (!j.is_array())
    throw input_error(std::string(what) + " must be an array");
  std::vector<int> out;
  for (const auto &e : j) {
    if (!e.is_number_integer())
      throw input_error(std::string(what) + " must contain integers");
    out.push_back(e.get<int>());
  }
  return out;
}

} // namespace

StochasticGame load_game(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw input_error(std::string("game file is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw input_error("game file must be a JSON object");
  StochasticGame g;
  if (!j.contains("ap") || !j["ap"].is_array())
    throw input_error("game file missing \"ap\" array");
  for (const auto &a : j["ap"])
    g.ap.push_back(a.get<std::string>());
  if (!j.contains("states") || !j["states"].is_array())
    throw input_error("game file missing \"states\" array");
  for (const auto &js : j["states"]) {
    GameState st;
    if (!js.contains("owner"))
      throw input_error("state missing \"owner\"");
    st.owner = parse_owner(js["owner"].get<std::string>());
    if (js.contains("label"))
      for (const auto &l : js["label"])
        st.label.push_back(l.get<std::string>());
    if (!js.contains("actions") || !js["actions"].is_object() ||
        js["actions"].empty())
      throw input_error("state " + std::to_string(g.states.size()) +
                        " missing nonempty \"actions\" object");
    for (auto it = js["actions"].begin(); it != js["actions"].end(); ++it) {
      GameAction act;
      act.name = it.key();
      if (!it.value().is_array())
        throw input_error("action '" + act.name +
                          "' must map to an array of [successor, prob] pairs");
      for (const auto &edge : it.value()) {
        if (!edge.is_array() || edge.size() != 2)
          throw input_error("action '" + act.name +
                            "' has a malformed [successor, prob] entry");
        int succ = edge[0].get<int>();
        double p = edge[1].get<double>();
        if (p != 0.0)
          act.outcomes.emplace_back(succ, p);
      }
      st.actions.push_back(std::move(act));
    }
    g.states.push_back(std::move(st));
  }
  if (!j.contains("initial") || !j["initial"].is_number_integer())
    throw input_error("game file missing integer \"initial\"");
  g.initial = j["initial"].get<int>();
  if (j.contains("rabin_pairs")) {
    for (const auto &jp : j["rabin_pairs"]) {
      RabinPair p;
      p.fin = int_list(jp.contains("C") ? jp["C"] : json::array(), "pair C");
      p.inf = int_list(jp.contains("B") ? jp["B"] : json::array(), "pair B");
      std::sort(p.fin.begin(), p.fin.end());
      std::sort(p.inf.begin(), p.inf.end());
      g.pairs.push_back(std::move(p));
    }
  }
  bool kcopy_artifact = false;
  if (j.contains("meta") && j["meta"].is_object()) {
    const json &m = j["meta"];
    for (auto it = m.begin(); it != m.end(); ++it)
      if (it.value().is_string())
        g.info[it.key()] = it.value().get<std::string>();
    if (m.contains("states"))
      for (const auto &sm : m["states"])
        g.state_meta.push_back(sm);
    kcopy_artifact = g.info.count("kind") && g.info.at("kind") == "kcopy";
  }
  g.validate(/*allow_reserved_actions=*/kcopy_artifact);
  return g;
}

StochasticGame load_game_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw input_error("cannot open game file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_game(ss.str());
}

std::string save_game(const StochasticGame &g) {
  json j;
  j["ap"] = g.ap;
  j["states"] = json::array();
  for (const GameState &st : g.states) {
    json js;
    js["owner"] = st.owner == Owner::Controller ? "ctrl" : "env";
    js["label"] = st.label;
    json acts = json::object();
    for (const GameAction &a : st.actions) {
      json edges = json::array();
      for (auto [succ, p] : a.outcomes)
        edges.push_back(json::array({succ, p}));
      acts[a.name] = edges;
    }
    js["actions"] = std::move(acts);
    j["states"].push_back(std::move(js));
  }
  j["initial"] = g.initial;
  json jp = json::array();
  for (const RabinPair &p : g.pairs)
    jp.push_back(json{{"C", p.fin}, {"B", p.inf}});
  j["rabin_pairs"] = std::move(jp);
  if (!g.info.empty() || !g.state_meta.empty()) {
    json m = json::object();
    for (const auto &[k, v] : g.info)
      m[k] = v;
    if (!g.state_meta.empty())
      m["states"] = g.state_meta;
    j["meta"] = std::move(m);
  }
  return j.dump(1);
}

void save_game_file(const StochasticGame &g, const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw input_error("cannot write game file '" + path + "'");
  out << save_game(g) << "\n";
}

// ---------------------------------------------------------------------------
// Induced chains

int Strategy::at(int s) const {
  auto it = choice.find(s);
  if (it == choice.end())
    throw input_error("strategy does not cover state " + std::to_string(s));
  return it->second;
}

namespace {

void check_coverage(const StochasticGame &g, const Strategy &strat,
                    Owner owner, const char *name) {
  for (int s : g.owned_states(owner)) {
    auto it = strat.choice.find(s);
    if (it == strat.choice.end())
      throw input_error(std::string(name) + " strategy does not cover state " +
                        std::to_string(s));
    if (it->second < 0 ||
        it->second >= static_cast<int>(g.states[s].actions.size()))
      throw input_error(std::string(name) + " strategy picks action index " +
                        std::to_string(it->second) +
                        " out of range at state " + std::to_string(s));
  }
  for (const auto &[s, a] : strat.choice) {
    (void)a;
    if (s < 0 || s >= g.num_states() || g.states[s].owner != owner)
      throw input_error(std::string(name) + " strategy covers state " +
                        std::to_string(s) + " it does not own");
  }
}

} // namespace

InducedMc induce_mc(const StochasticGame &g, const Strategy &mu,
                    const Strategy &nu) {
  const int n = g.num_states();
  check_coverage(g, mu, Owner::Controller, "controller");
  check_coverage(g, nu, Owner::Environment, "environment");
  InducedMc mc;
  mc.mu = mu;
  mc.nu = nu;
  mc.rows.resize(n);
  mc.labels.resize(n);
  for (int s = 0; s < n; ++s) {
    const int a = g.is_controller(s) ? mu.at(s) : nu.at(s);
    mc.rows[s] = g.states[s].actions[a].outcomes;
    mc.labels[s] = g.states[s].label;
  }
  return mc;
}

// ---------------------------------------------------------------------------
// BSCC decomposition (iterative Tarjan)

std::vector<std::vector<int>> bsccs(const InducedMc &mc) {
  const int n = mc.num_states();
  std::vector<int> index(n, -1), lowlink(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> sccs;
  int counter = 0;

  struct Frame {
    int v;
    size_t edge;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1)
      continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      Frame &f = frames.back();
      if (f.edge < mc.rows[f.v].size()) {
        int w = mc.rows[f.v][f.edge++].first;
        if (index[w] == -1) {
          index[w] = lowlink[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[f.v] = std::min(lowlink[f.v], index[w]);
        }
      } else {
        int v = f.v;
        frames.pop_back();
        if (!frames.empty())
          lowlink[frames.back().v] = std::min(lowlink[frames.back().v],
                                              lowlink[v]);
        if (lowlink[v] == index[v]) {
          std::vector<int> scc;
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = static_cast<int>(sccs.size());
            scc.push_back(w);
          } while (w != v);
          std::sort(scc.begin(), scc.end());
          sccs.push_back(std::move(scc));
        }
      }
    }
  }

  std::vector<std::vector<int>> bottoms;
  for (const auto &scc : sccs) {
    bool bottom = true;
    for (int v : scc) {
      for (auto [w, p] : mc.rows[v]) {
        (void)p;
        if (comp[w] != comp[v]) {
          bottom = false;
          break;
        }
      }
      if (!bottom)
        break;
    }
    if (bottom)
      bottoms.push_back(scc);
  }
  std::sort(bottoms.begin(), bottoms.end(),
            [](const auto &a, const auto &b) { return a.front() < b.front(); });
  return bottoms;
}

StateClasses classify_states(const InducedMc &mc, const RabinPair &pair) {
  std::set<int> fin(pair.fin.begin(), pair.fin.end());
  std::set<int> inf(pair.inf.begin(), pair.inf.end());
  StateClasses out;
  for (const auto &t : bsccs(mc)) {
    bool has_fin = false, has_inf = false;
    for (int s : t) {
      has_fin = has_fin || fin.count(s);
      has_inf = has_inf || inf.count(s);
    }
    if (!has_fin && !has_inf) {
      out.u_none.insert(out.u_none.end(), t.begin(), t.end());
    } else {
      if (!has_fin)
        for (int s : t)
          if (inf.count(s))
            out.u_inf.push_back(s);
      for (int s : t)
        if (fin.count(s))
          out.u_fin.push_back(s);
    }
  }
  std::sort(out.u_inf.begin(), out.u_inf.end());
  std::sort(out.u_fin.begin(), out.u_fin.end());
  std::sort(out.u_none.begin(), out.u_none.end());
  return out;
}

// ---------------------------------------------------------------------------
// Reachability

namespace {

// States from which target is unreachable in the underlying graph.
std::vector<char> unreachable_mask(const InducedMc &mc,
                                   const std::vector<int> &target) {
  const int n = mc.num_states();
  std::vector<std::vector<int>> rev(n);
  for (int s = 0; s < n; ++s)
    for (auto [t, p] : mc.rows[s]) {
      (void)p;
      rev[t].push_back(s);
    }
  std::vector<char> can_reach(n, 0);
  std::deque<int> queue;
  for (int t : target)
    if (!can_reach[t]) {
      can_reach[t] = 1;
      queue.push_back(t);
    }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int u : rev[v])
      if (!can_reach[u]) {
        can_reach[u] = 1;
        queue.push_back(u);
      }
  }
  for (int s = 0; s < n; ++s)
    can_reach[s] = !can_reach[s];
  return can_reach;
}

std::vector<double> reach_direct(const InducedMc &mc,
                                 const std::vector<char> &is_target,
                                 const std::vector<char> &is_zero) {
  const int n = mc.num_states();
  std::vector<int> idx(n, -1);
  std::vector<int> maybe;
  for (int s = 0; s < n; ++s)
    if (!is_target[s] && !is_zero[s]) {
      idx[s] = static_cast<int>(maybe.size());
      maybe.push_back(s);
    }
  const int m = static_cast<int>(maybe.size());
  std::vector<double> v(n, 0.0);
  for (int s = 0; s < n; ++s)
    if (is_target[s])
      v[s] = 1.0;
  if (m == 0)
    return v;

  // Solve (I - Q) x = b with Gaussian elimination (partial pivoting).
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (int i = 0; i < m; ++i) {
    a[i][i] = 1.0;
    for (auto [t, p] : mc.rows[maybe[i]]) {
      if (is_target[t])
        a[i][m] += p;
      else if (!is_zero[t])
        a[i][idx[t]] -= p;
    }
  }
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col]))
        piv = r;
    std::swap(a[col], a[piv]);
    if (a[col][col] == 0.0)
      throw std::runtime_error("reachability system is singular");
    for (int r = col + 1; r < m; ++r) {
      double f = a[r][col] / a[col][col];
      if (f == 0.0)
        continue;
      for (int c = col; c <= m; ++c)
        a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> x(m, 0.0);
  for (int r = m - 1; r >= 0; --r) {
    double acc = a[r][m];
    for (int c = r + 1; c < m; ++c)
      acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  for (int i = 0; i < m; ++i)
    v[maybe[i]] = std::min(1.0, std::max(0.0, x[i]));
  return v;
}

std::vector<double> reach_iterative(const InducedMc &mc,
                                    const std::vector<char> &is_target,
                                    const std::vector<char> &is_zero,
                                    double tol, long max_iterations) {
  const int n = mc.num_states();
  std::vector<double> v(n, 0.0), next(n, 0.0);
  for (int s = 0; s < n; ++s)
    if (is_target[s])
      v[s] = next[s] = 1.0;
  double diff = 0.0;
  for (long it = 0; it < max_iterations; ++it) {
    diff = 0.0;
    for (int s = 0; s < n; ++s) {
      if (is_target[s] || is_zero[s])
        continue;
      double acc = 0.0;
      for (auto [t, p] : mc.rows[s])
        acc += p * v[t];
      next[s] = acc;
      diff = std::max(diff, std::abs(acc - v[s]));
    }
    v.swap(next);
    if (diff <= tol)
      return v;
  }
  std::ostringstream os;
  os << "reachability iteration did not converge after " << max_iterations
     << " iterations (residual " << diff << ")";
  throw input_error(os.str());
}

} // namespace

std::vector<double> reach_prob(const InducedMc &mc,
                               const std::vector<int> &target,
                               const ReachOptions &opt) {
  const int n = mc.num_states();
  std::vector<char> is_target(n, 0);
  for (int t : target) {
    if (t < 0 || t >= n)
      throw input_error("reachability target state " + std::to_string(t) +
                        " out of range");
    is_target[t] = 1;
  }
  std::vector<char> is_zero = unreachable_mask(mc, target);
  bool direct = opt.method == ReachOptions::Method::Direct ||
                (opt.method == ReachOptions::Method::Auto && n <= 200);
  if (direct)
    return reach_direct(mc, is_target, is_zero);
  return reach_iterative(mc, is_target, is_zero, opt.tol, opt.max_iterations);
}

} // namespace rabinrl
