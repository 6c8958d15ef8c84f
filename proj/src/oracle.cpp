#include "rabinrl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rabinrl/errors.hpp"
#include "rabinrl/linsolve.hpp"

namespace rabinrl {

// ---------------------------------------------------------------------------
// Strategy enumeration

namespace {

struct ChoiceSpace {
  std::vector<int> states; // owned states, ascending
  std::vector<int> radix;  // |A(s)| per state
  std::uint64_t count = 1;
};

ChoiceSpace choice_space(const StochasticGame &g, Owner o) {
  ChoiceSpace cs;
  cs.states = g.owned_states(o);
  bool overflow = false;
  for (int s : cs.states) {
    int r = static_cast<int>(g.states[s].actions.size());
    cs.radix.push_back(r);
    if (cs.count > UINT64_MAX / static_cast<std::uint64_t>(r))
      overflow = true;
    else
      cs.count *= static_cast<std::uint64_t>(r);
  }
  if (overflow)
    cs.count = UINT64_MAX;
  return cs;
}

Strategy decode(const ChoiceSpace &cs, std::uint64_t id) {
  Strategy st;
  for (size_t p = cs.states.size(); p-- > 0;) {
    st.choice[cs.states[p]] =
        static_cast<int>(id % static_cast<std::uint64_t>(cs.radix[p]));
    id /= static_cast<std::uint64_t>(cs.radix[p]);
  }
  return st;
}

} // namespace

std::uint64_t strategy_count(const StochasticGame &g, Owner o) {
  return choice_space(g, o).count;
}

Strategy nth_strategy(const StochasticGame &g, Owner o, std::uint64_t id) {
  ChoiceSpace cs = choice_space(g, o);
  if (id >= cs.count)
    throw input_error("strategy id out of range");
  return decode(cs, id);
}

// ---------------------------------------------------------------------------
// Fixed-pair satisfaction

std::vector<double> rabin_satisfaction(const InducedMc &mc,
                                       const std::vector<RabinPair> &pairs) {
  std::vector<int> target;
  for (const auto &t : bsccs(mc)) {
    bool accepting = false;
    for (const RabinPair &p : pairs) {
      bool hits_fin = false, hits_inf = false;
      for (int s : t) {
        hits_fin = hits_fin || std::binary_search(p.fin.begin(), p.fin.end(), s);
        hits_inf = hits_inf || std::binary_search(p.inf.begin(), p.inf.end(), s);
      }
      if (!hits_fin && hits_inf) {
        accepting = true;
        break;
      }
    }
    if (accepting)
      target.insert(target.end(), t.begin(), t.end());
  }
  if (target.empty())
    return std::vector<double>(mc.num_states(), 0.0);
  return reach_prob(mc, target);
}

namespace {

// Satisfaction of the single pair via the Lemma-2 route: reach U_B.
std::vector<double> pair_value(const StochasticGame &g, const Strategy &mu,
                               const Strategy &nu) {
  InducedMc mc = induce_mc(g, mu, nu);
  StateClasses cls = classify_states(mc, g.pairs[0]);
  if (cls.u_inf.empty())
    return std::vector<double>(mc.num_states(), 0.0);
  return reach_prob(mc, cls.u_inf);
}

using PairValueFn = std::function<std::vector<double>(
    const StochasticGame &, const Strategy &, const Strategy &)>;

std::vector<double> min_over_env(const StochasticGame &g, const Strategy &mu,
                                 const ChoiceSpace &env,
                                 const PairValueFn &value) {
  std::vector<double> worst(g.num_states(),
                            std::numeric_limits<double>::infinity());
  for (std::uint64_t id = 0; id < env.count; ++id) {
    Strategy nu = decode(env, id);
    std::vector<double> v = value(g, mu, nu);
    for (int s = 0; s < g.num_states(); ++s)
      worst[s] = std::min(worst[s], v[s]);
  }
  return worst;
}

void check_cap(const ChoiceSpace &ctrl, const ChoiceSpace &env,
               std::uint64_t cap, const char *what) {
  if (ctrl.count == UINT64_MAX || env.count == UINT64_MAX ||
      ctrl.count > cap / std::max<std::uint64_t>(env.count, 1)) {
    std::ostringstream os;
    os << what << ": strategy-pair space exceeds the enumeration cap of "
       << cap << " pairs; use the value-iteration method instead";
    throw input_error(os.str());
  }
}

OracleResult maximin_by_enumeration(const StochasticGame &g,
                                    const OracleOptions &opt,
                                    const PairValueFn &value,
                                    const char *what) {
  ChoiceSpace ctrl = choice_space(g, Owner::Controller);
  ChoiceSpace env = choice_space(g, Owner::Environment);
  check_cap(ctrl, env, opt.cap, what);

  const int n = g.num_states();
  const std::int64_t mu_count = static_cast<std::int64_t>(ctrl.count);
  std::vector<double> best(n, -1.0);

  // Pass 1: componentwise max over controller strategies of the
  // componentwise min over environment responses. max/min commute with any
  // chunking, so the result does not depend on the thread count.
#ifdef _OPENMP
  if (opt.parallel) {
    const int threads = omp_get_max_threads();
    std::vector<std::vector<double>> local(
        threads, std::vector<double>(n, -1.0));
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t id = 0; id < mu_count; ++id) {
      std::vector<double> worst = min_over_env(
          g, decode(ctrl, static_cast<std::uint64_t>(id)), env, value);
      std::vector<double> &acc = local[omp_get_thread_num()];
      for (int s = 0; s < n; ++s)
        acc[s] = std::max(acc[s], worst[s]);
    }
    for (const auto &acc : local)
      for (int s = 0; s < n; ++s)
        best[s] = std::max(best[s], acc[s]);
  } else
#endif
  {
    for (std::int64_t id = 0; id < mu_count; ++id) {
      std::vector<double> worst = min_over_env(
          g, decode(ctrl, static_cast<std::uint64_t>(id)), env, value);
      for (int s = 0; s < n; ++s)
        best[s] = std::max(best[s], worst[s]);
    }
  }

  // Pass 2: lowest-id controller strategy with the smallest max-norm deficit
  // against the maximin vector (0 for a uniformly optimal strategy).
  std::int64_t best_id = 0;
  double best_deficit = std::numeric_limits<double>::infinity();
  for (std::int64_t id = 0; id < mu_count; ++id) {
    std::vector<double> worst = min_over_env(
        g, decode(ctrl, static_cast<std::uint64_t>(id)), env, value);
    double deficit = 0.0;
    for (int s = 0; s < n; ++s)
      deficit = std::max(deficit, best[s] - worst[s]);
    if (deficit < best_deficit) {
      best_deficit = deficit;
      best_id = id;
      if (deficit == 0.0)
        break;
    }
  }

  OracleResult res;
  res.values = best;
  res.mu = decode(ctrl, static_cast<std::uint64_t>(best_id));
  res.method = what;

  // Worst-case environment response to the chosen controller strategy.
  std::vector<double> worst_mu = min_over_env(g, res.mu, env, value);
  std::uint64_t nu_id = 0;
  double nu_deficit = std::numeric_limits<double>::infinity();
  for (std::uint64_t id = 0; id < env.count; ++id) {
    std::vector<double> v = value(g, res.mu, decode(env, id));
    double deficit = 0.0;
    for (int s = 0; s < n; ++s)
      deficit = std::max(deficit, v[s] - worst_mu[s]);
    if (deficit < nu_deficit) {
      nu_deficit = deficit;
      nu_id = id;
      if (deficit == 0.0)
        break;
    }
  }
  res.nu = decode(env, nu_id);
  return res;
}

} // namespace

OracleResult enumerate_maximin(const StochasticGame &g,
                               const OracleOptions &opt) {
  if (g.pairs.size() != 1)
    throw input_error("enumerate_maximin expects a Rabin(1) game, got " +
                      std::to_string(g.pairs.size()) + " pairs");
  return maximin_by_enumeration(g, opt, pair_value, "enumeration");
}

std::vector<double> evaluate_strategy(const StochasticGame &g,
                                      const Strategy &mu,
                                      const OracleOptions &opt) {
  if (g.pairs.size() != 1)
    throw input_error("evaluate_strategy expects a Rabin(1) game");
  ChoiceSpace env = choice_space(g, Owner::Environment);
  if (env.count == UINT64_MAX || env.count > opt.cap)
    throw input_error(
        "evaluate_strategy: environment strategy space exceeds the cap of " +
        std::to_string(opt.cap) + "; use the value-iteration method instead");
  return min_over_env(g, mu, env, pair_value);
}

OracleResult maximin_reach(const StochasticGame &g,
                           const std::vector<int> &target,
                           const OracleOptions &opt) {
  auto value = [&target](const StochasticGame &gg, const Strategy &mu,
                         const Strategy &nu) {
    InducedMc mc = induce_mc(gg, mu, nu);
    return reach_prob(mc, target);
  };
  return maximin_by_enumeration(g, opt, value, "enumeration");
}

std::vector<int> winning_set(const StochasticGame &g, int pair_index,
                             const OracleOptions &opt) {
  if (pair_index < 0 || pair_index >= static_cast<int>(g.pairs.size()))
    throw input_error("pair index out of range");
  StochasticGame gj = g;
  gj.pairs = {g.pairs[pair_index]};
  OracleResult res = enumerate_maximin(gj, opt);
  std::vector<int> w;
  for (int s = 0; s < gj.num_states(); ++s)
    if (std::abs(res.values[s] - 1.0) <= 1e-9)
      w.push_back(s);
  return w;
}

// ---------------------------------------------------------------------------
// Discounted values (exact policy evaluation + strategy iteration)

std::vector<double> discounted_pair_value(const StochasticGame &g,
                                          const RewardScheme &scheme,
                                          const Strategy &mu,
                                          const Strategy &nu) {
  InducedMc mc = induce_mc(g, mu, nu);
  const int n = mc.num_states();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  for (int s = 0; s < n; ++s) {
    a[s][s] = 1.0;
    const double gamma = scheme.discount(s);
    for (auto [t, p] : mc.rows[s])
      a[s][t] -= gamma * p;
    b[s] = scheme.reward(s);
  }
  return solve_dense(std::move(a), std::move(b));
}

namespace {

double q_value(const StochasticGame &g, const RewardScheme &scheme,
               const std::vector<double> &v, int s, int a) {
  double acc = 0.0;
  for (auto [t, p] : g.states[s].actions[a].outcomes)
    acc += p * v[t];
  return scheme.reward(s) + scheme.discount(s) * acc;
}

constexpr double kImprovementEps = 1e-13;

// Best environment response to mu by policy iteration with exact solves.
Strategy env_best_response(const StochasticGame &g, const RewardScheme &scheme,
                           const Strategy &mu, std::vector<double> *value_out) {
  Strategy nu;
  for (int s : g.owned_states(Owner::Environment))
    nu.choice[s] = 0;
  for (int round = 0;; ++round) {
    if (round > 100000)
      throw std::runtime_error("environment policy iteration did not settle");
    std::vector<double> v = discounted_pair_value(g, scheme, mu, nu);
    bool changed = false;
    for (auto &[s, choice] : nu.choice) {
      double best = q_value(g, scheme, v, s, choice);
      for (int a = 0; a < static_cast<int>(g.states[s].actions.size()); ++a) {
        double q = q_value(g, scheme, v, s, a);
        if (q < best - kImprovementEps) {
          best = q;
          choice = a;
          changed = true;
        }
      }
    }
    if (!changed) {
      if (value_out)
        *value_out = std::move(v);
      return nu;
    }
  }
}

} // namespace

std::vector<double> discounted_worstcase(const StochasticGame &g,
                                         const RewardScheme &scheme,
                                         const Strategy &mu) {
  std::vector<double> v;
  env_best_response(g, scheme, mu, &v);
  return v;
}

ViResult discounted_minimax_vi(const StochasticGame &g,
                               const RewardScheme &scheme, double tol) {
  Strategy mu;
  for (int s : g.owned_states(Owner::Controller))
    mu.choice[s] = 0;

  ViResult res;
  for (int round = 0;; ++round) {
    if (round > 100000)
      throw std::runtime_error("strategy iteration did not settle");
    std::vector<double> v;
    Strategy nu = env_best_response(g, scheme, mu, &v);
    bool changed = false;
    for (auto &[s, choice] : mu.choice) {
      double best = q_value(g, scheme, v, s, choice);
      for (int a = 0; a < static_cast<int>(g.states[s].actions.size()); ++a) {
        double q = q_value(g, scheme, v, s, a);
        if (q > best + kImprovementEps) {
          best = q;
          choice = a;
          changed = true;
        }
      }
    }
    if (!changed) {
      res.values = std::move(v);
      res.mu = std::move(mu);
      res.nu = std::move(nu);
      break;
    }
  }

  double residual = 0.0;
  for (int s = 0; s < g.num_states(); ++s) {
    double best = g.is_controller(s) ? -1e300 : 1e300;
    for (int a = 0; a < static_cast<int>(g.states[s].actions.size()); ++a) {
      double q = q_value(g, scheme, res.values, s, a);
      best = g.is_controller(s) ? std::max(best, q) : std::min(best, q);
    }
    residual = std::max(residual, std::abs(best - res.values[s]));
  }
  if (residual > tol) {
    std::ostringstream os;
    os << "strategy iteration left a Bellman residual of " << residual
       << " above the requested tolerance " << tol;
    throw std::runtime_error(os.str());
  }
  return res;
}

ComposedEvaluation evaluate_finite_memory(const StochasticGame &g,
                                          const FiniteMemoryStrategy &fm,
                                          const OracleOptions &opt) {
  ComposedEvaluation out;
  out.composed = compose_with_strategy(g, fm);
  ChoiceSpace env = choice_space(out.composed, Owner::Environment);
  if (env.count == UINT64_MAX || env.count > opt.cap)
    throw input_error(
        "evaluate_finite_memory: environment strategy space exceeds the cap "
        "of " +
        std::to_string(opt.cap));
  Strategy mu;
  for (int s : out.composed.owned_states(Owner::Controller))
    mu.choice[s] = 0;
  out.worst.assign(out.composed.num_states(),
                   std::numeric_limits<double>::infinity());
  for (std::uint64_t id = 0; id < env.count; ++id) {
    Strategy nu = decode(env, id);
    InducedMc mc = induce_mc(out.composed, mu, nu);
    std::vector<double> v = rabin_satisfaction(mc, out.composed.pairs);
    for (int s = 0; s < out.composed.num_states(); ++s)
      out.worst[s] = std::min(out.worst[s], v[s]);
  }
  return out;
}

} // namespace rabinrl
