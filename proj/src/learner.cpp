#include "rabinrl/learner.hpp"

#include <algorithm>
#include <cstring>

#include "rabinrl/errors.hpp"
#include "rabinrl/rng.hpp"

namespace rabinrl {

void LearnParams::validate() const {
  if (episodes < 1)
    throw input_error("episodes must be >= 1");
  if (max_steps < 1)
    throw input_error("max_steps must be >= 1");
  for (double v : {eps_start, eps_end, alpha_start, alpha_end})
    if (!(v > 0.0 && v <= 1.0))
      throw input_error("epsilon/alpha schedule values must be in (0,1]");
  if (!(c > 0.0 && c < 1.0))
    throw input_error("c must be in (0,1)");
}

double QTable::state_value(const StochasticGame &g, int s) const {
  const auto &row = q[s];
  if (g.is_controller(s))
    return *std::max_element(row.begin(), row.end());
  return *std::min_element(row.begin(), row.end());
}

std::uint64_t QTable::checksum() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void *data, size_t len) {
    const unsigned char *p = static_cast<const unsigned char *>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto &row : q)
    for (double v : row)
      mix(&v, sizeof(v));
  return h;
}

namespace {

int greedy_index(const std::vector<double> &row, bool maximize) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(row.size()); ++a) {
    if (maximize ? row[a] > row[best] : row[a] < row[best])
      best = a;
  }
  return best;
}

double schedule(double start, double end, std::int64_t episode,
                std::int64_t episodes) {
  if (episodes <= 1)
    return end;
  double t = static_cast<double>(episode) / static_cast<double>(episodes - 1);
  return start + (end - start) * t;
}

} // namespace

QTable minimax_q(const StochasticGame &g, const RewardScheme &scheme,
                 const LearnParams &p) {
  if (g.pairs.size() != 1)
    throw input_error("minimax_q expects a Rabin(1) game, got " +
                      std::to_string(g.pairs.size()) + " pairs");
  p.validate();

  const int n = g.num_states();
  QTable table;
  table.q.resize(n);
  table.visits.resize(n);
  for (int s = 0; s < n; ++s) {
    table.q[s].assign(g.states[s].actions.size(), 0.0);
    table.visits[s].assign(g.states[s].actions.size(), 0);
  }

  Rng rng(p.seed);
  // Draw order, fixed for reproducibility: per episode one start-state draw;
  // per step one eps coin, one action draw when exploring, one transition
  // draw.
  for (std::int64_t ep = 0; ep < p.episodes; ++ep) {
    const double eps = schedule(p.eps_start, p.eps_end, ep, p.episodes);
    const double alpha = schedule(p.alpha_start, p.alpha_end, ep, p.episodes);
    int s = p.start_at_initial ? g.initial : rng.below_int(n);
    for (int step = 0; step < p.max_steps; ++step) {
      const auto &actions = g.states[s].actions;
      int a;
      if (rng.uniform01() < eps)
        a = rng.below_int(static_cast<int>(actions.size()));
      else
        a = greedy_index(table.q[s], g.is_controller(s));

      // Sample the successor from the declared outcome distribution.
      double u = rng.uniform01();
      int next = actions[a].outcomes.back().first;
      for (auto [succ, prob] : actions[a].outcomes) {
        if (u < prob) {
          next = succ;
          break;
        }
        u -= prob;
      }

      const auto &next_row = table.q[next];
      const double bootstrap =
          g.is_controller(next)
              ? *std::max_element(next_row.begin(), next_row.end())
              : *std::min_element(next_row.begin(), next_row.end());
      const double target =
          scheme.reward(s) + scheme.discount(s) * bootstrap;
      table.q[s][a] = (1.0 - alpha) * table.q[s][a] + alpha * target;
      ++table.visits[s][a];
      s = next;
    }
  }
  return table;
}

std::pair<Strategy, Strategy> greedy_strategy(const QTable &q,
                                              const StochasticGame &g) {
  if (q.q.size() != static_cast<size_t>(g.num_states()))
    throw input_error("Q table does not cover the game");
  Strategy mu, nu;
  for (int s = 0; s < g.num_states(); ++s) {
    if (g.is_controller(s))
      mu.choice[s] = greedy_index(q.q[s], true);
    else
      nu.choice[s] = greedy_index(q.q[s], false);
  }
  return {mu, nu};
}

std::vector<double> greedy_values(const QTable &q, const StochasticGame &g) {
  std::vector<double> v(g.num_states(), 0.0);
  for (int s = 0; s < g.num_states(); ++s)
    v[s] = q.state_value(g, s);
  return v;
}

} // namespace rabinrl
