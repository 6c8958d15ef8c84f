#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "rabinrl/errors.hpp"
#include "rabinrl/game.hpp"
#include "rabinrl/grid.hpp"
#include "rabinrl/hoa.hpp"
#include "rabinrl/learner.hpp"
#include "rabinrl/ltl.hpp"
#include "rabinrl/oracle.hpp"
#include "rabinrl/reward.hpp"
#include "rabinrl/rng.hpp"
#include "rabinrl/synthesis.hpp"

namespace {

using namespace rabinrl;

constexpr const char *kVersion = "0.1.0";

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw input_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path);
  if (!out)
    throw input_error("cannot write '" + path + "'");
  out << content;
}

std::string fnv1a64_hex(const std::string &data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << "0x" << std::hex << h;
  return os.str();
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string csv_quote(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += "\"\"";
    else
      out += c;
  }
  out += "\"";
  return out;
}

std::string meta_string(const StochasticGame &g, int s) {
  if (g.state_meta.empty())
    return "";
  return g.state_meta[s].dump();
}

std::string values_csv(const StochasticGame &g,
                       const std::vector<double> &values) {
  std::ostringstream os;
  os << "state_index,meta,value\n";
  for (int s = 0; s < g.num_states(); ++s)
    os << s << "," << csv_quote(meta_string(g, s)) << ","
       << format_double(values[s]) << "\n";
  return os.str();
}

std::string q_csv(const StochasticGame &g, const QTable &table) {
  std::ostringstream os;
  os << "state_index,meta,action,value\n";
  for (int s = 0; s < g.num_states(); ++s)
    for (size_t a = 0; a < g.states[s].actions.size(); ++a)
      os << s << "," << csv_quote(meta_string(g, s)) << ","
         << csv_quote(g.states[s].actions[a].name) << ","
         << format_double(table.q[s][a]) << "\n";
  return os.str();
}

FiniteMemoryStrategy memoryless_to_fm(const StochasticGame &g,
                                      const Strategy &mu) {
  FiniteMemoryStrategy fm;
  fm.k = 1;
  fm.num_base_states = g.num_states();
  fm.choices.resize(g.num_states());
  fm.state_meta.resize(g.num_states());
  for (const auto &[s, a] : mu.choice) {
    fm.choices[s] = {FiniteMemoryStrategy::Play{g.states[s].actions[a].name}};
    fm.state_meta[s] =
        g.state_meta.empty() ? json::object() : g.state_meta[s];
  }
  return fm;
}

OverlapPolicy parse_overlap(const std::string &s) {
  if (s == "c-wins")
    return OverlapPolicy::CWins;
  if (s == "b-wins")
    return OverlapPolicy::BWins;
  if (s == "error")
    return OverlapPolicy::Error;
  throw input_error("--bc-overlap must be c-wins, b-wins or error");
}

// ---------------------------------------------------------------------------
// product

struct ProductArgs {
  std::string game_path, hoa_path, out_path;
  bool no_prune = false;
  std::string ltl;
  int ltl_checks = 512;
  std::uint64_t ltl_seed = 1;
};

void cross_validate(const Dra &dra, const std::string &formula_text,
                    int checks, std::uint64_t seed) {
  std::set<std::string> ap(dra.ap.begin(), dra.ap.end());
  LtlFormula f = parse_ltl(formula_text, ap);
  Rng rng(seed);
  for (int i = 0; i < checks; ++i) {
    LassoWord w;
    w.ap = dra.ap;
    int plen = rng.below_int(7);
    int clen = 1 + rng.below_int(6);
    auto letter = [&]() {
      std::set<std::string> l;
      for (const std::string &p : dra.ap)
        if (rng.coin(0.5))
          l.insert(p);
      return l;
    };
    for (int j = 0; j < plen; ++j)
      w.prefix.push_back(letter());
    for (int j = 0; j < clen; ++j)
      w.cycle.push_back(letter());
    bool by_formula = eval_lasso(f, w);
    bool by_dra = dra_run_lasso(dra, w).accepted;
    if (by_formula != by_dra) {
      std::ostringstream os;
      os << "automaton disagrees with --ltl formula on lasso #" << i
         << " (formula says " << (by_formula ? "accept" : "reject") << ")";
      throw input_error(os.str());
    }
  }
}

int cmd_product(const ProductArgs &args) {
  StochasticGame game = load_game_file(args.game_path);
  Dra dra = parse_hoa_file(args.hoa_path);
  if (!args.ltl.empty())
    cross_validate(dra, args.ltl, args.ltl_checks, args.ltl_seed);
  StochasticGame product = build_product(game, dra, !args.no_prune);
  save_game_file(product, args.out_path);
  std::cout << "product: " << product.num_states() << " states, "
            << product.pairs.size() << " Rabin pair(s) -> " << args.out_path
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// kcopy

int cmd_kcopy(const std::string &game_path, const std::string &out_path) {
  StochasticGame game = load_game_file(game_path);
  if (game.pairs.empty())
    throw input_error("game has no Rabin pairs; build a product first");
  StochasticGame star = build_kcopy(game);
  save_game_file(star, out_path);
  std::cout << "kcopy: " << star.num_states() << " states (k="
            << game.pairs.size() << ") -> " << out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// learn

struct LearnArgs {
  std::string game_path, out_prefix;
  LearnParams params;
  std::string bc_overlap = "c-wins";
  int runs = 1;
  int jobs = 1;
  std::string from_manifest;
};

json learn_manifest(const LearnArgs &args, const LearnParams &p,
                    const std::string &game_text, const RewardScheme &scheme,
                    bool reduced, const std::string &strategy_path,
                    const std::string &q_path, std::uint64_t q_checksum) {
  json m;
  m["tool"] = "rabinrl";
  m["version"] = kVersion;
  m["command"] = "learn";
  m["inputs"] = {
      {"game", {{"path", args.game_path}, {"fnv1a64", fnv1a64_hex(game_text)}}}};
  m["params"] = {{"c", p.c},
                 {"episodes", p.episodes},
                 {"steps", p.max_steps},
                 {"eps_start", p.eps_start},
                 {"eps_end", p.eps_end},
                 {"alpha_start", p.alpha_start},
                 {"alpha_end", p.alpha_end},
                 {"seed", p.seed},
                 {"start_initial", p.start_at_initial},
                 {"bc_overlap", args.bc_overlap},
                 {"kcopy_applied", reduced}};
  m["scheme"] = {{"gamma", scheme.gamma()},
                 {"gamma_b", scheme.gamma_b()},
                 {"gamma_c", scheme.gamma_c()}};
  m["outputs"] = {{"strategy", strategy_path}, {"q_csv", q_path}};
  std::ostringstream cksum;
  cksum << "0x" << std::hex << q_checksum;
  m["q_checksum"] = cksum.str();
  return m;
}

void run_one_learn(const LearnArgs &args, const LearnParams &params,
                   const std::string &suffix) {
  std::string game_text = read_file(args.game_path);
  StochasticGame game = load_game(game_text);
  if (game.pairs.empty())
    throw input_error("game has no Rabin pairs; build a product first");

  bool already_star =
      game.info.count("kind") && game.info.at("kind") == "kcopy";
  StochasticGame star = already_star ? game : build_kcopy(game);
  RewardScheme scheme(params.c, star, parse_overlap(args.bc_overlap));

  QTable table = minimax_q(star, scheme, params);
  auto [mu, nu] = greedy_strategy(table, star);
  (void)nu;
  FiniteMemoryStrategy fm = induce_strategy(star, mu);

  const std::string strategy_path = args.out_prefix + suffix + ".strategy.json";
  const std::string q_path = args.out_prefix + suffix + ".q.csv";
  const std::string manifest_path = args.out_prefix + suffix + ".manifest.json";
  save_strategy_file(fm, strategy_path);
  write_file(q_path, q_csv(star, table));
  json manifest = learn_manifest(args, params, game_text, scheme,
                                 !already_star, strategy_path, q_path,
                                 table.checksum());
  write_file(manifest_path, manifest.dump(1) + "\n");
  std::cout << "learn: " << star.num_states() << " states, "
            << params.episodes << " episodes, seed " << params.seed << " -> "
            << strategy_path << "\n";
}

int cmd_learn(LearnArgs args) {
  if (!args.from_manifest.empty()) {
    json m;
    try {
      m = json::parse(read_file(args.from_manifest));
    } catch (const nlohmann::json::parse_error &e) {
      throw input_error(std::string("manifest is not valid JSON: ") + e.what());
    }
    const json &p = m.at("params");
    args.game_path = m.at("inputs").at("game").at("path").get<std::string>();
    args.params.c = p.at("c").get<double>();
    args.params.episodes = p.at("episodes").get<std::int64_t>();
    args.params.max_steps = p.at("steps").get<int>();
    args.params.eps_start = p.at("eps_start").get<double>();
    args.params.eps_end = p.at("eps_end").get<double>();
    args.params.alpha_start = p.at("alpha_start").get<double>();
    args.params.alpha_end = p.at("alpha_end").get<double>();
    args.params.seed = p.at("seed").get<std::uint64_t>();
    args.params.start_at_initial = p.at("start_initial").get<bool>();
    args.bc_overlap = p.at("bc_overlap").get<std::string>();
  }
  if (args.runs == 1) {
    run_one_learn(args, args.params, "");
    return 0;
  }
  // Independent seeds; outputs are per seed and never merged.
  std::vector<std::string> errors(args.runs);
#ifdef _OPENMP
#pragma omp parallel for num_threads(args.jobs) schedule(dynamic)
#endif
  for (int r = 0; r < args.runs; ++r) {
    LearnParams p = args.params;
    p.seed = args.params.seed + static_cast<std::uint64_t>(r);
    try {
      run_one_learn(args, p, "-seed" + std::to_string(p.seed));
    } catch (const std::exception &e) {
      errors[r] = e.what();
    }
  }
  for (const std::string &e : errors)
    if (!e.empty())
      throw input_error(e);
  return 0;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleArgs {
  std::string game_path, out_prefix;
  std::string method = "auto";
  double c = 0.01;
  std::uint64_t cap = 1000000;
  int pair = 0; // 1-based; 0 = use the single pair
  bool winning = false;
  bool serial = false;
  std::string bc_overlap = "c-wins";
};

int cmd_oracle(const OracleArgs &args) {
  StochasticGame game = load_game_file(args.game_path);
  if (args.pair > 0) {
    if (args.pair > static_cast<int>(game.pairs.size()))
      throw input_error("--pair out of range: game has " +
                        std::to_string(game.pairs.size()) + " pairs");
    game.pairs = {game.pairs[args.pair - 1]};
  }
  if (game.pairs.size() != 1)
    throw input_error("oracle needs a Rabin(1) game; pick one pair with "
                      "--pair or reduce with kcopy");

  OracleOptions opt;
  opt.cap = args.cap;
  opt.parallel = !args.serial;

  std::vector<double> values;
  Strategy mu;
  std::string method = args.method;
  if (method == "auto") {
    std::uint64_t nmu = strategy_count(game, Owner::Controller);
    std::uint64_t nnu = strategy_count(game, Owner::Environment);
    method = (nmu != UINT64_MAX && nnu != UINT64_MAX &&
              nmu <= opt.cap / std::max<std::uint64_t>(nnu, 1))
                 ? "enum"
                 : "vi";
  }
  if (method == "enum") {
    OracleResult res = enumerate_maximin(game, opt);
    values = res.values;
    mu = res.mu;
  } else if (method == "vi") {
    RewardScheme scheme(args.c, game, parse_overlap(args.bc_overlap));
    ViResult res = discounted_minimax_vi(game, scheme);
    values = res.values;
    mu = res.mu;
  } else {
    throw input_error("--method must be enum, vi or auto");
  }

  write_file(args.out_prefix + ".values.csv", values_csv(game, values));
  save_strategy_file(memoryless_to_fm(game, mu),
                     args.out_prefix + ".strategy.json");
  std::cout << "oracle (" << method << "): value at initial state = "
            << values[game.initial] << "\n";
  if (args.winning) {
    std::cout << "winning states (value = 1 within 1e-9):";
    for (int s = 0; s < game.num_states(); ++s)
      if (std::abs(values[s] - 1.0) <= 1e-9)
        std::cout << " " << s;
    std::cout << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string game_path, strategy_path, out_csv;
  std::uint64_t cap = 1000000;
};

int cmd_eval(const EvalArgs &args) {
  StochasticGame game = load_game_file(args.game_path);
  if (game.pairs.empty())
    throw input_error("game has no Rabin pairs");
  FiniteMemoryStrategy fm = load_strategy_file(args.strategy_path, game);

  OracleOptions opt;
  opt.cap = args.cap;
  ComposedEvaluation ev = evaluate_finite_memory(game, fm, opt);
  double worst = ev.worst[ev.composed.initial];
  std::cout << "worst-case satisfaction probability at the initial state: "
            << worst << "\n";

  if (game.pairs.size() == 1) {
    OracleResult res = enumerate_maximin(game, opt);
    std::cout << "oracle maximin at the initial state: "
              << res.values[game.initial] << " (gap "
              << res.values[game.initial] - worst << ")\n";
  } else {
    // Lower bound the k-copy route guarantees: Pr*(<> union of per-pair
    // winning sets) on the base game.
    std::vector<int> w_union;
    for (int j = 0; j < static_cast<int>(game.pairs.size()); ++j) {
      std::vector<int> wj = winning_set(game, j, opt);
      w_union.insert(w_union.end(), wj.begin(), wj.end());
    }
    std::sort(w_union.begin(), w_union.end());
    w_union.erase(std::unique(w_union.begin(), w_union.end()), w_union.end());
    double bound = 0.0;
    if (!w_union.empty())
      bound = maximin_reach(game, w_union, opt).values[game.initial];
    std::cout << "k-copy lower bound Pr*(<>W) with |W| = " << w_union.size()
              << ": " << bound << "\n";
  }
  if (!args.out_csv.empty())
    write_file(args.out_csv, values_csv(ev.composed, ev.worst));
  return 0;
}

// ---------------------------------------------------------------------------
// render

struct GridInfo {
  int width = 0, height = 0;
  std::vector<std::string> kinds; // rows of . # o
};

std::optional<GridInfo> grid_info(const StochasticGame &g) {
  auto itw = g.info.find("grid_width");
  auto ith = g.info.find("grid_height");
  if (itw == g.info.end() || ith == g.info.end())
    return std::nullopt;
  GridInfo gi;
  gi.width = std::stoi(itw->second);
  gi.height = std::stoi(ith->second);
  auto itk = g.info.find("grid_kinds");
  if (itk != g.info.end()) {
    std::stringstream ss(itk->second);
    std::string row;
    while (std::getline(ss, row, ';'))
      gi.kinds.push_back(row);
  }
  return gi;
}

char arrow_of(const std::string &action) {
  if (action == "N")
    return '^';
  if (action == "S")
    return 'v';
  if (action == "E")
    return '>';
  if (action == "W")
    return '<';
  return '?';
}

int cmd_render(const std::string &game_path, const std::string &artifact_path,
               const std::string &out_path) {
  StochasticGame game = load_game_file(game_path);
  std::ostringstream out;

  if (artifact_path.size() > 4 &&
      artifact_path.substr(artifact_path.size() - 4) == ".csv") {
    // Value table: one row per state; add an ASCII value grid per cell when
    // the game still is (or descends from) a grid.
    std::string csv = read_file(artifact_path);
    out << csv;
    auto gi = grid_info(game);
    if (gi && !game.state_meta.empty()) {
      std::istringstream in(csv);
      std::string line;
      std::getline(in, line); // header
      std::map<std::pair<int, int>, double> best;
      while (std::getline(in, line)) {
        auto first = line.find(',');
        auto last = line.rfind(',');
        if (first == std::string::npos || last <= first)
          continue;
        int s = std::stoi(line.substr(0, first));
        double v = std::stod(line.substr(last + 1));
        if (s < 0 || s >= game.num_states())
          continue;
        const json &m = game.state_meta[s];
        if (!m.contains("x") || !m.contains("y") || m.contains("dir"))
          continue;
        auto key = std::make_pair(m["x"].get<int>(), m["y"].get<int>());
        auto it = best.find(key);
        if (it == best.end() || v > it->second)
          best[key] = v;
      }
      out << "\nvalue grid (max over modes):\n";
      for (int y = 0; y < gi->height; ++y) {
        for (int x = 0; x < gi->width; ++x) {
          auto it = best.find({x, y});
          char buf[16];
          if (it == best.end())
            std::snprintf(buf, sizeof buf, "   .  ");
          else
            std::snprintf(buf, sizeof buf, " %.3f", it->second);
          out << buf;
        }
        out << "\n";
      }
    }
  } else {
    FiniteMemoryStrategy fm = load_strategy_file(artifact_path, game);
    auto gi = grid_info(game);
    if (gi) {
      for (int mode = 1; mode <= fm.k; ++mode) {
        out << "mode " << mode << ":\n";
        for (int y = 0; y < gi->height; ++y) {
          for (int x = 0; x < gi->width; ++x) {
            char cell = '.';
            if (!gi->kinds.empty() && gi->kinds[y][x] != '.')
              cell = gi->kinds[y][x];
            else {
              // Find a controller state at this cell (mode choices agree per
              // cell for grid games, where cells are the controller states).
              for (int s = 0; s < fm.num_base_states; ++s) {
                if (fm.choices[s].empty() || fm.state_meta[s].is_null())
                  continue;
                const json &m = fm.state_meta[s];
                if (!m.contains("x") || m.contains("dir") ||
                    m["x"].get<int>() != x || m["y"].get<int>() != y)
                  continue;
                const auto &c = fm.choice(s, mode);
                if (std::holds_alternative<FiniteMemoryStrategy::Play>(c))
                  cell = arrow_of(
                      std::get<FiniteMemoryStrategy::Play>(c).action);
                else
                  cell = static_cast<char>(
                      '0' + std::get<FiniteMemoryStrategy::Switch>(c).mode);
                break;
              }
            }
            out << cell;
          }
          out << "\n";
        }
        out << "\n";
      }
    } else {
      out << "state,mode,choice\n";
      for (int s = 0; s < fm.num_base_states; ++s) {
        if (fm.choices[s].empty())
          continue;
        for (int mode = 1; mode <= fm.k; ++mode) {
          const auto &c = fm.choice(s, mode);
          out << s << "," << mode << ",";
          if (std::holds_alternative<FiniteMemoryStrategy::Play>(c))
            out << csv_quote(std::get<FiniteMemoryStrategy::Play>(c).action);
          else
            out << "switch:"
                << std::get<FiniteMemoryStrategy::Switch>(c).mode;
          out << "\n";
        }
      }
    }
  }

  if (out_path.empty())
    std::cout << out.str();
  else
    write_file(out_path, out.str());
  return 0;
}

// ---------------------------------------------------------------------------
// env

int cmd_env(const std::string &variant, const std::string &grid_path,
            const std::string &out_path) {
  GridSpec spec = parse_grid_file(grid_path);
  StochasticGame game;
  if (variant == "robust")
    game = build_robust_game(spec);
  else if (variant == "adversary")
    game = build_adversary_game(spec);
  else
    throw input_error("env variant must be robust or adversary");
  save_game_file(game, out_path);
  std::cout << "env " << variant << ": " << game.num_states()
            << " states -> " << out_path << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Strategy synthesis for LTL objectives on turn-based "
               "stochastic games via Rabin product games and minimax-Q"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  ProductArgs product_args;
  auto *product = app.add_subcommand(
      "product", "Compose a game with a deterministic Rabin automaton");
  product->add_option("game", product_args.game_path, "game JSON file")
      ->required();
  product->add_option("hoa", product_args.hoa_path, "DRA in HOA v1 format")
      ->required();
  product->add_option("-o,--out", product_args.out_path, "output game file")
      ->required();
  product->add_flag("--no-prune", product_args.no_prune,
                    "keep unreachable product states");
  product->add_option("--ltl", product_args.ltl,
                      "cross-validate the automaton against this formula on "
                      "random lassos before building");
  product->add_option("--ltl-checks", product_args.ltl_checks,
                      "number of random lassos for --ltl validation");
  product->add_option("--ltl-seed", product_args.ltl_seed,
                      "seed for --ltl validation lassos");

  std::string kcopy_game, kcopy_out;
  auto *kcopy = app.add_subcommand(
      "kcopy", "Reduce a Rabin(k) game to a Rabin(1) game (k linked copies)");
  kcopy->add_option("game", kcopy_game, "game JSON file")->required();
  kcopy->add_option("-o,--out", kcopy_out, "output game file")->required();

  LearnArgs learn_args;
  auto *learn = app.add_subcommand(
      "learn", "Minimax-Q learning with the Rabin-derived reward scheme");
  learn->add_option("game", learn_args.game_path, "game JSON file");
  learn->add_option("-o,--out", learn_args.out_prefix,
                    "output prefix (.strategy.json, .q.csv, .manifest.json)")
      ->required();
  learn->add_option("--episodes", learn_args.params.episodes,
                    "number of episodes");
  learn->add_option("--steps", learn_args.params.max_steps,
                    "steps per episode");
  learn->add_option("--eps-start", learn_args.params.eps_start,
                    "initial exploration rate");
  learn->add_option("--eps-end", learn_args.params.eps_end,
                    "final exploration rate");
  learn->add_option("--alpha-start", learn_args.params.alpha_start,
                    "initial learning rate");
  learn->add_option("--alpha-end", learn_args.params.alpha_end,
                    "final learning rate");
  learn->add_option("--seed", learn_args.params.seed, "RNG seed");
  learn->add_option("--c", learn_args.params.c,
                    "reward scheme parameter (gamma = 1-c^3)");
  learn->add_flag("--start-initial", learn_args.params.start_at_initial,
                  "start episodes at the initial state instead of uniformly");
  learn->add_option("--bc-overlap", learn_args.bc_overlap,
                    "B-and-C overlap handling: c-wins, b-wins or error");
  learn->add_option("--runs", learn_args.runs,
                    "independent runs with consecutive seeds");
  learn->add_option("--jobs", learn_args.jobs, "parallel jobs for --runs");
  learn->add_option("--from-manifest", learn_args.from_manifest,
                    "re-run with the parameters of an existing manifest");

  OracleArgs oracle_args;
  auto *oracle = app.add_subcommand(
      "oracle", "Exact model-based maximin values (enumeration or VI)");
  oracle->add_option("game", oracle_args.game_path, "game JSON file")
      ->required();
  oracle->add_option("-o,--out", oracle_args.out_prefix,
                     "output prefix (.values.csv, .strategy.json)")
      ->required();
  oracle->add_option("--method", oracle_args.method, "enum, vi or auto");
  oracle->add_option("--c", oracle_args.c, "scheme parameter for --method vi");
  oracle->add_option("--cap", oracle_args.cap,
                     "enumeration cap on strategy pairs");
  oracle->add_option("--pair", oracle_args.pair,
                     "restrict to this Rabin pair (1-based)");
  oracle->add_flag("--winning", oracle_args.winning,
                   "print states with value 1 (within 1e-9)");
  oracle->add_flag("--serial", oracle_args.serial,
                   "disable the parallel enumeration kernel");
  oracle->add_option("--bc-overlap", oracle_args.bc_overlap,
                     "B-and-C overlap handling for --method vi");

  EvalArgs eval_args;
  auto *eval = app.add_subcommand(
      "eval", "Worst-case satisfaction probability of a strategy");
  eval->add_option("game", eval_args.game_path, "game JSON file")->required();
  eval->add_option("strategy", eval_args.strategy_path, "strategy JSON file")
      ->required();
  eval->add_option("-o,--out", eval_args.out_csv, "per-state CSV output");
  eval->add_option("--cap", eval_args.cap,
                   "enumeration cap on environment strategies");

  std::string render_game, render_artifact, render_out;
  auto *render = app.add_subcommand(
      "render", "ASCII rendering of strategies and value tables");
  render->add_option("game", render_game, "game JSON file")->required();
  render->add_option("artifact", render_artifact,
                     "strategy JSON or values CSV")
      ->required();
  render->add_option("-o,--out", render_out, "output file (default stdout)");

  std::string env_variant, env_grid, env_out;
  auto *env = app.add_subcommand(
      "env", "Generate a grid-world case study as a game file");
  env->add_option("variant", env_variant, "robust or adversary")->required();
  env->add_option("grid", env_grid, "grid spec file")->required();
  env->add_option("-o,--out", env_out, "output game file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (product->parsed())
      return cmd_product(product_args);
    if (kcopy->parsed())
      return cmd_kcopy(kcopy_game, kcopy_out);
    if (learn->parsed()) {
      if (learn_args.from_manifest.empty() && learn_args.game_path.empty())
        throw input_error("learn needs a game file or --from-manifest");
      return cmd_learn(learn_args);
    }
    if (oracle->parsed())
      return cmd_oracle(oracle_args);
    if (eval->parsed())
      return cmd_eval(eval_args);
    if (render->parsed())
      return cmd_render(render_game, render_artifact, render_out);
    if (env->parsed())
      return cmd_env(env_variant, env_grid, env_out);
  } catch (const input_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
