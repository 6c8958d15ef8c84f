#include "rabinrl/hoa.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "rabinrl/errors.hpp"

namespace rabinrl {

int Dra::letter_of(const std::vector<std::string> &label) const {
  int letter = 0;
  for (const std::string &a : label) {
    auto it = std::find(ap.begin(), ap.end(), a);
    if (it == ap.end())
      throw input_error("label atom '" + a +
                        "' is not in the automaton's AP");
    letter |= 1 << static_cast<int>(it - ap.begin());
  }
  return letter;
}

namespace {

[[noreturn]] void fail(int line, const std::string &msg) {
  throw input_error("HOA line " + std::to_string(line) + ": " + msg);
}

[[noreturn]] void unsupported(int line, const std::string &what) {
  fail(line, "unsupported feature: " + what);
}

// Guard expression over AP indices; evaluated per alphabet letter.
struct Guard {
  enum Kind { True, False, Ap, Not, And, Or } kind;
  int ap = -1;
  std::unique_ptr<Guard> lhs, rhs;

  bool eval(int letter) const {
    switch (kind) {
    case True:
      return true;
    case False:
      return false;
    case Ap:
      return (letter >> ap) & 1;
    case Not:
      return !lhs->eval(letter);
    case And:
      return lhs->eval(letter) && rhs->eval(letter);
    case Or:
      return lhs->eval(letter) || rhs->eval(letter);
    }
    return false;
  }
};

using GuardPtr = std::unique_ptr<Guard>;

GuardPtr mk_guard(Guard::Kind k, GuardPtr l = nullptr, GuardPtr r = nullptr,
                  int ap = -1) {
  auto g = std::make_unique<Guard>();
  g->kind = k;
  g->ap = ap;
  g->lhs = std::move(l);
  g->rhs = std::move(r);
  return g;
}

GuardPtr clone_guard(const Guard &g) {
  auto c = std::make_unique<Guard>();
  c->kind = g.kind;
  c->ap = g.ap;
  if (g.lhs)
    c->lhs = clone_guard(*g.lhs);
  if (g.rhs)
    c->rhs = clone_guard(*g.rhs);
  return c;
}

class GuardParser {
public:
  GuardParser(const std::string &s, int line, int ap_count,
              const std::map<std::string, GuardPtr> &aliases)
      : s_(s), line_(line), ap_count_(ap_count), aliases_(aliases) {}

  GuardPtr parse() {
    GuardPtr g = parse_or();
    skip_ws();
    if (i_ < s_.size())
      fail(line_, "trailing characters in label expression '" + s_ + "'");
    return g;
  }

private:
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_])))
      ++i_;
  }

  bool eat(char c) {
    skip_ws();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  GuardPtr parse_or() {
    GuardPtr l = parse_and();
    while (eat('|'))
      l = mk_guard(Guard::Or, std::move(l), parse_and());
    return l;
  }

  GuardPtr parse_and() {
    GuardPtr l = parse_atom();
    while (eat('&'))
      l = mk_guard(Guard::And, std::move(l), parse_atom());
    return l;
  }

  GuardPtr parse_atom() {
    skip_ws();
    if (i_ >= s_.size())
      fail(line_, "incomplete label expression '" + s_ + "'");
    char c = s_[i_];
    if (c == '!') {
      ++i_;
      return mk_guard(Guard::Not, parse_atom());
    }
    if (c == '(') {
      ++i_;
      GuardPtr g = parse_or();
      if (!eat(')'))
        fail(line_, "missing ')' in label expression '" + s_ + "'");
      return g;
    }
    if (c == 't' || c == 'f') {
      ++i_;
      return mk_guard(c == 't' ? Guard::True : Guard::False);
    }
    if (c == '@') {
      size_t start = ++i_;
      while (i_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[i_])) ||
              s_[i_] == '_' || s_[i_] == '-'))
        ++i_;
      std::string name = s_.substr(start, i_ - start);
      auto it = aliases_.find(name);
      if (it == aliases_.end())
        fail(line_, "unknown alias @" + name);
      return clone_guard(*it->second);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i_;
      while (i_ < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[i_])))
        ++i_;
      int idx = std::stoi(s_.substr(start, i_ - start));
      if (idx < 0 || idx >= ap_count_)
        fail(line_, "AP index " + std::to_string(idx) + " out of range");
      return mk_guard(Guard::Ap, nullptr, nullptr, idx);
    }
    fail(line_, std::string("unexpected character '") + c +
                    "' in label expression");
  }

  const std::string &s_;
  int line_;
  int ap_count_;
  const std::map<std::string, GuardPtr> &aliases_;
  size_t i_ = 0;
};

// Splits "Fin(0)&Inf(1) | (Fin(2)&Inf(3))" into Rabin pairs; anything not of
// that shape is rejected.
std::vector<std::pair<int, int>> parse_rabin_acceptance(const std::string &expr,
                                                        int set_count,
                                                        int line) {
  // Tokenize.
  struct Tok {
    std::string text;
    int num = -1;
  };
  std::vector<Tok> toks;
  size_t i = 0;
  while (i < expr.size()) {
    char c = expr[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '(' || c == ')' || c == '&' || c == '|') {
      toks.push_back({std::string(1, c)});
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = i;
      while (i < expr.size() &&
             std::isalpha(static_cast<unsigned char>(expr[i])))
        ++i;
      toks.push_back({expr.substr(start, i - start)});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i;
      while (i < expr.size() &&
             std::isdigit(static_cast<unsigned char>(expr[i])))
        ++i;
      Tok t;
      t.text = expr.substr(start, i - start);
      t.num = std::stoi(t.text);
      toks.push_back(t);
      continue;
    }
    unsupported(line, "acceptance expression '" + expr + "'");
  }

  size_t pos = 0;
  auto expect = [&](const std::string &t) {
    if (pos >= toks.size() || toks[pos].text != t)
      unsupported(line, "acceptance expression is not Rabin-shaped: '" + expr +
                            "'");
    ++pos;
  };
  auto parse_cond = [&]() -> std::pair<std::string, int> {
    if (pos + 3 >= toks.size() ||
        (toks[pos].text != "Fin" && toks[pos].text != "Inf"))
      unsupported(line, "acceptance expression is not Rabin-shaped: '" + expr +
                            "'");
    std::string kind = toks[pos].text;
    ++pos;
    expect("(");
    if (toks[pos].num < 0)
      unsupported(line, "acceptance expression is not Rabin-shaped: '" + expr +
                            "'");
    int set = toks[pos].num;
    ++pos;
    expect(")");
    return {kind, set};
  };
  // disjunct := cond & cond  |  ( cond & cond )
  auto parse_disjunct = [&]() -> std::pair<int, int> {
    bool parens = pos < toks.size() && toks[pos].text == "(";
    if (parens)
      ++pos;
    auto a = parse_cond();
    expect("&");
    auto b = parse_cond();
    if (parens)
      expect(")");
    if (a.first == b.first)
      unsupported(line, "acceptance conjunct needs one Fin and one Inf: '" +
                            expr + "'");
    int fin = a.first == "Fin" ? a.second : b.second;
    int inf = a.first == "Inf" ? a.second : b.second;
    return {fin, inf};
  };

  std::vector<std::pair<int, int>> out;
  out.push_back(parse_disjunct());
  while (pos < toks.size() && toks[pos].text == "|") {
    ++pos;
    out.push_back(parse_disjunct());
  }
  if (pos != toks.size())
    unsupported(line, "acceptance expression is not Rabin-shaped: '" + expr +
                          "'");
  for (size_t k = 0; k < out.size(); ++k) {
    if (out[k].first != static_cast<int>(2 * k) ||
        out[k].second != static_cast<int>(2 * k + 1))
      unsupported(line, "acceptance sets must be Fin(2i)&Inf(2i+1) in order: '" +
                            expr + "'");
  }
  if (set_count != static_cast<int>(2 * out.size()))
    fail(line, "acceptance set count " + std::to_string(set_count) +
                   " does not match " + std::to_string(out.size()) +
                   " Rabin pairs");
  return out;
}

std::vector<std::string> split_fields(const std::string &s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    if (s[i] == '"') {
      size_t j = s.find('"', i + 1);
      if (j == std::string::npos)
        j = s.size() - 1;
      out.push_back(s.substr(i, j - i + 1));
      i = j + 1;
      continue;
    }
    size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])))
      ++i;
    out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string strip_comment(const std::string &line) {
  // HOA comments are /* ... */; keep it simple for single-line comments.
  auto pos = line.find("/*");
  if (pos == std::string::npos)
    return line;
  auto end = line.find("*/", pos + 2);
  if (end == std::string::npos)
    return line.substr(0, pos);
  return line.substr(0, pos) + line.substr(end + 2);
}

} // namespace

Dra parse_hoa(const std::string &text) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;

  Dra dra;
  int declared_states = -1;
  int start_state = -1;
  bool saw_hoa = false, saw_ap = false, in_body = false, saw_end = false;
  int acc_set_count = -1;
  std::vector<std::pair<int, int>> rabin_sets;
  std::map<std::string, GuardPtr> aliases;

  // Per-state parse results.
  struct EdgeDecl {
    GuardPtr guard;
    int dest;
    int line;
  };
  std::vector<std::vector<EdgeDecl>> edges;
  std::vector<std::vector<int>> state_sets;
  std::vector<char> state_seen;
  int current_state = -1;

  auto ensure_state = [&](int s, int line) {
    if (declared_states < 0)
      fail(line, "state reference before the States: header");
    if (s < 0 || s >= declared_states)
      fail(line, "state " + std::to_string(s) + " out of range");
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip_comment(raw);
    // Trim.
    size_t b = line.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
      continue;
    size_t e = line.find_last_not_of(" \t\r\n");
    line = line.substr(b, e - b + 1);
    if (line.empty())
      continue;

    if (!saw_hoa) {
      if (line.rfind("HOA:", 0) != 0)
        fail(lineno, "expected 'HOA: v1' header");
      std::string ver = line.substr(4);
      ver.erase(0, ver.find_first_not_of(" \t"));
      if (ver != "v1")
        unsupported(lineno, "HOA version '" + ver + "'");
      saw_hoa = true;
      continue;
    }

    if (line == "--BODY--") {
      if (in_body)
        fail(lineno, "duplicate --BODY--");
      if (declared_states < 0)
        fail(lineno, "missing States: header");
      if (!saw_ap)
        fail(lineno, "missing AP: header");
      if (acc_set_count < 0)
        fail(lineno, "missing Acceptance: header");
      if (start_state < 0)
        fail(lineno, "missing Start: header");
      in_body = true;
      edges.resize(declared_states);
      state_sets.resize(declared_states);
      state_seen.resize(declared_states, 0);
      continue;
    }
    if (line == "--END--") {
      saw_end = true;
      break;
    }

    if (!in_body) {
      auto colon = line.find(':');
      if (colon == std::string::npos)
        fail(lineno, "malformed header line '" + line + "'");
      std::string key = line.substr(0, colon);
      std::string rest = line.substr(colon + 1);
      rest.erase(0, rest.find_first_not_of(" \t"));
      if (key == "States") {
        declared_states = std::stoi(rest);
        if (declared_states <= 0)
          fail(lineno, "States must be positive");
      } else if (key == "Start") {
        if (start_state >= 0 || rest.find('&') != std::string::npos ||
            split_fields(rest).size() != 1)
          unsupported(lineno, "multiple initial states (nondeterminism)");
        start_state = std::stoi(rest);
      } else if (key == "AP") {
        auto fields = split_fields(rest);
        if (fields.empty())
          fail(lineno, "malformed AP header");
        int count = std::stoi(fields[0]);
        if (static_cast<int>(fields.size()) != count + 1)
          fail(lineno, "AP header declares " + std::to_string(count) +
                           " propositions but lists " +
                           std::to_string(fields.size() - 1));
        for (int k = 1; k <= count; ++k) {
          std::string name = fields[k];
          if (name.size() < 2 || name.front() != '"' || name.back() != '"')
            fail(lineno, "AP names must be quoted");
          dra.ap.push_back(name.substr(1, name.size() - 2));
        }
        if (dra.ap.size() > 16)
          unsupported(lineno, "more than 16 atomic propositions");
        saw_ap = true;
      } else if (key == "Acceptance") {
        auto sp = rest.find_first_of(" \t");
        if (sp == std::string::npos)
          fail(lineno, "malformed Acceptance header");
        acc_set_count = std::stoi(rest.substr(0, sp));
        rabin_sets =
            parse_rabin_acceptance(rest.substr(sp + 1), acc_set_count, lineno);
      } else if (key == "Alias") {
        auto fields = split_fields(rest);
        if (fields.size() < 2 || fields[0].empty() || fields[0][0] != '@')
          fail(lineno, "malformed Alias header");
        std::string name = fields[0].substr(1);
        std::string expr = rest.substr(rest.find(fields[0]) + fields[0].size());
        if (!saw_ap)
          fail(lineno, "Alias before AP header");
        aliases[name] =
            GuardParser(expr, lineno, static_cast<int>(dra.ap.size()), aliases)
                .parse();
      } else if (key == "acc-name" || key == "name" || key == "tool" ||
                 key == "properties") {
        // Advisory only.
      } else if (!key.empty() &&
                 std::isupper(static_cast<unsigned char>(key[0]))) {
        // Headers starting with an uppercase letter must be understood.
        unsupported(lineno, "header '" + key + ":'");
      }
      continue;
    }

    // Body.
    if (line.rfind("State:", 0) == 0) {
      std::string rest = line.substr(6);
      rest.erase(0, rest.find_first_not_of(" \t"));
      if (!rest.empty() && rest[0] == '[')
        unsupported(lineno, "state-labeled automata (implicit labels)");
      auto fields = split_fields(rest);
      if (fields.empty())
        fail(lineno, "malformed State: line");
      int s = -1;
      try {
        s = std::stoi(fields[0]);
      } catch (...) {
        fail(lineno, "malformed state index '" + fields[0] + "'");
      }
      ensure_state(s, lineno);
      if (state_seen[s])
        fail(lineno, "state " + std::to_string(s) + " declared twice");
      state_seen[s] = 1;
      current_state = s;
      // Optional quoted name, optional {acc sets}.
      std::string tail = rest.substr(fields[0].size());
      auto brace = tail.find('{');
      if (brace != std::string::npos) {
        auto close = tail.find('}', brace);
        if (close == std::string::npos)
          fail(lineno, "missing '}' in State line");
        std::istringstream sets(tail.substr(brace + 1, close - brace - 1));
        int set;
        while (sets >> set) {
          if (set < 0 || set >= acc_set_count)
            fail(lineno, "acceptance set " + std::to_string(set) +
                             " out of range");
          state_sets[s].push_back(set);
        }
      }
      continue;
    }

    // Edge line: [guard] dest, possibly with {sets} (rejected).
    if (current_state < 0)
      fail(lineno, "edge before any State: declaration");
    if (line[0] != '[')
      unsupported(lineno, "implicit edge labels (edge '" + line + "')");
    auto close = line.find(']');
    if (close == std::string::npos)
      fail(lineno, "missing ']' in edge label");
    std::string guard_text = line.substr(1, close - 1);
    std::string rest = line.substr(close + 1);
    if (rest.find('{') != std::string::npos)
      unsupported(lineno, "transition-based acceptance");
    auto fields = split_fields(rest);
    if (fields.size() != 1)
      unsupported(lineno, "edge with multiple destinations (nondeterminism)");
    int dest = -1;
    try {
      dest = std::stoi(fields[0]);
    } catch (...) {
      fail(lineno, "malformed edge destination '" + fields[0] + "'");
    }
    ensure_state(dest, lineno);
    EdgeDecl ed;
    ed.guard = GuardParser(guard_text, lineno, static_cast<int>(dra.ap.size()),
                           aliases)
                   .parse();
    ed.dest = dest;
    ed.line = lineno;
    edges[current_state].push_back(std::move(ed));
  }

  if (!saw_end)
    fail(lineno, "missing --END--");
  for (int s = 0; s < declared_states; ++s)
    if (!state_seen[s])
      fail(lineno, "state " + std::to_string(s) + " never declared in body");

  // Expand guards over 2^AP; check determinism and completeness.
  dra.num_states = declared_states;
  dra.initial = start_state;
  ensure_state(start_state, lineno);
  const int letters = dra.num_letters();
  dra.delta.assign(declared_states, std::vector<int>(letters, -1));
  for (int s = 0; s < declared_states; ++s) {
    for (const EdgeDecl &ed : edges[s]) {
      for (int letter = 0; letter < letters; ++letter) {
        if (!ed.guard->eval(letter))
          continue;
        if (dra.delta[s][letter] != -1)
          fail(ed.line, "determinism violated: state " + std::to_string(s) +
                            " has two edges matching letter " +
                            std::to_string(letter));
        dra.delta[s][letter] = ed.dest;
      }
    }
    for (int letter = 0; letter < letters; ++letter)
      if (dra.delta[s][letter] == -1) {
        std::ostringstream os;
        os << "automaton is incomplete: state " << s
           << " has no edge for letter {";
        bool first = true;
        for (size_t b2 = 0; b2 < dra.ap.size(); ++b2)
          if ((letter >> b2) & 1) {
            os << (first ? "" : ",") << dra.ap[b2];
            first = false;
          }
        os << "}";
        throw input_error(os.str());
      }
  }

  dra.pairs.resize(rabin_sets.size());
  for (int s = 0; s < declared_states; ++s)
    for (int set : state_sets[s]) {
      if (set % 2 == 0)
        dra.pairs[set / 2].fin.push_back(s);
      else
        dra.pairs[set / 2].inf.push_back(s);
    }
  return dra;
}

Dra parse_hoa_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw input_error("cannot open HOA file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_hoa(ss.str());
}

DraRun dra_run_lasso(const Dra &a, const LassoWord &w) {
  w.validate();
  int q = a.initial;
  for (const auto &label : w.prefix) {
    std::vector<std::string> lab(label.begin(), label.end());
    q = a.step(q, a.letter_of(lab));
  }
  std::vector<int> cycle_letters;
  cycle_letters.reserve(w.cycle.size());
  for (const auto &label : w.cycle) {
    std::vector<std::string> lab(label.begin(), label.end());
    cycle_letters.push_back(a.letter_of(lab));
  }

  // Walk (state, cycle position) pairs until one repeats; the repeated
  // segment is the orbit visited infinitely often.
  const size_t c = cycle_letters.size();
  std::map<std::pair<int, size_t>, size_t> seen;
  std::vector<int> trail;
  size_t pos = 0, step = 0;
  while (true) {
    auto key = std::make_pair(q, pos);
    auto it = seen.find(key);
    if (it != seen.end()) {
      std::set<int> orbit(trail.begin() + static_cast<long>(it->second),
                          trail.end());
      DraRun run;
      run.inf_set.assign(orbit.begin(), orbit.end());
      for (size_t i = 0; i < a.pairs.size(); ++i) {
        bool hits_fin = false, hits_inf = false;
        for (int s : a.pairs[i].fin)
          hits_fin = hits_fin || orbit.count(s);
        for (int s : a.pairs[i].inf)
          hits_inf = hits_inf || orbit.count(s);
        if (!hits_fin && hits_inf) {
          run.accepted = true;
          run.accepting_pair = static_cast<int>(i) + 1;
          break;
        }
      }
      return run;
    }
    seen.emplace(key, step);
    trail.push_back(q);
    q = a.step(q, cycle_letters[pos]);
    pos = (pos + 1) % c;
    ++step;
  }
}

} // namespace rabinrl
