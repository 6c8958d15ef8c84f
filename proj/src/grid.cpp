#include "rabinrl/grid.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rabinrl/errors.hpp"

namespace rabinrl {

namespace {

constexpr int kDirs = 4;
const char *const kDirName[kDirs] = {"N", "S", "E", "W"};
constexpr int kDx[kDirs] = {0, 0, 1, -1};
constexpr int kDy[kDirs] = {-1, 1, 0, 0};
// Clockwise and counterclockwise neighbours of each direction.
constexpr int kRight[kDirs] = {2, 3, 1, 0}; // N->E, S->W, E->S, W->N
constexpr int kLeft[kDirs] = {3, 2, 0, 1};  // N->W, S->E, E->N, W->S

std::string trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::pair<int, int> parse_xy(const std::string &s, const char *what) {
  auto comma = s.find(',');
  if (comma == std::string::npos)
    throw input_error(std::string(what) + " must be 'x,y', got '" + s + "'");
  try {
    return {std::stoi(trim(s.substr(0, comma))),
            std::stoi(trim(s.substr(comma + 1)))};
  } catch (...) {
    throw input_error(std::string(what) + " must be 'x,y', got '" + s + "'");
  }
}

std::vector<std::string> split_commas(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty())
      out.push_back(item);
  }
  return out;
}

} // namespace

void GridSpec::validate(bool need_adversary) const {
  if (width < 1 || height < 1)
    throw input_error("grid must have positive dimensions");
  if (cells.size() != static_cast<size_t>(width * height))
    throw input_error("grid rows have inconsistent widths");
  if (!in_bounds(init_x, init_y))
    throw input_error("grid init cell is missing or out of bounds");
  if (at(init_x, init_y) == Cell::Obstacle)
    throw input_error("grid init cell must be empty or absorbing");
  std::set<std::string> aps(ap.begin(), ap.end());
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (const std::string &l : labels_at(x, y))
        if (!aps.count(l))
          throw input_error("cell(" + std::to_string(x) + "," +
                            std::to_string(y) + ") label '" + l +
                            "' is not in the declared ap");
  if (need_adversary) {
    if (!in_bounds(adv_x, adv_y))
      throw input_error("adversary start cell is missing or out of bounds");
    if (at(adv_x, adv_y) == Cell::Obstacle)
      throw input_error("adversary start cell must not be an obstacle");
    if (adv_x == init_x && adv_y == init_y)
      throw input_error("robot and adversary must start on distinct cells");
  }
}

GridSpec parse_grid(const std::string &text) {
  GridSpec spec;
  std::istringstream in(text);
  std::string raw;
  enum class Section { None, Grid, Labels } section = Section::None;
  std::vector<std::string> rows;
  std::map<std::pair<int, int>, std::vector<std::string>> label_map;

  while (std::getline(in, raw)) {
    std::string line = trim(raw);
    // '#' starts a comment except inside the grid section, where it is an
    // obstacle cell.
    if (line.empty() || (line[0] == '#' && section != Section::Grid))
      continue;
    if (line == "grid:") {
      section = Section::Grid;
      continue;
    }
    if (line == "labels:") {
      section = Section::Labels;
      continue;
    }
    if (line.rfind("init:", 0) == 0) {
      auto [x, y] = parse_xy(trim(line.substr(5)), "init");
      spec.init_x = x;
      spec.init_y = y;
      continue;
    }
    if (line.rfind("adversary:", 0) == 0) {
      auto [x, y] = parse_xy(trim(line.substr(10)), "adversary");
      spec.adv_x = x;
      spec.adv_y = y;
      continue;
    }
    if (line.rfind("ap:", 0) == 0) {
      spec.ap = split_commas(line.substr(3));
      continue;
    }
    if (line.rfind("reconstructed:", 0) == 0) {
      spec.reconstructed = trim(line.substr(14)) == "true";
      continue;
    }
    if (section == Section::Grid) {
      for (char c : line)
        if (c != '.' && c != '#' && c != 'o')
          throw input_error("grid row '" + line +
                            "' contains invalid cell code '" +
                            std::string(1, c) + "'");
      rows.push_back(line);
      continue;
    }
    if (section == Section::Labels) {
      if (line.rfind("cell(", 0) != 0)
        throw input_error("label line must look like 'cell(x,y): b,d', got '" +
                          line + "'");
      auto close = line.find(')');
      auto colon = line.find(':', close == std::string::npos ? 0 : close);
      if (close == std::string::npos || colon == std::string::npos)
        throw input_error("malformed label line '" + line + "'");
      auto [x, y] = parse_xy(line.substr(5, close - 5), "cell");
      label_map[{x, y}] = split_commas(line.substr(colon + 1));
      continue;
    }
    throw input_error("unexpected grid-spec line '" + line + "'");
  }

  if (rows.empty())
    throw input_error("grid spec has no grid rows");
  spec.height = static_cast<int>(rows.size());
  spec.width = static_cast<int>(rows[0].size());
  for (const std::string &row : rows)
    if (static_cast<int>(row.size()) != spec.width)
      throw input_error("grid rows have inconsistent widths");
  spec.cells.resize(static_cast<size_t>(spec.width) * spec.height);
  spec.labels.resize(spec.cells.size());
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x) {
      char c = rows[y][static_cast<size_t>(x)];
      spec.cells[y * spec.width + x] = c == '#'   ? GridSpec::Cell::Obstacle
                                       : c == 'o' ? GridSpec::Cell::Absorbing
                                                  : GridSpec::Cell::Empty;
    }
  std::set<std::string> observed;
  for (const auto &[xy, labels] : label_map) {
    auto [x, y] = xy;
    if (!spec.in_bounds(x, y))
      throw input_error("label for cell(" + std::to_string(x) + "," +
                        std::to_string(y) + ") out of bounds");
    spec.labels[y * spec.width + x] = labels;
    observed.insert(labels.begin(), labels.end());
  }
  if (spec.ap.empty())
    spec.ap.assign(observed.begin(), observed.end());
  return spec;
}

GridSpec parse_grid_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw input_error("cannot open grid file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_grid(ss.str());
}

namespace {

// Successor cell of a movement outcome; blocked moves keep the position.
int resolve_move(const GridSpec &spec, int x, int y, int dir) {
  if (spec.at(x, y) == GridSpec::Cell::Absorbing)
    return y * spec.width + x;
  int nx = x + kDx[dir], ny = y + kDy[dir];
  if (!spec.in_bounds(nx, ny) || spec.at(nx, ny) == GridSpec::Cell::Obstacle)
    return y * spec.width + x;
  return ny * spec.width + nx;
}

// Outcome distribution in integer tenths, merged by target cell so the
// mass is conserved exactly before decimal serialization.
std::vector<std::pair<int, double>>
move_distribution(const GridSpec &spec, int x, int y, int dir,
                  int tenths_intended, int tenths_right, int tenths_left) {
  std::map<int, int> tenths;
  tenths[resolve_move(spec, x, y, dir)] += tenths_intended;
  if (tenths_right > 0)
    tenths[resolve_move(spec, x, y, kRight[dir])] += tenths_right;
  if (tenths_left > 0)
    tenths[resolve_move(spec, x, y, kLeft[dir])] += tenths_left;
  std::vector<std::pair<int, double>> out;
  for (auto [cell, t] : tenths)
    out.emplace_back(cell, static_cast<double>(t) / 10.0);
  return out;
}

std::string kinds_string(const GridSpec &spec) {
  std::string s;
  for (int y = 0; y < spec.height; ++y) {
    if (y)
      s += ';';
    for (int x = 0; x < spec.width; ++x)
      s += spec.at(x, y) == GridSpec::Cell::Obstacle    ? '#'
           : spec.at(x, y) == GridSpec::Cell::Absorbing ? 'o'
                                                        : '.';
  }
  return s;
}

} // namespace

StochasticGame build_robust_game(const GridSpec &spec) {
  spec.validate(/*need_adversary=*/false);
  const int w = spec.width, h = spec.height, cells = w * h;

  StochasticGame g;
  g.ap = spec.ap;
  g.info["kind"] = "grid-robust";
  g.info["grid_width"] = std::to_string(w);
  g.info["grid_height"] = std::to_string(h);
  g.info["grid_kinds"] = kinds_string(spec);
  if (spec.reconstructed)
    g.info["reconstructed"] = "true";
  g.states.resize(static_cast<size_t>(cells) + static_cast<size_t>(cells) * kDirs);
  g.state_meta.resize(g.states.size());

  auto env_index = [cells](int cell, int dir) {
    return cells + cell * kDirs + dir;
  };

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int cell = y * w + x;
      GameState st;
      st.owner = Owner::Controller;
      st.label = spec.labels_at(x, y);
      for (int d = 0; d < kDirs; ++d) {
        GameAction a;
        a.name = kDirName[d];
        a.outcomes.emplace_back(env_index(cell, d), 1.0);
        st.actions.push_back(std::move(a));
      }
      g.states[cell] = std::move(st);
      g.state_meta[cell] = json{{"x", x}, {"y", y}};

      for (int d = 0; d < kDirs; ++d) {
        GameState es;
        es.owner = Owner::Environment;
        es.label = spec.labels_at(x, y);
        GameAction none{"None", move_distribution(spec, x, y, d, 10, 0, 0)};
        GameAction both{"Both", move_distribution(spec, x, y, d, 8, 1, 1)};
        GameAction right{"Right", move_distribution(spec, x, y, d, 9, 1, 0)};
        GameAction left{"Left", move_distribution(spec, x, y, d, 9, 0, 1)};
        es.actions = {none, both, right, left};
        g.states[env_index(cell, d)] = std::move(es);
        g.state_meta[env_index(cell, d)] =
            json{{"x", x}, {"y", y}, {"dir", kDirName[d]}};
      }
    }

  g.initial = spec.init_y * w + spec.init_x;
  g.validate();
  return g;
}

StochasticGame build_adversary_game(const GridSpec &spec) {
  spec.validate(/*need_adversary=*/true);
  const int w = spec.width, h = spec.height, cells = w * h;
  for (int c = 0; c < cells; ++c)
    for (const std::string &l : spec.labels[c])
      if (l == "a")
        throw input_error("atom 'a' is reserved for agent co-location");

  StochasticGame g;
  g.ap = spec.ap;
  if (std::find(g.ap.begin(), g.ap.end(), "a") == g.ap.end())
    g.ap.insert(g.ap.begin(), "a");
  g.info["kind"] = "grid-adversary";
  g.info["grid_width"] = std::to_string(w);
  g.info["grid_height"] = std::to_string(h);
  g.info["grid_kinds"] = kinds_string(spec);
  if (spec.reconstructed)
    g.info["reconstructed"] = "true";
  g.states.resize(static_cast<size_t>(cells) * cells * 2);
  g.state_meta.resize(g.states.size());

  auto index = [cells](int robot, int adv, int turn) {
    return (robot * cells + adv) * 2 + turn;
  };

  for (int r = 0; r < cells; ++r) {
    const int rx = r % w, ry = r / w;
    for (int v = 0; v < cells; ++v) {
      const int vx = v % w, vy = v / w;
      std::vector<std::string> label = spec.labels[r];
      if (r == v)
        label.insert(label.begin(), "a");
      for (int turn = 0; turn < 2; ++turn) {
        GameState st;
        st.owner = turn == 0 ? Owner::Controller : Owner::Environment;
        st.label = label;
        for (int d = 0; d < kDirs; ++d) {
          GameAction a;
          a.name = kDirName[d];
          if (turn == 0) {
            for (auto [cell, p] :
                 move_distribution(spec, rx, ry, d, 8, 1, 1))
              a.outcomes.emplace_back(index(cell, v, 1), p);
          } else {
            for (auto [cell, p] :
                 move_distribution(spec, vx, vy, d, 8, 1, 1))
              a.outcomes.emplace_back(index(r, cell, 0), p);
          }
          st.actions.push_back(std::move(a));
        }
        g.states[index(r, v, turn)] = std::move(st);
        g.state_meta[index(r, v, turn)] =
            json{{"rx", rx}, {"ry", ry}, {"ax", vx}, {"ay", vy},
                 {"turn", turn == 0 ? "ctrl" : "env"}};
      }
    }
  }

  g.initial = index(spec.init_y * w + spec.init_x,
                    spec.adv_y * w + spec.adv_x, 0);
  g.validate();
  return g;
}

} // namespace rabinrl
