#pragma once

#include <string>
#include <vector>

#include "rabinrl/game.hpp"

namespace rabinrl {

// A rectangular grid world: empty cells, obstacles that block movement, and
// absorbing cells that cannot be left once entered.
struct GridSpec {
  enum class Cell { Empty, Obstacle, Absorbing };

  int width = 0, height = 0;
  std::vector<Cell> cells;                      // row-major, y*width+x
  std::vector<std::vector<std::string>> labels; // row-major
  int init_x = -1, init_y = -1;
  int adv_x = -1, adv_y = -1; // adversary start, -1 when absent
  bool reconstructed = false; // best-effort reconstruction marker
  std::vector<std::string> ap; // declared AP; defaults to the labels used

  Cell at(int x, int y) const { return cells[y * width + x]; }
  const std::vector<std::string> &labels_at(int x, int y) const {
    return labels[y * width + x];
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  void validate(bool need_adversary) const;
};

// Plain-text grid format: a `grid:` section of rows over `.#o`, directives
// `ap:`, `init: x,y`, `adversary: x,y`, `reconstructed: true`, and a
// `labels:` section of `cell(x,y): b,d` lines. `#`-lines are comments.
GridSpec parse_grid(const std::string &text);
GridSpec parse_grid_file(const std::string &path);

// Robust-control game: controller states are cells with actions N/S/E/W;
// each move enters an environment state (cell, direction) where the
// disturbance picks None (intended w.p. 1), Both (0.8/0.1/0.1 sideways),
// Right or Left (0.9 intended / 0.1 that side). Blocked outcomes stay put;
// absorbing cells return to themselves under everything.
StochasticGame build_robust_game(const GridSpec &spec);

// Avoiding-adversary game: states (robot cell, adversary cell, turn) with
// strict alternation; the mover goes as intended w.p. 0.8 and sideways
// 0.1/0.1. Labels come from the robot cell, plus atom "a" when both agents
// share a cell.
StochasticGame build_adversary_game(const GridSpec &spec);

} // namespace rabinrl
