#pragma once

#include <string>
#include <vector>

#include "planrl/core/rng.hpp"
#include "planrl/envsim/oracle.hpp"
#include "planrl/envsim/task.hpp"

namespace planrl::envsim {

struct MazeGenOptions {
  int min_size = 5;
  int max_size = 9;
  double wall_density = 0.18;  // fraction of interior edges turned into walls
  int min_distance = 5;        // minimum BFS distance start -> goal
};

// Budget defaults: wordle follows the classic six-attempt rule; maze and textcraft
// budgets scale off the oracle so rollouts stay bounded.
inline TaskSpec generate_maze_task(Rng& rng, const MazeGenOptions& opt = {}) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    MazeLayout m;
    m.rows = static_cast<int>(rng.uniform_int(opt.min_size, opt.max_size));
    m.cols = static_cast<int>(rng.uniform_int(opt.min_size, opt.max_size));
    m.walls.assign(static_cast<size_t>(m.rows) * m.cols, 0);
    auto bits = [&](int x, int y) -> uint8_t& {
      return m.walls[static_cast<size_t>(x - 1) * m.cols + (y - 1)];
    };
    for (int x = 1; x <= m.rows; ++x) {
      for (int y = 1; y <= m.cols; ++y) {
        if (x == 1) bits(x, y) |= kWallUp;
        if (x == m.rows) bits(x, y) |= kWallDown;
        if (y == 1) bits(x, y) |= kWallLeft;
        if (y == m.cols) bits(x, y) |= kWallRight;
      }
    }
    for (int x = 1; x <= m.rows; ++x) {
      for (int y = 1; y <= m.cols; ++y) {
        if (x < m.rows && rng.next_double() < opt.wall_density) {
          bits(x, y) |= kWallDown;
          bits(x + 1, y) |= kWallUp;
        }
        if (y < m.cols && rng.next_double() < opt.wall_density) {
          bits(x, y) |= kWallRight;
          bits(x, y + 1) |= kWallLeft;
        }
      }
    }
    m.start = {static_cast<int>(rng.uniform_int(1, m.rows)), static_cast<int>(rng.uniform_int(1, m.cols))};
    m.goal = {static_cast<int>(rng.uniform_int(1, m.rows)), static_cast<int>(rng.uniform_int(1, m.cols))};
    if (m.start == m.goal) continue;
    int d = maze_bfs_distance(m, m.start, m.goal);
    if (d < opt.min_distance) continue;

    TaskSpec t;
    t.env_kind = EnvKind::Maze;
    t.maze = std::move(m);
    t.max_turns = 2 * d;
    t.goal_text = default_goal_text(t);
    t.validate();
    return t;
  }
  raise(ErrorKind::Contract, "maze generation failed to find a solvable layout");
}

struct WordleGenOptions {
  // difficulty band as reference-strategy attempt counts; 0 = unconstrained
  int min_oracle = 0;
  int max_oracle = 0;
};

inline TaskSpec generate_wordle_task(Rng& rng, const std::vector<std::string>& words,
                                     const WordleGenOptions& opt = {}) {
  if (words.empty()) raise(ErrorKind::Usage, "wordle generation needs a word list");
  for (int attempt = 0; attempt < 400; ++attempt) {
    TaskSpec t;
    t.env_kind = EnvKind::Wordle;
    t.wordle.words = words;
    t.wordle.hidden =
        words[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(words.size()) - 1))];
    t.max_turns = 6;
    if (opt.min_oracle > 0 || opt.max_oracle > 0) {
      int attempts = wordle_strategy_attempts(words, t.wordle.hidden, 6);
      if (attempts == 0) continue;
      if (opt.min_oracle > 0 && attempts < opt.min_oracle) continue;
      if (opt.max_oracle > 0 && attempts > opt.max_oracle) continue;
    }
    t.goal_text = default_goal_text(t);
    t.validate();
    return t;
  }
  raise(ErrorKind::Usage, "no word in the list matches the requested difficulty band");
}

// Recipe chains over a small item universe, depth 1-3, with one distractor
// recipe and sometimes a specialised variant of a generic base ingredient.
inline TaskSpec generate_textcraft_task(Rng& rng) {
  static const std::vector<std::string> bases = {
      "planks", "iron ingot", "diamond", "string", "flint", "feather", "leather", "paper"};
  static const std::vector<std::string> mids = {
      "stick", "rod", "handle", "plate", "frame", "cord"};
  static const std::vector<std::string> tops = {
      "pickaxe", "sword", "bow", "shield", "compass", "book"};

  CraftBook book;
  int depth = static_cast<int>(rng.uniform_int(1, 3));
  std::string target = tops[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(tops.size()) - 1))];
  std::vector<std::string> pool = bases;
  rng.shuffle(pool);

  std::string below = pool[0];
  if (depth >= 2) {
    std::string mid = mids[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(mids.size()) - 1))];
    Recipe r1;
    r1.output = mid;
    r1.output_count = static_cast<int>(rng.uniform_int(1, 2));
    r1.inputs.emplace_back(static_cast<int>(rng.uniform_int(1, 3)), pool[0]);
    if (depth >= 3) r1.inputs.emplace_back(static_cast<int>(rng.uniform_int(1, 2)), pool[1]);
    book.recipes.push_back(r1);
    below = mid;
  }
  Recipe rt;
  rt.output = target;
  rt.output_count = 1;
  rt.inputs.emplace_back(static_cast<int>(rng.uniform_int(1, 2)), below);
  if (rng.next_double() < 0.6) rt.inputs.emplace_back(static_cast<int>(rng.uniform_int(1, 2)), pool[2]);
  book.recipes.push_back(rt);

  // distractor recipe that is never needed
  Recipe extra;
  extra.output = "torch";
  extra.output_count = 4;
  extra.inputs.emplace_back(1, pool[3]);
  book.recipes.push_back(extra);
  book.target = target;

  TaskSpec t;
  t.env_kind = EnvKind::TextCraft;
  t.craft = std::move(book);
  auto oracle = textcraft_optimal_actions(t.craft);
  if (!oracle) raise(ErrorKind::Contract, "generated textcraft task not solvable");
  t.max_turns = 3 * static_cast<int>(oracle->size());
  t.goal_text = default_goal_text(t);
  t.validate();
  return t;
}

// The maze from the game-rule walkthrough: 8x6 grid, start (1,1), goal (8,6),
// a wall below the start cell, shortest path length 12.
inline TaskSpec walkthrough_maze_task() {
  MazeLayout m;
  m.rows = 8;
  m.cols = 6;
  m.walls.assign(48, 0);
  auto bits = [&](int x, int y) -> uint8_t& {
    return m.walls[static_cast<size_t>(x - 1) * m.cols + (y - 1)];
  };
  for (int x = 1; x <= m.rows; ++x) {
    for (int y = 1; y <= m.cols; ++y) {
      if (x == 1) bits(x, y) |= kWallUp;
      if (x == m.rows) bits(x, y) |= kWallDown;
      if (y == 1) bits(x, y) |= kWallLeft;
      if (y == m.cols) bits(x, y) |= kWallRight;
    }
  }
  bits(1, 1) |= kWallDown;
  bits(2, 1) |= kWallUp;
  m.start = {1, 1};
  m.goal = {8, 6};

  TaskSpec t;
  t.env_kind = EnvKind::Maze;
  t.maze = std::move(m);
  t.max_turns = 24;
  t.id = "maze_walkthrough";
  t.goal_text = default_goal_text(t);
  t.validate();
  return t;
}

}  // namespace planrl::envsim
