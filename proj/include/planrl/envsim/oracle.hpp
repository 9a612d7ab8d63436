#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "planrl/core/error.hpp"
#include "planrl/envsim/environment.hpp"
#include "planrl/envsim/task.hpp"
#include "planrl/envsim/wordle.hpp"

namespace planrl::envsim {

struct OracleLength {
  bool solvable = false;
  int length = 0;
};

// --- maze: BFS shortest path -------------------------------------------

// Returns the action names of one shortest path; neighbor order right, down,
// left, up so corridor-style paths come out right-first.
inline std::optional<std::vector<std::string>> maze_bfs_path(const MazeLayout& m, Cell from) {
  auto idx = [&](Cell c) { return static_cast<size_t>(c.x - 1) * m.cols + (c.y - 1); };
  if (from == m.goal) return std::vector<std::string>{};
  std::vector<int> prev(m.walls.size(), -1);
  std::vector<uint8_t> via(m.walls.size(), 0);
  std::vector<Cell> queue{from};
  prev[idx(from)] = static_cast<int>(idx(from));
  size_t head = 0;
  struct Move { uint8_t bit; int dx, dy; };
  static constexpr Move moves[] = {
      {kWallRight, 0, 1}, {kWallDown, 1, 0}, {kWallLeft, 0, -1}, {kWallUp, -1, 0}};
  while (head < queue.size()) {
    Cell c = queue[head++];
    for (const auto& mv : moves) {
      if (m.blocked(c, mv.bit)) continue;
      Cell n{c.x + mv.dx, c.y + mv.dy};
      if (!m.in_bounds(n) || prev[idx(n)] >= 0) continue;
      prev[idx(n)] = static_cast<int>(idx(c));
      via[idx(n)] = mv.bit;
      if (n == m.goal) {
        std::vector<std::string> actions;
        size_t cur = idx(n);
        while (cur != idx(from)) {
          actions.push_back("move " + maze_direction_name(via[cur]));
          cur = static_cast<size_t>(prev[cur]);
        }
        std::reverse(actions.begin(), actions.end());
        return actions;
      }
      queue.push_back(n);
    }
  }
  return std::nullopt;
}

// --- textcraft: exhaustive plan search over the recipe DAG --------------

namespace detail_craft {

using Inventory = std::map<std::string, int>;

inline int count_matching(const Inventory& inv, const std::string& generic) {
  int total = 0;
  for (const auto& [item, n] : inv)
    if (detail::item_matches(item, generic)) total += n;
  return total;
}

inline void consume(Inventory& inv, const std::string& generic, int need) {
  auto exact = inv.find(generic);
  if (exact != inv.end()) {
    int take = std::min(exact->second, need);
    exact->second -= take;
    need -= take;
  }
  for (auto& [item, n] : inv) {
    if (need <= 0) break;
    if (item == generic || !detail::item_matches(item, generic)) continue;
    int take = std::min(n, need);
    n -= take;
    need -= take;
  }
}

// per-base-item upper bound on how many units any solution could need
inline std::map<std::string, int> base_need_bounds(const CraftBook& book) {
  std::map<std::string, int> bound;
  for (const auto& r : book.recipes)
    for (const auto& [n, item] : r.inputs)
      if (!book.craftable(item)) bound[item] += n;
  return bound;
}

struct Search {
  const CraftBook* book;
  std::map<std::string, int> base_bound;
  std::vector<std::string> best;
  bool found = false;

  bool dfs(Inventory inv, std::vector<std::string>& actions, int depth_left) {
    auto it = inv.find(book->target);
    if (it != inv.end() && it->second > 0) {
      best = actions;
      found = true;
      return true;
    }
    if (depth_left == 0) return false;
    // crafts first: they are the only way to finish
    for (const auto& r : book->recipes) {
      bool ok = true;
      for (const auto& [n, item] : r.inputs)
        if (count_matching(inv, item) < n) { ok = false; break; }
      if (!ok) continue;
      Inventory next = inv;
      for (const auto& [n, item] : r.inputs) consume(next, item, n);
      next[r.output] += r.output_count;
      actions.push_back(r.command());
      if (dfs(std::move(next), actions, depth_left - 1)) return true;
      actions.pop_back();
    }
    // fetches: top up one base item to a per-recipe requirement or to the
    // total bound, each as a single get action
    for (const auto& [item, bound] : base_bound) {
      int have = 0;
      auto inv_it = inv.find(item);
      if (inv_it != inv.end()) have = inv_it->second;
      if (have >= bound) continue;
      std::vector<int> targets;
      for (const auto& r : book->recipes)
        for (const auto& [n, ing] : r.inputs)
          if (detail::item_matches(item, ing) && n > have) targets.push_back(n);
      if (bound > have) targets.push_back(bound);
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      for (int target_count : targets) {
        Inventory next = inv;
        next[item] = target_count;
        actions.push_back("get " + std::to_string(target_count - have) + " " + item);
        if (dfs(std::move(next), actions, depth_left - 1)) return true;
        actions.pop_back();
      }
    }
    return false;
  }
};

}  // namespace detail_craft

// Minimal fetch/craft action sequence via iterative-deepening search.
inline std::optional<std::vector<std::string>> textcraft_optimal_actions(
    const CraftBook& book, const detail_craft::Inventory& start = {}) {
  detail_craft::Search s;
  s.book = &book;
  s.base_bound = detail_craft::base_need_bounds(book);
  int hard_cap = 2 * static_cast<int>(book.recipes.size()) + static_cast<int>(s.base_bound.size()) + 4;
  for (int depth = 0; depth <= hard_cap; ++depth) {
    std::vector<std::string> actions;
    if (s.dfs(start, actions, depth)) return s.best;
  }
  return std::nullopt;
}

// --- unified oracle -----------------------------------------------------

inline OracleLength oracle_optimal_length(const TaskSpec& task) {
  task.validate();
  switch (task.env_kind) {
    case EnvKind::Maze: {
      auto path = maze_bfs_path(task.maze, task.maze.start);
      if (!path) return {false, 0};
      return {true, static_cast<int>(path->size())};
    }
    case EnvKind::TextCraft: {
      auto actions = textcraft_optimal_actions(task.craft);
      if (!actions) return {false, 0};
      return {true, static_cast<int>(actions->size())};
    }
    case EnvKind::Wordle: {
      int attempts = wordle_strategy_attempts(task.wordle.words, task.wordle.hidden, task.max_turns);
      if (attempts == 0) return {false, 0};
      return {true, attempts};
    }
  }
  return {false, 0};
}

}  // namespace planrl::envsim
