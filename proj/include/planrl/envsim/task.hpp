#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "planrl/core/error.hpp"
#include "planrl/core/text.hpp"

namespace planrl::envsim {

enum class EnvKind { Wordle, Maze, TextCraft };

inline std::string env_kind_name(EnvKind k) {
  switch (k) {
    case EnvKind::Wordle: return "wordle";
    case EnvKind::Maze: return "maze";
    case EnvKind::TextCraft: return "textcraft";
  }
  return "?";
}

inline EnvKind env_kind_from(const std::string& s) {
  if (s == "wordle") return EnvKind::Wordle;
  if (s == "maze") return EnvKind::Maze;
  if (s == "textcraft") return EnvKind::TextCraft;
  raise(ErrorKind::Validation, "unknown env kind: " + s);
}

struct Observation {
  std::string text;
  bool terminal = false;
  bool success = false;
};

// --- maze -------------------------------------------------------------
// Coordinates follow the game rules: x grows downward, y grows rightward,
// both 1-based. Cell (x, y) maps to walls[(x-1)*cols + (y-1)].
struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

inline constexpr uint8_t kWallUp = 1;
inline constexpr uint8_t kWallDown = 2;
inline constexpr uint8_t kWallLeft = 4;
inline constexpr uint8_t kWallRight = 8;

struct MazeLayout {
  int rows = 0;
  int cols = 0;
  std::vector<uint8_t> walls;
  Cell start;
  Cell goal;

  uint8_t wall_bits(Cell c) const { return walls[static_cast<size_t>(c.x - 1) * cols + (c.y - 1)]; }
  bool in_bounds(Cell c) const { return c.x >= 1 && c.x <= rows && c.y >= 1 && c.y <= cols; }
  bool blocked(Cell c, uint8_t dir_bit) const { return (wall_bits(c) & dir_bit) != 0; }
};

// --- wordle -----------------------------------------------------------
struct WordleSetup {
  std::string hidden;               // lowercase alphabetic, length 5
  std::vector<std::string> words;   // task vocabulary, includes hidden
};

// --- textcraft --------------------------------------------------------
struct Recipe {
  std::string output;
  int output_count = 1;
  std::vector<std::pair<int, std::string>> inputs;  // (count, item)

  std::string command() const {
    std::string s = "craft " + std::to_string(output_count) + " " + output + " using ";
    for (size_t i = 0; i < inputs.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(inputs[i].first) + " " + inputs[i].second;
    }
    return s;
  }
};

struct CraftBook {
  std::vector<Recipe> recipes;
  std::string target;

  bool craftable(const std::string& item) const {
    for (const auto& r : recipes)
      if (r.output == item) return true;
    return false;
  }
};

// --- task -------------------------------------------------------------
struct TaskSpec {
  EnvKind env_kind = EnvKind::Maze;
  std::string goal_text;
  int max_turns = 0;
  std::string id;

  // environment-specific ground truth; only the member matching env_kind is used
  MazeLayout maze;
  WordleSetup wordle;
  CraftBook craft;

  void validate() const;
};

namespace detail {

inline bool lowercase_alpha5(const std::string& w) {
  if (w.size() != 5) return false;
  for (char c : w)
    if (c < 'a' || c > 'z') return false;
  return true;
}

inline void validate_maze(const MazeLayout& m) {
  if (m.rows < 1 || m.cols < 1) raise(ErrorKind::Validation, "maze: grid dimensions must be positive");
  if (m.walls.size() != static_cast<size_t>(m.rows) * m.cols)
    raise(ErrorKind::Validation, "maze: wall grid size does not match rows*cols");
  if (!m.in_bounds(m.start)) raise(ErrorKind::Validation, "maze: start cell outside grid bounds");
  if (!m.in_bounds(m.goal)) raise(ErrorKind::Validation, "maze: goal cell outside grid bounds");
  for (int x = 1; x <= m.rows; ++x) {
    for (int y = 1; y <= m.cols; ++y) {
      Cell c{x, y};
      uint8_t b = m.wall_bits(c);
      // boundary walls must be present, interior flags symmetric
      if (x == 1 && !(b & kWallUp)) raise(ErrorKind::Validation, "maze: missing boundary wall (up)");
      if (x == m.rows && !(b & kWallDown)) raise(ErrorKind::Validation, "maze: missing boundary wall (down)");
      if (y == 1 && !(b & kWallLeft)) raise(ErrorKind::Validation, "maze: missing boundary wall (left)");
      if (y == m.cols && !(b & kWallRight)) raise(ErrorKind::Validation, "maze: missing boundary wall (right)");
      if (x < m.rows) {
        bool down = (b & kWallDown) != 0;
        bool up_of_below = (m.wall_bits({x + 1, y}) & kWallUp) != 0;
        if (down != up_of_below) raise(ErrorKind::Validation, "maze: wall flags not symmetric between adjacent cells");
      }
      if (y < m.cols) {
        bool right = (b & kWallRight) != 0;
        bool left_of_next = (m.wall_bits({x, y + 1}) & kWallLeft) != 0;
        if (right != left_of_next) raise(ErrorKind::Validation, "maze: wall flags not symmetric between adjacent cells");
      }
    }
  }
  // reachability: BFS over open edges
  std::vector<char> seen(m.walls.size(), 0);
  std::vector<Cell> frontier{m.start};
  seen[static_cast<size_t>(m.start.x - 1) * m.cols + (m.start.y - 1)] = 1;
  while (!frontier.empty()) {
    Cell c = frontier.back();
    frontier.pop_back();
    if (c == m.goal) return;
    struct Move { uint8_t bit; int dx, dy; };
    static constexpr Move moves[] = {
        {kWallUp, -1, 0}, {kWallDown, 1, 0}, {kWallLeft, 0, -1}, {kWallRight, 0, 1}};
    for (const auto& mv : moves) {
      if (m.blocked(c, mv.bit)) continue;
      Cell n{c.x + mv.dx, c.y + mv.dy};
      if (!m.in_bounds(n)) continue;
      size_t idx = static_cast<size_t>(n.x - 1) * m.cols + (n.y - 1);
      if (!seen[idx]) {
        seen[idx] = 1;
        frontier.push_back(n);
      }
    }
  }
  raise(ErrorKind::Validation, "maze: goal cell is not reachable from the start cell");
}

// generic-ingredient substitution: "dark oak planks" satisfies "planks"
inline bool item_matches(const std::string& specific, const std::string& generic) {
  if (specific == generic) return true;
  return specific.size() > generic.size() + 1 &&
         specific.compare(specific.size() - generic.size(), generic.size(), generic) == 0 &&
         specific[specific.size() - generic.size() - 1] == ' ';
}

inline void validate_craft(const CraftBook& book) {
  if (book.target.empty()) raise(ErrorKind::Validation, "textcraft: target item is empty");
  if (book.recipes.empty()) raise(ErrorKind::Validation, "textcraft: recipe book is empty");
  for (const auto& r : book.recipes) {
    if (r.output.empty() || r.output_count < 1) raise(ErrorKind::Validation, "textcraft: malformed recipe output");
    if (r.inputs.empty()) raise(ErrorKind::Validation, "textcraft: recipe has no ingredients");
    for (const auto& [n, item] : r.inputs)
      if (n < 1 || item.empty()) raise(ErrorKind::Validation, "textcraft: malformed recipe ingredient");
  }
  // target must be derivable: fixed-point closure over fetchable base items
  std::vector<std::string> have;
  for (const auto& r : book.recipes)
    for (const auto& [n, item] : r.inputs)
      if (!book.craftable(item)) have.push_back(item);
  auto satisfied = [&](const std::string& want) {
    for (const auto& h : have)
      if (item_matches(h, want)) return true;
    return false;
  };
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& r : book.recipes) {
      if (satisfied(r.output)) continue;
      bool ok = true;
      for (const auto& [n, item] : r.inputs)
        if (!satisfied(item)) { ok = false; break; }
      if (ok) {
        have.push_back(r.output);
        grew = true;
      }
    }
  }
  if (!satisfied(book.target))
    raise(ErrorKind::Validation, "textcraft: target item is not derivable from the recipe book");
}

}  // namespace detail

inline void TaskSpec::validate() const {
  if (max_turns < 1) raise(ErrorKind::Validation, "task: max_turns must be positive");
  switch (env_kind) {
    case EnvKind::Maze:
      detail::validate_maze(maze);
      break;
    case EnvKind::Wordle: {
      if (!detail::lowercase_alpha5(wordle.hidden))
        raise(ErrorKind::Validation, "wordle: hidden word must be lowercase alphabetic of length 5");
      if (wordle.words.empty()) raise(ErrorKind::Validation, "wordle: word list is empty");
      bool found = false;
      for (const auto& w : wordle.words) {
        if (!detail::lowercase_alpha5(w))
          raise(ErrorKind::Validation, "wordle: word list entry must be lowercase alphabetic of length 5: " + w);
        if (w == wordle.hidden) found = true;
      }
      if (!found) raise(ErrorKind::Validation, "wordle: hidden word must appear in the word list");
      break;
    }
    case EnvKind::TextCraft:
      detail::validate_craft(craft);
      break;
  }
}

// --- JSON -------------------------------------------------------------

inline nlohmann::json task_to_json(const TaskSpec& t) {
  nlohmann::json j;
  j["env"] = env_kind_name(t.env_kind);
  j["max_turns"] = t.max_turns;
  if (!t.id.empty()) j["id"] = t.id;
  switch (t.env_kind) {
    case EnvKind::Maze: {
      nlohmann::json grid = nlohmann::json::array();
      for (int x = 0; x < t.maze.rows; ++x) {
        nlohmann::json row = nlohmann::json::array();
        for (int y = 0; y < t.maze.cols; ++y) row.push_back(t.maze.walls[static_cast<size_t>(x) * t.maze.cols + y]);
        grid.push_back(row);
      }
      j["grid"] = grid;
      j["start"] = {t.maze.start.x, t.maze.start.y};
      j["goal"] = {t.maze.goal.x, t.maze.goal.y};
      break;
    }
    case EnvKind::Wordle:
      j["hidden"] = t.wordle.hidden;
      j["words"] = t.wordle.words;
      break;
    case EnvKind::TextCraft: {
      j["target"] = t.craft.target;
      nlohmann::json recipes = nlohmann::json::array();
      for (const auto& r : t.craft.recipes) {
        nlohmann::json jr;
        jr["out"] = r.output;
        jr["count"] = r.output_count;
        nlohmann::json in = nlohmann::json::array();
        for (const auto& [n, item] : r.inputs) in.push_back({n, item});
        jr["in"] = in;
        recipes.push_back(jr);
      }
      j["recipes"] = recipes;
      break;
    }
  }
  return j;
}

std::string default_goal_text(const TaskSpec& t);  // defined in environment.hpp

inline TaskSpec task_from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir = {}) {
  TaskSpec t;
  if (!j.contains("env")) raise(ErrorKind::Validation, "task: missing \"env\" field");
  t.env_kind = env_kind_from(j.at("env").get<std::string>());
  t.max_turns = j.value("max_turns", 0);
  t.id = j.value("id", std::string{});
  switch (t.env_kind) {
    case EnvKind::Maze: {
      const auto& grid = j.at("grid");
      t.maze.rows = static_cast<int>(grid.size());
      t.maze.cols = t.maze.rows ? static_cast<int>(grid.at(0).size()) : 0;
      for (const auto& row : grid) {
        if (static_cast<int>(row.size()) != t.maze.cols)
          raise(ErrorKind::Validation, "maze: ragged grid rows");
        for (const auto& v : row) t.maze.walls.push_back(static_cast<uint8_t>(v.get<int>()));
      }
      t.maze.start = {j.at("start").at(0).get<int>(), j.at("start").at(1).get<int>()};
      t.maze.goal = {j.at("goal").at(0).get<int>(), j.at("goal").at(1).get<int>()};
      break;
    }
    case EnvKind::Wordle: {
      t.wordle.hidden = j.at("hidden").get<std::string>();
      if (j.contains("words")) {
        t.wordle.words = j.at("words").get<std::vector<std::string>>();
      } else if (j.contains("words_file")) {
        std::filesystem::path p = j.at("words_file").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        std::ifstream in(p);
        if (!in) raise(ErrorKind::Io, "wordle: cannot open word list file " + p.string());
        std::string w;
        while (in >> w) t.wordle.words.push_back(to_lower(w));
      } else {
        raise(ErrorKind::Validation, "wordle: task needs \"words\" or \"words_file\"");
      }
      break;
    }
    case EnvKind::TextCraft: {
      t.craft.target = j.at("target").get<std::string>();
      for (const auto& jr : j.at("recipes")) {
        Recipe r;
        r.output = jr.at("out").get<std::string>();
        r.output_count = jr.value("count", 1);
        for (const auto& in : jr.at("in"))
          r.inputs.emplace_back(in.at(0).get<int>(), in.at(1).get<std::string>());
        t.craft.recipes.push_back(std::move(r));
      }
      break;
    }
  }
  t.goal_text = j.value("goal_text", std::string{});
  t.validate();
  if (t.goal_text.empty()) t.goal_text = default_goal_text(t);
  return t;
}

inline TaskSpec load_task_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open task file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(ErrorKind::Validation, "task file " + path.string() + ": " + e.what());
  }
  TaskSpec t = task_from_json(j, path.parent_path());
  if (t.id.empty()) t.id = path.stem().string();
  return t;
}

}  // namespace planrl::envsim
