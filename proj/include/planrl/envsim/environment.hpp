#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "planrl/core/error.hpp"
#include "planrl/core/text.hpp"
#include "planrl/envsim/task.hpp"
#include "planrl/envsim/wordle.hpp"

namespace planrl::envsim {

// Deterministic single-threaded state machine. Instances are cheap to clone,
// which is how plan candidates get simulated without disturbing the episode.
class Environment {
public:
  virtual ~Environment() = default;

  virtual Observation reset() = 0;
  virtual Observation step(const std::string& action_text) = 0;

  virtual bool terminal() const = 0;
  virtual bool success() const = 0;
  virtual int turns_used() const = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;

  // progress measure for plan ranking; 0 iff solved, larger is worse
  virtual double distance_to_goal() const = 0;

  const TaskSpec& task() const { return *task_; }

protected:
  explicit Environment(const TaskSpec& task) : task_(&task) {}
  const TaskSpec* task_;
};

// --- maze -------------------------------------------------------------

inline std::string maze_direction_name(uint8_t bit) {
  switch (bit) {
    case kWallUp: return "up";
    case kWallDown: return "down";
    case kWallLeft: return "left";
    case kWallRight: return "right";
  }
  return "?";
}

struct MazeState {
  Cell pos;
  Cell goal;
  const MazeLayout* layout = nullptr;
};

inline int maze_bfs_distance(const MazeLayout& m, Cell from, Cell to) {
  if (from == to) return 0;
  std::vector<int> dist(m.walls.size(), -1);
  auto idx = [&](Cell c) { return static_cast<size_t>(c.x - 1) * m.cols + (c.y - 1); };
  std::vector<Cell> queue{from};
  dist[idx(from)] = 0;
  size_t head = 0;
  struct Move { uint8_t bit; int dx, dy; };
  static constexpr Move moves[] = {
      {kWallRight, 0, 1}, {kWallDown, 1, 0}, {kWallLeft, 0, -1}, {kWallUp, -1, 0}};
  while (head < queue.size()) {
    Cell c = queue[head++];
    for (const auto& mv : moves) {
      if (m.blocked(c, mv.bit)) continue;
      Cell n{c.x + mv.dx, c.y + mv.dy};
      if (!m.in_bounds(n) || dist[idx(n)] >= 0) continue;
      dist[idx(n)] = dist[idx(c)] + 1;
      if (n == to) return dist[idx(n)];
      queue.push_back(n);
    }
  }
  return -1;
}

class MazeEnv final : public Environment {
public:
  explicit MazeEnv(const TaskSpec& task) : Environment(task) {}

  Observation reset() override {
    pos_ = task_->maze.start;
    turns_ = 0;
    terminal_ = false;
    success_ = false;
    return {state_text(""), false, false};
  }

  Observation step(const std::string& action_text) override {
    require_active();
    ++turns_;
    const MazeLayout& m = task_->maze;
    std::string canon = to_lower(collapse_ws(action_text));
    uint8_t bit = 0;
    int dx = 0, dy = 0;
    if (canon == "move up") { bit = kWallUp; dx = -1; }
    else if (canon == "move down") { bit = kWallDown; dx = 1; }
    else if (canon == "move left") { bit = kWallLeft; dy = -1; }
    else if (canon == "move right") { bit = kWallRight; dy = 1; }

    std::string prefix;
    if (bit == 0) {
      prefix = "Invalid action. The available actions are: move up, move down, move left, move right. ";
    } else if (m.blocked(pos_, bit)) {
      prefix = "You hit a wall and stayed in place. ";
    } else {
      Cell next{pos_.x + dx, pos_.y + dy};
      if (!m.in_bounds(next)) {
        prefix = "You hit a wall and stayed in place. ";
      } else {
        pos_ = next;
        prefix = "You moved " + maze_direction_name(bit) + ". ";
      }
    }
    if (pos_ == m.goal) {
      terminal_ = true;
      success_ = true;
      return {prefix + "You reached the goal at position " + std::to_string(pos_.x) + ", " +
                  std::to_string(pos_.y) + ". Task Completed!",
              true, true};
    }
    if (turns_ >= task_->max_turns) {
      terminal_ = true;
      return {prefix + "You ran out of steps. " + state_text(""), true, false};
    }
    return {prefix + state_text(""), false, false};
  }

  bool terminal() const override { return terminal_; }
  bool success() const override { return success_; }
  int turns_used() const override { return turns_; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<MazeEnv>(*this); }
  double distance_to_goal() const override {
    int d = maze_bfs_distance(task_->maze, pos_, task_->maze.goal);
    return d < 0 ? 1e9 : static_cast<double>(d);
  }

  Cell position() const { return pos_; }

private:
  void require_active() const {
    if (terminal_) raise(ErrorKind::Usage, "env_step called after terminal observation");
    if (turns_ >= task_->max_turns) raise(ErrorKind::Usage, "env_step called past the turn budget");
  }

  // Mirrors the executor prompt: goal, current position, surrounding walls.
  std::string state_text(const std::string& prefix) const {
    const MazeLayout& m = task_->maze;
    std::string s = prefix;
    s += "The goal is at position " + std::to_string(m.goal.x) + ", " + std::to_string(m.goal.y) + ". ";
    s += "Your current position is at position " + std::to_string(pos_.x) + ", " + std::to_string(pos_.y) + ". ";
    uint8_t b = m.wall_bits(pos_);
    std::vector<std::string> walls;
    if (b & kWallLeft) walls.push_back("to your left");
    if (b & kWallRight) walls.push_back("to your right");
    if (b & kWallUp) walls.push_back("above you");
    if (b & kWallDown) walls.push_back("below you");
    if (walls.empty())
      s += "There are no walls directly around you.";
    else
      s += "There are walls " + join(walls, ", ") + ".";
    return s;
  }

  Cell pos_;
  int turns_ = 0;
  bool terminal_ = false;
  bool success_ = false;
};

// --- wordle -----------------------------------------------------------

class WordleEnv final : public Environment {
public:
  explicit WordleEnv(const TaskSpec& task) : Environment(task) {}

  Observation reset() override {
    attempts_used_ = 0;
    terminal_ = false;
    success_ = false;
    guesses_.clear();
    return {"Welcome to Wordle. Your objective is to guess a hidden 5 letter word. You have " +
                std::to_string(task_->max_turns) + " attempts remaining.",
            false, false};
  }

  Observation step(const std::string& action_text) override {
    if (terminal_) raise(ErrorKind::Usage, "env_step called after terminal observation");
    ++attempts_used_;
    int left = task_->max_turns - attempts_used_;
    std::string guess = normalize_guess(action_text);
    if (guess.empty()) {
      // invalid guesses consume an attempt so format sloppiness stays costly
      if (left <= 0) {
        terminal_ = true;
        return {"Invalid guess. Out of attempts. The game is over.", true, false};
      }
      return {"Invalid guess. Format your word as a space separated sequence of 5 letters, "
              "like \"s h i r e\". You have " + std::to_string(left) + " attempts remaining.",
              false, false};
    }
    std::string fb = wordle_feedback(guess, task_->wordle.hidden);
    guesses_.emplace_back(guess, fb);
    if (guess == task_->wordle.hidden) {
      terminal_ = true;
      success_ = true;
      return {fb + ". You guessed the hidden word. Task Completed!", true, true};
    }
    if (left <= 0) {
      terminal_ = true;
      return {fb + ". Out of attempts. The game is over.", true, false};
    }
    return {fb + ". You have " + std::to_string(left) + " attempts remaining.", false, false};
  }

  bool terminal() const override { return terminal_; }
  bool success() const override { return success_; }
  int turns_used() const override { return attempts_used_; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<WordleEnv>(*this); }

  double distance_to_goal() const override {
    if (success_) return 0.0;
    int best_greens = 0;
    for (const auto& [g, fb] : guesses_) {
      int greens = 0;
      for (char c : fb)
        if (c == 'g') ++greens;
      best_greens = std::max(best_greens, greens);
    }
    return 1.0 + (5 - best_greens);
  }

  const std::vector<std::pair<std::string, std::string>>& guesses() const { return guesses_; }

private:
  int attempts_used_ = 0;
  bool terminal_ = false;
  bool success_ = false;
  std::vector<std::pair<std::string, std::string>> guesses_;  // (word, feedback wire)
};

// --- textcraft --------------------------------------------------------

class TextCraftEnv final : public Environment {
public:
  explicit TextCraftEnv(const TaskSpec& task) : Environment(task) {}

  Observation reset() override {
    inventory_.clear();
    turns_ = 0;
    terminal_ = false;
    success_ = false;
    return {"Crafting commands:\n" + command_list() + "\nGoal: craft " + task_->craft.target + ".",
            false, false};
  }

  Observation step(const std::string& action_text) override {
    if (terminal_) raise(ErrorKind::Usage, "env_step called after terminal observation");
    ++turns_;
    std::string out = apply(to_lower(collapse_ws(action_text)));
    if (has_item(task_->craft.target)) {
      terminal_ = true;
      success_ = true;
      return {out + " Task Completed!", true, true};
    }
    if (turns_ >= task_->max_turns) {
      terminal_ = true;
      return {out + " You ran out of turns.", true, false};
    }
    return {out + " " + inventory_text(), false, false};
  }

  bool terminal() const override { return terminal_; }
  bool success() const override { return success_; }
  int turns_used() const override { return turns_; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<TextCraftEnv>(*this); }

  double distance_to_goal() const override {
    if (success_ || has_item(task_->craft.target)) return 0.0;
    // shallow estimate: missing direct ingredients of the cheapest target recipe
    double best = 1e9;
    for (const auto& r : task_->craft.recipes) {
      if (r.output != task_->craft.target) continue;
      double missing = 0;
      for (const auto& [n, item] : r.inputs)
        if (count_matching(item) < n) ++missing;
      best = std::min(best, 1.0 + missing);
    }
    return best;
  }

  const std::map<std::string, int>& inventory() const { return inventory_; }

private:
  std::string command_list() const {
    std::vector<std::string> cmds;
    for (const auto& r : task_->craft.recipes) cmds.push_back(r.command());
    return join(cmds, "\n");
  }

  bool has_item(const std::string& item) const {
    auto it = inventory_.find(item);
    return it != inventory_.end() && it->second > 0;
  }

  int count_matching(const std::string& generic) const {
    int total = 0;
    for (const auto& [item, n] : inventory_)
      if (detail::item_matches(item, generic)) total += n;
    return total;
  }

  std::string inventory_text() const {
    if (inventory_.empty()) return "Inventory: empty.";
    std::vector<std::string> parts;
    for (const auto& [item, n] : inventory_)
      if (n > 0) parts.push_back(std::to_string(n) + " " + item);
    if (parts.empty()) return "Inventory: empty.";
    return "Inventory: " + join(parts, ", ") + ".";
  }

  // consume `need` units matching `generic`; exact name first, then substitutes
  void consume(const std::string& generic, int need) {
    auto exact = inventory_.find(generic);
    if (exact != inventory_.end()) {
      int take = std::min(exact->second, need);
      exact->second -= take;
      need -= take;
    }
    for (auto& [item, n] : inventory_) {
      if (need <= 0) break;
      if (item == generic || !detail::item_matches(item, generic)) continue;
      int take = std::min(n, need);
      n -= take;
      need -= take;
    }
  }

  std::string apply(const std::string& action) {
    auto words = split_ws(action);
    if (words.empty()) return "Nothing happens.";
    if (words[0] == "inventory") return inventory_text();
    if (words[0] == "get" || words[0] == "fetch") {
      int count = 1;
      size_t item_from = 1;
      if (words.size() >= 2) {
        try {
          count = std::stoi(words[1]);
          item_from = 2;
        } catch (...) {
          count = 1;
        }
      }
      if (item_from >= words.size()) return "Get what?";
      std::string item;
      for (size_t i = item_from; i < words.size(); ++i) {
        if (i > item_from) item += ' ';
        item += words[i];
      }
      if (count < 1) count = 1;
      if (task_->craft.craftable(item))
        return "Could not find " + item + ". It must be crafted from its ingredients.";
      if (!is_known_base(item)) return "Could not find " + item + ".";
      inventory_[item] += count;
      return "Got " + std::to_string(count) + " " + item + ".";
    }
    if (words[0] == "craft") {
      // accept "craft [count] target using ..." and match against the book
      std::string rest = action.substr(5);
      auto using_split = split_on(rest, " using ");
      std::string target_part = trim(using_split[0]);
      auto tw = split_ws(target_part);
      if (!tw.empty()) {
        try {
          (void)std::stoi(tw[0]);
          tw.erase(tw.begin());
        } catch (...) {
        }
      }
      std::string target = join(tw, " ");
      if (target.empty()) return "Craft what?";
      const Recipe* recipe = nullptr;
      for (const auto& r : task_->craft.recipes)
        if (r.output == target) { recipe = &r; break; }
      if (!recipe) return "You cannot craft " + target + ": there is no crafting command for it.";
      for (const auto& [n, item] : recipe->inputs)
        if (count_matching(item) < n)
          return "You cannot craft " + target + ": missing ingredients.";
      for (const auto& [n, item] : recipe->inputs) consume(item, n);
      inventory_[recipe->output] += recipe->output_count;
      return "Crafted " + std::to_string(recipe->output_count) + " " + recipe->output + ".";
    }
    return "Invalid action. Use get, craft or inventory.";
  }

  bool is_known_base(const std::string& item) const {
    for (const auto& r : task_->craft.recipes)
      for (const auto& [n, ing] : r.inputs)
        if (detail::item_matches(item, ing) && !task_->craft.craftable(item)) return true;
    return false;
  }

  std::map<std::string, int> inventory_;
  int turns_ = 0;
  bool terminal_ = false;
  bool success_ = false;
};

// --- factory ----------------------------------------------------------

inline std::unique_ptr<Environment> make_environment(const TaskSpec& task) {
  task.validate();
  switch (task.env_kind) {
    case EnvKind::Maze: return std::make_unique<MazeEnv>(task);
    case EnvKind::Wordle: return std::make_unique<WordleEnv>(task);
    case EnvKind::TextCraft: return std::make_unique<TextCraftEnv>(task);
  }
  raise(ErrorKind::Contract, "unreachable env kind");
}

inline std::string default_goal_text(const TaskSpec& t) {
  switch (t.env_kind) {
    case EnvKind::Maze:
      return "You are in a maze. Your objective is to reach the goal at position " +
             std::to_string(t.maze.goal.x) + ", " + std::to_string(t.maze.goal.y) +
             " in as few steps as possible. When you move right, you increase your y position by 1. "
             "When you move down, you increase your x position by 1.";
    case EnvKind::Wordle:
      return "Your objective is to guess a hidden 5 letter word. You have " +
             std::to_string(t.max_turns) +
             " attempts to guess it correctly and you should try to guess it in as few attempts as "
             "possible. Format your word as a space separated sequence of letters, like \"s h i r e\".";
    case EnvKind::TextCraft: {
      std::vector<std::string> cmds;
      for (const auto& r : t.craft.recipes) cmds.push_back(r.command());
      return "You can craft or fetch objects. Crafting commands:\n" + join(cmds, "\n") +
             "\nGoal: craft " + t.craft.target + ".";
    }
  }
  return {};
}

}  // namespace planrl::envsim
