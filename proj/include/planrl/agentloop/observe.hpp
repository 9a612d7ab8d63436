#pragma once

#include <optional>
#include <string>
#include <vector>

#include "planrl/agentloop/trajectory.hpp"
#include "planrl/core/text.hpp"
#include "planrl/envsim/task.hpp"
#include "planrl/envsim/wordle.hpp"

namespace planrl::agentloop {

// Observable state recovered from observation text. Everything here must be
// derivable from what the environment printed: the policy and the planner
// never touch hidden state through these helpers.

struct MazeView {
  envsim::Cell pos;
  envsim::Cell goal;
  bool wall_up = false, wall_down = false, wall_left = false, wall_right = false;
};

inline std::optional<envsim::Cell> parse_cell_after(const std::string& text, const std::string& marker) {
  size_t at = text.rfind(marker);
  if (at == std::string::npos) return std::nullopt;
  size_t p = at + marker.size();
  auto read_int = [&](int& out) -> bool {
    while (p < text.size() && (text[p] == ' ' || text[p] == ',')) ++p;
    size_t start = p;
    while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p]))) ++p;
    if (p == start) return false;
    out = std::stoi(text.substr(start, p - start));
    return true;
  };
  envsim::Cell c;
  if (!read_int(c.x)) return std::nullopt;
  if (!read_int(c.y)) return std::nullopt;
  return c;
}

inline std::optional<MazeView> parse_maze_view(const std::string& obs_text) {
  MazeView v;
  auto pos = parse_cell_after(obs_text, "current position is at position ");
  auto goal = parse_cell_after(obs_text, "goal is at position ");
  if (!pos || !goal) return std::nullopt;
  v.pos = *pos;
  v.goal = *goal;
  v.wall_left = contains(obs_text, "to your left");
  v.wall_right = contains(obs_text, "to your right");
  v.wall_up = contains(obs_text, "above you");
  v.wall_down = contains(obs_text, "below you");
  return v;
}

inline const std::string& last_observation(const Trajectory& t) {
  return t.turns.empty() ? t.initial_obs : t.turns.back().obs_text;
}

// (guess, compact feedback) pairs recovered from the turn history
inline std::vector<std::pair<std::string, std::string>> wordle_history(const Trajectory& t) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& turn : t.turns) {
    std::string guess = envsim::normalize_guess(turn.action.empty() ? turn.raw : turn.action);
    if (guess.empty()) continue;
    const std::string& obs = turn.obs_text;
    if (obs.size() < 9) continue;
    std::string compact;
    for (size_t i = 0; i < 9; ++i) {
      char c = obs[i];
      if (i % 2 == 0) {
        if (c != 'b' && c != 'y' && c != 'g') { compact.clear(); break; }
        compact.push_back(c);
      } else if (c != ' ') {
        compact.clear();
        break;
      }
    }
    if (compact.size() == 5) out.emplace_back(guess, compact);
  }
  return out;
}

// words already tried, in joined form
inline std::vector<std::string> wordle_guessed(const Trajectory& t) {
  std::vector<std::string> out;
  for (const auto& [g, fb] : wordle_history(t)) out.push_back(g);
  return out;
}

// inventory parsed from the latest "Inventory: ..." line
inline std::vector<std::pair<std::string, int>> parse_inventory(const std::string& obs_text) {
  std::vector<std::pair<std::string, int>> out;
  size_t at = obs_text.rfind("Inventory: ");
  if (at == std::string::npos) return out;
  std::string rest = obs_text.substr(at + 11);
  size_t dot = rest.find('.');
  if (dot != std::string::npos) rest = rest.substr(0, dot);
  if (trim(rest) == "empty") return out;
  for (const auto& part : split_on(rest, ", ")) {
    auto words = split_ws(part);
    if (words.size() < 2) continue;
    try {
      int n = std::stoi(words[0]);
      words.erase(words.begin());
      out.emplace_back(join(words, " "), n);
    } catch (...) {
    }
  }
  return out;
}

// Remaining plan horizon, from observable context only.
inline int plan_horizon(const envsim::TaskSpec& task, const Trajectory& ctx, int turns_done) {
  int remaining = task.max_turns - turns_done;
  if (remaining < 1) return 0;
  if (task.env_kind == envsim::EnvKind::Maze) {
    if (auto v = parse_maze_view(last_observation(ctx))) {
      // a little slack beyond the Manhattan distance keeps one bounce or a
      // short detour expressible without padding plans with noise steps
      int manh = std::abs(v->goal.x - v->pos.x) + std::abs(v->goal.y - v->pos.y);
      return std::min(remaining, manh + 3);
    }
  }
  return std::min(remaining, 16);
}

}  // namespace planrl::agentloop
