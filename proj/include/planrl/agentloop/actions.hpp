#pragma once

#include <string>
#include <vector>

#include "planrl/core/text.hpp"

namespace planrl::agentloop {

// Strips "( ... )" groups; plan steps may carry position annotations like
// "move right (from 1, 1 to 1, 2)".
inline std::string strip_parentheticals(const std::string& s) {
  std::string out;
  int depth = 0;
  for (char c : s) {
    if (c == '(') { ++depth; continue; }
    if (c == ')') { if (depth > 0) --depth; continue; }
    if (depth == 0) out.push_back(c);
  }
  return out;
}

// Executable form of a plan clause: annotation-free, "guess" prefix removed,
// counts kept so craft/get commands stay runnable.
inline std::string executable_clause(const std::string& clause) {
  std::string s = collapse_ws(strip_parentheticals(to_lower(clause)));
  if (s.rfind("guess ", 0) == 0) s = s.substr(6);
  return s;
}

// Comparison form used by adherence scoring: counts dropped, fetch/get folded.
inline std::string canonical_action(const std::string& text) {
  std::string s = executable_clause(text);
  auto words = split_ws(s);
  std::vector<std::string> kept;
  for (auto& w : words) {
    bool digits = !w.empty();
    for (char c : w)
      if (!std::isdigit(static_cast<unsigned char>(c))) { digits = false; break; }
    if (digits) continue;
    if (w == "fetch") w = "get";
    kept.push_back(w);
  }
  return join(kept, " ");
}

// First token, with two atomic families: maze moves fold the direction in
// ("move left" and "move right" are different verbs, not one verb with two
// arguments), and a spaced wordle guess is one verb as a whole.
inline std::string action_verb(const std::string& canonical) {
  auto words = split_ws(canonical);
  if (words.empty()) return {};
  if (words[0] == "move" && words.size() >= 2 &&
      (words[1] == "up" || words[1] == "down" || words[1] == "left" || words[1] == "right"))
    return words[0] + " " + words[1];
  if (words.size() == 5) {
    bool single_letters = true;
    for (const auto& w : words)
      if (w.size() != 1 || w[0] < 'a' || w[0] > 'z') { single_letters = false; break; }
    if (single_letters) return canonical;
  }
  return words[0];
}

// Multi-part plan steps: "fetch planks and craft stick" -> two sub-actions.
inline std::vector<std::string> split_subactions(const std::string& clause) {
  std::vector<std::string> parts{clause};
  for (const char* sep : {" and ", " then "}) {
    std::vector<std::string> next;
    for (const auto& p : parts)
      for (const auto& piece : split_on(p, sep)) next.push_back(piece);
    parts = std::move(next);
  }
  std::vector<std::string> out;
  for (auto& p : parts) {
    std::string t = trim(p);
    if (!t.empty()) out.push_back(std::move(t));
  }
  if (out.empty()) out.push_back(clause);
  return out;
}

}  // namespace planrl::agentloop
