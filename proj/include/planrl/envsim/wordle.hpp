#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "planrl/core/error.hpp"
#include "planrl/core/text.hpp"
#include "planrl/envsim/task.hpp"

namespace planrl::envsim {

// Joins "s h i r e" to "shire"; passes joined forms through unchanged.
// Returns empty string when the action does not normalize to 5 letters.
inline std::string normalize_guess(std::string_view action) {
  std::string t = to_lower(collapse_ws(action));
  if (t.rfind("guess ", 0) == 0) t = t.substr(6);
  std::string joined;
  for (char c : t) {
    if (c == ' ') continue;
    joined.push_back(c);
  }
  if (!detail::lowercase_alpha5(joined)) return {};
  return joined;
}

inline std::string spaced(const std::string& word) {
  std::string out;
  for (size_t i = 0; i < word.size(); ++i) {
    if (i) out.push_back(' ');
    out.push_back(word[i]);
  }
  return out;
}

// Position-wise feedback over {b, y, g}. Two-pass rule: exact matches first,
// then presence marks capped by the remaining letter counts.
inline std::array<char, 5> wordle_feedback_symbols(const std::string& guess, const std::string& hidden) {
  if (!detail::lowercase_alpha5(guess))
    raise(ErrorKind::Usage, "wordle_feedback: guess must be lowercase alphabetic of length 5");
  if (!detail::lowercase_alpha5(hidden))
    raise(ErrorKind::Usage, "wordle_feedback: hidden must be lowercase alphabetic of length 5");
  std::array<char, 5> fb{'b', 'b', 'b', 'b', 'b'};
  int remaining[26] = {};
  for (int i = 0; i < 5; ++i) {
    if (guess[i] == hidden[i])
      fb[i] = 'g';
    else
      ++remaining[hidden[i] - 'a'];
  }
  for (int i = 0; i < 5; ++i) {
    if (fb[i] == 'g') continue;
    int c = guess[i] - 'a';
    if (remaining[c] > 0) {
      fb[i] = 'y';
      --remaining[c];
    }
  }
  return fb;
}

// Wire form: "g g g g g"
inline std::string wordle_feedback(const std::string& guess, const std::string& hidden) {
  auto fb = wordle_feedback_symbols(guess, hidden);
  std::string out;
  for (int i = 0; i < 5; ++i) {
    if (i) out.push_back(' ');
    out.push_back(fb[i]);
  }
  return out;
}

inline bool feedback_consistent(const std::string& candidate, const std::string& guess,
                                const std::string& feedback_compact) {
  auto fb = wordle_feedback_symbols(guess, candidate);
  for (int i = 0; i < 5; ++i)
    if (fb[i] != feedback_compact[i]) return false;
  return true;
}

// Greedy entropy-reduction reference strategy. Guesses are restricted to the
// words still consistent with all feedback, so every guess can win and the
// candidate set shrinks monotonically. Ties break on word-list order, which
// keeps the strategy fully deterministic.
class WordleStrategy {
public:
  explicit WordleStrategy(const std::vector<std::string>& words) : words_(&words) {
    candidates_.reserve(words.size());
    for (size_t i = 0; i < words.size(); ++i) candidates_.push_back(i);
  }

  void record(const std::string& guess, const std::string& feedback_wire) {
    std::string compact;
    for (char c : feedback_wire)
      if (c == 'b' || c == 'y' || c == 'g') compact.push_back(c);
    if (compact.size() != 5) raise(ErrorKind::Usage, "wordle strategy: malformed feedback");
    std::vector<size_t> next;
    for (size_t idx : candidates_)
      if (feedback_consistent((*words_)[idx], guess, compact)) next.push_back(idx);
    candidates_ = std::move(next);
  }

  // Entropy of the feedback partition the guess induces over the candidates.
  static double partition_entropy(const std::string& guess, const std::vector<std::string>& pool) {
    std::vector<std::pair<std::string, int>> buckets;
    for (const auto& h : pool) {
      auto fb = wordle_feedback_symbols(guess, h);
      std::string key(fb.begin(), fb.end());
      bool found = false;
      for (auto& [k, n] : buckets)
        if (k == key) { ++n; found = true; break; }
      if (!found) buckets.emplace_back(key, 1);
    }
    double total = static_cast<double>(pool.size());
    double ent = 0.0;
    for (const auto& [k, n] : buckets) {
      double p = n / total;
      ent -= p * std::log2(p);
    }
    return ent;
  }

  std::string next_guess() const {
    if (candidates_.empty())
      raise(ErrorKind::Contract, "wordle strategy: no candidate consistent with feedback");
    if (candidates_.size() <= 2) return (*words_)[candidates_.front()];
    std::vector<std::string> pool;
    pool.reserve(candidates_.size());
    for (size_t idx : candidates_) pool.push_back((*words_)[idx]);
    double best = -1.0;
    size_t best_idx = candidates_.front();
    for (size_t idx : candidates_) {
      double e = partition_entropy((*words_)[idx], pool);
      if (e > best + 1e-12) {
        best = e;
        best_idx = idx;
      }
    }
    return (*words_)[best_idx];
  }

  size_t candidate_count() const { return candidates_.size(); }

private:
  const std::vector<std::string>* words_;
  std::vector<size_t> candidates_;
};

// Attempts the reference strategy needs for a hidden word; 0 means it failed
// to finish within the attempt budget.
inline int wordle_strategy_attempts(const std::vector<std::string>& words, const std::string& hidden,
                                    int budget = 6) {
  WordleStrategy strat(words);
  for (int attempt = 1; attempt <= budget; ++attempt) {
    std::string g = strat.next_guess();
    if (g == hidden) return attempt;
    strat.record(g, wordle_feedback(g, hidden));
  }
  return 0;
}

}  // namespace planrl::envsim
