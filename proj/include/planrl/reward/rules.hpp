#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "planrl/agentloop/actions.hpp"
#include "planrl/agentloop/episode.hpp"
#include "planrl/agentloop/response.hpp"
#include "planrl/agentloop/selector.hpp"
#include "planrl/envsim/environment.hpp"
#include "planrl/reward/breakdown.hpp"

namespace planrl::reward {

namespace detail {

inline bool has_illegible_characters(const std::string& s) {
  for (size_t i = 0; i < s.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x20 && c != '\n' && c != '\t' && c != '\r') return true;
    // UTF-8 replacement character EF BF BD
    if (c == 0xEF && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0xBF &&
        static_cast<unsigned char>(s[i + 2]) == 0xBD)
      return true;
  }
  return false;
}

// open/close tags must strictly alternate, starting with an open
inline bool observation_tags_balanced(const std::string& text) {
  size_t pos = 0;
  bool expecting_open = true;
  while (true) {
    size_t open = text.find("<observation>", pos);
    size_t close = text.find("</observation>", pos);
    if (open == std::string::npos && close == std::string::npos) return expecting_open;
    // "<observation>" is a prefix of no tag, but "</observation>" contains neither
    if (expecting_open) {
      if (close < open) return false;
      if (open == std::string::npos) return false;
      pos = open + 13;
    } else {
      if (open < close) return false;
      if (close == std::string::npos) return false;
      pos = close + 14;
    }
    expecting_open = !expecting_open;
  }
}

}  // namespace detail

// The serialized interaction text: responses as emitted, every environment
// feedback wrapped in <observation> tags. This is the text the format rule
// and the loss masking operate over.
inline std::string serialize_interaction(const agentloop::Trajectory& traj) {
  std::string out = "<observation> " + traj.initial_obs + " </observation>\n";
  for (const auto& turn : traj.turns) {
    out += turn.raw + "\n";
    out += "<observation> " + turn.obs_text + " </observation>\n";
  }
  return out;
}

// Eq.-style all-or-nothing format score over the whole trajectory.
inline int format_reward(const agentloop::Trajectory& traj) {
  if (traj.aborted) return 0;
  for (const auto& turn : traj.turns) {
    if (turn.violation) return 0;
    if (detail::has_illegible_characters(turn.raw)) return 0;
    // a response faking environment feedback breaks the tag framing
    if (contains(turn.raw, "<observation>") || contains(turn.raw, "</observation>")) return 0;
  }
  if (!detail::observation_tags_balanced(serialize_interaction(traj))) return 0;
  return 1;
}

// Per-turn diagnostic vector behind the binary score, for debugging runs.
inline std::vector<int> format_turn_diagnostics(const agentloop::Trajectory& traj) {
  std::vector<int> ok;
  ok.reserve(traj.turns.size());
  for (const auto& turn : traj.turns)
    ok.push_back(turn.violation || detail::has_illegible_characters(turn.raw) ? 0 : 1);
  return ok;
}

// Rule-based compliance of one action against its plan step: 2 for a
// canonically equal single-action clause, 1 when one of several suggested
// sub-actions was executed or the verb matches with different arguments,
// 0 otherwise.
inline int adherence_rule(const std::string& turn_action, const std::string& plan_clause) {
  std::string exec = agentloop::canonical_action(turn_action);
  if (exec.empty()) return 0;
  auto subs = agentloop::split_subactions(plan_clause);
  std::vector<std::string> canon_subs;
  canon_subs.reserve(subs.size());
  for (const auto& s : subs) canon_subs.push_back(agentloop::canonical_action(s));
  if (canon_subs.size() == 1 && exec == canon_subs[0]) return 2;
  for (const auto& s : canon_subs)
    if (exec == s) return 1;
  std::string exec_verb = agentloop::action_verb(exec);
  for (const auto& s : canon_subs)
    if (!exec_verb.empty() && exec_verb == agentloop::action_verb(s)) return 1;
  return 0;
}

// 0 on failure; on success 2 when within the efficiency threshold
// ceil(1.1 * oracle length), else 1 (success with redundancy).
inline int e2e_rule(const agentloop::Trajectory& traj, int oracle_len) {
  if (!traj.success) return 0;
  long threshold = static_cast<long>(std::ceil(1.1 * oracle_len));
  if (threshold < 1) threshold = 1;
  return static_cast<long>(traj.turns.size()) <= threshold ? 2 : 1;
}

// The plan version that was in effect when turn `t` (1-based) was taken:
// the latest plan with version <= t-1.
inline const agentloop::GlobalPlan* plan_for_turn(const agentloop::Trajectory& traj, int t) {
  const agentloop::GlobalPlan* best = nullptr;
  for (const auto& p : traj.plans)
    if (p.version <= t - 1) best = &p;
  return best;
}

struct PlanQualityInputs {
  const envsim::TaskSpec* task = nullptr;
  const agentloop::Trajectory* traj = nullptr;
};

// Rule-based plan quality: correctness from simulating the final plan from
// the initial state (5 reaches the goal / 3 partial progress / 1 none),
// executability from the fraction of turns with adherence >= 1 mapped onto
// [1,5], standardization 5 iff every version satisfies the step grammar.
inline PlanQualityScore plan_quality_rule(const envsim::TaskSpec& task,
                                          const agentloop::Trajectory& traj,
                                          const std::vector<int>& adherence_turns) {
  PlanQualityScore q;
  if (traj.plans.empty()) return q;  // floor (1,1,1)

  bool all_standard = true;
  for (const auto& p : traj.plans)
    if (!p.valid()) all_standard = false;
  q.standard = all_standard ? 5 : 1;

  if (!adherence_turns.empty()) {
    int followed = 0;
    for (int a : adherence_turns)
      if (a >= 1) ++followed;
    double frac = static_cast<double>(followed) / adherence_turns.size();
    q.execute = 1 + static_cast<int>(std::llround(4.0 * frac));
  }

  // simulate the final plan from a fresh environment
  agentloop::Trajectory empty;
  empty.goal = traj.goal;
  auto env = envsim::make_environment(task);
  empty.initial_obs = env->reset().text;
  double initial_distance = env->distance_to_goal();
  const agentloop::GlobalPlan& final_plan = traj.plans.back();
  if (final_plan.valid()) {
    agentloop::PlanSimOutcome sim =
        agentloop::simulate_plan(task, empty, final_plan, 1, task.max_turns);
    if (sim.solved)
      q.correct = 5;
    else if (sim.final_distance < initial_distance)
      q.correct = 3;
    else
      q.correct = 1;
  }
  return q;
}

}  // namespace planrl::reward
