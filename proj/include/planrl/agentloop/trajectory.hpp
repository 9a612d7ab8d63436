#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "planrl/agentloop/plan.hpp"
#include "planrl/core/error.hpp"

namespace planrl::agentloop {

struct Turn {
  std::string raw;                       // full agent response text
  std::optional<std::string> thought;
  std::string action;                    // parsed action; empty on violation
  std::optional<std::string> violation;  // parse failure reason
  std::string obs_text;
  bool obs_terminal = false;
  bool obs_success = false;
};

enum class PlanSource { External, Policy };

struct Trajectory {
  std::string goal;
  std::string initial_obs;
  std::vector<GlobalPlan> plans;
  std::vector<PlanSource> plan_sources;  // parallel to plans
  std::vector<Turn> turns;
  bool terminal = false;
  bool success = false;
  bool aborted = false;
  std::vector<std::string> events;  // warnings (selector fallbacks, regen failures)

  const GlobalPlan* latest_plan() const { return plans.empty() ? nullptr : &plans.back(); }

  void check_invariants(int max_turns) const {
    if (!plans.empty() && plans.front().version != 0)
      raise(ErrorKind::Contract, "trajectory: plans[0].version must be 0");
    for (size_t i = 1; i < plans.size(); ++i)
      if (plans[i].version <= plans[i - 1].version)
        raise(ErrorKind::Contract, "trajectory: plan versions must be strictly increasing");
    if (static_cast<int>(turns.size()) > max_turns)
      raise(ErrorKind::Contract, "trajectory: turn count exceeds max_turns");
    if (success && !(terminal && !turns.empty() && turns.back().obs_success))
      raise(ErrorKind::Contract, "trajectory: success requires a terminal successful observation");
  }
};

inline nlohmann::json trajectory_to_json(const Trajectory& t) {
  nlohmann::json j;
  j["goal"] = t.goal;
  j["initial_obs"] = t.initial_obs;
  nlohmann::json plans = nlohmann::json::array();
  for (size_t i = 0; i < t.plans.size(); ++i) {
    nlohmann::json p;
    p["version"] = t.plans[i].version;
    p["steps"] = t.plans[i].steps;
    p["source"] = t.plan_sources[i] == PlanSource::External ? "external" : "policy";
    plans.push_back(p);
  }
  j["plans"] = plans;
  nlohmann::json turns = nlohmann::json::array();
  for (const auto& turn : t.turns) {
    nlohmann::json jt;
    jt["raw"] = turn.raw;
    if (turn.thought) jt["thought"] = *turn.thought;
    jt["action"] = turn.action;
    if (turn.violation) jt["violation"] = *turn.violation;
    jt["obs"] = turn.obs_text;
    turns.push_back(jt);
  }
  j["turns"] = turns;
  j["terminal"] = t.terminal;
  j["success"] = t.success;
  j["aborted"] = t.aborted;
  if (!t.events.empty()) j["events"] = t.events;
  return j;
}

}  // namespace planrl::agentloop
