#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "planrl/agentloop/handles.hpp"
#include "planrl/agentloop/observe.hpp"
#include "planrl/agentloop/plan.hpp"
#include "planrl/agentloop/response.hpp"
#include "planrl/agentloop/selector.hpp"
#include "planrl/agentloop/trajectory.hpp"
#include "planrl/envsim/environment.hpp"

namespace planrl::agentloop {

struct EpisodeConfig {
  int candidate_count = 4;  // k for generate-then-select
  int retry_budget = 3;     // extra samples when candidates come back malformed
  int adapt_every = 1;      // plan adaptation frequency in turns
  bool carryover_candidate = true;  // previous plan competes in re-selection
  bool planning = true;             // false = react mode (context only)
  PlanSource plan_source = PlanSource::Policy;
};

struct PlanTrace {
  size_t plan_index = 0;              // index into Trajectory::plans
  std::vector<Decision> decisions;    // planner decisions behind that version
};

struct EpisodeResult {
  Trajectory traj;
  std::vector<PlanTrace> plan_traces;                  // policy-sourced plans only
  std::vector<std::optional<Decision>> turn_decisions; // parallel to traj.turns
};

struct CandidateSet {
  std::vector<GlobalPlan> plans;
  std::vector<std::vector<Decision>> decisions;  // parallel; empty vectors for scripted planners
};

// Samples up to k full plans: the byte-identical prefix (steps 1..t of prev)
// plus a freshly proposed, renumbered suffix. Malformed proposals are dropped
// and resampled within the retry budget.
inline CandidateSet generate_plan_candidates(const envsim::TaskSpec& task, const Trajectory& ctx,
                                             const GlobalPlan* prev, int t, PolicyHandle& planner,
                                             int k, int retry_budget, int horizon, Rng& rng) {
  if (k < 1) raise(ErrorKind::Usage, "generate_plan_candidates: k must be >= 1");
  CandidateSet out;
  std::vector<std::string> prefix;
  if (prev) {
    size_t keep = std::min(static_cast<size_t>(t), prev->steps.size());
    prefix.assign(prev->steps.begin(), prev->steps.begin() + keep);
  }
  int tries = 0;
  int max_tries = k + retry_budget;
  while (static_cast<int>(out.plans.size()) < k && tries < max_tries) {
    ++tries;
    PlanProposal prop = planner.propose_suffix(task, ctx, prev, t, horizon, rng);
    if (prop.clauses.empty()) continue;
    if (static_cast<int>(prop.clauses.size()) > horizon) {
      prop.clauses.resize(horizon);
      if (!prop.decisions.empty()) prop.decisions.resize(horizon);
    }
    GlobalPlan plan;
    plan.steps = prefix;
    auto numbered = number_steps(prop.clauses, prefix.size() + 1);
    plan.steps.insert(plan.steps.end(), numbered.begin(), numbered.end());
    plan.version = t;
    if (!plan.valid()) continue;
    out.plans.push_back(std::move(plan));
    out.decisions.push_back(std::move(prop.decisions));
  }
  return out;
}

// Returns the index the selector picked; selector failures fall back to
// candidate 0 and leave a warning event on the trajectory.
inline size_t select_plan(const envsim::TaskSpec& task, Trajectory& ctx,
                          const std::vector<GlobalPlan>& candidates, PlanSelector& selector) {
  if (candidates.empty()) raise(ErrorKind::Usage, "select_plan: candidates must be non-empty");
  try {
    size_t idx = selector.select(task, ctx, candidates);
    if (idx >= candidates.size()) raise(ErrorKind::Contract, "selector returned out-of-range index");
    return idx;
  } catch (const Error& e) {
    ctx.events.push_back(std::string("plan selection failed, falling back to candidate 0: ") + e.what());
    return 0;
  }
}

// Plan adaptation after turn t: steps 1..t are preserved byte-for-byte,
// steps beyond t are regenerated via generate-then-select. The previous
// plan's own suffix competes as a candidate, so a plan that still simulates
// to success survives re-selection.
inline std::optional<std::pair<GlobalPlan, std::vector<Decision>>> adapt_plan(
    const envsim::TaskSpec& task, Trajectory& ctx, const GlobalPlan& prev, int t,
    PolicyHandle& planner, PlanSelector& selector, const EpisodeConfig& cfg, int horizon,
    Rng& rng) {
  if (t < 1) raise(ErrorKind::Usage, "adapt_plan: t must be >= 1");
  CandidateSet fresh =
      generate_plan_candidates(task, ctx, &prev, t, planner, cfg.candidate_count,
                               cfg.retry_budget, horizon, rng);

  std::vector<GlobalPlan> candidates;
  std::vector<int> fresh_index;  // -1 = carry-over of the previous plan
  if (cfg.carryover_candidate && prev.steps.size() > static_cast<size_t>(t)) {
    GlobalPlan carry = prev;
    carry.version = t;
    candidates.push_back(std::move(carry));
    fresh_index.push_back(-1);
  }
  for (size_t i = 0; i < fresh.plans.size(); ++i) {
    candidates.push_back(fresh.plans[i]);
    fresh_index.push_back(static_cast<int>(i));
  }
  if (candidates.empty()) {
    // regeneration failure: keep the previous suffix unchanged
    ctx.events.push_back("plan regeneration failed at turn " + std::to_string(t) +
                         "; keeping previous suffix");
    GlobalPlan kept = prev;
    kept.version = t;
    return std::make_pair(std::move(kept), std::vector<Decision>{});
  }
  size_t chosen = select_plan(task, ctx, candidates, selector);
  std::vector<Decision> decisions;
  if (fresh_index[chosen] >= 0) decisions = std::move(fresh.decisions[fresh_index[chosen]]);
  return std::make_pair(std::move(candidates[chosen]), std::move(decisions));
}

// The plan-then-execute loop: initial plan, then per turn an executor
// response, an environment step, and a plan adaptation.
inline EpisodeResult run_episode(const envsim::TaskSpec& task, PolicyHandle& planner,
                                 PolicyHandle& executor, PlanSelector& selector,
                                 const EpisodeConfig& cfg, Rng& rng) {
  task.validate();
  EpisodeResult result;
  Trajectory& traj = result.traj;
  traj.goal = task.goal_text;

  auto env = envsim::make_environment(task);
  envsim::Observation obs0 = env->reset();
  traj.initial_obs = obs0.text;

  if (cfg.planning) {
    int horizon = plan_horizon(task, traj, 0);
    CandidateSet initial = generate_plan_candidates(task, traj, nullptr, 0, planner,
                                                    cfg.candidate_count, cfg.retry_budget,
                                                    std::max(horizon, 1), rng);
    if (initial.plans.empty()) {
      traj.aborted = true;
      traj.events.push_back("initial plan generation failed");
      return result;
    }
    size_t chosen = select_plan(task, traj, initial.plans, selector);
    traj.plans.push_back(std::move(initial.plans[chosen]));
    traj.plan_sources.push_back(cfg.plan_source);
    if (cfg.plan_source == PlanSource::Policy)
      result.plan_traces.push_back({0, std::move(initial.decisions[chosen])});
  }

  int t = 1;
  while (!env->terminal() && t <= task.max_turns) {
    const GlobalPlan* plan = traj.latest_plan();
    ExecutorOutput out = executor.act(task, traj, cfg.planning ? plan : nullptr, t, rng);
    ParseResult parsed = parse_response(out.raw);

    Turn turn;
    turn.raw = out.raw;
    std::string action_for_env;
    if (parsed.ok()) {
      turn.thought = parsed.response->thought;
      turn.action = parsed.response->action;
      action_for_env = parsed.response->action;
    } else {
      turn.violation = parsed.violation;
      action_for_env = out.raw;
    }
    envsim::Observation obs = env->step(action_for_env);
    turn.obs_text = obs.text;
    turn.obs_terminal = obs.terminal;
    turn.obs_success = obs.success;
    traj.turns.push_back(std::move(turn));
    result.turn_decisions.push_back(std::move(out.decision));

    if (env->terminal()) break;
    bool adapt_now = cfg.planning && (t % cfg.adapt_every == 0) && t < task.max_turns;
    if (adapt_now) {
      int horizon = plan_horizon(task, traj, t);
      if (horizon > 0) {
        const GlobalPlan& prev = *traj.latest_plan();
        auto adapted = adapt_plan(task, traj, prev, t, planner, selector, cfg, horizon, rng);
        if (adapted) {
          traj.plans.push_back(std::move(adapted->first));
          traj.plan_sources.push_back(cfg.plan_source);
          if (cfg.plan_source == PlanSource::Policy && !adapted->second.empty())
            result.plan_traces.push_back({traj.plans.size() - 1, std::move(adapted->second)});
        }
      }
    }
    ++t;
  }

  traj.terminal = env->terminal() || static_cast<int>(traj.turns.size()) >= task.max_turns;
  traj.success = env->success();
  traj.check_invariants(task.max_turns);
  return result;
}

}  // namespace planrl::agentloop
