#pragma once

#include <memory>
#include <string>
#include <vector>

#include "planrl/agentloop/actions.hpp"
#include "planrl/agentloop/handles.hpp"
#include "planrl/envsim/environment.hpp"

namespace planrl::agentloop {

// Re-derives the live environment state by replaying the recorded actions;
// environments are pure state machines so this is exact.
inline std::unique_ptr<envsim::Environment> replay_environment(const envsim::TaskSpec& task,
                                                               const Trajectory& ctx) {
  auto env = envsim::make_environment(task);
  env->reset();
  for (const auto& turn : ctx.turns) {
    if (env->terminal()) break;
    env->step(turn.violation ? turn.raw : turn.action);
  }
  return env;
}

struct PlanSimOutcome {
  bool solved = false;
  int solve_step = 0;        // 1-based plan step index where simulation succeeded
  double final_distance = 0; // environment progress measure after simulation
  int steps_simulated = 0;
};

// Runs plan clauses from_step..N against a clone of the current state.
inline PlanSimOutcome simulate_plan(const envsim::TaskSpec& task, const Trajectory& ctx,
                                    const GlobalPlan& plan, size_t from_step, int budget) {
  auto env = replay_environment(task, ctx);
  PlanSimOutcome out;
  if (env->terminal()) {
    out.solved = env->success();
    out.final_distance = env->distance_to_goal();
    return out;
  }
  for (size_t i = from_step; i <= plan.steps.size(); ++i) {
    if (out.steps_simulated >= budget || env->terminal()) break;
    envsim::Observation obs = env->step(executable_clause(plan.clause(i)));
    ++out.steps_simulated;
    if (obs.terminal) {
      if (obs.success) {
        out.solved = true;
        out.solve_step = static_cast<int>(i);
      }
      break;
    }
  }
  out.final_distance = env->distance_to_goal();
  return out;
}

// Deterministic judge stand-in: plans whose simulated execution reaches the
// goal outrank the rest; earlier success beats later; then closer final
// state; remaining ties break on the lowest candidate index.
class RuleSelector final : public PlanSelector {
public:
  size_t select(const envsim::TaskSpec& task, const Trajectory& ctx,
                const std::vector<GlobalPlan>& candidates) override {
    if (candidates.empty()) raise(ErrorKind::Usage, "select_plan: candidates must be non-empty");
    size_t best = 0;
    PlanSimOutcome best_out;
    bool first = true;
    int turns_done = static_cast<int>(ctx.turns.size());
    int budget = task.max_turns - turns_done;
    for (size_t i = 0; i < candidates.size(); ++i) {
      PlanSimOutcome out =
          simulate_plan(task, ctx, candidates[i], static_cast<size_t>(turns_done) + 1, budget);
      if (first || better(out, best_out)) {
        best = i;
        best_out = out;
        first = false;
      }
    }
    return best;
  }

private:
  static bool better(const PlanSimOutcome& a, const PlanSimOutcome& b) {
    if (a.solved != b.solved) return a.solved;
    if (a.solved) return a.solve_step < b.solve_step;
    return a.final_distance < b.final_distance;
  }
};

// Always picks the first candidate; keeps ablations and degenerate tests cheap.
class FirstCandidateSelector final : public PlanSelector {
public:
  size_t select(const envsim::TaskSpec&, const Trajectory&,
                const std::vector<GlobalPlan>& candidates) override {
    if (candidates.empty()) raise(ErrorKind::Usage, "select_plan: candidates must be non-empty");
    return 0;
  }
};

}  // namespace planrl::agentloop
