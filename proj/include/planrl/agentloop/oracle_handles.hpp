#pragma once

#include <string>
#include <vector>

#include "planrl/agentloop/handles.hpp"
#include "planrl/agentloop/observe.hpp"
#include "planrl/agentloop/selector.hpp"
#include "planrl/envsim/oracle.hpp"

namespace planrl::agentloop {

// Deterministic scripted planner: BFS routes for mazes, the entropy strategy
// for wordle, the exhaustive crafting search for textcraft. Plays the role
// the frontier model plays in stage 1; emits no trainable decisions.
class OraclePlanner final : public PolicyHandle {
public:
  PlanProposal propose_suffix(const envsim::TaskSpec& task, const Trajectory& ctx,
                              const GlobalPlan*, int, int horizon, Rng&) override {
    PlanProposal out;
    switch (task.env_kind) {
      case envsim::EnvKind::Maze: {
        auto env = replay_environment(task, ctx);
        auto* maze = static_cast<envsim::MazeEnv*>(env.get());
        envsim::Cell pos = maze->position();
        auto path = envsim::maze_bfs_path(task.maze, pos);
        if (!path) return out;
        envsim::Cell cur = pos;
        for (const auto& action : *path) {
          envsim::Cell next = cur;
          if (action == "move up") --next.x;
          if (action == "move down") ++next.x;
          if (action == "move left") --next.y;
          if (action == "move right") ++next.y;
          out.clauses.push_back(action + " (from " + std::to_string(cur.x) + ", " +
                                std::to_string(cur.y) + " to " + std::to_string(next.x) + ", " +
                                std::to_string(next.y) + ")");
          cur = next;
          if (static_cast<int>(out.clauses.size()) >= horizon) break;
        }
        return out;
      }
      case envsim::EnvKind::Wordle: {
        envsim::WordleStrategy strat(task.wordle.words);
        for (const auto& [g, fb] : wordle_history(ctx)) strat.record(g, fb);
        out.clauses.push_back("guess " + envsim::spaced(strat.next_guess()));
        for (int i = 1; i < horizon; ++i)
          out.clauses.push_back("guess a word consistent with all feedback so far");
        return out;
      }
      case envsim::EnvKind::TextCraft: {
        auto env = replay_environment(task, ctx);
        auto* craft = static_cast<envsim::TextCraftEnv*>(env.get());
        auto actions = envsim::textcraft_optimal_actions(task.craft, craft->inventory());
        if (!actions) return out;
        for (const auto& a : *actions) {
          out.clauses.push_back(a);
          if (static_cast<int>(out.clauses.size()) >= horizon) break;
        }
        return out;
      }
    }
    return out;
  }

  ExecutorOutput act(const envsim::TaskSpec&, const Trajectory&, const GlobalPlan*, int,
                     Rng&) override {
    raise(ErrorKind::Usage, "OraclePlanner does not implement the executor role");
  }
};

// Follows the current plan step when it is directly executable, otherwise
// falls back to the per-environment reference strategy (which also makes it
// a react-mode reference executor when no plan is given).
class OracleExecutor final : public PolicyHandle {
public:
  ExecutorOutput act(const envsim::TaskSpec& task, const Trajectory& ctx, const GlobalPlan* plan,
                     int turn_index, Rng&) override {
    if (plan && static_cast<size_t>(turn_index) <= plan->steps.size()) {
      std::string clause = executable_clause(plan->clause(static_cast<size_t>(turn_index)));
      if (directly_executable(task, clause)) return {"Action: " + clause, std::nullopt};
    }
    return {"Action: " + strategy_action(task, ctx), std::nullopt};
  }

  PlanProposal propose_suffix(const envsim::TaskSpec&, const Trajectory&, const GlobalPlan*, int,
                              int, Rng&) override {
    raise(ErrorKind::Usage, "OracleExecutor does not implement the planner role");
  }

private:
  static bool directly_executable(const envsim::TaskSpec& task, const std::string& clause) {
    switch (task.env_kind) {
      case envsim::EnvKind::Maze:
        return clause == "move up" || clause == "move down" || clause == "move left" ||
               clause == "move right";
      case envsim::EnvKind::Wordle:
        return !envsim::normalize_guess(clause).empty();
      case envsim::EnvKind::TextCraft:
        return clause.rfind("get ", 0) == 0 || clause.rfind("fetch ", 0) == 0 ||
               clause.rfind("craft ", 0) == 0 || clause == "inventory";
    }
    return false;
  }

  static std::string strategy_action(const envsim::TaskSpec& task, const Trajectory& ctx) {
    switch (task.env_kind) {
      case envsim::EnvKind::Maze: {
        auto env = replay_environment(task, ctx);
        auto* maze = static_cast<envsim::MazeEnv*>(env.get());
        auto path = envsim::maze_bfs_path(task.maze, maze->position());
        if (path && !path->empty()) return path->front();
        return "move up";
      }
      case envsim::EnvKind::Wordle: {
        envsim::WordleStrategy strat(task.wordle.words);
        for (const auto& [g, fb] : wordle_history(ctx)) strat.record(g, fb);
        return envsim::spaced(strat.next_guess());
      }
      case envsim::EnvKind::TextCraft: {
        auto env = replay_environment(task, ctx);
        auto* craft = static_cast<envsim::TextCraftEnv*>(env.get());
        auto actions = envsim::textcraft_optimal_actions(task.craft, craft->inventory());
        if (actions && !actions->empty()) return actions->front();
        return "inventory";
      }
    }
    return "inventory";
  }
};

}  // namespace planrl::agentloop
