#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "planrl/agentloop/episode.hpp"
#include "planrl/envsim/oracle.hpp"
#include "planrl/judge/backend.hpp"
#include "planrl/reward/breakdown.hpp"
#include "planrl/reward/rules.hpp"

namespace planrl::reward {

// Scores trajectories with the deterministic rule scorers, optionally
// cross-checking against an LLM judge. When both paths are configured the
// oracle wins and the disagreement is logged, so tests stay deterministic.
class RewardEngine {
public:
  RewardEngine() = default;

  void set_judge(std::shared_ptr<judge::JudgeClient> client, int max_retries = 2) {
    judge_ = std::move(client);
    judge_retries_ = max_retries;
  }

  int oracle_len(const envsim::TaskSpec& task) {
    std::string key = envsim::task_to_json(task).dump();
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto it = oracle_cache_.find(key);
      if (it != oracle_cache_.end()) return it->second;
    }
    envsim::OracleLength len = envsim::oracle_optimal_length(task);
    int value = len.solvable ? len.length : -1;
    std::lock_guard<std::mutex> lk(mu_);
    oracle_cache_.emplace(std::move(key), value);
    return value;
  }

  // Full breakdown with the scalar composed from an explicit component set
  // (the joint-schedule ablation merges all of them).
  RewardBreakdown score_components(const envsim::TaskSpec& task, const agentloop::Trajectory& traj,
                                   const std::vector<Component>& components) {
    RewardBreakdown b = breakdown(task, traj);
    b.stage_scalar = composed_scalar(components, b);
    return b;
  }

  // Full component breakdown; stage_scalar composed per the given stage.
  RewardBreakdown score(const envsim::TaskSpec& task, const agentloop::Trajectory& traj,
                        int stage) {
    RewardBreakdown b = breakdown(task, traj);
    b.stage_scalar = stage_reward(stage, b);
    return b;
  }

private:
  RewardBreakdown breakdown(const envsim::TaskSpec& task, const agentloop::Trajectory& traj) {
    RewardBreakdown b;
    b.format = format_reward(traj);
    b.mark(Component::Format);

    // per-turn adherence against the plan version in effect at that turn
    for (int t = 1; t <= static_cast<int>(traj.turns.size()); ++t) {
      const agentloop::GlobalPlan* plan = plan_for_turn(traj, t);
      if (!plan || static_cast<size_t>(t) > plan->steps.size()) continue;
      const agentloop::Turn& turn = traj.turns[static_cast<size_t>(t - 1)];
      std::string action = turn.violation ? turn.raw : turn.action;
      int rule = adherence_rule(action, plan->clause(static_cast<size_t>(t)));
      b.adherence_turns.push_back(judged_adherence(task, *plan, t, action, rule));
    }
    if (!b.adherence_turns.empty()) {
      double sum = 0.0;
      for (int a : b.adherence_turns) sum += a;
      b.adherence = sum / static_cast<double>(b.adherence_turns.size());
    }
    b.mark(Component::Adherence);

    int oracle = oracle_len(task);
    b.e2e = judged_e2e(task, traj, e2e_rule(traj, oracle < 0 ? 0 : oracle));
    b.mark(Component::E2E);

    b.plan_quality = judged_plan_quality(task, traj, plan_quality_rule(task, traj, b.adherence_turns));
    b.mark(Component::PlanQuality);
    return b;
  }

public:
  std::vector<std::string> disagreements() const {
    std::lock_guard<std::mutex> lk(mu_);
    return disagreements_;
  }
  std::vector<std::string> judge_errors() const {
    std::lock_guard<std::mutex> lk(mu_);
    return judge_errors_;
  }

private:
  int judged_adherence(const envsim::TaskSpec& task, const agentloop::GlobalPlan& plan, int t,
                       const std::string& action, int rule_score) {
    if (!judge_) return rule_score;
    try {
      judge::JudgeRequest req;
      req.rubric = judge::Rubric::Adherence;
      req.max_retries = judge_retries_;
      req.filled_prompt = judge::render_prompt(
          judge::Rubric::Adherence, {{"task", task.goal_text},
                                     {"global_plan", plan.text()},
                                     {"execution_step_index", std::to_string(t)},
                                     {"agent_action", action}});
      int judged = judge_->query(req).adherence;
      if (judged != rule_score)
        note_disagreement("adherence: oracle " + std::to_string(rule_score) + " vs judge " +
                          std::to_string(judged));
      return rule_score;  // oracle wins
    } catch (const Error& e) {
      note_judge_error(e.what());
      return rule_score;
    }
  }

  int judged_e2e(const envsim::TaskSpec& task, const agentloop::Trajectory& traj, int rule_score) {
    if (!judge_) return rule_score;
    try {
      judge::JudgeRequest req;
      req.rubric = judge::Rubric::E2E;
      req.max_retries = judge_retries_;
      req.filled_prompt = judge::render_prompt(
          judge::Rubric::E2E,
          {{"task", task.goal_text}, {"accumulated_context", serialize_interaction(traj)}});
      int judged = judge_->query(req).e2e;
      if (judged != rule_score)
        note_disagreement("e2e: oracle " + std::to_string(rule_score) + " vs judge " +
                          std::to_string(judged));
      return rule_score;
    } catch (const Error& e) {
      note_judge_error(e.what());
      return rule_score;
    }
  }

  PlanQualityScore judged_plan_quality(const envsim::TaskSpec& task,
                                       const agentloop::Trajectory& traj, PlanQualityScore rule) {
    if (!judge_ || traj.plans.empty()) return rule;
    try {
      judge::JudgeRequest req;
      req.rubric = judge::Rubric::PlanQuality;
      req.max_retries = judge_retries_;
      req.filled_prompt = judge::render_prompt(
          judge::Rubric::PlanQuality,
          {{"task", task.goal_text},
           {"global_plan", traj.plans.back().text()},
           {"execution_step_index", std::to_string(traj.turns.size())},
           {"observation", serialize_interaction(traj)}});
      judge::JudgeVerdict v = judge_->query(req);
      if (v.correct != rule.correct || v.execute != rule.execute || v.standard != rule.standard)
        note_disagreement("plan_quality: oracle (" + std::to_string(rule.correct) + "," +
                          std::to_string(rule.execute) + "," + std::to_string(rule.standard) +
                          ") vs judge (" + std::to_string(v.correct) + "," +
                          std::to_string(v.execute) + "," + std::to_string(v.standard) + ")");
      return rule;
    } catch (const Error& e) {
      note_judge_error(e.what());
      return rule;
    }
  }

  void note_disagreement(std::string msg) {
    std::lock_guard<std::mutex> lk(mu_);
    if (disagreements_.size() < 200) disagreements_.push_back(std::move(msg));
  }
  void note_judge_error(std::string msg) {
    std::lock_guard<std::mutex> lk(mu_);
    if (judge_errors_.size() < 200) judge_errors_.push_back(std::move(msg));
  }

  std::shared_ptr<judge::JudgeClient> judge_;
  int judge_retries_ = 2;
  mutable std::mutex mu_;
  std::map<std::string, int> oracle_cache_;
  std::vector<std::string> disagreements_;
  std::vector<std::string> judge_errors_;
};

}  // namespace planrl::reward
