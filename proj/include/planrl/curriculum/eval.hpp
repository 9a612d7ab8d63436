#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "planrl/agentloop/oracle_handles.hpp"
#include "planrl/agentloop/selector.hpp"
#include "planrl/core/text.hpp"
#include "planrl/grpo/policy.hpp"
#include "planrl/reward/engine.hpp"

namespace planrl::curriculum {

enum class EvalMode { AdaptivePlan, React };

inline EvalMode eval_mode_from(const std::string& s) {
  if (s == "adaplan") return EvalMode::AdaptivePlan;
  if (s == "react") return EvalMode::React;
  raise(ErrorKind::Usage, "eval mode must be \"adaplan\" or \"react\": " + s);
}

struct EvalTaskRow {
  std::string task_id;
  bool success = false;
  int e2e = 0;
  int turns = 0;
  int oracle_turns = 0;
};

struct EvalReport {
  std::string mode;
  std::string config_hash;  // from the evaluated checkpoint
  uint64_t seed = 0;
  double mean_e2e = 0.0;        // on the judge's 0-2 scale
  double mean_e2e_0_100 = 0.0;  // rescaled for reporting
  double success_rate = 0.0;
  double mean_turns = 0.0;
  double mean_oracle_turns = 0.0;
  std::vector<EvalTaskRow> rows;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["mode"] = mode;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["mean_e2e"] = mean_e2e;
    j["mean_e2e_0_100"] = mean_e2e_0_100;
    j["success_rate"] = success_rate;
    j["mean_turns"] = mean_turns;
    j["mean_oracle_turns"] = mean_oracle_turns;
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows)
      rows_json.push_back({{"task", r.task_id},
                           {"success", r.success},
                           {"e2e", r.e2e},
                           {"turns", r.turns},
                           {"oracle_turns", r.oracle_turns}});
    j["tasks"] = rows_json;
    return j;
  }
};

struct EvalOptions {
  EvalMode mode = EvalMode::AdaptivePlan;
  agentloop::EpisodeConfig agent;  // candidate count etc. for the planning loop
  uint64_t seed = 7;
};

// Runs episodes without learning: the executor moves greedily; plan
// candidates keep sampled diversity under the fixed eval seed. React mode
// disables global planning entirely, conditioning the executor on context
// only.
inline EvalReport evaluate_checkpoint(const grpo::Checkpoint& ckpt,
                                      const std::vector<envsim::TaskSpec>& tasks,
                                      const EvalOptions& opt) {
  if (tasks.empty()) raise(ErrorKind::Usage, "evaluate_checkpoint: task set must be non-empty");
  grpo::FeatureSpace space = grpo::FeatureSpace::build(ckpt.vocab);
  grpo::Featurizer featurizer(ckpt.vocab, space);
  grpo::GreedyPolicy policy(featurizer, ckpt.params);
  agentloop::RuleSelector selector;
  reward::RewardEngine engine;

  EvalReport report;
  report.mode = opt.mode == EvalMode::AdaptivePlan ? "adaplan" : "react";
  report.config_hash = ckpt.config_hash;
  report.seed = opt.seed;
  for (size_t i = 0; i < tasks.size(); ++i) {
    const envsim::TaskSpec& task = tasks[i];
    agentloop::EpisodeConfig cfg = opt.agent;
    cfg.planning = opt.mode == EvalMode::AdaptivePlan;
    cfg.plan_source = agentloop::PlanSource::Policy;
    Rng rng(Rng::derive(opt.seed, {0xE7A1ull, static_cast<uint64_t>(i)}));
    agentloop::EpisodeResult res = agentloop::run_episode(task, policy, policy, selector, cfg, rng);
    reward::RewardBreakdown b = engine.score(task, res.traj, 3);

    EvalTaskRow row;
    row.task_id = task.id.empty() ? "task_" + std::to_string(i) : task.id;
    row.success = res.traj.success;
    row.e2e = b.e2e;
    row.turns = static_cast<int>(res.traj.turns.size());
    int oracle = engine.oracle_len(task);
    row.oracle_turns = oracle < 0 ? 0 : oracle;
    report.rows.push_back(row);

    report.mean_e2e += row.e2e;
    report.success_rate += row.success ? 1.0 : 0.0;
    report.mean_turns += row.turns;
    report.mean_oracle_turns += row.oracle_turns;
  }
  double n = static_cast<double>(tasks.size());
  report.mean_e2e /= n;
  report.mean_e2e_0_100 = report.mean_e2e * 50.0;
  report.success_rate /= n;
  report.mean_turns /= n;
  report.mean_oracle_turns /= n;
  return report;
}

}  // namespace planrl::curriculum
