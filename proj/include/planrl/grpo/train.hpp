#pragma once

#include <memory>
#include <string>
#include <vector>

#include "planrl/agentloop/episode.hpp"
#include "planrl/agentloop/oracle_handles.hpp"
#include "planrl/grpo/loss.hpp"
#include "planrl/grpo/policy.hpp"
#include "planrl/reward/engine.hpp"

namespace planrl::grpo {

struct CollectContext {
  const Featurizer* featurizer = nullptr;
  agentloop::PlanSelector* selector = nullptr;
  reward::RewardEngine* rewards = nullptr;
  agentloop::EpisodeConfig episode_cfg;                  // candidate count, adapt cadence
  agentloop::PolicyHandle* external_planner = nullptr;   // stage-1 plan provider
  bool use_external_plans = false;
  // when set, overrides the plain stage composition (joint-schedule ablation)
  std::vector<reward::Component> reward_components;
};

// G independent episodes under a frozen snapshot; each rollout carries its
// serialized tokens, masks, behavior logprobs and stage reward. Aborted
// episodes stay in the group with their failure reward; groups are never
// ragged.
inline RolloutGroup collect_group(const envsim::TaskSpec& task, const PolicyParams& snapshot,
                                  int stage, const GrpoConfig& cfg, const CollectContext& ctx,
                                  uint64_t seed) {
  cfg.validate();
  if (!ctx.featurizer || !ctx.selector || !ctx.rewards)
    raise(ErrorKind::Usage, "collect_group: featurizer, selector and reward engine are required");

  RolloutGroup group;
  group.task = task;
  group.rollouts.reserve(static_cast<size_t>(cfg.group_size));

  double temperature = stage_temperature(cfg, stage);
  for (int g = 0; g < cfg.group_size; ++g) {
    Rng rng(Rng::derive(seed, {0xC0DEull, static_cast<uint64_t>(g)}));
    LearnedPolicy policy(*ctx.featurizer, snapshot, temperature);

    agentloop::EpisodeConfig episode_cfg = ctx.episode_cfg;
    agentloop::PolicyHandle* planner = &policy;
    bool external = ctx.external_planner && ctx.use_external_plans;
    if (external) {
      planner = ctx.external_planner;
      episode_cfg.plan_source = agentloop::PlanSource::External;
      episode_cfg.candidate_count = 1;  // the external provider is deterministic
    } else {
      episode_cfg.plan_source = agentloop::PlanSource::Policy;
    }

    Rollout rollout;
    rollout.episode = agentloop::run_episode(task, *planner, policy, *ctx.selector, episode_cfg, rng);
    rollout.tokens = serialize_episode(rollout.episode);
    rollout.mask = loss_mask(rollout.tokens);
    rollout.logprobs_old = old_logprobs(rollout.tokens);
    rollout.breakdown = ctx.reward_components.empty()
                            ? ctx.rewards->score(task, rollout.episode.traj, stage)
                            : ctx.rewards->score_components(task, rollout.episode.traj,
                                                            ctx.reward_components);
    rollout.reward = rollout.breakdown.stage_scalar;
    group.rollouts.push_back(std::move(rollout));
  }
  group.check_invariants();
  return group;
}

struct StepMetrics {
  double mean_reward = 0.0;
  double mean_abs_advantage = 0.0;
  double clip_fraction = 0.0;
  double kl = 0.0;
  double loss = 0.0;
  int64_t version = 0;
};

// One plain gradient-descent update on the mean loss over the batch.
// Parameters are committed only after every group evaluated cleanly, so a
// numeric error leaves them unmodified.
inline StepMetrics train_step(const std::vector<RolloutGroup>& batch, PolicyParams& params,
                              const PolicyParams& params_ref, const GrpoConfig& cfg) {
  if (batch.empty()) raise(ErrorKind::Usage, "train_step: batch must be non-empty");
  cfg.validate();

  StepMetrics metrics;
  std::vector<double> grad(params.w.size(), 0.0);
  std::vector<double> group_grad;
  size_t rollouts = 0;
  double token_weight = 0.0;
  for (const auto& group : batch) {
    GrpoLossStats stats;
    metrics.loss += grpo_loss(group, params, params_ref, cfg, &group_grad, &stats);
    for (size_t i = 0; i < grad.size(); ++i) grad[i] += group_grad[i];
    metrics.mean_abs_advantage += stats.mean_abs_advantage;
    metrics.clip_fraction += stats.clip_fraction * static_cast<double>(stats.token_count);
    metrics.kl += stats.kl_estimate * static_cast<double>(stats.token_count);
    token_weight += static_cast<double>(stats.token_count);
    for (const auto& r : group.rollouts) {
      metrics.mean_reward += r.reward;
      ++rollouts;
    }
  }
  double inv_groups = 1.0 / static_cast<double>(batch.size());
  metrics.loss *= inv_groups;
  metrics.mean_abs_advantage *= inv_groups;
  metrics.mean_reward /= static_cast<double>(rollouts);
  if (token_weight > 0.0) {
    metrics.clip_fraction /= token_weight;
    metrics.kl /= token_weight;
  }

  for (size_t i = 0; i < grad.size(); ++i) {
    double next = params.w[i] - cfg.learning_rate * grad[i] * inv_groups;
    if (!std::isfinite(next)) raise(ErrorKind::Numeric, "train_step: non-finite weight update");
    grad[i] = next;  // staged: nothing written to params until all entries pass
  }
  params.w.swap(grad);
  ++params.version;
  metrics.version = params.version;
  return metrics;
}

}  // namespace planrl::grpo
