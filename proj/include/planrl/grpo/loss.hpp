#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "planrl/core/error.hpp"
#include "planrl/envsim/task.hpp"
#include "planrl/grpo/advantage.hpp"
#include "planrl/grpo/policy.hpp"
#include "planrl/grpo/tokens.hpp"
#include "planrl/reward/breakdown.hpp"

namespace planrl::grpo {

struct GrpoConfig {
  int group_size = 16;        // G
  double clip_eps = 0.2;      // ratio clip
  double kl_beta = 0.01;      // KL penalty coefficient
  double learning_rate = 0.05;  // plain gradient descent step for the toy policy
  double std_epsilon = 1e-8;  // advantage denominator guard
  double temperature = 1.0;   // sampling/policy temperature
  // optional per-stage annealing; index stage-1, empty = constant temperature
  std::vector<double> stage_temperatures;
  int groups_per_step = 4;    // tasks per optimizer step
  int updates_per_step = 1;   // gradient steps per collected batch
  bool reset_ref_per_stage = true;

  void validate() const {
    if (group_size < 2) raise(ErrorKind::Validation, "grpo: group_size must be >= 2");
    if (!(clip_eps > 0.0 && clip_eps < 1.0))
      raise(ErrorKind::Validation, "grpo: clip_eps must lie in (0, 1)");
    if (kl_beta < 0.0) raise(ErrorKind::Validation, "grpo: kl_beta must be >= 0");
    if (!(learning_rate > 0.0)) raise(ErrorKind::Validation, "grpo: learning_rate must be > 0");
    if (!(std_epsilon > 0.0)) raise(ErrorKind::Validation, "grpo: std_epsilon must be > 0");
    if (!(temperature > 0.0)) raise(ErrorKind::Validation, "grpo: temperature must be > 0");
    for (double t : stage_temperatures)
      if (!(t > 0.0)) raise(ErrorKind::Validation, "grpo: stage temperatures must be > 0");
    if (groups_per_step < 1) raise(ErrorKind::Validation, "grpo: groups_per_step must be >= 1");
    if (updates_per_step < 1) raise(ErrorKind::Validation, "grpo: updates_per_step must be >= 1");
  }
};

// One sampled completion of a task under the behavior policy.
struct Rollout {
  agentloop::EpisodeResult episode;
  TokenSeq tokens;
  std::vector<double> logprobs_old;  // aligned with tokens; masked slots hold 0
  std::vector<bool> mask;            // true = token participates in the loss
  double reward = 0.0;
  reward::RewardBreakdown breakdown;
};

// G sibling rollouts of one task under a frozen snapshot.
struct RolloutGroup {
  envsim::TaskSpec task;
  std::vector<Rollout> rollouts;

  void check_invariants() const {
    if (rollouts.size() < 2) raise(ErrorKind::Contract, "rollout group needs G >= 2 entries");
    for (const auto& r : rollouts) {
      if (r.logprobs_old.size() != r.tokens.tokens.size() ||
          r.mask.size() != r.tokens.tokens.size())
        raise(ErrorKind::Contract, "rollout: logprob/mask sequences must match token count");
      for (size_t i = 0; i < r.mask.size(); ++i)
        if (r.mask[i] && r.tokens.tokens[i].decision < 0)
          raise(ErrorKind::Contract, "rollout: unmasked token without a decision record");
    }
  }
};

inline double stage_temperature(const GrpoConfig& cfg, int stage) {
  if (stage >= 1 && static_cast<size_t>(stage) <= cfg.stage_temperatures.size())
    return cfg.stage_temperatures[static_cast<size_t>(stage - 1)];
  return cfg.temperature;
}

struct GrpoLossStats {
  double clip_fraction = 0.0;   // unmasked tokens with the ratio outside the clip range
  double kl_estimate = 0.0;     // mean per-token KL estimator value
  double mean_abs_advantage = 0.0;
  size_t token_count = 0;       // unmasked tokens
};

// Clipped-surrogate objective with a KL penalty to the reference policy,
// averaged per rollout over unmasked tokens and then over the group;
// returned negated as a minimization loss together with its exact gradient.
// KL uses the low-variance per-token estimator exp(d) - d - 1 with
// d = logp_ref - logp_new.
inline double grpo_loss(const RolloutGroup& group, const PolicyParams& params_new,
                        const PolicyParams& params_ref, const GrpoConfig& cfg,
                        std::vector<double>* grad_out, GrpoLossStats* stats_out = nullptr) {
  cfg.validate();
  group.check_invariants();
  size_t G = group.rollouts.size();

  std::vector<double> rewards;
  rewards.reserve(G);
  for (const auto& r : group.rollouts) rewards.push_back(r.reward);
  std::vector<double> advantages = group_advantages(rewards, cfg.std_epsilon);

  if (grad_out) grad_out->assign(params_new.w.size(), 0.0);
  GrpoLossStats stats;
  double objective = 0.0;
  double clipped = 0.0;

  for (size_t i = 0; i < G; ++i) {
    const Rollout& rollout = group.rollouts[i];
    double advantage = advantages[i];
    stats.mean_abs_advantage += std::abs(advantage);

    std::vector<size_t> active;
    for (size_t tok = 0; tok < rollout.mask.size(); ++tok)
      if (rollout.mask[tok]) active.push_back(tok);
    if (active.empty()) continue;  // empty surrogate contributes nothing

    double inv_tokens = 1.0 / static_cast<double>(active.size());
    double rollout_obj = 0.0;
    for (size_t tok : active) {
      const Token& token = rollout.tokens.tokens[tok];
      const agentloop::Decision& d =
          rollout.tokens.decisions[static_cast<size_t>(token.decision)];
      double logp_old = rollout.logprobs_old[tok];
      double logp_new = decision_logprob(params_new, d, cfg.temperature);
      double logp_ref = decision_logprob(params_ref, d, cfg.temperature);
      double ratio = std::exp(logp_new - logp_old);
      if (!std::isfinite(ratio))
        raise(ErrorKind::Numeric, "grpo_loss: non-finite ratio at token " + std::to_string(tok));

      bool outside = ratio < 1.0 - cfg.clip_eps || ratio > 1.0 + cfg.clip_eps;
      if (outside) clipped += 1.0;
      double clipped_ratio = std::min(std::max(ratio, 1.0 - cfg.clip_eps), 1.0 + cfg.clip_eps);
      double surrogate = std::min(ratio * advantage, clipped_ratio * advantage);

      double delta = logp_ref - logp_new;
      double kl = std::exp(delta) - delta - 1.0;
      if (!std::isfinite(kl))
        raise(ErrorKind::Numeric, "grpo_loss: non-finite KL term at token " + std::to_string(tok));
      stats.kl_estimate += kl;
      ++stats.token_count;

      rollout_obj += surrogate - cfg.kl_beta * kl;

      if (grad_out) {
        // the min picks the unclipped branch unless the ratio moved past the
        // active clip edge; only the unclipped branch carries gradient
        bool unclipped_active =
            advantage >= 0.0 ? ratio <= 1.0 + cfg.clip_eps : ratio >= 1.0 - cfg.clip_eps;
        double coeff = 0.0;
        if (unclipped_active) coeff += advantage * ratio;
        coeff += cfg.kl_beta * (std::exp(delta) - 1.0);
        // d objective/dw accumulates with the per-rollout token mean and the
        // group mean; negate once for the loss
        double scale = -coeff * inv_tokens / static_cast<double>(G);
        if (scale != 0.0) accumulate_logprob_grad(params_new, d, cfg.temperature, scale, *grad_out);
      }
    }
    objective += rollout_obj * inv_tokens;
  }
  objective /= static_cast<double>(G);

  if (stats_out) {
    stats.clip_fraction = stats.token_count ? clipped / static_cast<double>(stats.token_count) : 0.0;
    stats.kl_estimate = stats.token_count ? stats.kl_estimate / static_cast<double>(stats.token_count) : 0.0;
    stats.mean_abs_advantage /= static_cast<double>(G);
    *stats_out = stats;
  }
  return -objective;
}

}  // namespace planrl::grpo
