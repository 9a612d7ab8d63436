#pragma once

// Independent reference implementations used only for verification: they
// deliberately avoid the production code paths they are checked against.

#include <string>
#include <vector>

#include "planrl/core/rng.hpp"
#include "planrl/grpo/loss.hpp"

namespace planrl::checks {

// Counting-based wordle scorer: greens by position, then per-letter yellow
// counts from the multiset overlap, assigned left to right. Stands against
// the production two-pass rule.
inline std::string reference_wordle_feedback(const std::string& guess, const std::string& hidden) {
  std::string fb = "bbbbb";
  int guess_spare[26] = {};
  int hidden_spare[26] = {};
  for (int i = 0; i < 5; ++i) {
    if (guess[i] == hidden[i]) {
      fb[i] = 'g';
    } else {
      ++guess_spare[guess[i] - 'a'];
      ++hidden_spare[hidden[i] - 'a'];
    }
  }
  for (int c = 0; c < 26; ++c) {
    int yellows = guess_spare[c] < hidden_spare[c] ? guess_spare[c] : hidden_spare[c];
    for (int i = 0; i < 5 && yellows > 0; ++i) {
      if (fb[i] != 'g' && guess[i] - 'a' == c) {
        fb[i] = 'y';
        --yellows;
      }
    }
  }
  std::string wire;
  for (int i = 0; i < 5; ++i) {
    if (i) wire.push_back(' ');
    wire.push_back(fb[i]);
  }
  return wire;
}

// Central finite differences of grpo_loss over every weight.
inline std::vector<double> finite_difference_grad(const grpo::RolloutGroup& group,
                                                  const grpo::PolicyParams& params_new,
                                                  const grpo::PolicyParams& params_ref,
                                                  const grpo::GrpoConfig& cfg, double step = 1e-6) {
  grpo::PolicyParams probe = params_new;
  std::vector<double> grad(params_new.w.size(), 0.0);
  for (size_t i = 0; i < probe.w.size(); ++i) {
    double saved = probe.w[i];
    probe.w[i] = saved + step;
    double up = grpo::grpo_loss(group, probe, params_ref, cfg, nullptr);
    probe.w[i] = saved - step;
    double down = grpo::grpo_loss(group, probe, params_ref, cfg, nullptr);
    probe.w[i] = saved;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

// Relative error with a scale-aware floor: entries far below the gradient's
// magnitude are dominated by finite-difference roundoff (|up - down| is a
// catastrophic cancellation there), so they are compared against a floor
// tied to the largest reference entry rather than to themselves.
inline double max_relative_error(const std::vector<double>& analytic,
                                 const std::vector<double>& reference, double floor = 1e-7) {
  double scale = 0.0;
  for (double r : reference) scale = std::max(scale, std::abs(r));
  double denom_floor = std::max(floor, 1e-4 * scale);
  double worst = 0.0;
  for (size_t i = 0; i < analytic.size(); ++i) {
    double denom = std::max(std::abs(reference[i]), denom_floor);
    worst = std::max(worst, std::abs(analytic[i] - reference[i]) / denom);
  }
  return worst;
}

// Randomized small GRPO instances with synthetic decisions and token
// streams, independent of any environment.
struct SyntheticInstance {
  grpo::RolloutGroup group;
  grpo::PolicyParams params_new;
  grpo::PolicyParams params_old;
  grpo::PolicyParams params_ref;
  grpo::GrpoConfig cfg;
};

struct SyntheticOptions {
  int group_size = 4;
  int max_tokens = 30;  // decision tokens per rollout, at most
  uint32_t feature_dim = 8;
  uint32_t action_dim = 5;
  double param_scale = 0.5;
  double drift = 0.3;  // old/ref offset from the new params
  double kl_beta = 0.05;
  bool zero_variance_rewards = false;
  bool mask_everything = false;
};

inline SyntheticInstance make_synthetic_instance(uint64_t seed, const SyntheticOptions& opt = {}) {
  using namespace planrl::grpo;

  Rng rng(seed);
  SyntheticInstance inst;
  inst.cfg.group_size = opt.group_size;
  inst.cfg.kl_beta = opt.kl_beta;
  inst.cfg.temperature = rng.uniform(0.6, 1.4);
  inst.cfg.std_epsilon = 1e-8;

  auto random_params = [&](double scale) {
    PolicyParams p = zero_params(opt.feature_dim, opt.action_dim);
    for (double& w : p.w) w = scale * rng.normal();
    return p;
  };
  inst.params_new = random_params(opt.param_scale);
  inst.params_old = inst.params_new;
  inst.params_ref = inst.params_new;
  for (double& w : inst.params_old.w) w += opt.drift * rng.normal();
  for (double& w : inst.params_ref.w) w += opt.drift * rng.normal();

  inst.group.task.env_kind = envsim::EnvKind::Maze;  // unused by the loss

  for (int g = 0; g < opt.group_size; ++g) {
    Rollout r;
    int tokens = static_cast<int>(rng.uniform_int(2, opt.max_tokens));
    r.tokens.tokens.push_back({"<observation>", TokenKind::Tag, -1});
    r.tokens.tokens.push_back({"ctx", TokenKind::Text, -1});
    r.tokens.tokens.push_back({"</observation>", TokenKind::Tag, -1});
    for (int tok = 0; tok < tokens; ++tok) {
      agentloop::Decision d;
      int n_feat = static_cast<int>(rng.uniform_int(1, 4));
      d.features.push_back(0);  // bias row always active
      for (int k = 0; k < n_feat; ++k)
        d.features.push_back(static_cast<uint32_t>(rng.uniform_int(1, opt.feature_dim - 1)));
      std::sort(d.features.begin(), d.features.end());
      d.features.erase(std::unique(d.features.begin(), d.features.end()), d.features.end());
      int legal_count = static_cast<int>(rng.uniform_int(2, opt.action_dim));
      std::vector<int32_t> all;
      for (uint32_t a = 0; a < opt.action_dim; ++a) all.push_back(static_cast<int32_t>(a));
      rng.shuffle(all);
      d.legal.assign(all.begin(), all.begin() + legal_count);
      std::sort(d.legal.begin(), d.legal.end());
      d.action = d.legal[static_cast<size_t>(rng.uniform_int(0, legal_count - 1))];
      d.logprob = decision_logprob(inst.params_old, d, inst.cfg.temperature);

      int32_t idx = static_cast<int32_t>(r.tokens.decisions.size());
      r.tokens.decisions.push_back(d);
      r.tokens.tokens.push_back({"a" + std::to_string(tok), TokenKind::Decision, idx});
      if (rng.next_double() < 0.3) {
        r.tokens.tokens.push_back({"<observation>", TokenKind::Tag, -1});
        int words = static_cast<int>(rng.uniform_int(1, 3));
        for (int w = 0; w < words; ++w) r.tokens.tokens.push_back({"obs", TokenKind::Text, -1});
        r.tokens.tokens.push_back({"</observation>", TokenKind::Tag, -1});
      }
    }
    r.mask = loss_mask(r.tokens);
    if (opt.mask_everything) r.mask.assign(r.mask.size(), false);
    r.logprobs_old = old_logprobs(r.tokens);
    r.reward = opt.zero_variance_rewards ? 1.5 : rng.uniform(0.0, 3.0);
    inst.group.rollouts.push_back(std::move(r));
  }
  return inst;
}

}  // namespace planrl::checks
