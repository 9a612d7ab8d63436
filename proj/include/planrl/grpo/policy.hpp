#pragma once

#include <cmath>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "planrl/agentloop/handles.hpp"
#include "planrl/core/rng.hpp"
#include "planrl/grpo/features.hpp"

namespace planrl::grpo {

// Weight matrix of a softmax-linear policy over featurized states; logits
// are column sums over the active feature rows.
struct PolicyParams {
  uint32_t feature_dim = 0;
  uint32_t action_dim = 0;
  int64_t version = 0;
  std::vector<double> w;  // row-major [feature][action]

  double at(uint32_t f, uint32_t a) const { return w[static_cast<size_t>(f) * action_dim + a]; }
  double& at(uint32_t f, uint32_t a) { return w[static_cast<size_t>(f) * action_dim + a]; }

  void check_finite() const {
    for (double x : w)
      if (!std::isfinite(x)) raise(ErrorKind::Numeric, "policy weights must stay finite");
  }
};

inline PolicyParams zero_params(uint32_t feature_dim, uint32_t action_dim) {
  PolicyParams p;
  p.feature_dim = feature_dim;
  p.action_dim = action_dim;
  p.w.assign(static_cast<size_t>(feature_dim) * action_dim, 0.0);
  return p;
}

// logits restricted to the legal set, divided by temperature
inline std::vector<double> masked_logits(const PolicyParams& params,
                                         const std::vector<uint32_t>& features,
                                         const std::vector<int32_t>& legal, double temperature) {
  std::vector<double> z(legal.size(), 0.0);
  for (uint32_t f : features)
    for (size_t j = 0; j < legal.size(); ++j)
      z[j] += params.at(f, static_cast<uint32_t>(legal[j]));
  double inv_t = 1.0 / temperature;
  for (double& v : z) v *= inv_t;
  return z;
}

inline std::vector<double> softmax_from_logits(std::vector<double> z) {
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return z;
}

// log pi(action | state) for a recorded decision under arbitrary params
inline double decision_logprob(const PolicyParams& params, const agentloop::Decision& d,
                               double temperature) {
  std::vector<double> z = masked_logits(params, d.features, d.legal, temperature);
  double mx = z[0];
  for (double v : z) mx = std::max(mx, v);
  double lse = 0.0;
  size_t chosen = d.legal.size();
  for (size_t j = 0; j < z.size(); ++j) {
    lse += std::exp(z[j] - mx);
    if (d.legal[j] == d.action) chosen = j;
  }
  if (chosen == d.legal.size())
    raise(ErrorKind::Contract, "decision action not in its legal set");
  return z[chosen] - (mx + std::log(lse));
}

// grad_w log pi(a|s) accumulated into `grad` with coefficient `coeff`:
// d logp / d w[f, legal_j] = phi_f * (1[j == chosen] - pi_j) / temperature
inline void accumulate_logprob_grad(const PolicyParams& params, const agentloop::Decision& d,
                                    double temperature, double coeff, std::vector<double>& grad) {
  std::vector<double> pi = softmax_from_logits(masked_logits(params, d.features, d.legal, temperature));
  double inv_t = coeff / temperature;
  for (uint32_t f : d.features) {
    size_t row = static_cast<size_t>(f) * params.action_dim;
    for (size_t j = 0; j < d.legal.size(); ++j) {
      double indicator = d.legal[j] == d.action ? 1.0 : 0.0;
      grad[row + static_cast<uint32_t>(d.legal[j])] += inv_t * (indicator - pi[j]);
    }
  }
}

inline size_t sample_index(const std::vector<double>& probs, Rng& rng) {
  return rng.categorical(probs);
}

// Follow-the-plan prior per environment, standing in for the instruction
// prior of a pretrained model: new checkpoints already lean toward executing
// the planned action, weakly for mazes, strongly for literal wordle copies.
struct InitPriors {
  double maze_follow = 0.4;
  double wordle_follow = 6.0;
  double craft_follow = 2.5;
  double prev_plan = 0.2;
  double noise = 0.01;
};

inline envsim::EnvKind env_of_action(const std::string& action) {
  if (action.rfind("move ", 0) == 0) return envsim::EnvKind::Maze;
  if (action.size() == 9 && action[1] == ' ') return envsim::EnvKind::Wordle;
  return envsim::EnvKind::TextCraft;
}

inline PolicyParams init_params(const Featurizer& feat, uint64_t seed, const InitPriors& priors = {}) {
  const ActionVocab& vocab = feat.vocab();
  const FeatureSpace& space = feat.space();
  PolicyParams p = zero_params(static_cast<uint32_t>(space.size()), static_cast<uint32_t>(vocab.size()));
  Rng rng(Rng::derive(seed, {0x9047ull}));
  for (double& w : p.w) w = priors.noise * rng.normal();
  for (size_t a = 0; a < vocab.size(); ++a) {
    const std::string& action = vocab.action(static_cast<int32_t>(a));
    double follow = priors.maze_follow;
    switch (env_of_action(action)) {
      case envsim::EnvKind::Maze: follow = priors.maze_follow; break;
      case envsim::EnvKind::Wordle: follow = priors.wordle_follow; break;
      case envsim::EnvKind::TextCraft: follow = priors.craft_follow; break;
    }
    p.at(space.id("plan_says:" + action), static_cast<uint32_t>(a)) += follow;
    p.at(space.id("prev_plan:" + action), static_cast<uint32_t>(a)) += priors.prev_plan;
  }
  return p;
}

// --- checkpoint io ------------------------------------------------------

inline nlohmann::json params_to_json(const PolicyParams& params, const ActionVocab& vocab,
                                     const FeatureSpace& space, double temperature,
                                     const std::string& config_hash, uint64_t seed) {
  nlohmann::json j;
  j["feature_dim"] = params.feature_dim;
  j["action_dim"] = params.action_dim;
  j["version"] = params.version;
  j["temperature"] = temperature;
  j["actions"] = vocab.actions();
  j["feature_layout"] = hex64(space.layout_hash());
  j["weights"] = params.w;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  return j;
}

struct Checkpoint {
  PolicyParams params;
  ActionVocab vocab;
  double temperature = 1.0;
  std::string config_hash;
  uint64_t seed = 0;
};

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  Checkpoint c;
  c.params.feature_dim = j.at("feature_dim").get<uint32_t>();
  c.params.action_dim = j.at("action_dim").get<uint32_t>();
  c.params.version = j.at("version").get<int64_t>();
  c.params.w = j.at("weights").get<std::vector<double>>();
  if (c.params.w.size() != static_cast<size_t>(c.params.feature_dim) * c.params.action_dim)
    raise(ErrorKind::Validation, "checkpoint: weight count does not match dimensions");
  c.vocab = ActionVocab::from_actions(j.at("actions").get<std::vector<std::string>>());
  if (c.vocab.size() != c.params.action_dim)
    raise(ErrorKind::Validation, "checkpoint: action vocabulary does not match action_dim");
  c.temperature = j.value("temperature", 1.0);
  c.config_hash = j.value("config_hash", std::string{});
  c.seed = j.value("seed", static_cast<uint64_t>(0));
  FeatureSpace space = FeatureSpace::build(c.vocab);
  if (j.contains("feature_layout") && j.at("feature_layout").get<std::string>() != hex64(space.layout_hash()))
    raise(ErrorKind::Validation, "checkpoint: feature layout does not match this build");
  if (space.size() != c.params.feature_dim)
    raise(ErrorKind::Validation, "checkpoint: feature space size does not match feature_dim");
  c.params.check_finite();
  return c;
}

inline void save_checkpoint(const std::string& path, const PolicyParams& params,
                            const ActionVocab& vocab, const FeatureSpace& space, double temperature,
                            const std::string& config_hash, uint64_t seed) {
  std::ofstream out(path);
  if (!out) raise(ErrorKind::Io, "cannot write checkpoint " + path);
  out << params_to_json(params, vocab, space, temperature, config_hash, seed).dump() << "\n";
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open checkpoint " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(ErrorKind::Validation, std::string("checkpoint parse: ") + e.what());
  }
  return checkpoint_from_json(j);
}

// --- the learned policy as planner + executor ----------------------------

// One parameter snapshot serving both prompt roles. Samples are recorded as
// decisions so the trainer can recompute logprobs and exact gradients.
class LearnedPolicy final : public agentloop::PolicyHandle {
public:
  LearnedPolicy(const Featurizer& feat, const PolicyParams& params, double temperature)
      : feat_(&feat), params_(&params), temperature_(temperature) {}

  agentloop::ExecutorOutput act(const envsim::TaskSpec& task, const agentloop::Trajectory& ctx,
                                const agentloop::GlobalPlan* plan, int turn_index,
                                Rng& rng) override {
    agentloop::Decision d;
    d.features = feat_->executor_features(task, ctx, plan, turn_index);
    d.legal = feat_->legal_actions(task, ctx, true);
    sample_into(d, rng);
    return {"Action: " + feat_->vocab().action(d.action), std::move(d)};
  }

  agentloop::PlanProposal propose_suffix(const envsim::TaskSpec& task,
                                         const agentloop::Trajectory& ctx,
                                         const agentloop::GlobalPlan* prev, int t, int horizon,
                                         Rng& rng) override {
    agentloop::PlanProposal out;
    std::vector<int32_t> legal = feat_->legal_actions(task, ctx);
    for (int i = t + 1; i <= t + horizon; ++i) {
      agentloop::Decision d;
      d.features = feat_->planner_features(task, ctx, prev, t, i);
      d.legal = legal;
      sample_into(d, rng);
      const std::string& action = feat_->vocab().action(d.action);
      out.clauses.push_back(task.env_kind == envsim::EnvKind::Wordle ? "guess " + action : action);
      out.decisions.push_back(std::move(d));
    }
    return out;
  }

private:
  void sample_into(agentloop::Decision& d, Rng& rng) const {
    std::vector<double> z = masked_logits(*params_, d.features, d.legal, temperature_);
    std::vector<double> pi = softmax_from_logits(z);
    size_t j = rng.categorical(pi);
    d.action = d.legal[j];
    d.logprob = decision_logprob(*params_, d, temperature_);
  }

  const Featurizer* feat_;
  const PolicyParams* params_;
  double temperature_;
};

// Greedy variant for evaluation: argmax action, ties to the lowest id.
class GreedyPolicy final : public agentloop::PolicyHandle {
public:
  GreedyPolicy(const Featurizer& feat, const PolicyParams& params) : feat_(&feat), params_(&params) {}

  agentloop::ExecutorOutput act(const envsim::TaskSpec& task, const agentloop::Trajectory& ctx,
                                const agentloop::GlobalPlan* plan, int turn_index, Rng&) override {
    std::vector<uint32_t> features = feat_->executor_features(task, ctx, plan, turn_index);
    std::vector<int32_t> legal = feat_->legal_actions(task, ctx, true);
    std::vector<double> z = masked_logits(*params_, features, legal, 1.0);
    size_t best = 0;
    for (size_t j = 1; j < z.size(); ++j)
      if (z[j] > z[best]) best = j;
    return {"Action: " + feat_->vocab().action(legal[best]), std::nullopt};
  }

  agentloop::PlanProposal propose_suffix(const envsim::TaskSpec& task,
                                         const agentloop::Trajectory& ctx,
                                         const agentloop::GlobalPlan* prev, int t, int horizon,
                                         Rng& rng) override {
    // planning keeps sampling: candidate diversity is what selection feeds on
    LearnedPolicy sampler(*feat_, *params_, 1.0);
    return sampler.propose_suffix(task, ctx, prev, t, horizon, rng);
  }

private:
  const Featurizer* feat_;
  const PolicyParams* params_;
};

}  // namespace planrl::grpo
