#pragma once

#include <string>
#include <vector>

#include "planrl/agentloop/episode.hpp"
#include "planrl/core/error.hpp"
#include "planrl/core/text.hpp"

namespace planrl::grpo {

enum class TokenKind {
  Decision,  // sampled by the policy; carries a decision index
  Injected,  // external text (oracle plans, scripted responses)
  Tag,       // <observation> / </observation>
  Text,      // environment feedback words
};

struct Token {
  std::string text;
  TokenKind kind = TokenKind::Text;
  int32_t decision = -1;  // index into TokenSeq::decisions for Decision tokens
};

struct TokenSeq {
  std::vector<Token> tokens;
  std::vector<agentloop::Decision> decisions;

  std::string text() const {
    std::vector<std::string> parts;
    parts.reserve(tokens.size());
    for (const auto& t : tokens) parts.push_back(t.text);
    return join(parts, " ");
  }
};

// false for every token inside <observation>...</observation> including the
// tag tokens themselves (tags are environment-injected, not policy output);
// true elsewhere. Unbalanced tags are a serialization error.
inline std::vector<bool> observation_mask(const TokenSeq& seq) {
  std::vector<bool> mask(seq.tokens.size(), true);
  bool inside = false;
  for (size_t i = 0; i < seq.tokens.size(); ++i) {
    const std::string& text = seq.tokens[i].text;
    if (text == "<observation>") {
      if (inside) raise(ErrorKind::Serialization, "nested <observation> tag");
      inside = true;
      mask[i] = false;
    } else if (text == "</observation>") {
      if (!inside) raise(ErrorKind::Serialization, "</observation> without an opening tag");
      inside = false;
      mask[i] = false;
    } else if (inside) {
      mask[i] = false;
    }
  }
  if (inside) raise(ErrorKind::Serialization, "unterminated <observation> span");
  return mask;
}

namespace detail {

inline void push_observation(TokenSeq& seq, const std::string& obs_text) {
  seq.tokens.push_back({"<observation>", TokenKind::Tag, -1});
  for (auto& word : split_ws(obs_text)) seq.tokens.push_back({std::move(word), TokenKind::Text, -1});
  seq.tokens.push_back({"</observation>", TokenKind::Tag, -1});
}

}  // namespace detail

// Flattens an episode into the training token stream: plan steps and
// responses in generation order, every environment feedback wrapped in
// observation tags. Policy-sampled steps become Decision tokens; externally
// provided plans and scripted responses are Injected and never reach the
// loss.
inline TokenSeq serialize_episode(const agentloop::EpisodeResult& episode) {
  TokenSeq seq;
  const agentloop::Trajectory& traj = episode.traj;

  auto trace_for_plan = [&](size_t plan_index) -> const agentloop::PlanTrace* {
    for (const auto& tr : episode.plan_traces)
      if (tr.plan_index == plan_index) return &tr;
    return nullptr;
  };

  auto emit_plan = [&](size_t plan_index) {
    const agentloop::GlobalPlan& plan = traj.plans[plan_index];
    const agentloop::PlanTrace* trace = trace_for_plan(plan_index);
    bool external = traj.plan_sources[plan_index] == agentloop::PlanSource::External;
    // the preserved prefix was emitted when it was first generated; only the
    // regenerated suffix is new text
    size_t first;
    if (plan_index == 0)
      first = 0;
    else if (trace)
      first = plan.steps.size() - trace->decisions.size();
    else if (external)
      first = std::min(static_cast<size_t>(plan.version), plan.steps.size());
    else
      return;  // carried-over policy plan: no new text at all
    size_t decision_start = trace ? plan.steps.size() - trace->decisions.size() : plan.steps.size();
    for (size_t s = first; s < plan.steps.size(); ++s) {
      if (trace && s >= decision_start) {
        int32_t idx = static_cast<int32_t>(seq.decisions.size());
        seq.decisions.push_back(trace->decisions[s - decision_start]);
        seq.tokens.push_back({plan.steps[s], TokenKind::Decision, idx});
      } else {
        seq.tokens.push_back({plan.steps[s], TokenKind::Injected, -1});
      }
    }
  };

  detail::push_observation(seq, traj.initial_obs);

  size_t next_plan = 0;
  // plans with version 0 precede the first turn
  while (next_plan < traj.plans.size() && traj.plans[next_plan].version == 0) {
    emit_plan(next_plan);
    ++next_plan;
  }
  for (size_t t = 0; t < traj.turns.size(); ++t) {
    const agentloop::Turn& turn = traj.turns[t];
    const auto& decision = episode.turn_decisions[t];
    if (decision) {
      int32_t idx = static_cast<int32_t>(seq.decisions.size());
      seq.decisions.push_back(*decision);
      seq.tokens.push_back({turn.raw, TokenKind::Decision, idx});
    } else {
      seq.tokens.push_back({turn.raw, TokenKind::Injected, -1});
    }
    detail::push_observation(seq, turn.obs_text);
    while (next_plan < traj.plans.size() &&
           traj.plans[next_plan].version == static_cast<int>(t) + 1) {
      emit_plan(next_plan);
      ++next_plan;
    }
  }
  while (next_plan < traj.plans.size()) {
    emit_plan(next_plan);
    ++next_plan;
  }
  return seq;
}

// final per-token trainability: outside observation spans AND policy-sampled
inline std::vector<bool> loss_mask(const TokenSeq& seq) {
  std::vector<bool> mask = observation_mask(seq);
  for (size_t i = 0; i < seq.tokens.size(); ++i)
    if (seq.tokens[i].kind != TokenKind::Decision) mask[i] = false;
  return mask;
}

// behavior-policy logprobs aligned with tokens; masked positions carry 0.0
inline std::vector<double> old_logprobs(const TokenSeq& seq) {
  std::vector<double> lp(seq.tokens.size(), 0.0);
  for (size_t i = 0; i < seq.tokens.size(); ++i)
    if (seq.tokens[i].decision >= 0)
      lp[i] = seq.decisions[static_cast<size_t>(seq.tokens[i].decision)].logprob;
  return lp;
}

}  // namespace planrl::grpo
