#pragma once

#include <map>
#include <string>
#include <vector>

#include "planrl/core/error.hpp"

namespace planrl::judge {

enum class Rubric { Adherence, E2E, PlanQuality, PlanSelection, EnvFeedback };

inline std::string rubric_name(Rubric r) {
  switch (r) {
    case Rubric::Adherence: return "adherence";
    case Rubric::E2E: return "e2e";
    case Rubric::PlanQuality: return "plan_quality";
    case Rubric::PlanSelection: return "plan_selection";
    case Rubric::EnvFeedback: return "env_feedback";
  }
  return "?";
}

using SlotMap = std::map<std::string, std::string>;

namespace detail {

struct Section {
  std::string header;
  std::string slot;
  bool optional = false;
};

struct Template {
  std::string preamble;
  std::vector<Section> sections;
  std::string epilogue;
};

inline const std::string kScoreReasonFormat =
    "Output Format:\n```json\n{\n    \"score\": xxx,\n    \"reason\": \"...\"\n}\n```";

inline const Template& template_for(Rubric r) {
  static const Template adherence{
      "You are an expert in agent tasks.\n"
      "You are tasked with evaluating the agent's execution of a given global plan. Specifically, "
      "you are to assess the degree of compliance between the agent's actions and the strategic "
      "guidance outlined in the global plan. Rate it from 0 to 2 points, and explain the reason.\n\n"
      "2 Point Answer Criteria:\n"
      "The agent's execution strictly adheres to the guidance provided in the global plan. All "
      "actions are logically aligned with the plan's objectives and are carried out as instructed.\n\n"
      "1 Point Answer Criteria:\n"
      "The agent's execution demonstrates a partial alignment with the global plan, allowing for "
      "minor deviations. For example, in cases where the plan suggests the use of multiple tools, "
      "the agent may use at least one relevant tool to support the execution, as long as it does "
      "not contradict the overall guidance.\n\n"
      "0 Point Answer Criteria:\n"
      "The agent's execution departs or contradicts the global plan, or contains garbled "
      "characters, format errors, disorder, and irrelevant information.",
      {{"Task", "task", false},
       {"Global Plan", "global_plan", false},
       {"Execution Step Index", "execution_step_index", false},
       {"Agent Action", "agent_action", false}},
      kScoreReasonFormat};

  static const Template e2e{
      "You are an expert in agent tasks.\n"
      "Please evaluate the end-to-end (E2E) performance of the agent during its interaction with "
      "a given environment. The goal is to assess whether the agent accomplishes the target task "
      "efficiently and directly, without unnecessary detours or redundancies. Rate it from 0 to 2 "
      "points, and explain the reason.\n\n"
      "2 Point Answer Criteria:\n"
      "1. The agent successfully completes the task in a direct and efficient manner.\n"
      "2. There are no unnecessary steps or redundant actions in the interaction trajectory.\n\n"
      "1 Point Answer Criteria:\n"
      "1. The task is ultimately completed, but the process includes some level of redundancy or "
      "unintended topic drift.\n"
      "2. While the final objective is met, there may be deviations from the optimal path.\n\n"
      "0 Point Answer Criteria:\n"
      "1. The agent fails to achieve the final task objective.\n"
      "2. Contains significant deviations, errors, or inability to progress towards the goal.",
      {{"Task", "task", false},
       {"Agent-Environment Interaction", "accumulated_context", false},
       {"Reference Interaction", "ref_interaction", true}},
      kScoreReasonFormat};

  static const Template plan_quality{
      "Please act as a professional guidance evaluator and judge the given global plan across the "
      "following three dimensions:\n\n"
      "1. Correctness: Based on the environment's feedback on the agent's actions in response to "
      "the current global plan guidance, does the global plan accurately fulfill the task "
      "requirements?\n"
      "2. Executability: Based on the agent's adherence to the global plan, is the global plan "
      "clear, easy to understand, and are the steps reasonable?\n"
      "3. Standardization: Does the global plan adhere to a consistent and standardized format?\n\n"
      "For each dimension, please score the global plan on a scale of 1 to 5, where 1 indicates "
      "poor performance and 5 indicates excellent performance, and explain the reason.",
      {{"Task", "task", false},
       {"Global Plan", "global_plan", false},
       {"Execution Step Index", "execution_step_index", false},
       {"Accumulated Observation", "observation", true}},
      "Output Format:\n```json\n{\n    \"correctness_score\": xxx,\n    \"correctness_reason\": "
      "\"...\",\n    \"executability_score\": xxx,\n    \"executability_reason\": \"...\",\n    "
      "\"standardization_score\": xxx,\n    \"standardization_reason\": \"...\"\n}\n```"};

  static const Template plan_selection{
      "You are given several global plans serving as high-level, natural guidance to assist in "
      "planning.\n"
      "Based on the task description, accumulated observation of agent interactions with the "
      "environment, and the current index of execution step, please select the most suitable "
      "global plan from all available global plans for task completion.\n\n"
      "When you select the global plan, consider evaluating the following aspects to identify the "
      "optimal choice based on comprehensive criteria:\n\n"
      "1. Correctness: Does the global plan correctly and accurately address the task "
      "requirements?\n"
      "2. Executability: Is the global plan clearly structured, easy to interpret, and are the "
      "individual steps logically sound and actionable?\n"
      "3. Standardization: Does the global plan adhere to a consistent and standardized format?",
      {{"Task", "task", false},
       {"Available Global Plans", "global_plans", false},
       {"Execution Step Index", "execution_step_index", false},
       {"Accumulated Observation", "observation", true}},
      "Output Format:\n```json\n{\n    \"selected_index\": xxx,\n    \"reason\": \"...\"\n}\n```"};

  static const Template env_feedback{
      "Based on the task description and the reference agent-environment interaction in which the "
      "agent has finally accomplished the task, please generate the environmental feedback for "
      "the agent's action and determine whether the current action has reached the final goal. If "
      "the agent's action has reached the final goal, please output \"Task Completed!\"; else, "
      "the feedback should be in the following format:\n\"Observation: ...\"",
      {{"Task", "task", false},
       {"Reference Interaction", "ref_interaction", false},
       {"Previous Observation", "observation", true},
       {"Agent Action", "agent_action", false}},
      ""};

  switch (r) {
    case Rubric::Adherence: return adherence;
    case Rubric::E2E: return e2e;
    case Rubric::PlanQuality: return plan_quality;
    case Rubric::PlanSelection: return plan_selection;
    case Rubric::EnvFeedback: return env_feedback;
  }
  raise(ErrorKind::Contract, "unknown rubric");
}

}  // namespace detail

// Fills the bundled template for the rubric. Slot values go in verbatim;
// optional sections vanish cleanly when their slot is absent; a missing
// required slot is a template error naming the slot.
inline std::string render_prompt(Rubric rubric, const SlotMap& slots) {
  const detail::Template& tpl = detail::template_for(rubric);
  std::string out = tpl.preamble;
  for (const auto& section : tpl.sections) {
    auto it = slots.find(section.slot);
    if (it == slots.end()) {
      if (section.optional) continue;
      raise(ErrorKind::Template,
            "render_prompt(" + rubric_name(rubric) + "): missing required slot \"" + section.slot + "\"");
    }
    out += "\n\n# " + section.header + "\n" + it->second;
  }
  if (!tpl.epilogue.empty()) out += "\n\n" + tpl.epilogue;
  return out;
}

}  // namespace planrl::judge
