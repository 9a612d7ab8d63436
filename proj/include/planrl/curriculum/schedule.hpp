#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "planrl/core/error.hpp"
#include "planrl/reward/breakdown.hpp"

namespace planrl::curriculum {

enum class PlanProvider { External, SelfGenerateThenSelect };

struct StagePlanSource {
  int stage = 1;
  PlanProvider plan_provider = PlanProvider::External;
};

// Stage 1 trains plan adherence against externally provided plans; from
// stage 2 on the trained policy generates its own candidates.
inline StagePlanSource plan_source_for(int stage, bool joint) {
  if (joint) return {stage, PlanProvider::SelfGenerateThenSelect};
  return {stage, stage == 1 ? PlanProvider::External : PlanProvider::SelfGenerateThenSelect};
}

struct StageSpan {
  int stage = 1;
  int epochs = 1;
};

// Spans make the order/removal ablations pure configuration: the default
// progressive run is {1x1, 2x2, 3x1}; "joint" applies every reward component
// in a single merged objective instead.
struct ScheduleConfig {
  std::vector<StageSpan> stages = {{1, 1}, {2, 2}, {3, 1}};
  bool joint = false;
  uint64_t seed = 1;

  int total_epochs() const {
    int total = 0;
    for (const auto& s : stages) total += s.epochs;
    return total;
  }

  void validate() const {
    if (stages.empty()) raise(ErrorKind::Validation, "schedule: at least one stage span required");
    for (const auto& s : stages) {
      if (s.stage < 1 || s.stage > 3) raise(ErrorKind::Validation, "schedule: stage must be 1, 2 or 3");
      if (s.epochs < 1) raise(ErrorKind::Validation, "schedule: epochs must be positive");
    }
  }
};

inline int stage_of(int epoch, const ScheduleConfig& cfg) {
  cfg.validate();
  if (epoch < 0 || epoch >= cfg.total_epochs())
    raise(ErrorKind::Usage, "stage_of: epoch " + std::to_string(epoch) + " outside the schedule");
  int acc = 0;
  for (const auto& s : cfg.stages) {
    acc += s.epochs;
    if (epoch < acc) return s.stage;
  }
  raise(ErrorKind::Contract, "unreachable");
}

// Reward components driving updates for a stage; the joint ablation merges
// all four.
inline std::vector<reward::Component> stage_components_of(int stage, bool joint) {
  if (joint)
    return {reward::Component::Format, reward::Component::Adherence, reward::Component::E2E,
            reward::Component::PlanQuality};
  return reward::stage_components(stage);
}

inline ScheduleConfig schedule_from_json(const nlohmann::json& j) {
  ScheduleConfig cfg;
  if (j.contains("epochs_per_stage")) {
    auto v = j.at("epochs_per_stage").get<std::vector<int>>();
    if (v.size() != 3)
      raise(ErrorKind::Validation, "schedule: epochs_per_stage must have three entries");
    cfg.stages = {{1, v[0]}, {2, v[1]}, {3, v[2]}};
  }
  if (j.contains("stages")) {
    cfg.stages.clear();
    for (const auto& s : j.at("stages"))
      cfg.stages.push_back({s.at("stage").get<int>(), s.at("epochs").get<int>()});
  }
  cfg.joint = j.value("joint", false);
  cfg.validate();
  return cfg;
}

inline nlohmann::json schedule_to_json(const ScheduleConfig& cfg) {
  nlohmann::json j;
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : cfg.stages) stages.push_back({{"stage", s.stage}, {"epochs", s.epochs}});
  j["stages"] = stages;
  j["joint"] = cfg.joint;
  return j;
}

}  // namespace planrl::curriculum
