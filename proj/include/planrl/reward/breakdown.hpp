#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "planrl/core/error.hpp"

namespace planrl::reward {

enum class Component { Format, Adherence, E2E, PlanQuality };

inline std::string component_name(Component c) {
  switch (c) {
    case Component::Format: return "format";
    case Component::Adherence: return "adherence";
    case Component::E2E: return "e2e";
    case Component::PlanQuality: return "plan_quality";
  }
  return "?";
}

inline double component_max(Component c) {
  switch (c) {
    case Component::Format: return 1.0;
    case Component::Adherence: return 2.0;
    case Component::E2E: return 2.0;
    case Component::PlanQuality: return 15.0;
  }
  return 1.0;
}

struct PlanQualityScore {
  int correct = 1;   // 1..5
  int execute = 1;   // 1..5
  int standard = 1;  // 1..5
  int total() const { return correct + execute + standard; }
};

// Per-rollout component scores plus the stage-composed scalar.
struct RewardBreakdown {
  int format = 0;                      // {0,1}
  std::vector<int> adherence_turns;    // {0,1,2} per scored turn
  double adherence = 0.0;              // trajectory aggregate in [0,2] (mean of turns)
  int e2e = 0;                         // {0,1,2}
  PlanQualityScore plan_quality;       // sub-scores 1..5 each, total in [3,15]
  double stage_scalar = 0.0;
  unsigned populated = 0;              // bit per populated Component

  void mark(Component c) { populated |= 1u << static_cast<unsigned>(c); }
  bool has(Component c) const { return populated & (1u << static_cast<unsigned>(c)); }

  void check_ranges() const {
    if (format != 0 && format != 1) raise(ErrorKind::Contract, "format out of {0,1}");
    for (int a : adherence_turns)
      if (a < 0 || a > 2) raise(ErrorKind::Contract, "turn adherence out of {0,1,2}");
    if (adherence < 0.0 || adherence > 2.0) raise(ErrorKind::Contract, "adherence out of [0,2]");
    if (e2e < 0 || e2e > 2) raise(ErrorKind::Contract, "e2e out of {0,1,2}");
    auto sub = [](int v) { return v >= 1 && v <= 5; };
    if (!sub(plan_quality.correct) || !sub(plan_quality.execute) || !sub(plan_quality.standard))
      raise(ErrorKind::Contract, "plan quality sub-score out of [1,5]");
  }

  double component_value(Component c) const {
    switch (c) {
      case Component::Format: return format;
      case Component::Adherence: return adherence;
      case Component::E2E: return e2e;
      case Component::PlanQuality: return plan_quality.total();
    }
    return 0.0;
  }
};

// Stage composition: the sum of active components, each normalized by its
// maximum, so every term lies in [0,1].
inline std::vector<Component> stage_components(int stage) {
  switch (stage) {
    case 1: return {Component::Format, Component::Adherence, Component::E2E};
    case 2: return {Component::Format, Component::E2E, Component::PlanQuality};
    case 3: return {Component::Format, Component::E2E};
    default: raise(ErrorKind::Usage, "stage must be 1, 2 or 3");
  }
}

inline double composed_scalar(const std::vector<Component>& components, const RewardBreakdown& b) {
  double sum = 0.0;
  for (Component c : components) sum += b.component_value(c) / component_max(c);
  return sum;
}

inline double stage_reward(int stage, const RewardBreakdown& b) {
  b.check_ranges();
  auto components = stage_components(stage);
  for (Component c : components)
    if (!b.has(c))
      raise(ErrorKind::Contract,
            "stage " + std::to_string(stage) + " requires component " + component_name(c));
  return composed_scalar(components, b);
}

}  // namespace planrl::reward
