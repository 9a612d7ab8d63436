#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "planrl/agentloop/plan.hpp"
#include "planrl/agentloop/trajectory.hpp"
#include "planrl/core/rng.hpp"
#include "planrl/envsim/task.hpp"

namespace planrl::agentloop {

// One sampled choice of a differentiable policy. Scripted handles leave
// these out; the trainer only back-propagates through recorded decisions.
struct Decision {
  std::vector<uint32_t> features;  // active feature indices (implicit value 1)
  std::vector<int32_t> legal;      // legal action ids at this state
  int32_t action = -1;             // chosen action id
  double logprob = 0.0;            // under the behavior policy at sampling time
};

struct ExecutorOutput {
  std::string raw;  // full response text, e.g. "Action: move right"
  std::optional<Decision> decision;
};

struct PlanProposal {
  std::vector<std::string> clauses;     // step texts without "Step k:" numbering
  std::vector<Decision> decisions;      // one per clause for learned planners
};

// Planner and executor are two prompt roles over one handle; scripted
// oracle handles and the learned policy both implement this.
class PolicyHandle {
public:
  virtual ~PolicyHandle() = default;

  // executor role: respond given accumulated context and the current plan
  // (absent in react mode). turn_index is 1-based.
  virtual ExecutorOutput act(const envsim::TaskSpec& task, const Trajectory& context,
                             const GlobalPlan* plan, int turn_index, Rng& rng) = 0;

  // planner role: propose clauses for plan steps t+1 .. t+horizon given the
  // previous plan. t is the number of completed turns (0 for the initial plan).
  virtual PlanProposal propose_suffix(const envsim::TaskSpec& task, const Trajectory& context,
                                      const GlobalPlan* prev, int t, int horizon, Rng& rng) = 0;
};

// Ranks candidate plans; used by the generate-then-select strategy.
class PlanSelector {
public:
  virtual ~PlanSelector() = default;

  // returns the index of the chosen candidate; throws on judge failure
  // (callers fall back to candidate 0 and record a warning event)
  virtual size_t select(const envsim::TaskSpec& task, const Trajectory& context,
                        const std::vector<GlobalPlan>& candidates) = 0;
};

}  // namespace planrl::agentloop
