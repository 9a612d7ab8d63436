#pragma once

#include <string>
#include <vector>

#include "planrl/core/error.hpp"
#include "planrl/core/text.hpp"

namespace planrl::agentloop {

// Ordered plan steps "Step 1: ..." .. "Step N: ...", version-indexed by the
// number of completed environment turns at generation time.
struct GlobalPlan {
  std::vector<std::string> steps;
  int version = 0;

  bool valid() const {
    if (steps.empty()) return false;
    for (size_t i = 0; i < steps.size(); ++i) {
      std::string prefix = "Step " + std::to_string(i + 1) + ":";
      if (steps[i].rfind(prefix, 0) != 0) return false;
      if (trim(std::string_view(steps[i]).substr(prefix.size())).empty()) return false;
    }
    return true;
  }

  void validate() const {
    if (steps.empty()) raise(ErrorKind::Validation, "plan: steps must be non-empty");
    if (!valid())
      raise(ErrorKind::Validation,
            "plan: every step must parse as \"Step k: <text>\" with k consecutive from 1");
  }

  // 1-based; text after "Step k:"
  std::string clause(size_t k) const {
    if (k < 1 || k > steps.size()) raise(ErrorKind::Usage, "plan clause index out of range");
    const std::string& s = steps[k - 1];
    size_t colon = s.find(':');
    return trim(std::string_view(s).substr(colon + 1));
  }

  std::string text() const { return join(steps, "\n"); }
};

// Numbers raw clause texts into step strings starting at step `first_index`.
inline std::vector<std::string> number_steps(const std::vector<std::string>& clauses,
                                             size_t first_index) {
  std::vector<std::string> out;
  out.reserve(clauses.size());
  for (size_t i = 0; i < clauses.size(); ++i)
    out.push_back("Step " + std::to_string(first_index + i) + ": " + trim(clauses[i]));
  return out;
}

// Parses a plan body of "Step k: ..." lines; returns false on any deviation.
inline bool parse_plan_text(const std::string& text, std::vector<std::string>& steps_out) {
  steps_out.clear();
  for (const auto& raw_line : split_on(text, "\n")) {
    std::string line = trim(raw_line);
    if (line.empty()) continue;
    steps_out.push_back(line);
  }
  GlobalPlan probe;
  probe.steps = steps_out;
  return probe.valid();
}

}  // namespace planrl::agentloop
