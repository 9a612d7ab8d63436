#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "planrl/core/text.hpp"
#include "planrl/judge/prompts.hpp"

namespace planrl::judge {

struct JudgeVerdict {
  Rubric rubric = Rubric::Adherence;
  int adherence = -1;       // {0,1,2}
  int e2e = -1;             // {0,1,2}
  int correct = -1;         // 1..5
  int execute = -1;         // 1..5
  int standard = -1;        // 1..5
  int selected_index = -1;  // >= 0
  std::string feedback;     // EnvFeedback text
  std::string reason;
  std::string raw;
};

namespace detail {

// Exactly one ```json fenced block anywhere in the reply.
inline std::optional<std::string> extract_fenced_json(const std::string& raw, std::string& error) {
  size_t first = raw.find("```json");
  if (first == std::string::npos) {
    error = "no ```json block in reply";
    return std::nullopt;
  }
  size_t body_start = first + 7;
  size_t end = raw.find("```", body_start);
  if (end == std::string::npos) {
    error = "unterminated ```json block";
    return std::nullopt;
  }
  if (raw.find("```json", end + 3) != std::string::npos) {
    error = "more than one ```json block";
    return std::nullopt;
  }
  return raw.substr(body_start, end - body_start);
}

inline bool read_int(const nlohmann::json& j, const char* key, int lo, int hi, int& out,
                     std::string& error) {
  if (!j.contains(key)) {
    error = std::string("missing field \"") + key + "\"";
    return false;
  }
  const auto& v = j.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    error = std::string("field \"") + key + "\" is not an integer";
    return false;
  }
  int n = v.get<int>();
  if (n < lo || n > hi) {
    error = std::string("field \"") + key + "\" out of range [" + std::to_string(lo) + "," +
            std::to_string(hi) + "]: " + std::to_string(n);
    return false;
  }
  out = n;
  return true;
}

}  // namespace detail

// Parses a backend reply into a verdict. Returns nullopt with `error` set on
// any malformation or range violation; callers treat both as retryable.
inline std::optional<JudgeVerdict> parse_verdict(Rubric rubric, const std::string& raw,
                                                 std::string& error) {
  JudgeVerdict v;
  v.rubric = rubric;
  v.raw = raw;

  if (rubric == Rubric::EnvFeedback) {
    // free-text rubric: "Task Completed!" or "Observation: ..."
    v.feedback = trim(raw);
    if (v.feedback.empty()) {
      error = "empty environmental feedback";
      return std::nullopt;
    }
    return v;
  }

  auto body = detail::extract_fenced_json(raw, error);
  if (!body) return std::nullopt;
  nlohmann::json j = nlohmann::json::parse(*body, nullptr, false);
  if (j.is_discarded()) {
    error = "fenced block is not valid JSON";
    return std::nullopt;
  }
  switch (rubric) {
    case Rubric::Adherence:
      if (!detail::read_int(j, "score", 0, 2, v.adherence, error)) return std::nullopt;
      break;
    case Rubric::E2E:
      if (!detail::read_int(j, "score", 0, 2, v.e2e, error)) return std::nullopt;
      break;
    case Rubric::PlanQuality:
      if (!detail::read_int(j, "correctness_score", 1, 5, v.correct, error)) return std::nullopt;
      if (!detail::read_int(j, "executability_score", 1, 5, v.execute, error)) return std::nullopt;
      if (!detail::read_int(j, "standardization_score", 1, 5, v.standard, error)) return std::nullopt;
      break;
    case Rubric::PlanSelection:
      if (!detail::read_int(j, "selected_index", 0, 1 << 20, v.selected_index, error))
        return std::nullopt;
      break;
    case Rubric::EnvFeedback:
      break;
  }
  v.reason = j.value("reason", j.value("correctness_reason", std::string{}));
  return v;
}

}  // namespace planrl::judge
