#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "planrl/core/text.hpp"

namespace planrl::agentloop {

struct AgentResponse {
  std::optional<std::string> thought;
  std::string action;
  std::string raw;
};

// Violations are ordinary values: they drive the format reward to zero,
// they are not failures of the parser.
struct ParseResult {
  std::optional<AgentResponse> response;
  std::string violation;  // set iff !response

  bool ok() const { return response.has_value(); }
};

// Grammar (markers case-sensitive):
//   "Thought: <text> Action: <action>"   thought form; action ends the response
//   "Action: <action>"                   direct form
// The action is a single line; any non-whitespace content after it is a
// violation, as is any content before the leading marker.
inline ParseResult parse_response(const std::string& raw) {
  auto violation = [&](std::string why) {
    ParseResult r;
    r.violation = std::move(why);
    return r;
  };

  std::string body = trim(raw);
  if (body.empty()) return violation("empty response");

  std::optional<std::string> thought;
  std::string rest;
  if (body.rfind("Thought:", 0) == 0) {
    size_t action_pos = body.find("Action:");
    if (action_pos == std::string::npos) return violation("missing Action marker after Thought");
    thought = trim(std::string_view(body).substr(8, action_pos - 8));
    rest = body.substr(action_pos);
  } else if (body.rfind("Action:", 0) == 0) {
    rest = body;
  } else {
    if (body.find("Action:") != std::string::npos)
      return violation("content before the Action marker");
    return violation("missing Action marker");
  }

  std::string after = trim(rest.substr(7));
  if (after.empty()) return violation("empty action");
  if (after.find("Action:") != std::string::npos)
    return violation("multiple Action markers");
  size_t nl = after.find('\n');
  if (nl != std::string::npos) {
    if (!trim(std::string_view(after).substr(nl)).empty())
      return violation("trailing content after the action line");
    after = trim(std::string_view(after).substr(0, nl));
  }

  ParseResult r;
  r.response = AgentResponse{std::move(thought), std::move(after), raw};
  return r;
}

}  // namespace planrl::agentloop
