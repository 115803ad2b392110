#include "qapr/prompt.hpp"

#include <algorithm>
#include <cctype>

#include "qapr/system_prompt_text.hpp"

namespace qapr {

namespace {

std::string or_not_provided(const std::string& text) {
  return text.empty() ? std::string("(not provided)") : text;
}

std::string render_outcome_lines(const std::vector<TestOutcome>& outcomes) {
  std::string out;
  for (const TestOutcome& outcome : outcomes) {
    out += "- ";
    out += outcome.name;
    out += ": ";
    out += verdict_name(outcome.verdict);
    if (!outcome.detail.empty()) {
      out += ": ";
      out += outcome.detail;
    }
    out += '\n';
  }
  return out;
}

std::string trim(std::string_view text) {
  std::size_t begin = 0, end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) {
    --end;
  }
  return std::string(text.substr(begin, end - begin));
}

}  // namespace

std::string_view config_tag(PromptConfig config) {
  switch (config) {
    case PromptConfig::S: return "S";
    case PromptConfig::SD: return "S+D";
    case PromptConfig::SM: return "S+M";
    case PromptConfig::SDM: return "S+D+M";
  }
  return "?";
}

PromptConfig parse_config_tag(std::string_view tag) {
  for (const PromptConfig config : kAllConfigs) {
    if (config_tag(config) == tag) return config;
  }
  throw PromptError(PromptError::Kind::unknown_config,
                    "unknown prompt configuration '" + std::string(tag) +
                        "' (expected S, S+D, S+M or S+D+M)");
}

bool includes_dynamic(PromptConfig config) {
  return config == PromptConfig::SD || config == PromptConfig::SDM;
}

bool includes_mutation(PromptConfig config) {
  return config == PromptConfig::SM || config == PromptConfig::SDM;
}

std::string render_system_prompt() {
  return std::string(detail::kSystemPromptText);
}

PromptBundle build_prompt(const BugBundle& bundle, PromptConfig config,
                          const std::vector<TestOutcome>& baseline,
                          const std::vector<MutationRecord>* records) {
  if (includes_mutation(config) && records == nullptr) {
    throw PromptError(PromptError::Kind::missing_ingredient,
                      "configuration " + std::string(config_tag(config)) +
                          " requires mutation analysis records");
  }
  if (!includes_mutation(config) && records != nullptr) {
    throw PromptError(PromptError::Kind::missing_ingredient,
                      "configuration " + std::string(config_tag(config)) +
                          " does not take mutation analysis records");
  }
  if ((includes_dynamic(config) || includes_mutation(config)) && baseline.empty()) {
    throw PromptError(PromptError::Kind::missing_ingredient,
                      "configuration " + std::string(config_tag(config)) +
                          " requires baseline test outcomes");
  }

  std::string user;
  user += kSectionBuggyCode;
  user += "\n```qasm\n";
  user += print_qasm(bundle.buggy_circuit);
  user += "```\n\n";

  user += kSectionBugDescription;
  user += '\n';
  user += or_not_provided(bundle.bug_description);
  user += "\n\n";

  user += kSectionExpectedBehavior;
  user += '\n';
  user += or_not_provided(bundle.expected_behavior);
  user += "\n\n";

  if (includes_dynamic(config)) {
    user += kSectionCurrentResult;
    user += '\n';
    user += render_outcome_lines(baseline);
    user += '\n';
  }

  if (includes_mutation(config)) {
    user += kSectionMutationAnalysis;
    user += "\n```\n";
    user += serialize_records(*records);
    user += "```\n";
  }

  while (!user.empty() && std::isspace(static_cast<unsigned char>(user.back()))) {
    user.pop_back();
  }
  user += '\n';

  return PromptBundle{render_system_prompt(), std::move(user), config, bundle.id};
}

ModelResponse parse_model_response(const std::string& raw) {
  const std::size_t marker = raw.find("FIXED_CODE");
  if (marker == std::string::npos) {
    throw PromptError(PromptError::Kind::malformed_response,
                      "response has no FIXED_CODE section");
  }
  const std::size_t fence_open = raw.find("```", marker);
  if (fence_open == std::string::npos) {
    throw PromptError(PromptError::Kind::malformed_response,
                      "no fenced code block after FIXED_CODE");
  }
  std::size_t code_start = raw.find('\n', fence_open);
  if (code_start == std::string::npos) {
    throw PromptError(PromptError::Kind::malformed_response,
                      "unterminated code fence after FIXED_CODE");
  }
  ++code_start;
  const std::size_t fence_close = raw.find("```", code_start);
  if (fence_close == std::string::npos) {
    throw PromptError(PromptError::Kind::malformed_response,
                      "unterminated code fence after FIXED_CODE");
  }
  const std::string code = raw.substr(code_start, fence_close - code_start);

  const std::size_t explanation_at = raw.find("EXPLANATION", fence_close);
  if (explanation_at == std::string::npos) {
    throw PromptError(PromptError::Kind::malformed_response,
                      "response has no EXPLANATION section");
  }

  // Scan labeled paragraphs line by line; continuation lines attach to the
  // most recent label.
  std::array<std::optional<std::string>, 3> parts;  // position, cause, change
  int current = -1;
  std::size_t cursor = raw.find('\n', explanation_at);
  while (cursor != std::string::npos && cursor < raw.size()) {
    ++cursor;
    std::size_t line_end = raw.find('\n', cursor);
    if (line_end == std::string::npos) line_end = raw.size();
    std::string_view line(raw.data() + cursor, line_end - cursor);
    std::string_view stripped = line;
    while (!stripped.empty() &&
           std::isspace(static_cast<unsigned char>(stripped.front()))) {
      stripped.remove_prefix(1);
    }
    const auto starts_with = [&](std::string_view label) {
      return stripped.substr(0, label.size()) == label;
    };
    if (starts_with("Position:")) {
      current = 0;
      parts[0] = std::string(stripped.substr(9));
    } else if (starts_with("Cause:")) {
      current = 1;
      parts[1] = std::string(stripped.substr(6));
    } else if (stripped.empty()) {
      current = -1;  // a blank line closes the paragraph
    } else if (starts_with("Change:")) {
      current = 2;
      parts[2] = std::string(stripped.substr(7));
    } else if (current >= 0 && parts[static_cast<std::size_t>(current)]) {
      auto& part = *parts[static_cast<std::size_t>(current)];
      part += '\n';
      part += std::string(line);
    }
    cursor = (line_end == raw.size()) ? std::string::npos : line_end;
  }

  static constexpr std::array<std::string_view, 3> kLabels = {"Position", "Cause",
                                                              "Change"};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!parts[i]) {
      throw PromptError(PromptError::Kind::malformed_response,
                        "explanation is missing its " + std::string(kLabels[i]) +
                            " paragraph");
    }
  }

  ModelResponse response;
  response.patched_circuit = parse_qasm(code);
  response.explanation = {trim(*parts[0]), trim(*parts[1]), trim(*parts[2])};
  return response;
}

std::string render_response(std::string_view fixed_qasm,
                            const Explanation& explanation) {
  std::string out = "FIXED_CODE:\n```qasm\n";
  out += fixed_qasm;
  if (out.empty() || out.back() != '\n') out += '\n';
  out += "```\n\nEXPLANATION:\n";
  out += "Position: " + explanation.position + "\n";
  out += "Cause: " + explanation.cause + "\n";
  out += "Change: " + explanation.change + "\n";
  return out;
}

}  // namespace qapr
