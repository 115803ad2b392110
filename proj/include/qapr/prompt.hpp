#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qapr/harness.hpp"

namespace qapr {

/// The four prompt configurations: static information alone, plus dynamic
/// execution information, plus mutation analysis results, or both.
enum class PromptConfig { S, SD, SM, SDM };

inline constexpr std::array<PromptConfig, 4> kAllConfigs = {
    PromptConfig::S, PromptConfig::SD, PromptConfig::SM, PromptConfig::SDM};

std::string_view config_tag(PromptConfig config);  // "S", "S+D", "S+M", "S+D+M"
PromptConfig parse_config_tag(std::string_view tag);
bool includes_dynamic(PromptConfig config);
bool includes_mutation(PromptConfig config);

// Normative user prompt section headers; see PROMPTS.md.
inline constexpr std::string_view kSectionBuggyCode = "## Buggy Code";
inline constexpr std::string_view kSectionBugDescription = "## Bug Description";
inline constexpr std::string_view kSectionExpectedBehavior = "## Expected Behavior";
inline constexpr std::string_view kSectionCurrentResult = "## Current Result";
inline constexpr std::string_view kSectionMutationAnalysis = "## Mutation Analysis Result";

struct PromptBundle {
  std::string system_prompt;
  std::string user_prompt;
  PromptConfig config = PromptConfig::S;
  std::string bundle_id;
};

/// The shared system prompt: interpretation guidance for every section, the
/// four mutation statuses, the minimal-change instruction, and the response
/// contract. A pure constant loaded from prompts/system_prompt.txt at build
/// time.
std::string render_system_prompt();

/// Assembles the user prompt for `config`, in order: Buggy Code, Bug
/// Description, Expected Behavior (always); Current Result (configs with D);
/// Mutation Analysis Result (configs with M). `records` must be present iff
/// the config includes M; `baseline` must be nonempty for configs with D or
/// M. Violations raise PromptError(missing_ingredient).
PromptBundle build_prompt(const BugBundle& bundle, PromptConfig config,
                          const std::vector<TestOutcome>& baseline,
                          const std::vector<MutationRecord>* records);

struct Explanation {
  std::string position;
  std::string cause;
  std::string change;

  bool operator==(const Explanation&) const = default;
};

struct ModelResponse {
  Circuit patched_circuit;
  Explanation explanation;
};

/// Extracts the FIXED_CODE block and the three labeled explanation parts
/// from a raw model response. Raises PromptError(malformed_response) when
/// the structure is missing and propagates QasmError from the embedded code.
ModelResponse parse_model_response(const std::string& raw);

/// Renders a well-formed response; the inverse of parse_model_response.
/// Used by the synthetic providers and by tests.
std::string render_response(std::string_view fixed_qasm,
                            const Explanation& explanation);

}  // namespace qapr
