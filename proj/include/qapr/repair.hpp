#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qapr/gateway.hpp"
#include "qapr/harness.hpp"
#include "qapr/prompt.hpp"

namespace qapr {

enum class AttemptVerdict { success, test_failure, malformed, parse_error };

std::string_view attempt_verdict_name(AttemptVerdict verdict);
AttemptVerdict attempt_verdict_from_name(std::string_view name);

/// One validated model response. success means the patch exists and every
/// bundle test passed; test_failure, malformed (response contract violated)
/// and parse_error (bad QASM inside FIXED_CODE) are the failure modes.
struct RepairAttempt {
  std::string bundle_id;
  PromptConfig config = PromptConfig::S;
  int sample_index = 0;
  std::optional<Circuit> patched_circuit;
  std::optional<Explanation> explanation;
  AttemptVerdict verdict = AttemptVerdict::test_failure;
  std::string detail;
};

struct ExcludedBundle {
  std::string id;
  std::string reason;
};

struct ExperimentReport {
  std::vector<std::string> bundle_ids;  // included bundles, sorted by id
  std::vector<std::string> wo_ids;
  std::vector<std::string> te_ids;
  std::vector<ExcludedBundle> excluded;
  std::vector<PromptConfig> configs;
  int n_samples = 0;
  std::string provider_fingerprint;
  std::map<PromptConfig, double> per_config_total_rate;
  std::map<PromptConfig, std::optional<double>> per_config_wo_rate;
  std::map<PromptConfig, std::optional<double>> per_config_te_rate;
  std::map<PromptConfig, std::set<std::string>> fixed_sets;
  std::vector<RepairAttempt> attempts;
};

struct ExperimentOptions {
  std::vector<PromptConfig> configs{kAllConfigs.begin(), kAllConfigs.end()};
  int n_samples = 5;
  int time_limit_ms = kDefaultTimeLimitMs;
};

/// Parses and validates one raw response against the bundle's tests.
RepairAttempt validate_response(const BugBundle& bundle, PromptConfig config,
                                int sample_index, const std::string& raw,
                                int time_limit_ms);

/// Builds the prompt for one (bundle, config), running the baseline tests
/// and, for configs with M, the mutation analysis.
PromptBundle prepare_prompt(const BugBundle& bundle, PromptConfig config,
                            int time_limit_ms);

/// The full pipeline: per (bundle, config) run baseline tests, mutation
/// analysis when needed, build the prompt, generate n_samples responses and
/// validate each. Bundles for which no mutant can be generated are excluded
/// (when any requested config needs mutation analysis) and listed in the
/// report. Deterministic for deterministic providers: bundles are processed
/// in id order.
ExperimentReport run_experiment(std::span<const BugBundle> bundles,
                                const ExperimentOptions& options,
                                Provider& provider);

/// Fraction of the subset's bundles with at least one successful attempt.
/// Callers pass attempts already filtered to one configuration.
double success_rate(std::span<const RepairAttempt> attempts,
                    std::span<const std::string> bundle_subset);

/// Venn regions: for every subset of the report's configs, the bundles fixed
/// by exactly those configs. Keys are "&"-joined config tags; the empty
/// region is keyed "none".
std::map<std::string, std::set<std::string>> fixed_set_breakdown(
    const ExperimentReport& report);

std::string region_key(std::span<const PromptConfig> configs);

std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);
void write_report(const ExperimentReport& report,
                  const std::filesystem::path& path);
ExperimentReport read_report(const std::filesystem::path& path);

/// Human-readable tables mirroring the report.
std::string render_rate_table(const ExperimentReport& report);
std::string render_breakdown(const ExperimentReport& report);

}  // namespace qapr
