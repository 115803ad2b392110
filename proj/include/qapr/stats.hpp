#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qapr/prompt.hpp"

namespace qapr {

enum class RubricElement { position, cause, change };
enum class RubricCriterion { correctness, completeness, complexity };

std::string_view element_name(RubricElement element);
std::string_view criterion_name(RubricCriterion criterion);

/// One rater's nine binary judgments for one explanation.
/// judgments[element][criterion]; for Complexity a 1 means "contains
/// unnecessary complexity" (lower is better).
struct RubricSheet {
  std::string bundle_id;
  PromptConfig config = PromptConfig::S;
  std::string rater;
  std::array<std::array<int, 3>, 3> judgments{};
};

std::string sheet_to_json_line(const RubricSheet& sheet);
RubricSheet sheet_from_json_line(const std::string& line);
std::vector<RubricSheet> load_sheet_store(const std::filesystem::path& path);
void append_sheet(const RubricSheet& sheet, const std::filesystem::path& path);

struct RubricCounts {
  /// by_config[config][criterion][element]: bundles whose consensus judgment
  /// is 1 for that cell.
  std::map<PromptConfig, std::array<std::array<int, 3>, 3>> by_config;
  int total_sheets = 0;
};

/// Counts yes-judgments per (criterion, element, config) over consensus
/// sheets. At most one sheet per (bundle, config); duplicates raise
/// StatsError(duplicate_sheet).
RubricCounts aggregate_rubrics(std::span<const RubricSheet> consensus_sheets);

/// Fraction of positions where the two binary vectors agree.
double percent_agreement(std::span<const int> rater_a,
                         std::span<const int> rater_b);

/// Cohen's kappa with p_e = pa(yes)*pb(yes) + pa(no)*pb(no). Returns 1.0
/// when p_e = 1 and the vectors agree everywhere; std::nullopt when p_e = 1
/// with imperfect agreement (kappa undefined).
std::optional<double> cohen_kappa(std::span<const int> rater_a,
                                  std::span<const int> rater_b);

}  // namespace qapr
