#include "qapr/stats.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace qapr {

namespace {

constexpr std::array<RubricElement, 3> kElements = {
    RubricElement::position, RubricElement::cause, RubricElement::change};
constexpr std::array<RubricCriterion, 3> kCriteria = {RubricCriterion::correctness,
                                                      RubricCriterion::completeness,
                                                      RubricCriterion::complexity};

}  // namespace

std::string_view element_name(RubricElement element) {
  switch (element) {
    case RubricElement::position: return "Position";
    case RubricElement::cause: return "Cause";
    case RubricElement::change: return "Change";
  }
  return "?";
}

std::string_view criterion_name(RubricCriterion criterion) {
  switch (criterion) {
    case RubricCriterion::correctness: return "Correctness";
    case RubricCriterion::completeness: return "Completeness";
    case RubricCriterion::complexity: return "Complexity";
  }
  return "?";
}

std::string sheet_to_json_line(const RubricSheet& sheet) {
  nlohmann::ordered_json j;
  j["bundle_id"] = sheet.bundle_id;
  j["config"] = std::string(config_tag(sheet.config));
  j["rater"] = sheet.rater;
  nlohmann::ordered_json judgments;
  for (std::size_t e = 0; e < kElements.size(); ++e) {
    nlohmann::ordered_json row;
    for (std::size_t c = 0; c < kCriteria.size(); ++c) {
      row[std::string(criterion_name(kCriteria[c]))] = sheet.judgments[e][c];
    }
    judgments[std::string(element_name(kElements[e]))] = std::move(row);
  }
  j["judgments"] = std::move(judgments);
  return j.dump();
}

RubricSheet sheet_from_json_line(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  RubricSheet sheet;
  sheet.bundle_id = j.at("bundle_id").get<std::string>();
  sheet.config = parse_config_tag(j.at("config").get<std::string>());
  sheet.rater = j.at("rater").get<std::string>();
  const auto& judgments = j.at("judgments");
  for (std::size_t e = 0; e < kElements.size(); ++e) {
    const auto& row = judgments.at(std::string(element_name(kElements[e])));
    for (std::size_t c = 0; c < kCriteria.size(); ++c) {
      const int value = row.at(std::string(criterion_name(kCriteria[c]))).get<int>();
      if (value != 0 && value != 1) {
        throw StatsError(StatsError::Kind::store_error,
                         "judgments must be binary, got " + std::to_string(value));
      }
      sheet.judgments[e][c] = value;
    }
  }
  return sheet;
}

std::vector<RubricSheet> load_sheet_store(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw StatsError(StatsError::Kind::store_error,
                     "cannot open rubric store " + path.string());
  }
  std::vector<RubricSheet> sheets;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    sheets.push_back(sheet_from_json_line(line));
  }
  return sheets;
}

void append_sheet(const RubricSheet& sheet, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::app);
  if (!out) {
    throw StatsError(StatsError::Kind::store_error,
                     "cannot open rubric store " + path.string());
  }
  out << sheet_to_json_line(sheet) << '\n';
}

RubricCounts aggregate_rubrics(std::span<const RubricSheet> consensus_sheets) {
  RubricCounts counts;
  std::set<std::pair<std::string, PromptConfig>> seen;
  for (const RubricSheet& sheet : consensus_sheets) {
    if (!seen.insert({sheet.bundle_id, sheet.config}).second) {
      throw StatsError(StatsError::Kind::duplicate_sheet,
                       "duplicate consensus sheet for (" + sheet.bundle_id +
                           ", " + std::string(config_tag(sheet.config)) + ")");
    }
    auto& grid = counts.by_config[sheet.config];
    for (std::size_t e = 0; e < 3; ++e) {
      for (std::size_t c = 0; c < 3; ++c) {
        grid[c][e] += sheet.judgments[e][c] ? 1 : 0;
      }
    }
    ++counts.total_sheets;
  }
  return counts;
}

double percent_agreement(std::span<const int> rater_a,
                         std::span<const int> rater_b) {
  if (rater_a.size() != rater_b.size() || rater_a.empty()) {
    throw StatsError(StatsError::Kind::length_mismatch,
                     "rater vectors must have equal nonzero length (got " +
                         std::to_string(rater_a.size()) + " and " +
                         std::to_string(rater_b.size()) + ")");
  }
  std::size_t matches = 0;
  for (std::size_t i = 0; i < rater_a.size(); ++i) {
    if ((rater_a[i] != 0) == (rater_b[i] != 0)) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(rater_a.size());
}

std::optional<double> cohen_kappa(std::span<const int> rater_a,
                                  std::span<const int> rater_b) {
  const double p_o = percent_agreement(rater_a, rater_b);
  const double n = static_cast<double>(rater_a.size());
  double a_yes = 0, b_yes = 0;
  for (std::size_t i = 0; i < rater_a.size(); ++i) {
    a_yes += rater_a[i] != 0 ? 1 : 0;
    b_yes += rater_b[i] != 0 ? 1 : 0;
  }
  const double pa = a_yes / n;
  const double pb = b_yes / n;
  const double p_e = pa * pb + (1 - pa) * (1 - pb);
  if (p_e == 1.0) {
    // Both raters constant with the same label; only reachable with perfect
    // agreement, but keep the undefined branch for completeness.
    if (p_o == 1.0) return 1.0;
    return std::nullopt;
  }
  return (p_o - p_e) / (1 - p_e);
}

}  // namespace qapr
