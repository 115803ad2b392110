#include "qapr/repair.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qapr {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string percent_cell(const std::optional<double>& rate) {
  if (!rate) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *rate * 100.0);
  return buf;
}

std::vector<PromptConfig> mask_configs(const std::vector<PromptConfig>& configs,
                                       unsigned mask) {
  std::vector<PromptConfig> subset;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (mask >> i & 1u) subset.push_back(configs[i]);
  }
  return subset;
}

}  // namespace

std::string_view attempt_verdict_name(AttemptVerdict verdict) {
  switch (verdict) {
    case AttemptVerdict::success: return "success";
    case AttemptVerdict::test_failure: return "test_failure";
    case AttemptVerdict::malformed: return "malformed";
    case AttemptVerdict::parse_error: return "parse_error";
  }
  return "?";
}

AttemptVerdict attempt_verdict_from_name(std::string_view name) {
  for (const AttemptVerdict v :
       {AttemptVerdict::success, AttemptVerdict::test_failure,
        AttemptVerdict::malformed, AttemptVerdict::parse_error}) {
    if (attempt_verdict_name(v) == name) return v;
  }
  throw std::invalid_argument("unknown attempt verdict '" + std::string(name) +
                              "'");
}

RepairAttempt validate_response(const BugBundle& bundle, PromptConfig config,
                                int sample_index, const std::string& raw,
                                int time_limit_ms) {
  RepairAttempt attempt;
  attempt.bundle_id = bundle.id;
  attempt.config = config;
  attempt.sample_index = sample_index;

  ModelResponse response;
  try {
    response = parse_model_response(raw);
  } catch (const PromptError& e) {
    attempt.verdict = AttemptVerdict::malformed;
    attempt.detail = e.what();
    return attempt;
  } catch (const QasmError& e) {
    attempt.verdict = AttemptVerdict::parse_error;
    attempt.detail = e.what();
    return attempt;
  }
  attempt.patched_circuit = std::move(response.patched_circuit);
  attempt.explanation = std::move(response.explanation);

  const std::vector<TestOutcome> outcomes =
      run_tests(*attempt.patched_circuit, bundle.tests, time_limit_ms);
  const TestOutcome* first_bad = nullptr;
  for (const TestOutcome& outcome : outcomes) {
    if (outcome.verdict != Verdict::pass) {
      first_bad = &outcome;
      break;
    }
  }
  if (first_bad == nullptr) {
    attempt.verdict = AttemptVerdict::success;
    attempt.detail = "all tests passed";
  } else {
    attempt.verdict = AttemptVerdict::test_failure;
    attempt.detail = "test '" + first_bad->name + "': " +
                     std::string(verdict_name(first_bad->verdict)) + ": " +
                     first_bad->detail;
  }
  return attempt;
}

PromptBundle prepare_prompt(const BugBundle& bundle, PromptConfig config,
                            int time_limit_ms) {
  const std::vector<TestOutcome> baseline =
      run_tests(bundle.buggy_circuit, bundle.tests, time_limit_ms);
  if (includes_mutation(config)) {
    const std::vector<MutationRecord> records = analyze(bundle, time_limit_ms);
    return build_prompt(bundle, config, baseline, &records);
  }
  return build_prompt(bundle, config, baseline, nullptr);
}

ExperimentReport run_experiment(std::span<const BugBundle> bundles,
                                const ExperimentOptions& options,
                                Provider& provider) {
  if (bundles.empty()) {
    throw std::invalid_argument("run_experiment needs at least one bundle");
  }
  if (options.configs.empty()) {
    throw std::invalid_argument("run_experiment needs at least one configuration");
  }

  std::vector<const BugBundle*> ordered;
  ordered.reserve(bundles.size());
  for (const BugBundle& bundle : bundles) ordered.push_back(&bundle);
  std::sort(ordered.begin(), ordered.end(),
            [](const BugBundle* a, const BugBundle* b) { return a->id < b->id; });

  const bool needs_mutation =
      std::any_of(options.configs.begin(), options.configs.end(),
                  [](PromptConfig c) { return includes_mutation(c); });

  ExperimentReport report;
  report.configs = options.configs;
  report.n_samples = options.n_samples;
  report.provider_fingerprint = provider.fingerprint();

  for (const BugBundle* bundle : ordered) {
    const std::vector<TestOutcome> baseline =
        run_tests(bundle->buggy_circuit, bundle->tests, options.time_limit_ms);
    std::vector<MutationRecord> records;
    if (needs_mutation) {
      try {
        records = analyze(*bundle, options.time_limit_ms);
      } catch (const MutationError& e) {
        // Mirrors the inclusion criterion: no mutants, no experiment.
        report.excluded.push_back({bundle->id, e.what()});
        continue;
      }
    }
    report.bundle_ids.push_back(bundle->id);
    (bundle->symptom == Symptom::WO ? report.wo_ids : report.te_ids)
        .push_back(bundle->id);

    for (const PromptConfig config : options.configs) {
      const PromptBundle prompt =
          build_prompt(*bundle, config, baseline,
                       includes_mutation(config) ? &records : nullptr);
      const GenerationBatch batch = generate(prompt, options.n_samples, provider);
      for (int i = 0; i < options.n_samples; ++i) {
        report.attempts.push_back(validate_response(
            *bundle, config, i, batch.samples[static_cast<std::size_t>(i)],
            options.time_limit_ms));
      }
    }
  }

  for (const PromptConfig config : options.configs) {
    std::vector<RepairAttempt> config_attempts;
    for (const RepairAttempt& attempt : report.attempts) {
      if (attempt.config == config) config_attempts.push_back(attempt);
    }
    std::set<std::string>& fixed = report.fixed_sets[config];
    for (const RepairAttempt& attempt : config_attempts) {
      if (attempt.verdict == AttemptVerdict::success) {
        fixed.insert(attempt.bundle_id);
      }
    }
    if (!report.bundle_ids.empty()) {
      report.per_config_total_rate[config] =
          success_rate(config_attempts, report.bundle_ids);
    }
    report.per_config_wo_rate[config] =
        report.wo_ids.empty()
            ? std::nullopt
            : std::optional<double>(success_rate(config_attempts, report.wo_ids));
    report.per_config_te_rate[config] =
        report.te_ids.empty()
            ? std::nullopt
            : std::optional<double>(success_rate(config_attempts, report.te_ids));
  }
  return report;
}

double success_rate(std::span<const RepairAttempt> attempts,
                    std::span<const std::string> bundle_subset) {
  if (bundle_subset.empty()) {
    throw StatsError(StatsError::Kind::empty_subset,
                     "success_rate over an empty bundle subset");
  }
  std::set<std::string> fixed;
  for (const RepairAttempt& attempt : attempts) {
    if (attempt.verdict == AttemptVerdict::success) fixed.insert(attempt.bundle_id);
  }
  int hits = 0;
  for (const std::string& id : bundle_subset) {
    if (fixed.contains(id)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(bundle_subset.size());
}

std::string region_key(std::span<const PromptConfig> configs) {
  if (configs.empty()) return "none";
  std::string key;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (i > 0) key += "&";
    key += config_tag(configs[i]);
  }
  return key;
}

std::map<std::string, std::set<std::string>> fixed_set_breakdown(
    const ExperimentReport& report) {
  const std::vector<PromptConfig>& configs = report.configs;
  const unsigned n_regions = 1u << configs.size();

  std::map<std::string, std::set<std::string>> regions;
  for (unsigned mask = 0; mask < n_regions; ++mask) {
    const auto subset = mask_configs(configs, mask);
    regions[region_key(subset)];
  }
  for (const std::string& id : report.bundle_ids) {
    unsigned mask = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const auto it = report.fixed_sets.find(configs[i]);
      if (it != report.fixed_sets.end() && it->second.contains(id)) {
        mask |= 1u << i;
      }
    }
    regions[region_key(mask_configs(configs, mask))].insert(id);
  }
  return regions;
}

std::string report_to_json(const ExperimentReport& report) {
  ordered_json j;
  j["schema"] = "qapr-report/v1";
  j["provider"] = report.provider_fingerprint;
  j["n_samples"] = report.n_samples;

  ordered_json configs = ordered_json::array();
  for (const PromptConfig c : report.configs) {
    configs.push_back(std::string(config_tag(c)));
  }
  j["configs"] = std::move(configs);

  ordered_json bundles;
  bundles["included"] = report.bundle_ids;
  bundles["wo"] = report.wo_ids;
  bundles["te"] = report.te_ids;
  ordered_json excluded = ordered_json::array();
  for (const ExcludedBundle& e : report.excluded) {
    excluded.push_back({{"id", e.id}, {"reason", e.reason}});
  }
  bundles["excluded"] = std::move(excluded);
  j["bundles"] = std::move(bundles);

  ordered_json rates;
  for (const PromptConfig c : report.configs) {
    ordered_json row;
    const auto total = report.per_config_total_rate.find(c);
    row["total"] = total == report.per_config_total_rate.end()
                       ? ordered_json()
                       : ordered_json(total->second);
    const auto wo = report.per_config_wo_rate.find(c);
    row["wo"] = (wo == report.per_config_wo_rate.end() || !wo->second)
                    ? ordered_json()
                    : ordered_json(*wo->second);
    const auto te = report.per_config_te_rate.find(c);
    row["te"] = (te == report.per_config_te_rate.end() || !te->second)
                    ? ordered_json()
                    : ordered_json(*te->second);
    rates[std::string(config_tag(c))] = std::move(row);
  }
  j["rates"] = std::move(rates);

  ordered_json fixed_sets;
  for (const PromptConfig c : report.configs) {
    const auto it = report.fixed_sets.find(c);
    std::vector<std::string> ids;
    if (it != report.fixed_sets.end()) ids.assign(it->second.begin(), it->second.end());
    fixed_sets[std::string(config_tag(c))] = ids;
  }
  j["fixed_sets"] = std::move(fixed_sets);

  const auto regions = fixed_set_breakdown(report);
  ordered_json region_json;
  for (unsigned mask = 0; mask < (1u << report.configs.size()); ++mask) {
    const std::string key = region_key(mask_configs(report.configs, mask));
    const auto it = regions.find(key);
    std::vector<std::string> ids;
    if (it != regions.end()) ids.assign(it->second.begin(), it->second.end());
    region_json[key] = ids;
  }
  j["regions"] = std::move(region_json);

  ordered_json attempts = ordered_json::array();
  for (const RepairAttempt& attempt : report.attempts) {
    ordered_json a;
    a["bundle_id"] = attempt.bundle_id;
    a["config"] = std::string(config_tag(attempt.config));
    a["sample_index"] = attempt.sample_index;
    a["verdict"] = std::string(attempt_verdict_name(attempt.verdict));
    a["detail"] = attempt.detail;
    a["patched_qasm"] = attempt.patched_circuit
                            ? ordered_json(print_qasm(*attempt.patched_circuit))
                            : ordered_json();
    if (attempt.explanation) {
      a["explanation"] = {{"position", attempt.explanation->position},
                          {"cause", attempt.explanation->cause},
                          {"change", attempt.explanation->change}};
    } else {
      a["explanation"] = ordered_json();
    }
    attempts.push_back(std::move(a));
  }
  j["attempts"] = std::move(attempts);

  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentReport report;
  report.provider_fingerprint = j.at("provider").get<std::string>();
  report.n_samples = j.at("n_samples").get<int>();
  for (const auto& tag : j.at("configs")) {
    report.configs.push_back(parse_config_tag(tag.get<std::string>()));
  }
  const auto& bundles = j.at("bundles");
  report.bundle_ids = bundles.at("included").get<std::vector<std::string>>();
  report.wo_ids = bundles.at("wo").get<std::vector<std::string>>();
  report.te_ids = bundles.at("te").get<std::vector<std::string>>();
  for (const auto& e : bundles.at("excluded")) {
    report.excluded.push_back(
        {e.at("id").get<std::string>(), e.at("reason").get<std::string>()});
  }
  for (const PromptConfig c : report.configs) {
    const auto& row = j.at("rates").at(std::string(config_tag(c)));
    if (!row.at("total").is_null()) {
      report.per_config_total_rate[c] = row.at("total").get<double>();
    }
    report.per_config_wo_rate[c] =
        row.at("wo").is_null() ? std::nullopt
                               : std::optional<double>(row.at("wo").get<double>());
    report.per_config_te_rate[c] =
        row.at("te").is_null() ? std::nullopt
                               : std::optional<double>(row.at("te").get<double>());
    const auto ids = j.at("fixed_sets")
                         .at(std::string(config_tag(c)))
                         .get<std::vector<std::string>>();
    report.fixed_sets[c] = std::set<std::string>(ids.begin(), ids.end());
  }
  for (const auto& a : j.at("attempts")) {
    RepairAttempt attempt;
    attempt.bundle_id = a.at("bundle_id").get<std::string>();
    attempt.config = parse_config_tag(a.at("config").get<std::string>());
    attempt.sample_index = a.at("sample_index").get<int>();
    attempt.verdict = attempt_verdict_from_name(a.at("verdict").get<std::string>());
    attempt.detail = a.at("detail").get<std::string>();
    if (!a.at("patched_qasm").is_null()) {
      attempt.patched_circuit = parse_qasm(a.at("patched_qasm").get<std::string>());
    }
    if (!a.at("explanation").is_null()) {
      const auto& e = a.at("explanation");
      attempt.explanation = Explanation{e.at("position").get<std::string>(),
                                        e.at("cause").get<std::string>(),
                                        e.at("change").get<std::string>()};
    }
    report.attempts.push_back(std::move(attempt));
  }
  return report;
}

void write_report(const ExperimentReport& report,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw GatewayError(GatewayError::Kind::io_failure,
                       "cannot open report file " + path.string());
  }
  out << report_to_json(report);
}

ExperimentReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw GatewayError(GatewayError::Kind::io_failure,
                       "cannot open report file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return report_from_json(buffer.str());
}

std::string render_rate_table(const ExperimentReport& report) {
  std::string out;
  out += "Repair success rates by prompt configuration and bug type\n";
  out += "(success: at least one of " + std::to_string(report.n_samples) +
         " attempts passes all tests)\n\n";
  char line[128];
  std::snprintf(line, sizeof line, "%-8s %10s %8s %8s\n", "prompt", "total[%]",
                "WO[%]", "TE[%]");
  out += line;
  for (const PromptConfig c : report.configs) {
    std::optional<double> total;
    const auto it = report.per_config_total_rate.find(c);
    if (it != report.per_config_total_rate.end()) total = it->second;
    const auto wo = report.per_config_wo_rate.find(c);
    const auto te = report.per_config_te_rate.find(c);
    std::snprintf(line, sizeof line, "%-8s %10s %8s %8s\n",
                  std::string(config_tag(c)).c_str(), percent_cell(total).c_str(),
                  percent_cell(wo == report.per_config_wo_rate.end()
                                   ? std::nullopt
                                   : wo->second)
                      .c_str(),
                  percent_cell(te == report.per_config_te_rate.end()
                                   ? std::nullopt
                                   : te->second)
                      .c_str());
    out += line;
  }
  if (!report.excluded.empty()) {
    out += "\nexcluded bundles:\n";
    for (const ExcludedBundle& e : report.excluded) {
      out += "  " + e.id + ": " + e.reason + "\n";
    }
  }
  return out;
}

std::string render_breakdown(const ExperimentReport& report) {
  const auto regions = fixed_set_breakdown(report);
  std::string out = "Successful repairs by prompt configuration\n\n";
  const unsigned n_regions = 1u << report.configs.size();
  for (unsigned mask = 0; mask < n_regions; ++mask) {
    const auto subset = mask_configs(report.configs, mask);
    const std::string key = region_key(subset);
    const auto it = regions.find(key);
    const std::set<std::string>& ids =
        it == regions.end() ? std::set<std::string>{} : it->second;
    std::string label;
    if (mask == 0) {
      label = "fixed by no configuration";
    } else if (mask == n_regions - 1) {
      label = "fixed by every configuration";
    } else if (subset.size() == 1) {
      label = "only " + std::string(config_tag(subset[0]));
    } else {
      label = "exactly " + key;
    }
    out += "  " + label + " (" + std::to_string(ids.size()) + ")";
    if (!ids.empty()) {
      out += ":";
      for (const std::string& id : ids) out += " " + id;
    }
    out += "\n";
  }
  for (const PromptConfig c : report.configs) {
    const auto it = report.fixed_sets.find(c);
    const std::size_t n = it == report.fixed_sets.end() ? 0 : it->second.size();
    out += "  total fixed by " + std::string(config_tag(c)) + ": " +
           std::to_string(n) + " of " + std::to_string(report.bundle_ids.size()) +
           "\n";
  }
  return out;
}

}  // namespace qapr
