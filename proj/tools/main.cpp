// qapr: mutation-analysis-assisted repair experiments for OpenQASM 2.0
// circuits. See README.md for the bundle layout and subcommand overview.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qapr/bundle_io.hpp"
#include "qapr/gateway.hpp"
#include "qapr/repair.hpp"
#include "qapr/stats.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  int shots = qapr::kDefaultShots;
  std::uint64_t seed = qapr::kDefaultSeed;
  int timeout_ms = qapr::kDefaultTimeLimitMs;
};

qapr::BundleLoadOptions load_options(const CommonOptions& common) {
  qapr::BundleLoadOptions options;
  options.default_shots = common.shots;
  options.default_seed = common.seed;
  return options;
}

std::vector<qapr::PromptConfig> parse_configs(const std::string& csv) {
  std::vector<qapr::PromptConfig> configs;
  std::stringstream stream(csv);
  std::string tag;
  while (std::getline(stream, tag, ',')) {
    if (!tag.empty()) configs.push_back(qapr::parse_config_tag(tag));
  }
  if (configs.empty()) {
    throw qapr::PromptError(qapr::PromptError::Kind::unknown_config,
                            "no prompt configuration given");
  }
  return configs;
}

void write_or_print(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file " + out_path);
  }
  out << text;
}

std::array<std::array<int, 3>, 3> parse_judgments(const std::string& digits) {
  if (digits.size() != 9 ||
      digits.find_first_not_of("01") != std::string::npos) {
    throw std::runtime_error(
        "--judgments wants nine 0/1 digits, element-major: Position then Cause "
        "then Change, each as Correctness,Completeness,Complexity");
  }
  std::array<std::array<int, 3>, 3> judgments{};
  for (std::size_t i = 0; i < 9; ++i) {
    judgments[i / 3][i % 3] = digits[i] - '0';
  }
  return judgments;
}

std::vector<int> parse_bits(const std::string& digits) {
  std::vector<int> bits;
  for (const char c : digits) {
    if (c != '0' && c != '1') {
      throw std::runtime_error("binary vectors must contain only 0 and 1");
    }
    bits.push_back(c - '0');
  }
  return bits;
}

// Flattens both raters' sheets over their shared (bundle, config) keys into
// aligned binary vectors, cell order fixed.
std::pair<std::vector<int>, std::vector<int>> align_raters(
    const std::vector<qapr::RubricSheet>& sheets, const std::string& rater_a,
    const std::string& rater_b) {
  std::map<std::pair<std::string, qapr::PromptConfig>, const qapr::RubricSheet*>
      by_key_a, by_key_b;
  for (const auto& sheet : sheets) {
    if (sheet.rater == rater_a) by_key_a[{sheet.bundle_id, sheet.config}] = &sheet;
    if (sheet.rater == rater_b) by_key_b[{sheet.bundle_id, sheet.config}] = &sheet;
  }
  std::vector<int> a, b;
  for (const auto& [key, sheet_a] : by_key_a) {
    const auto it = by_key_b.find(key);
    if (it == by_key_b.end()) continue;
    for (std::size_t e = 0; e < 3; ++e) {
      for (std::size_t c = 0; c < 3; ++c) {
        a.push_back(sheet_a->judgments[e][c]);
        b.push_back(it->second->judgments[e][c]);
      }
    }
  }
  return {std::move(a), std::move(b)};
}

std::string render_rubric_table(const qapr::RubricCounts& counts) {
  std::string out = "Explanation quality (consensus yes-counts per cell; "
                    "Complexity counts unnecessary complexity, lower is "
                    "better)\n\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-13s %-9s %6s %6s %6s %6s\n", "criterion",
                "element", "S", "S+D", "S+M", "S+D+M");
  out += line;
  for (const auto criterion :
       {qapr::RubricCriterion::correctness, qapr::RubricCriterion::completeness,
        qapr::RubricCriterion::complexity}) {
    for (const auto element :
         {qapr::RubricElement::position, qapr::RubricElement::cause,
          qapr::RubricElement::change}) {
      std::array<int, 4> cells{};
      for (std::size_t i = 0; i < qapr::kAllConfigs.size(); ++i) {
        const auto it = counts.by_config.find(qapr::kAllConfigs[i]);
        cells[i] = it == counts.by_config.end()
                       ? 0
                       : it->second[static_cast<std::size_t>(criterion)]
                                   [static_cast<std::size_t>(element)];
      }
      std::snprintf(line, sizeof line, "%-13s %-9s %6d %6d %6d %6d\n",
                    std::string(qapr::criterion_name(criterion)).c_str(),
                    std::string(qapr::element_name(element)).c_str(), cells[0],
                    cells[1], cells[2], cells[3]);
      out += line;
    }
  }
  return out;
}

int run_mutate(const std::string& bundle_dir, const std::string& qasm_path,
               const std::string& out_dir, const CommonOptions& common) {
  qapr::Circuit circuit;
  if (!qasm_path.empty()) {
    std::ifstream in(qasm_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + qasm_path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    circuit = qapr::parse_qasm(buffer.str());
  } else {
    circuit = qapr::load_bundle(bundle_dir, load_options(common)).buggy_circuit;
  }
  const auto mutants = qapr::enumerate_mutants(circuit);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    for (const auto& mutant : mutants) {
      std::ofstream out(fs::path(out_dir) / (mutant.id + ".qasm"),
                        std::ios::binary);
      out << qapr::print_qasm(mutant.circuit);
    }
    std::cout << "wrote " << mutants.size() << " mutants to " << out_dir << "\n";
    return 0;
  }
  for (const auto& mutant : mutants) {
    nlohmann::ordered_json j;
    j["id"] = mutant.id;
    j["operator"] = std::string(qapr::mutation_op_name(mutant.op));
    j["line_number"] = mutant.line_number;
    j["variant"] = mutant.variant;
    j["qasm"] = qapr::print_qasm(mutant.circuit);
    std::cout << j.dump() << "\n";
  }
  return 0;
}

int run_analyze(const std::string& bundle_dir, const std::string& out_path,
                const CommonOptions& common) {
  const qapr::BugBundle bundle =
      qapr::load_bundle(bundle_dir, load_options(common));
  qapr::validate_bundle(bundle, common.timeout_ms);
  const auto records = qapr::analyze(bundle, common.timeout_ms);
  write_or_print(qapr::serialize_records(records), out_path);
  return 0;
}

int run_prompt(const std::string& bundle_dir, const std::string& config_tag,
               bool as_json, const CommonOptions& common) {
  const qapr::BugBundle bundle =
      qapr::load_bundle(bundle_dir, load_options(common));
  qapr::validate_bundle(bundle, common.timeout_ms);
  const qapr::PromptConfig config = qapr::parse_config_tag(config_tag);
  const qapr::PromptBundle prompt =
      qapr::prepare_prompt(bundle, config, common.timeout_ms);
  if (as_json) {
    nlohmann::ordered_json j;
    j["bundle_id"] = prompt.bundle_id;
    j["config"] = std::string(qapr::config_tag(prompt.config));
    j["system_prompt"] = prompt.system_prompt;
    j["user_prompt"] = prompt.user_prompt;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "=== SYSTEM PROMPT ===\n"
              << prompt.system_prompt << "\n=== USER PROMPT (" << config_tag
              << ") ===\n"
              << prompt.user_prompt;
  }
  return 0;
}

int run_repair(const std::string& bundles_dir, const std::string& provider_name,
               const std::string& replay_dir, const std::string& endpoint,
               const std::string& model, int samples,
               const std::string& configs_csv, const std::string& out_path,
               const std::string& record_dir, const CommonOptions& common) {
  const std::vector<qapr::BugBundle> bundles =
      qapr::load_bundle_set(bundles_dir, load_options(common));
  for (const auto& bundle : bundles) {
    qapr::validate_bundle(bundle, common.timeout_ms);
  }

  qapr::ProviderSpec spec;
  spec.kind = qapr::provider_kind_from_name(provider_name);
  spec.endpoint = endpoint;
  spec.model_name = model;
  spec.replay_path = replay_dir;
  const auto provider = qapr::make_provider(spec, bundles);

  qapr::ExperimentOptions options;
  options.configs = parse_configs(configs_csv);
  options.n_samples = samples;
  options.time_limit_ms = common.timeout_ms;

  qapr::ExperimentReport report;
  if (record_dir.empty()) {
    report = qapr::run_experiment(bundles, options, *provider);
  } else {
    // Recording wrapper: capture every raw response into the replay store
    // while the experiment runs.
    class RecordingProvider final : public qapr::Provider {
     public:
      RecordingProvider(qapr::Provider& inner, fs::path root)
          : inner_(inner), root_(std::move(root)) {}
      std::string sample(const qapr::PromptBundle& prompt,
                         int sample_index) override {
        const std::string raw = inner_.sample(prompt, sample_index);
        const fs::path dir =
            root_ / prompt.bundle_id / std::string(qapr::config_tag(prompt.config));
        fs::create_directories(dir);
        const fs::path file = dir / (std::to_string(sample_index) + ".txt");
        if (fs::exists(file)) {
          throw qapr::GatewayError(qapr::GatewayError::Kind::duplicate_key,
                                   "replay entry already recorded at " +
                                       file.string());
        }
        std::ofstream out(file, std::ios::binary);
        out << raw;
        return raw;
      }
      std::string fingerprint() const override { return inner_.fingerprint(); }
      bool is_deterministic() const override {
        return inner_.is_deterministic();
      }

     private:
      qapr::Provider& inner_;
      fs::path root_;
    } recording(*provider, record_dir);
    report = qapr::run_experiment(bundles, options, recording);
  }

  std::cout << qapr::render_rate_table(report) << "\n"
            << qapr::render_breakdown(report);
  if (!out_path.empty()) {
    qapr::write_report(report, out_path);
    std::cout << "\nreport written to " << out_path << "\n";
  }
  return 0;
}

int run_report(const std::string& in_path) {
  const qapr::ExperimentReport report = qapr::read_report(in_path);
  std::cout << qapr::render_rate_table(report) << "\n"
            << qapr::render_breakdown(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mutation-analysis-assisted repair experiments for OpenQASM 2.0 "
               "circuits"};
  app.require_subcommand(1);

  CommonOptions common;

  // --- mutate ---
  auto* mutate = app.add_subcommand("mutate", "enumerate mutants of a circuit");
  std::string mutate_bundle, mutate_qasm, mutate_out;
  mutate->add_option("--bundle", mutate_bundle, "bundle directory");
  mutate->add_option("--qasm", mutate_qasm, "bare .qasm file instead of a bundle");
  mutate->add_option("--out", mutate_out, "write mutant .qasm files here");

  // --- analyze ---
  auto* analyze = app.add_subcommand("analyze", "emit mutation records");
  std::string analyze_bundle, analyze_out;
  analyze->add_option("--bundle", analyze_bundle, "bundle directory")->required();
  analyze->add_option("--out", analyze_out, "record file (default: stdout)");
  analyze->add_option("--timeout-ms", common.timeout_ms, "per-test time limit");
  analyze->add_option("--shots", common.shots, "default shots for tests");
  analyze->add_option("--seed", common.seed, "default seed for tests");

  // --- prompt ---
  auto* prompt = app.add_subcommand("prompt", "emit a prompt bundle");
  std::string prompt_bundle, prompt_config = "S+D+M";
  bool prompt_json = false;
  prompt->add_option("--bundle", prompt_bundle, "bundle directory")->required();
  prompt->add_option("--config", prompt_config, "S, S+D, S+M or S+D+M");
  prompt->add_flag("--json", prompt_json, "emit JSON instead of plain text");
  prompt->add_option("--timeout-ms", common.timeout_ms, "per-test time limit");
  prompt->add_option("--shots", common.shots, "default shots for tests");
  prompt->add_option("--seed", common.seed, "default seed for tests");

  // --- repair ---
  auto* repair = app.add_subcommand("repair", "run the full repair pipeline");
  std::string repair_bundles, repair_provider = "noop", repair_replay;
  std::string repair_endpoint, repair_model, repair_out, repair_record;
  std::string repair_configs = "S,S+D,S+M,S+D+M";
  int repair_samples = 5;
  repair->add_option("--bundles", repair_bundles, "directory of bundle directories")
      ->required();
  repair->add_option("--provider", repair_provider,
                     "live_http | replay | perfect_oracle | noop");
  repair->add_option("--replay", repair_replay, "replay store root");
  repair->add_option("--endpoint", repair_endpoint, "live_http base URL");
  repair->add_option("--model", repair_model, "live_http model name");
  repair->add_option("--samples", repair_samples, "responses per prompt");
  repair->add_option("--configs", repair_configs, "comma-separated config tags");
  repair->add_option("--out", repair_out, "report JSON path");
  repair->add_option("--record", repair_record,
                     "record raw responses into this replay store");
  repair->add_option("--timeout-ms", common.timeout_ms, "per-test time limit");
  repair->add_option("--shots", common.shots, "default shots for tests");
  repair->add_option("--seed", common.seed, "default seed for tests");

  // --- report ---
  auto* report = app.add_subcommand("report", "print tables from a report file");
  std::string report_in;
  report->add_option("--in", report_in, "report JSON path")->required();

  // --- rubric ---
  auto* rubric = app.add_subcommand("rubric", "record and aggregate judgments");
  rubric->require_subcommand(1);
  auto* rubric_add = rubric->add_subcommand("add", "append one rubric sheet");
  std::string rub_store, rub_bundle, rub_config = "S", rub_rater, rub_judgments;
  rubric_add->add_option("--store", rub_store, "sheet store (JSON lines)")
      ->required();
  rubric_add->add_option("--bundle", rub_bundle, "bundle id")->required();
  rubric_add->add_option("--config", rub_config, "prompt configuration tag");
  rubric_add->add_option("--rater", rub_rater, "rater name (use 'consensus' for "
                                               "agreed judgments)")
      ->required();
  rubric_add
      ->add_option("--judgments", rub_judgments,
                   "nine 0/1 digits, element-major (Position, Cause, Change) x "
                   "(Correctness, Completeness, Complexity)")
      ->required();
  auto* rubric_table =
      rubric->add_subcommand("table", "aggregate consensus sheets");
  std::string rub_table_store, rub_table_rater = "consensus";
  rubric_table->add_option("--store", rub_table_store, "sheet store")->required();
  rubric_table->add_option("--rater", rub_table_rater,
                           "which rater's sheets to aggregate");
  auto* rubric_diff =
      rubric->add_subcommand("disagreements", "list cells where raters differ");
  std::string rub_diff_store, rub_diff_a, rub_diff_b;
  rubric_diff->add_option("--store", rub_diff_store, "sheet store")->required();
  rubric_diff->add_option("--rater-a", rub_diff_a, "first rater")->required();
  rubric_diff->add_option("--rater-b", rub_diff_b, "second rater")->required();

  // --- kappa ---
  auto* kappa = app.add_subcommand("kappa", "inter-rater agreement statistics");
  std::string kappa_store, kappa_a, kappa_b, kappa_vec_a, kappa_vec_b;
  kappa->add_option("--store", kappa_store, "sheet store");
  kappa->add_option("--rater-a", kappa_a, "first rater");
  kappa->add_option("--rater-b", kappa_b, "second rater");
  kappa->add_option("--a", kappa_vec_a, "first binary vector, e.g. 110010");
  kappa->add_option("--b", kappa_vec_b, "second binary vector");

  CLI11_PARSE(app, argc, argv);

  try {
    if (mutate->parsed()) {
      if (mutate_bundle.empty() && mutate_qasm.empty()) {
        std::cerr << "mutate needs --bundle or --qasm\n";
        return 2;
      }
      return run_mutate(mutate_bundle, mutate_qasm, mutate_out, common);
    }
    if (analyze->parsed()) {
      return run_analyze(analyze_bundle, analyze_out, common);
    }
    if (prompt->parsed()) {
      return run_prompt(prompt_bundle, prompt_config, prompt_json, common);
    }
    if (repair->parsed()) {
      return run_repair(repair_bundles, repair_provider, repair_replay,
                        repair_endpoint, repair_model, repair_samples,
                        repair_configs, repair_out, repair_record, common);
    }
    if (report->parsed()) {
      return run_report(report_in);
    }
    if (rubric->parsed()) {
      if (rubric_add->parsed()) {
        qapr::RubricSheet sheet;
        sheet.bundle_id = rub_bundle;
        sheet.config = qapr::parse_config_tag(rub_config);
        sheet.rater = rub_rater;
        sheet.judgments = parse_judgments(rub_judgments);
        qapr::append_sheet(sheet, rub_store);
        std::cout << "recorded sheet for (" << rub_bundle << ", " << rub_config
                  << ") by " << rub_rater << "\n";
        return 0;
      }
      if (rubric_table->parsed()) {
        const auto sheets = qapr::load_sheet_store(rub_table_store);
        std::vector<qapr::RubricSheet> selected;
        for (const auto& sheet : sheets) {
          if (sheet.rater == rub_table_rater) selected.push_back(sheet);
        }
        const auto counts = qapr::aggregate_rubrics(selected);
        std::cout << render_rubric_table(counts);
        std::cout << "\nsheets aggregated: " << counts.total_sheets << "\n";
        return 0;
      }
      if (rubric_diff->parsed()) {
        const auto sheets = qapr::load_sheet_store(rub_diff_store);
        std::map<std::pair<std::string, qapr::PromptConfig>,
                 const qapr::RubricSheet*>
            a_sheets, b_sheets;
        for (const auto& sheet : sheets) {
          if (sheet.rater == rub_diff_a) {
            a_sheets[{sheet.bundle_id, sheet.config}] = &sheet;
          }
          if (sheet.rater == rub_diff_b) {
            b_sheets[{sheet.bundle_id, sheet.config}] = &sheet;
          }
        }
        int differing = 0;
        for (const auto& [key, sheet_a] : a_sheets) {
          const auto it = b_sheets.find(key);
          if (it == b_sheets.end()) continue;
          for (std::size_t e = 0; e < 3; ++e) {
            for (std::size_t c = 0; c < 3; ++c) {
              if (sheet_a->judgments[e][c] != it->second->judgments[e][c]) {
                ++differing;
                std::cout << key.first << " " << qapr::config_tag(key.second)
                          << " "
                          << qapr::element_name(static_cast<qapr::RubricElement>(e))
                          << "/"
                          << qapr::criterion_name(
                                 static_cast<qapr::RubricCriterion>(c))
                          << ": " << rub_diff_a << "="
                          << sheet_a->judgments[e][c] << " " << rub_diff_b << "="
                          << it->second->judgments[e][c] << "\n";
              }
            }
          }
        }
        std::cout << differing << " disagreement(s); resolve each with "
                  << "'qapr rubric add --rater consensus'\n";
        return 0;
      }
    }
    if (kappa->parsed()) {
      std::vector<int> a, b;
      if (!kappa_vec_a.empty() || !kappa_vec_b.empty()) {
        a = parse_bits(kappa_vec_a);
        b = parse_bits(kappa_vec_b);
      } else if (!kappa_store.empty()) {
        if (kappa_a.empty() || kappa_b.empty()) {
          std::cerr << "kappa --store needs --rater-a and --rater-b\n";
          return 2;
        }
        const auto sheets = qapr::load_sheet_store(kappa_store);
        std::tie(a, b) = align_raters(sheets, kappa_a, kappa_b);
      } else {
        std::cerr << "kappa needs either --store or --a/--b vectors\n";
        return 2;
      }
      const double agreement = qapr::percent_agreement(a, b);
      std::cout << "evaluations: " << a.size() << "\n";
      char buf[64];
      std::snprintf(buf, sizeof buf, "percent agreement: %.4f\n", agreement);
      std::cout << buf;
      const auto kappa_value = qapr::cohen_kappa(a, b);
      if (kappa_value) {
        std::snprintf(buf, sizeof buf, "cohen kappa: %.4f\n", *kappa_value);
        std::cout << buf;
      } else {
        std::cout << "cohen kappa: undefined (expected agreement is 1 with "
                     "imperfect observed agreement)\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
